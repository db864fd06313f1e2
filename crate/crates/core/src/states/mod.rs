//! Density matrices, spectra and the criteria report.

pub mod fixtures;
pub mod io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, Complex64, ComplexMatrix};

/// Verdict band around a region boundary: `|margin| ≤ B_TOL` is "boundary".
pub const B_TOL: f64 = 1e-9;

/// Largest trace deviation that is silently renormalized.
pub const TRACE_TOL: f64 = 1e-6;

/// Eigenvalues below `-PSD_TOL` make a matrix an invalid state; eigenvalues
/// in `[-PSD_TOL, 0)` are clamped.
pub const PSD_TOL: f64 = 1e-8;

// Negative eigenvalues smaller than this are left in place; larger ones
// trigger a clamp-and-rebuild of the matrix.
const REBUILD_TOL: f64 = 1e-12;

/// A validated bipartite density matrix on `C^{d_A} ⊗ C^{d_B}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: (usize, usize),
}

impl DensityMatrix {
    /// Validates `matrix` as a state. Near-Hermitian input is symmetrized and
    /// a trace within [`TRACE_TOL`] of one is renormalized.
    pub fn new(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 {
            return Err(Error::Domain(
                "subsystem dimensions must be positive".into(),
            ));
        }
        if !matrix.is_square() {
            return Err(Error::NonSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let d = da * db;
        if matrix.rows() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: matrix.rows(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > crate::linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if !trace.is_finite() || (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace });
        }
        let matrix = matrix.scale(1.0 / trace);

        let eig = eig_hermitian(&matrix)?;
        let min = eig.min_value();
        if min < -PSD_TOL {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        let matrix = if min < -REBUILD_TOL {
            let clamped: Vec<f64> = eig.values.iter().map(|&x| x.max(0.0)).collect();
            let total: f64 = clamped.iter().sum();
            eig.reconstruct_with(&clamped)
                .hermitian_part()
                .scale(1.0 / total)
        } else {
            matrix
        };
        Ok(Self { matrix, dims })
    }

    /// Pure state `|ψ⟩⟨ψ|`; `psi` is normalized here.
    pub fn pure(psi: &[Complex64], dims: (usize, usize)) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("state vector has zero norm".into()));
        }
        let unit: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&unit), dims)
    }

    pub fn maximally_mixed(dims: (usize, usize)) -> Self {
        let d = dims.0 * dims.1;
        assert!(d > 0, "dimensions must be positive");
        Self {
            matrix: ComplexMatrix::identity(d).scale(1.0 / d as f64),
            dims,
        }
    }

    /// Builds the diagonal state `diag(λ)` in the product basis.
    pub fn diagonal(values: &[f64], dims: (usize, usize)) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(values), dims)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    pub fn is_two_qubit(&self) -> bool {
        self.dims == (2, 2)
    }

    pub fn spectrum(&self) -> Spectrum {
        spectrum_of(self)
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        purity(self)
    }

    /// `s·self + (1 − s)·other`
    pub fn mix(&self, other: &Self, s: f64) -> Result<Self> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::Domain(format!("mixing weight {s} outside [0, 1]")));
        }
        Self::new(
            &self.matrix.scale(s) + &other.matrix.scale(1.0 - s),
            self.dims,
        )
    }

    /// `U ρ U†`
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(self.matrix.conjugate_by(u), self.dims)
    }

    /// Frobenius distance between the underlying matrices.
    pub fn distance(&self, other: &Self) -> f64 {
        self.matrix.distance(&other.matrix)
    }
}

pub fn make_density(matrix: ComplexMatrix, dims: (usize, usize)) -> Result<DensityMatrix> {
    DensityMatrix::new(matrix, dims)
}

pub fn maximally_mixed(dims: (usize, usize)) -> DensityMatrix {
    DensityMatrix::maximally_mixed(dims)
}

pub fn spectrum_of(rho: &DensityMatrix) -> Spectrum {
    let values = eig_hermitian(rho.matrix())
        .expect("validated state is Hermitian")
        .values;
    Spectrum::new(values).expect("validated state has a valid spectrum")
}

/// `tr ρ² = ‖ρ‖_F²` for Hermitian ρ.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().frobenius_norm().powi(2)
}

/// Nonincreasing probability vector of repeated eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts, clamps entries in `[-PSD_TOL, 0)` to zero and renormalizes.
    /// Sums further than [`TRACE_TOL`] from one are rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidSpectrum("empty spectrum".into()));
        }
        if let Some(bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidSpectrum(format!("non-finite entry {bad}")));
        }
        if let Some(neg) = values.iter().find(|&&x| x < -PSD_TOL) {
            return Err(Error::InvalidSpectrum(format!("negative entry {neg}")));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        for x in values.iter_mut() {
            *x = x.max(0.0);
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace: total });
        }
        for x in values.iter_mut() {
            *x /= total;
        }
        Ok(Self { values })
    }

    /// The flat spectrum `e^(j) = (1/j, …, 1/j, 0, …, 0)` of length `d`.
    pub fn flat(j: usize, d: usize) -> Result<Self> {
        if j == 0 || j > d {
            return Err(Error::Domain(format!(
                "flat spectrum needs 1 <= j <= d, got j={j}, d={d}"
            )));
        }
        Ok(Self {
            values: (0..d)
                .map(|k| if k < j { 1.0 / j as f64 } else { 0.0 })
                .collect(),
        })
    }

    pub fn uniform(d: usize) -> Self {
        Self::flat(d, d).expect("d >= 1")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `λ_k` with the one-based index used throughout the literature.
    pub fn lambda(&self, k: usize) -> f64 {
        self.values[k - 1]
    }

    pub fn purity(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    /// Entrywise convex combination `s·self + (1 − s)·other`.
    pub fn mix(&self, other: &Self, s: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Self::new(
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| s * a + (1.0 - s) * b)
                .collect(),
        )
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    In,
    Out,
    Boundary,
    NotApplicable,
}

impl Verdict {
    /// Classifies a margin normalized to "≤ 0 inside".
    pub fn from_margin(margin: f64) -> Self {
        if margin < -B_TOL {
            Verdict::In
        } else if margin > B_TOL {
            Verdict::Out
        } else {
            Verdict::Boundary
        }
    }

    /// In or on the boundary of a closed region.
    pub fn is_inside_closure(self) -> bool {
        matches!(self, Verdict::In | Verdict::Boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRecord {
    pub name: String,
    pub verdict: Verdict,
    pub margin: Option<f64>,
}

impl CriterionRecord {
    pub fn from_margin(name: impl Into<String>, margin: f64) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::from_margin(margin),
            margin: Some(margin),
        }
    }

    pub fn not_applicable(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            verdict: Verdict::NotApplicable,
            margin: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub dims: Vec<usize>,
    pub spectrum: Vec<f64>,
    pub purity: f64,
    pub criteria: Vec<CriterionRecord>,
}

impl CriteriaReport {
    pub fn get(&self, name: &str) -> Option<&CriterionRecord> {
        self.criteria.iter().find(|c| c.name == name)
    }
}
