//! Two-qubit Wootters operator and the exact modulus of separability for
//! states with spectrum `(1/2, 1/2, 0, 0)`.
//!
//! All conjugations are entrywise in the computational product basis, which
//! is real. `S = σ_y ⊗ σ_y` and the spin flip of `M` is `S·M̄·S`.
//!
//! For a rank-2 state `ρ = P/2` the relevant geometry is `Q = S·P̄·S` and the
//! overlap `tr(PQ)`. The closed form `ℓ = 1/√(3 − tr PQ)` is derived for the
//! configurations where `range P` and `range Q` share a line (or coincide);
//! when the two ranges meet only in `{0}` without being complementary the
//! overlap can fall in `(0, 1)` and the closed form no longer equals the
//! exact modulus. [`Rank2Analysis::closed_form_applies`] tells the two apart.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{conj_entrywise, Complex64, ComplexMatrix};
use crate::linalg::{eig_hermitian, eigvals_hermitian, kron, sigma_y, sqrt_psd, sqrt_psd_clamped};
use crate::states::{DensityMatrix, B_TOL, PSD_TOL};

/// `σ_y ⊗ σ_y`, real and antidiagonal.
pub fn spin_flip_operator() -> ComplexMatrix {
    kron(&sigma_y(), &sigma_y())
}

/// `S·M̄·S`
pub fn spin_flip(m: &ComplexMatrix) -> ComplexMatrix {
    let s = spin_flip_operator();
    &(&s * &conj_entrywise(m)) * &s
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.is_two_qubit() {
        Ok(())
    } else {
        Err(Error::WrongDimension {
            expected: 4,
            found: rho.dim(),
        })
    }
}

/// `√ρ·S·ρ̄·S·√ρ`, re-symmetrized.
fn wootters_square(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    require_two_qubit(rho)?;
    let root = sqrt_psd_clamped(rho.matrix(), PSD_TOL)?;
    Ok((&(&root * &spin_flip(rho.matrix())) * &root).hermitian_part())
}

/// `W = (√ρ·S·ρ̄·S·√ρ)^{1/2}`
pub fn wootters_operator(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    sqrt_psd(&wootters_square(rho)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WoottersResult {
    /// Eigenvalues of `W`, nonincreasing and clamped at zero.
    pub w: [f64; 4],
    pub concurrence: f64,
    pub separable: bool,
}

impl WoottersResult {
    /// `w₁ − w₂ − w₃ − w₄`; separable iff `≤ B_TOL`.
    pub fn margin(&self) -> f64 {
        self.w[0] - self.w[1] - self.w[2] - self.w[3]
    }
}

pub fn wootters_check(rho: &DensityMatrix) -> Result<WoottersResult> {
    let vals = eigvals_hermitian(&wootters_operator(rho)?)?;
    let mut w = [0.0; 4];
    for (dst, v) in w.iter_mut().zip(&vals) {
        *dst = v.max(0.0);
    }
    let margin = w[0] - w[1] - w[2] - w[3];
    Ok(WoottersResult {
        w,
        concurrence: margin.max(0.0),
        separable: margin <= B_TOL,
    })
}

/// `α = (1 + t)/4`, `β = (1 − t)/4`: the double eigenvalues of `ρ_t` for a
/// rank-2 `ρ` with spectrum `(1/2, 1/2, 0, 0)`.
pub fn alpha_beta(t: f64) -> (f64, f64) {
    ((1.0 + t) / 4.0, (1.0 - t) / 4.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaPair {
    pub plus: f64,
    pub minus: f64,
}

const DOMAIN_SLACK: f64 = 1e-12;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.25 - DOMAIN_SLACK..=0.5 + DOMAIN_SLACK).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [1/4, 1/2]")));
    }
    Ok(())
}

/// The two eigenvalues of `W²` besides `α²` and `β²`:
///
/// `ζ± = (α/2)(1 − 2α) + (ξ/8)(4α − 1)² ± ((4α − 1)/4)·√(2ξα(1 − 2α) + ξ²(2α − 1/2)²)`
///
/// Defined for `α ∈ [1/4, 1/2]` and `ξ ∈ [0, 1]`; `ξ = 1` is the limit where
/// `ζ₊ = α²`.
pub fn zeta_pm(alpha: f64, xi: f64) -> Result<ZetaPair> {
    check_alpha(alpha)?;
    if !(-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1]")));
    }
    let base = alpha / 2.0 * (1.0 - 2.0 * alpha) + xi / 8.0 * (4.0 * alpha - 1.0).powi(2);
    let radicand = 2.0 * xi * alpha * (1.0 - 2.0 * alpha) + xi * xi * (2.0 * alpha - 0.5).powi(2);
    let spread = (4.0 * alpha - 1.0) / 4.0 * radicand.max(0.0).sqrt();
    Ok(ZetaPair {
        plus: base + spread,
        minus: base - spread,
    })
}

/// `W²` in the block basis `C ⊕ C ⊕ C²` for the shared-line configuration,
/// with `‖η‖² = 1 − ξ`.
pub fn w2_matrix(alpha: f64, xi: f64, eta: [Complex64; 2]) -> Result<ComplexMatrix> {
    check_alpha(alpha)?;
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::Domain(format!("xi = {xi} outside [0, 1)")));
    }
    let eta_sq = eta[0].norm_sqr() + eta[1].norm_sqr();
    if (eta_sq - (1.0 - xi)).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "|eta|^2 = {eta_sq} but 1 - xi = {}",
            1.0 - xi
        )));
    }
    let beta = 0.5 - alpha;
    let gap = alpha - beta;
    let coupling = gap * (xi * alpha * beta).max(0.0).sqrt();
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(0, 0)] = Complex64::new(alpha * alpha, 0.0);
    m[(1, 1)] = Complex64::new(alpha * beta + alpha * gap * xi, 0.0);
    for a in 0..2 {
        m[(1, 2 + a)] = eta[a].conj() * coupling;
        m[(2 + a, 1)] = eta[a] * coupling;
        for b in 0..2 {
            let diag = if a == b { beta * beta } else { 0.0 };
            m[(2 + a, 2 + b)] = Complex64::new(diag, 0.0) + eta[a] * eta[b].conj() * (beta * gap);
        }
    }
    Ok(m)
}

/// Both forms of the Wootters criterion along the rank-2 segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdCheck {
    /// `α − (β + √ζ₊ + √ζ₋)`
    pub raw_margin: f64,
    /// `α − (1 + 1/√(2 − ξ))/4`
    pub simplified_margin: f64,
}

impl ThresholdCheck {
    pub fn separable(&self) -> bool {
        self.simplified_margin <= B_TOL
    }

    /// Both margins lead to the same verdict (or one sits in the boundary band).
    pub fn consistent(&self) -> bool {
        crate::gap::signs_agree(self.raw_margin, self.simplified_margin)
    }
}

pub fn separability_threshold(alpha: f64, xi: f64) -> Result<ThresholdCheck> {
    let z = zeta_pm(alpha, xi)?;
    let beta = 0.5 - alpha;
    Ok(ThresholdCheck {
        raw_margin: alpha - (beta + z.plus.max(0.0).sqrt() + z.minus.max(0.0).sqrt()),
        simplified_margin: alpha - threshold_alpha(xi),
    })
}

/// Largest separable `α` for a given `ξ`: `(1 + 1/√(2 − ξ))/4`.
pub fn threshold_alpha(xi: f64) -> f64 {
    (1.0 + 1.0 / (2.0 - xi).sqrt()) / 4.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank2Case {
    /// `Q = 1 − P`, `tr(PQ) = 0`
    Disjoint,
    /// `Q = P`, `tr(PQ) = 2`
    Equal,
    Generic,
}

#[derive(Debug, Clone)]
pub struct Rank2Analysis {
    pub p: ComplexMatrix,
    pub q: ComplexMatrix,
    /// `tr(PQ)`
    pub overlap: f64,
    /// `ξ = tr(PQ) − 1`
    pub xi: f64,
    pub case: Rank2Case,
    /// `dim(range P ∩ range Q)`, from the eigenvalues of `PQP` at one.
    pub intersection_dim: usize,
    /// `1` for `Disjoint`, otherwise `1/√(3 − tr PQ)`.
    pub ell_closed: f64,
}

impl Rank2Analysis {
    /// Whether the configuration is one the closed form was derived for.
    pub fn closed_form_applies(&self) -> bool {
        match self.case {
            Rank2Case::Disjoint | Rank2Case::Equal => true,
            Rank2Case::Generic => self.intersection_dim >= 1,
        }
    }
}

const RANK2_SPECTRUM_TOL: f64 = 1e-8;

pub fn rank2_closed_form(rho: &DensityMatrix) -> Result<Rank2Analysis> {
    require_two_qubit(rho)?;
    let eig = eig_hermitian(rho.matrix())?;
    let deviation = eig
        .values
        .iter()
        .zip([0.5, 0.5, 0.0, 0.0])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > RANK2_SPECTRUM_TOL {
        return Err(Error::SpectrumMismatch { deviation });
    }
    let p = eig.leading_projector(2).hermitian_part();
    let q = spin_flip(&p);
    let overlap = (&p * &q).trace().re;
    let case = if overlap <= B_TOL {
        Rank2Case::Disjoint
    } else if overlap >= 2.0 - B_TOL {
        Rank2Case::Equal
    } else {
        Rank2Case::Generic
    };
    let pqp = (&(&p * &q) * &p).hermitian_part();
    let intersection_dim = eigvals_hermitian(&pqp)?
        .iter()
        .filter(|&&x| x >= 1.0 - B_TOL)
        .count();
    let ell_closed = match case {
        Rank2Case::Disjoint => 1.0,
        _ => 1.0 / (3.0 - overlap).sqrt(),
    };
    Ok(Rank2Analysis {
        p,
        q,
        overlap,
        xi: overlap - 1.0,
        case,
        intersection_dim,
        ell_closed,
    })
}

/// Eigenvalues of `W(ρ)²`, nonincreasing.
pub fn wootters_square_spectrum(rho: &DensityMatrix) -> Result<Vec<f64>> {
    eigvals_hermitian(&wootters_square(rho)?)
}
