//! Gap representation `ρ = Σ_j μ_j·ρ̂_j + dλ_d·τ` and the sufficient test
//! `Σ_j μ_j / p_j ≤ 1` for lower bounds `p_j ≤ ℓ(ρ̂_j)`.
//!
//! `μ_j = j(λ_j − λ_{j+1})` and `ρ̂_j` is the projection onto the top `j`
//! eigenvectors divided by `j`, so `spec(ρ̂_j) = e^(j)`. Inside a degenerate
//! cluster (`λ_j = λ_{j+1}`) the choice of eigenvectors is arbitrary, but
//! then `μ_j = 0` and the reconstruction does not depend on it.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::criteria::Region;
use crate::error::{Error, Result};
use crate::linalg::{eig_hermitian, ComplexMatrix};
use crate::states::{DensityMatrix, Spectrum, B_TOL};

#[derive(Debug, Clone)]
pub struct GapRepresentation {
    spectrum: Spectrum,
    gaps: Vec<f64>,
    averaged: Vec<DensityMatrix>,
    dims: (usize, usize),
}

impl GapRepresentation {
    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    /// `μ_1, …, μ_{d−1}`
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// `ρ̂_1, …, ρ̂_{d−1}`
    pub fn averaged_states(&self) -> &[DensityMatrix] {
        &self.averaged
    }

    /// `ρ̂_j` for `1 ≤ j ≤ d`; `ρ̂_d = τ`.
    pub fn averaged_state(&self, j: usize) -> Option<DensityMatrix> {
        let d = self.spectrum.len();
        match j {
            0 => None,
            j if j < d => Some(self.averaged[j - 1].clone()),
            j if j == d => Some(DensityMatrix::maximally_mixed(self.dims)),
            _ => None,
        }
    }

    /// Weight `dλ_d` on τ.
    pub fn residual_weight(&self) -> f64 {
        let d = self.spectrum.len();
        d as f64 * self.spectrum.lambda(d)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.spectrum.len();
        let tau = ComplexMatrix::identity(d).scale(1.0 / d as f64);
        self.gaps
            .iter()
            .zip(&self.averaged)
            .fold(tau.scale(self.residual_weight()), |acc, (mu, rho_hat)| {
                &acc + &rho_hat.matrix().scale(*mu)
            })
    }

    /// `ω = Σ_j μ_j/(1 − dλ_d)·ρ̂_j`, so that `ρ = (1 − dλ_d)ω + dλ_d·τ`.
    pub fn omega(&self) -> Result<DensityMatrix> {
        let d = self.spectrum.len();
        if self.spectrum.lambda(d) >= 1.0 / d as f64 - B_TOL {
            return Err(Error::DegenerateTau);
        }
        let weight = 1.0 - self.residual_weight();
        let mut acc = ComplexMatrix::zeros(d, d);
        for (mu, rho_hat) in self.gaps.iter().zip(&self.averaged) {
            acc = &acc + &rho_hat.matrix().scale(mu / weight);
        }
        DensityMatrix::new(acc, self.dims)
    }
}

pub fn gap_decompose(rho: &DensityMatrix) -> GapRepresentation {
    let eig = eig_hermitian(rho.matrix()).expect("validated state is Hermitian");
    let spectrum = Spectrum::new(eig.values.clone()).expect("validated state");
    let lam = spectrum.values();
    let d = lam.len();
    let gaps = (1..d).map(|j| j as f64 * (lam[j - 1] - lam[j])).collect();
    let averaged = (1..d)
        .map(|j| {
            DensityMatrix::new(eig.leading_projector(j).scale(1.0 / j as f64), rho.dims())
                .expect("normalized projection is a state")
        })
        .collect();
    GapRepresentation {
        spectrum,
        gaps,
        averaged,
        dims: rho.dims(),
    }
}

/// `μ_j` straight from a spectrum.
pub fn gaps_of(spectrum: &Spectrum) -> Vec<f64> {
    let lam = spectrum.values();
    (1..lam.len())
        .map(|j| j as f64 * (lam[j - 1] - lam[j]))
        .collect()
}

/// Lower bounds `p_1, …, p_{d−1}` on `ℓ(ρ̂_j)`, each in `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PVector(Vec<f64>);

impl PVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("p-vector must be nonempty".into()));
        }
        if let Some(bad) = values.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
            return Err(Error::Domain(format!(
                "p-vector entry {bad} outside (0, 1]"
            )));
        }
        Ok(Self(values))
    }

    /// Two-qubit minimal moduli `(ℓ̂₁, ℓ̂₂, ℓ̂₃) = (1/3, 1/√2, 1)`.
    pub fn two_qubit_lhat() -> Self {
        Self(vec![1.0 / 3.0, FRAC_1_SQRT_2, 1.0])
    }

    /// `(2/(2+d), …, 2/(2+d), 1)` of length `d − 1`.
    pub fn vidal_tarrach(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("need d >= 2, got {d}")));
        }
        let floor = 2.0 / (2.0 + d as f64);
        let mut v = vec![floor; d - 2];
        v.push(1.0);
        Ok(Self(v))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// `Σ_j μ_j / p_j`
pub fn proposition_sum(spectrum: &Spectrum, p: &PVector) -> Result<f64> {
    let gaps = gaps_of(spectrum);
    if gaps.len() != p.0.len() {
        return Err(Error::LengthMismatch {
            expected: gaps.len(),
            found: p.0.len(),
        });
    }
    Ok(gaps.iter().zip(&p.0).map(|(mu, p)| mu / p).sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropositionOutcome {
    pub sum: f64,
    pub separable_certified: bool,
}

pub fn proposition_check(rho: &DensityMatrix, p: &PVector) -> Result<PropositionOutcome> {
    let sum = proposition_sum(&rho.spectrum(), p)?;
    Ok(PropositionOutcome {
        sum,
        separable_certified: sum <= 1.0 + B_TOL,
    })
}

/// A proposition sum next to the margin of the spectral region it should
/// reproduce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceWitness {
    pub proposition_sum: f64,
    pub region_margin: f64,
}

impl EquivalenceWitness {
    /// `sum − 1` and the margin have the same sign, or one of them sits in the
    /// boundary band.
    pub fn agrees(&self) -> bool {
        signs_agree(self.proposition_sum - 1.0, self.region_margin)
    }
}

pub(crate) fn signs_agree(a: f64, b: f64) -> bool {
    a.abs() <= B_TOL || b.abs() <= B_TOL || (a < 0.0) == (b < 0.0)
}

/// Proposition with `p = (1/3, 1/√2, 1)` against the theorem 1 margin.
pub fn theorem1_from_proposition(spectrum: &Spectrum) -> Result<EquivalenceWitness> {
    let region_margin = Region::A.margin(spectrum)?;
    Ok(EquivalenceWitness {
        proposition_sum: proposition_sum(spectrum, &PVector::two_qubit_lhat())?,
        region_margin,
    })
}

/// Proposition with the Vidal–Tarrach vector against the theorem 2 margin.
pub fn theorem2_from_proposition(spectrum: &Spectrum, d: usize) -> Result<EquivalenceWitness> {
    if d < 3 {
        return Err(Error::Domain(format!("need d >= 3, got {d}")));
    }
    if spectrum.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: spectrum.len(),
        });
    }
    Ok(EquivalenceWitness {
        proposition_sum: proposition_sum(spectrum, &PVector::vidal_tarrach(d)?)?,
        region_margin: Region::Theorem2.margin(spectrum)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_state, rng_for, spectrum_uniform, state_with_spectrum};
    use crate::states::spectrum_of;

    fn spec(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn diagonal_gaps() {
        let rho = DensityMatrix::diagonal(&[0.4, 0.3, 0.2, 0.1], (2, 2)).unwrap();
        let g = gap_decompose(&rho);
        assert!(close(g.gaps(), &[0.1, 0.2, 0.3], 1e-15));
        assert!((g.residual_weight() - 0.4).abs() < 1e-15);
        assert!((g.gaps().iter().sum::<f64>() - 0.6).abs() < 1e-15);
        assert!(g.reconstruct().distance(rho.matrix()) < 1e-15);
    }

    #[test]
    fn tau_has_no_gaps() {
        let tau = DensityMatrix::maximally_mixed((2, 2));
        let g = gap_decompose(&tau);
        assert!(g.gaps().iter().all(|&m| m.abs() < 1e-15));
        assert!((g.residual_weight() - 1.0).abs() < 1e-15);
        assert_eq!(g.omega().unwrap_err(), Error::DegenerateTau);
    }

    #[test]
    fn pure_state_gap_is_itself() {
        let rho = random_state((2, 2), &mut rng_for(1, 0));
        let pure = DensityMatrix::pure(&rho.matrix().column(0), (2, 2)).unwrap();
        let g = gap_decompose(&pure);
        assert!(close(g.gaps(), &[1.0, 0.0, 0.0], 1e-12));
        assert!(g.residual_weight().abs() < 1e-12);
        assert!(g.averaged_states()[0].distance(&pure) < 1e-12);
        assert!(g.omega().unwrap().distance(&pure) < 1e-12);
    }

    #[test]
    fn averaged_state_indexing() {
        let rho = random_state((2, 3), &mut rng_for(2, 0));
        let g = gap_decompose(&rho);
        assert!(g.averaged_state(0).is_none());
        assert!(g.averaged_state(7).is_none());
        let last = g.averaged_state(6).unwrap();
        assert!(last.distance(&DensityMatrix::maximally_mixed((2, 3))) < 1e-15);
    }

    #[test]
    fn reconstruction_and_flat_spectra_random() {
        let mut rng = rng_for(3, 0);
        for (i, dims) in [(2, 2), (2, 3)].into_iter().cycle().take(1000).enumerate() {
            let rho = random_state(dims, &mut rng);
            let g = gap_decompose(&rho);
            let d = rho.dim();
            assert!(
                g.reconstruct().distance(rho.matrix()) <= 1e-12,
                "sample {i}"
            );
            assert!((g.gaps().iter().sum::<f64>() - (1.0 - g.residual_weight())).abs() < 1e-12);
            for j in 1..d {
                let flat = Spectrum::flat(j, d).unwrap();
                let got = spectrum_of(&g.averaged_states()[j - 1]);
                assert!(got.max_deviation(flat.values()) < 1e-10);
            }
            let last = &g.averaged_states()[d - 2];
            assert!((last.purity() - 1.0 / (d as f64 - 1.0)).abs() < 1e-12);
            assert!(Region::GurvitsBarnum
                .evaluate(&spectrum_of(last))
                .unwrap()
                .verdict
                .is_inside_closure());
            let omega = g.omega().unwrap();
            let w = 1.0 - g.residual_weight();
            let tau = DensityMatrix::maximally_mixed(dims);
            assert!(omega.mix(&tau, w).unwrap().distance(&rho) < 1e-12);
        }
    }

    #[test]
    fn degenerate_spectrum_is_basis_stable() {
        let mut rng = rng_for(4, 0);
        let s = spec(&[0.4, 0.2, 0.2, 0.2]);
        let rho = state_with_spectrum(&s, (2, 2), &mut rng).unwrap();
        let g = gap_decompose(&rho);
        assert!(close(g.gaps(), &[0.2, 0.0, 0.0], 1e-12));
        assert!(g.reconstruct().distance(rho.matrix()) < 1e-12);
    }

    #[test]
    fn pvector_presets_and_validation() {
        assert_eq!(
            PVector::two_qubit_lhat().values(),
            &[1.0 / 3.0, FRAC_1_SQRT_2, 1.0]
        );
        assert_eq!(
            PVector::vidal_tarrach(4).unwrap().values(),
            &[1.0 / 3.0, 1.0 / 3.0, 1.0]
        );
        assert_eq!(PVector::vidal_tarrach(2).unwrap().values(), &[1.0]);
        assert!(PVector::new(vec![0.0, 1.0]).is_err());
        assert!(PVector::new(vec![0.5, 1.5]).is_err());
        assert!(PVector::new(vec![]).is_err());
    }

    #[test]
    fn proposition_examples() {
        let p = PVector::two_qubit_lhat();
        let vertex =
            DensityMatrix::diagonal(&[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], (2, 2)).unwrap();
        let out = proposition_check(&vertex, &p).unwrap();
        assert!((out.sum - 1.0).abs() < 1e-14);
        assert!(out.separable_certified);
        assert!(close(
            &gaps_of(&vertex.spectrum()),
            &[1.0 / 3.0, 0.0, 0.0],
            1e-15
        ));

        let tau = DensityMatrix::maximally_mixed((2, 2));
        for q in [p.clone(), PVector::vidal_tarrach(4).unwrap()] {
            let o = proposition_check(&tau, &q).unwrap();
            assert!(o.sum.abs() < 1e-15 && o.separable_certified);
        }

        let pure = DensityMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0], (2, 2)).unwrap();
        let o = proposition_check(&pure, &p).unwrap();
        assert!((o.sum - 3.0).abs() < 1e-14);
        assert!(!o.separable_certified);

        let wrong = PVector::vidal_tarrach(6).unwrap();
        assert!(matches!(
            proposition_check(&pure, &wrong),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn theorem1_equivalence_examples() {
        let w = theorem1_from_proposition(&spec(&[0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0])).unwrap();
        assert!((w.proposition_sum - 1.0).abs() < 1e-14 && w.region_margin.abs() < 1e-14);
        let t = theorem1_from_proposition(&Spectrum::uniform(4)).unwrap();
        assert!(t.proposition_sum.abs() < 1e-15);
        assert!((t.region_margin + 0.5).abs() < 1e-15);
        assert!(matches!(
            theorem1_from_proposition(&Spectrum::uniform(6)),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn theorem2_equivalence_examples() {
        let tau = theorem2_from_proposition(&Spectrum::uniform(4), 4).unwrap();
        assert!(tau.proposition_sum.abs() < 1e-15);
        let e3 = theorem2_from_proposition(&Spectrum::flat(3, 4).unwrap(), 4).unwrap();
        assert!((e3.proposition_sum - 1.0).abs() < 1e-15);
        assert!(e3.region_margin.abs() < 1e-15);
        assert!(theorem2_from_proposition(&Spectrum::uniform(4), 6).is_err());
    }

    #[test]
    fn sweeps_agree_in_sign() {
        let mut rng = rng_for(5, 0);
        for _ in 0..10_000 {
            let s = spectrum_uniform(4, &mut rng);
            let w = theorem1_from_proposition(&s).unwrap();
            assert!(w.agrees(), "{:?} {w:?}", s.values());
            // sum − 1 = 2·margin once λ₄ is eliminated.
            assert!((w.proposition_sum - 1.0 - 2.0 * w.region_margin).abs() < 1e-12);
        }
        for d in [4, 6, 9] {
            for _ in 0..10_000 {
                let s = spectrum_uniform(d, &mut rng);
                let w = theorem2_from_proposition(&s, d).unwrap();
                assert!(w.agrees());
                // sum − 1 = (d/2)·margin.
                assert!((w.proposition_sum - 1.0 - d as f64 / 2.0 * w.region_margin).abs() < 1e-12);
            }
        }
    }
}
