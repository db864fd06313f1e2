//! Seeded random states and spectra.
//!
//! Sample `i` of a stream seeded with `seed` always draws from
//! `rng_for(seed, i)`: a ChaCha generator keyed by the seed with `i` as the
//! stream id. Batches are therefore bit-identical for any worker count.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;

use crate::criteria::Region;
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};
use crate::states::{DensityMatrix, Spectrum};

pub type SampleRng = ChaCha8Rng;

/// Rejection sampling gives up after this many draws.
pub const MAX_REJECTION_DRAWS: u64 = 1_000_000;

/// Generator for sample `index` of the stream keyed by `seed`.
pub fn rng_for(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// diagonal of R rotated to the positive reals.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(d >= 1, "dimension must be positive");
    let ginibre = DMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let qr = ginibre.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::from_nalgebra(&q)
}

/// Haar-random unit vector.
pub fn haar_vector(d: usize, rng: &mut impl Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// `U diag(λ) U†` with Haar `U`.
pub fn state_with_spectrum(
    spectrum: &Spectrum,
    dims: (usize, usize),
    rng: &mut impl Rng,
) -> Result<DensityMatrix> {
    let d = dims.0 * dims.1;
    if spectrum.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: spectrum.len(),
        });
    }
    let u = haar_unitary(d, rng);
    DensityMatrix::new(
        ComplexMatrix::from_real_diagonal(spectrum.values()).conjugate_by(&u),
        dims,
    )
}

/// Flat-Dirichlet spectrum with a Haar eigenbasis.
pub fn random_state(dims: (usize, usize), rng: &mut impl Rng) -> DensityMatrix {
    let spectrum = spectrum_uniform(dims.0 * dims.1, rng);
    state_with_spectrum(&spectrum, dims, rng).expect("lengths agree")
}

pub fn random_pure_state(dims: (usize, usize), rng: &mut impl Rng) -> DensityMatrix {
    let psi = haar_vector(dims.0 * dims.1, rng);
    DensityMatrix::pure(&psi, dims).expect("unit vector")
}

/// Rank-2 two-qubit state `(|ψ⟩⟨ψ| + |φ⟩⟨φ|)/2` whose range shares the line
/// `ψ` with its spin flip: `ψ` is fixed by `v ↦ S·v̄`, `φ ⊥ ψ` is Haar.
pub fn rank2_shared_line_state(rng: &mut impl Rng) -> DensityMatrix {
    let s = crate::wootters::spin_flip_operator();
    let flip = |v: &[Complex64]| -> Vec<Complex64> {
        (0..4)
            .map(|i| (0..4).map(|k| s[(i, k)] * v[k].conj()).sum())
            .collect()
    };
    let normalize = |v: Vec<Complex64>| -> Option<Vec<Complex64>> {
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        (n > 1e-6).then(|| v.into_iter().map(|z| z / n).collect())
    };
    let psi = loop {
        let v = haar_vector(4, rng);
        let fixed: Vec<Complex64> = v.iter().zip(flip(&v)).map(|(a, b)| a + b).collect();
        if let Some(psi) = normalize(fixed) {
            break psi;
        }
    };
    let phi = loop {
        let w = haar_vector(4, rng);
        let overlap: Complex64 = psi.iter().zip(&w).map(|(p, x)| p.conj() * x).sum();
        let orth = w.iter().zip(&psi).map(|(x, p)| x - p * overlap).collect();
        if let Some(phi) = normalize(orth) {
            break phi;
        }
    };
    let m = &ComplexMatrix::outer(&psi).scale(0.5) + &ComplexMatrix::outer(&phi).scale(0.5);
    DensityMatrix::new(m, (2, 2)).expect("rank-2 projector over two")
}

/// Flat Dirichlet(1, …, 1) sample, sorted nonincreasing.
pub fn spectrum_uniform(d: usize, rng: &mut impl Rng) -> Spectrum {
    assert!(d >= 1, "dimension must be positive");
    let draws: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    Spectrum::new(draws.into_iter().map(|x| x / total).collect()).expect("normalized draw")
}

/// Uniform direction on the sphere `tr ρ² = 1/(d − 1)` inside the simplex.
///
/// That sphere is the inscribed sphere of the simplex (it touches each facet
/// at its centroid), so every draw is a valid spectrum.
pub fn spectrum_on_inscribed_sphere(d: usize, rng: &mut impl Rng) -> Spectrum {
    assert!(d >= 2, "need d >= 2");
    let radius = (1.0 / (d as f64 * (d as f64 - 1.0))).sqrt();
    loop {
        let g: Vec<f64> = (0..d)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mean = g.iter().sum::<f64>() / d as f64;
        let centered: Vec<f64> = g.iter().map(|x| x - mean).collect();
        let norm = centered.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        let values = centered
            .iter()
            .map(|x| 1.0 / d as f64 + radius * x / norm)
            .collect();
        return Spectrum::new(values).expect("inscribed sphere lies in the simplex");
    }
}

/// Rejection-samples a flat-Dirichlet spectrum with `margin ≤ 0` in `region`.
pub fn spectrum_in_region(region: Region, d: usize, rng: &mut impl Rng) -> Result<Spectrum> {
    if !region.applies_to(d) {
        return Err(Error::WrongDimension {
            expected: 4,
            found: d,
        });
    }
    for _ in 0..MAX_REJECTION_DRAWS {
        let s = spectrum_uniform(d, rng);
        if region.margin(&s)? <= 0.0 {
            return Ok(s);
        }
    }
    Err(Error::RejectionTimeout {
        draws: MAX_REJECTION_DRAWS,
    })
}

/// What to draw in a batch.
#[derive(Debug, Clone)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: u64,
    pub dims: (usize, usize),
    pub spectrum: Option<Spectrum>,
    pub region: Option<Region>,
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        let d = self.dims.0 * self.dims.1;
        if self.count == 0 {
            return Err(Error::Domain("count must be at least 1".into()));
        }
        if self.dims.0 == 0 || self.dims.1 == 0 {
            return Err(Error::Domain(
                "subsystem dimensions must be positive".into(),
            ));
        }
        if let Some(s) = &self.spectrum {
            if s.len() != d {
                return Err(Error::LengthMismatch {
                    expected: d,
                    found: s.len(),
                });
            }
        }
        if let Some(region) = self.region {
            if !region.applies_to(d) {
                return Err(Error::WrongDimension {
                    expected: 4,
                    found: d,
                });
            }
            if let Some(s) = &self.spectrum {
                if region.margin(s)? > crate::states::B_TOL {
                    return Err(Error::Domain(format!(
                        "fixed spectrum lies outside region {region}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Spectrum and state for sample `index`.
    pub fn draw(&self, index: u64) -> Result<(Spectrum, DensityMatrix)> {
        let mut rng = rng_for(self.seed, index);
        let d = self.dims.0 * self.dims.1;
        let spectrum = match (&self.spectrum, self.region) {
            (Some(s), _) => s.clone(),
            (None, Some(region)) => spectrum_in_region(region, d, &mut rng)?,
            (None, None) => spectrum_uniform(d, &mut rng),
        };
        let state = state_with_spectrum(&spectrum, self.dims, &mut rng)?;
        Ok((spectrum, state))
    }
}

/// Evaluates `f(i)` for `i in 0..count`, in index order, on `jobs` workers.
pub fn map_indexed<T, F>(count: u64, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if jobs <= 1 {
        return (0..count).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    pool.install(|| (0..count).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvals_hermitian;
    use crate::states::spectrum_of;

    #[test]
    fn haar_is_unitary() {
        let mut rng = rng_for(1, 0);
        for d in 1..=9 {
            let u = haar_unitary(d, &mut rng);
            let utu = &u.adjoint() * &u;
            assert!(utu.distance(&ComplexMatrix::identity(d)) < 1e-10);
        }
        let scalar = haar_unitary(1, &mut rng);
        assert!((scalar[(0, 0)].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn haar_corner_is_uniform_for_qubits() {
        // |U_00|² is uniform on [0, 1] for Haar U(2).
        let n = 1000;
        let mut bins = [0u32; 10];
        for i in 0..n {
            let u = haar_unitary(2, &mut rng_for(99, i));
            let x = u[(0, 0)].norm_sqr();
            bins[((x * 10.0) as usize).min(9)] += 1;
        }
        let expected = n as f64 / 10.0;
        let sigma = (n as f64 * 0.1 * 0.9).sqrt();
        for b in bins {
            assert!((b as f64 - expected).abs() < 3.0 * sigma, "{bins:?}");
        }
    }

    #[test]
    fn haar_left_invariance_of_corner_statistic() {
        // Mean of |(VU)_00|² over samples stays 1/d for a fixed unitary V.
        let d = 4;
        let v = haar_unitary(d, &mut rng_for(5, 12345));
        let n = 4000;
        let mut plain = 0.0;
        let mut shifted = 0.0;
        for i in 0..n {
            let u = haar_unitary(d, &mut rng_for(5, i));
            plain += u[(0, 0)].norm_sqr();
            shifted += (&v * &u)[(0, 0)].norm_sqr();
        }
        // Var(|U_00|²) = (d − 1)/(d²(d + 1)) for Haar U(d).
        let se = ((d as f64 - 1.0) / (d as f64 * d as f64 * (d as f64 + 1.0)) / n as f64).sqrt();
        assert!((plain / n as f64 - 0.25).abs() < 4.0 * se);
        assert!((shifted / n as f64 - 0.25).abs() < 4.0 * se);
    }

    #[test]
    fn fixed_spectrum_round_trip() {
        let mut rng = rng_for(2, 0);
        for i in 0..1000 {
            let dims = if i % 2 == 0 { (2, 2) } else { (2, 3) };
            let s = spectrum_uniform(dims.0 * dims.1, &mut rng);
            let rho = state_with_spectrum(&s, dims, &mut rng).unwrap();
            assert!(spectrum_of(&rho).max_deviation(s.values()) < 1e-10);
        }
    }

    #[test]
    fn spectrum_examples() {
        let mut rng = rng_for(3, 0);
        let half = Spectrum::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        let rho = state_with_spectrum(&half, (2, 2), &mut rng).unwrap();
        assert!(spectrum_of(&rho).max_deviation(&[0.5, 0.5, 0.0, 0.0]) < 1e-12);

        let e3 = Spectrum::flat(3, 4).unwrap();
        let rho = state_with_spectrum(&e3, (2, 2), &mut rng).unwrap();
        assert!((rho.purity() - 1.0 / 3.0).abs() < 1e-12);

        let tau = state_with_spectrum(&Spectrum::uniform(4), (2, 2), &mut rng).unwrap();
        assert!(tau.distance(&DensityMatrix::maximally_mixed((2, 2))) < 1e-14);

        assert!(matches!(
            state_with_spectrum(&half, (2, 3), &mut rng),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn uniform_spectra_are_normalized_and_sorted() {
        let mut rng = rng_for(4, 0);
        for d in 1..10 {
            let s = spectrum_uniform(d, &mut rng);
            assert!((s.values().iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(s.values().windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn region_sampling_respects_membership() {
        let mut rng = rng_for(6, 0);
        for region in Region::ALL {
            for _ in 0..50 {
                let s = spectrum_in_region(region, 4, &mut rng).unwrap();
                assert!(region.margin(&s).unwrap() <= crate::states::B_TOL);
            }
        }
        assert!(matches!(
            spectrum_in_region(Region::A, 6, &mut rng),
            Err(Error::WrongDimension { .. })
        ));
    }

    #[test]
    fn region_a_has_positive_acceptance_rate() {
        let mut rng = rng_for(8, 0);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| Region::A.margin(&spectrum_uniform(4, &mut rng)).unwrap() <= 0.0)
            .count();
        assert!(hits > 0);
    }

    #[test]
    fn streams_are_deterministic_and_independent_of_jobs() {
        let cfg = SampleConfig {
            seed: 42,
            count: 64,
            dims: (2, 2),
            spectrum: None,
            region: Some(Region::C),
        };
        cfg.validate().unwrap();
        let draw = |i| cfg.draw(i).unwrap().1.matrix().entries().to_vec();
        let serial = map_indexed(cfg.count, 1, draw);
        let parallel = map_indexed(cfg.count, 4, draw);
        assert_eq!(serial, parallel);
        assert_eq!(serial, map_indexed(cfg.count, 1, draw));
        assert_ne!(serial[0], serial[1]);
    }

    #[test]
    fn config_validation() {
        let base = SampleConfig {
            seed: 1,
            count: 1,
            dims: (2, 3),
            spectrum: None,
            region: Some(Region::A),
        };
        assert!(base.validate().is_err());
        let zero = SampleConfig {
            count: 0,
            region: None,
            ..base.clone()
        };
        assert!(zero.validate().is_err());
        let inconsistent = SampleConfig {
            dims: (2, 2),
            spectrum: Some(Spectrum::new(vec![1.0, 0.0, 0.0, 0.0]).unwrap()),
            ..base
        };
        assert!(inconsistent.validate().is_err());
    }

    #[test]
    fn spectral_verdicts_ignore_extra_conjugation() {
        let v = haar_unitary(4, &mut rng_for(10, 999));
        for i in 0..1000 {
            let rho = random_state((2, 2), &mut rng_for(10, i));
            let rotated = rho.conjugate_by(&v).unwrap();
            let a = crate::criteria::evaluate_all(&spectrum_of(&rho));
            let b = crate::criteria::evaluate_all(&spectrum_of(&rotated));
            for (x, y) in a.criteria.iter().zip(&b.criteria) {
                let (mx, my) = (x.margin.unwrap(), y.margin.unwrap());
                assert!((mx - my).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn pure_states_are_rank_one() {
        let rho = random_pure_state((2, 2), &mut rng_for(11, 0));
        let vals = eigvals_hermitian(rho.matrix()).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
    }
}
