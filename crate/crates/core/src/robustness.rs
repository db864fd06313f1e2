//! Modulus of separability `ℓ(ρ) = sup{t : tρ + (1 − t)τ separable}`.
//!
//! Along the segment to τ separability is monotone (separable iff `t ≤ ℓ`),
//! so for two qubits `ℓ` is found by bisection against an exact oracle (PPT
//! or Wootters). For other dimensions no exact oracle is available and only
//! lower bounds are reported.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::{gap_decompose, proposition_sum, PVector};
use crate::linalg::{eigvals_hermitian, partial_transpose, Subsystem};
use crate::states::DensityMatrix;
use crate::wootters::{rank2_closed_form, wootters_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Oracle {
    Ppt,
    Wootters,
}

impl Oracle {
    /// Signed distance from the separable side, `≤ 0` when separable:
    /// `−λ_min(ρ^{T_B})` for PPT, `w₁ − w₂ − w₃ − w₄` for Wootters.
    pub fn margin(self, rho: &DensityMatrix) -> Result<f64> {
        if !rho.is_two_qubit() {
            return Err(Error::OracleUnavailable { dim: rho.dim() });
        }
        match self {
            Oracle::Ppt => Ok(-ppt_min_eigenvalue(rho)?),
            Oracle::Wootters => Ok(wootters_check(rho)?.margin()),
        }
    }

    // Measured noise at the PPT boundary is ~1e-16 for PPT and below 1e-12
    // for Wootters (square roots of small eigenvalues of W²). A wider band
    // biases the bisected ℓ upward by the band over the margin's slope.
    fn tolerance(self) -> f64 {
        match self {
            Oracle::Ppt => 1e-13,
            Oracle::Wootters => 1e-11,
        }
    }

    pub fn is_separable(self, rho: &DensityMatrix) -> Result<bool> {
        Ok(self.margin(rho)? <= self.tolerance())
    }
}

impl fmt::Display for Oracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oracle::Ppt => "ppt",
            Oracle::Wootters => "wootters",
        })
    }
}

impl FromStr for Oracle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ppt" => Ok(Oracle::Ppt),
            "wootters" => Ok(Oracle::Wootters),
            other => Err(Error::Domain(format!("unknown oracle {other:?}"))),
        }
    }
}

/// Smallest eigenvalue of the partial transpose on the second factor.
pub fn ppt_min_eigenvalue(rho: &DensityMatrix) -> Result<f64> {
    let pt = partial_transpose(rho.matrix(), rho.dims(), Subsystem::B)?;
    Ok(*eigvals_hermitian(&pt)?.last().expect("nonempty"))
}

/// `ρ_t = t·ρ + (1 − t)·τ`
pub fn segment_state(rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!(
            "segment parameter {t} outside [0, 1]"
        )));
    }
    rho.mix(&DensityMatrix::maximally_mixed(rho.dims()), t)
}

/// `inf ℓ = 2/(2 + d)` over all states of total dimension `d`.
pub fn vidal_tarrach_floor(d: usize) -> f64 {
    2.0 / (2.0 + d as f64)
}

/// Two-qubit minimal moduli over the flat spectra `e^(1)`, `e^(2)`, `e^(3)`.
pub fn lhat_constants() -> [f64; 3] {
    [1.0 / 3.0, FRAC_1_SQRT_2, 1.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusMethod {
    Bisection,
    ClosedForm,
    BoundOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulusResult {
    pub ell: f64,
    pub method: ModulusMethod,
    pub oracle: Option<Oracle>,
    pub iterations: u32,
    pub bracket_width: f64,
    /// `1/ℓ − 1`
    pub random_robustness: f64,
}

impl ModulusResult {
    fn new(
        ell: f64,
        method: ModulusMethod,
        oracle: Option<Oracle>,
        iterations: u32,
        bracket_width: f64,
    ) -> Self {
        Self {
            ell,
            method,
            oracle,
            iterations,
            bracket_width,
            random_robustness: 1.0 / ell - 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectOptions {
    pub tol: f64,
    pub max_iter: u32,
    /// Lower end of the initial bracket, assumed separable. Defaults to the
    /// Vidal–Tarrach floor.
    pub lower: Option<f64>,
}

impl Default for BisectOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 60,
            lower: None,
        }
    }
}

impl BisectOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

/// Bisection for `ℓ(ρ)`; returns the largest `t` known to be separable.
///
/// `ℓ(τ) = 1` by convention.
pub fn modulus_bisect(
    rho: &DensityMatrix,
    oracle: Oracle,
    opts: BisectOptions,
) -> Result<ModulusResult> {
    if !rho.is_two_qubit() {
        return Err(Error::OracleUnavailable { dim: rho.dim() });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance {} must be positive",
            opts.tol
        )));
    }
    let tau = DensityMatrix::maximally_mixed(rho.dims());
    if rho.distance(&tau) <= 1e-12 || oracle.is_separable(rho)? {
        return Ok(ModulusResult::new(
            1.0,
            ModulusMethod::Bisection,
            Some(oracle),
            0,
            0.0,
        ));
    }
    let mut lo = opts.lower.unwrap_or_else(|| vidal_tarrach_floor(rho.dim()));
    let mut hi = 1.0;
    let mut iterations = 0;
    while hi - lo > opts.tol && iterations < opts.max_iter {
        let mid = 0.5 * (lo + hi);
        if oracle.is_separable(&segment_state(rho, mid)?)? {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(ModulusResult::new(
        lo,
        ModulusMethod::Bisection,
        Some(oracle),
        iterations,
        hi - lo,
    ))
}

/// Lower bound on `ℓ` valid in any dimension: the Vidal–Tarrach floor, and
/// `1/(Σ_j μ_j/p_j + dλ_d)` from convexity of `1/ℓ` over the gap
/// representation with `p` the Vidal–Tarrach vector.
pub fn modulus_bound(rho: &DensityMatrix) -> ModulusResult {
    let d = rho.dim();
    if d < 2 {
        return ModulusResult::new(1.0, ModulusMethod::BoundOnly, None, 0, 0.0);
    }
    let spectrum = rho.spectrum();
    let p = PVector::vidal_tarrach(d).expect("d >= 2");
    let sum = proposition_sum(&spectrum, &p).expect("lengths agree");
    let residual = d as f64 * spectrum.lambda(d);
    let gap_bound = (1.0 / (sum + residual)).min(1.0);
    let ell = gap_bound.max(vidal_tarrach_floor(d));
    ModulusResult::new(ell, ModulusMethod::BoundOnly, None, 0, 1.0 - ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodChoice {
    Bisect,
    Closed,
    Auto,
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bisect" => Ok(MethodChoice::Bisect),
            "closed" => Ok(MethodChoice::Closed),
            "auto" => Ok(MethodChoice::Auto),
            other => Err(Error::Domain(format!("unknown method {other:?}"))),
        }
    }
}

/// `ℓ(ρ)` by the requested route. `Auto` uses the rank-2 closed form only on
/// configurations it covers, bisection otherwise, and bounds for `d ≠ 4`.
pub fn modulus(
    rho: &DensityMatrix,
    method: MethodChoice,
    oracle: Oracle,
    opts: BisectOptions,
) -> Result<ModulusResult> {
    match method {
        MethodChoice::Bisect => modulus_bisect(rho, oracle, opts),
        MethodChoice::Closed => {
            let analysis = rank2_closed_form(rho)?;
            Ok(ModulusResult::new(
                analysis.ell_closed,
                ModulusMethod::ClosedForm,
                None,
                0,
                0.0,
            ))
        }
        MethodChoice::Auto => {
            if !rho.is_two_qubit() {
                return Ok(modulus_bound(rho));
            }
            match rank2_closed_form(rho) {
                Ok(a) if a.closed_form_applies() => Ok(ModulusResult::new(
                    a.ell_closed,
                    ModulusMethod::ClosedForm,
                    None,
                    0,
                    0.0,
                )),
                _ => modulus_bisect(rho, oracle, opts),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Criterion2Outcome {
    /// `1 − dλ_d`
    pub weight: f64,
    /// `ℓ(ω)` for the normalized gap mixture ω.
    pub ell_omega: ModulusResult,
    pub separable: bool,
}

/// Decides separability through `1 − dλ_d ≤ ℓ(ω)`, with `ℓ(ω)` by bisection.
pub fn criterion2_check(
    rho: &DensityMatrix,
    oracle: Oracle,
    opts: BisectOptions,
) -> Result<Criterion2Outcome> {
    if !rho.is_two_qubit() {
        return Err(Error::OracleUnavailable { dim: rho.dim() });
    }
    let gap = gap_decompose(rho);
    let omega = gap.omega()?;
    let weight = 1.0 - gap.residual_weight();
    let ell_omega = modulus_bisect(&omega, oracle, opts)?;
    Ok(Criterion2Outcome {
        weight,
        ell_omega,
        separable: weight <= ell_omega.ell + 0.5 * ell_omega.bracket_width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{Complex64, ComplexMatrix};
    use crate::sampling::{random_pure_state, random_state, rank2_shared_line_state, rng_for};

    fn ket(v: [f64; 4]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn bell() -> DensityMatrix {
        DensityMatrix::pure(&ket([1.0, 0.0, 0.0, 1.0]), (2, 2)).unwrap()
    }

    fn lhat2_minimizer() -> DensityMatrix {
        let h = FRAC_1_SQRT_2;
        let m = &ComplexMatrix::outer(&ket([h, 0.0, 0.0, h])).scale(0.5)
            + &ComplexMatrix::outer(&ket([0.0, 1.0, 0.0, 0.0])).scale(0.5);
        DensityMatrix::new(m, (2, 2)).unwrap()
    }

    /// PPT modulus without bisection: the partial transpose is linear and
    /// fixes τ, so `λ_min((ρ_t)^{T_B}) = t·λ_min + (1 − t)/4`.
    fn analytic_ppt_modulus(rho: &DensityMatrix) -> f64 {
        let lmin = ppt_min_eigenvalue(rho).unwrap();
        if lmin >= 0.0 {
            1.0
        } else {
            0.25 / (0.25 - lmin)
        }
    }

    #[test]
    fn segment_endpoints_and_spectrum() {
        let rho = random_state((2, 2), &mut rng_for(1, 0));
        let tau = DensityMatrix::maximally_mixed((2, 2));
        assert!(segment_state(&rho, 0.0).unwrap().distance(&tau) < 1e-15);
        assert!(segment_state(&rho, 1.0).unwrap().distance(&rho) < 1e-15);
        assert!(segment_state(&rho, 1.5).is_err());

        let half = lhat2_minimizer();
        for t in [0.1, 0.5, 0.9] {
            let s = segment_state(&half, t).unwrap().spectrum();
            let (a, b) = crate::wootters::alpha_beta(t);
            assert!(s.max_deviation(&[a, a, b, b]) < 1e-14);
        }
    }

    #[test]
    fn bell_modulus_is_one_third() {
        for oracle in [Oracle::Ppt, Oracle::Wootters] {
            let r = modulus_bisect(&bell(), oracle, BisectOptions::default()).unwrap();
            assert!((r.ell - 1.0 / 3.0).abs() < 1e-6, "{oracle}: {r:?}");
            assert!(r.bracket_width <= 1e-8);
            assert!((r.random_robustness - 2.0).abs() < 1e-5);
        }
        let full = BisectOptions {
            lower: Some(0.0),
            ..BisectOptions::default()
        };
        let r = modulus_bisect(&bell(), Oracle::Ppt, full).unwrap();
        assert!((r.ell - 1.0 / 3.0).abs() < 1e-8);
    }

    #[test]
    fn minimizer_and_product_moduli() {
        let r = modulus_bisect(&lhat2_minimizer(), Oracle::Ppt, BisectOptions::default()).unwrap();
        assert!((r.ell - FRAC_1_SQRT_2).abs() < 1e-6);
        let product = DensityMatrix::diagonal(&[0.42, 0.18, 0.28, 0.12], (2, 2)).unwrap();
        let r = modulus_bisect(&product, Oracle::Ppt, BisectOptions::default()).unwrap();
        assert_eq!(r.ell, 1.0);
        assert_eq!(r.iterations, 0);
        let tau = DensityMatrix::maximally_mixed((2, 2));
        assert_eq!(
            modulus_bisect(&tau, Oracle::Wootters, BisectOptions::default())
                .unwrap()
                .ell,
            1.0
        );
    }

    #[test]
    fn bisection_matches_analytic_ppt_route() {
        let mut rng = rng_for(2, 0);
        for i in 0..300 {
            let rho = if i % 2 == 0 {
                random_pure_state((2, 2), &mut rng)
            } else {
                random_state((2, 2), &mut rng)
            };
            let r = modulus_bisect(&rho, Oracle::Ppt, BisectOptions::default()).unwrap();
            assert!((r.ell - analytic_ppt_modulus(&rho)).abs() <= 1e-8);
            assert!(r.ell >= 1.0 / 3.0 - 1e-9);
        }
    }

    #[test]
    fn oracles_agree_and_segment_is_monotone() {
        let mut rng = rng_for(3, 0);
        let opts = BisectOptions::default();
        for _ in 0..500 {
            let rho = random_pure_state((2, 2), &mut rng);
            let a = modulus_bisect(&rho, Oracle::Ppt, opts).unwrap();
            let b = modulus_bisect(&rho, Oracle::Wootters, opts).unwrap();
            assert!((a.ell - b.ell).abs() <= 2.0 * opts.tol, "{a:?} {b:?}");
            if a.ell < 1.0 {
                assert!(Oracle::Ppt
                    .is_separable(&segment_state(&rho, a.ell - opts.tol).unwrap())
                    .unwrap());
                assert!(!Oracle::Ppt
                    .is_separable(&segment_state(&rho, a.ell + opts.tol).unwrap())
                    .unwrap());
            }
            let verdicts: Vec<bool> = (0..=10)
                .map(|k| {
                    let t = k as f64 / 10.0;
                    Oracle::Ppt
                        .is_separable(&segment_state(&rho, t).unwrap())
                        .unwrap()
                })
                .collect();
            assert!(verdicts.windows(2).all(|w| w[0] || !w[1]), "{verdicts:?}");
        }
    }

    #[test]
    fn closed_form_matches_bisection_on_shared_line_family() {
        let mut rng = rng_for(4, 0);
        for _ in 0..200 {
            let rho = rank2_shared_line_state(&mut rng);
            let closed = modulus(
                &rho,
                MethodChoice::Closed,
                Oracle::Ppt,
                BisectOptions::default(),
            )
            .unwrap();
            let bisect = modulus_bisect(&rho, Oracle::Ppt, BisectOptions::default()).unwrap();
            assert!((closed.ell - bisect.ell).abs() <= 1e-6);
            assert!(closed.ell >= FRAC_1_SQRT_2 - 1e-9);
        }
    }

    #[test]
    fn auto_picks_a_sound_route() {
        let mut rng = rng_for(5, 0);
        let half = crate::states::Spectrum::new(vec![0.5, 0.5, 0.0, 0.0]).unwrap();
        for _ in 0..100 {
            let rho = crate::sampling::state_with_spectrum(&half, (2, 2), &mut rng).unwrap();
            let auto = modulus(
                &rho,
                MethodChoice::Auto,
                Oracle::Ppt,
                BisectOptions::default(),
            )
            .unwrap();
            assert!((auto.ell - analytic_ppt_modulus(&rho)).abs() <= 1e-8);
        }
        let six = random_state((2, 3), &mut rng);
        let r = modulus(
            &six,
            MethodChoice::Auto,
            Oracle::Ppt,
            BisectOptions::default(),
        )
        .unwrap();
        assert_eq!(r.method, ModulusMethod::BoundOnly);
        assert!(r.ell >= vidal_tarrach_floor(6) && r.ell <= 1.0);
        assert!(matches!(
            modulus_bisect(&six, Oracle::Ppt, BisectOptions::default()),
            Err(Error::OracleUnavailable { dim: 6 })
        ));
    }

    #[test]
    fn bound_is_a_lower_bound_for_two_qubits() {
        let mut rng = rng_for(6, 0);
        for _ in 0..300 {
            let rho = random_state((2, 2), &mut rng);
            let bound = modulus_bound(&rho);
            assert!(bound.ell <= analytic_ppt_modulus(&rho) + 1e-12);
        }
    }

    #[test]
    fn floor_and_constants() {
        assert!((vidal_tarrach_floor(4) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(vidal_tarrach_floor(6), 0.25);
        assert_eq!(vidal_tarrach_floor(2), 0.5);
        let [l1, l2, l3] = lhat_constants();
        assert_eq!(l1, vidal_tarrach_floor(4));
        assert_eq!(l2, FRAC_1_SQRT_2);
        assert_eq!(l3, 1.0);
        // e^(3) states sit on the Gurvits–Barnum sphere, hence ℓ̂₃ = 1.
        let mut rng = rng_for(7, 0);
        let e3 = crate::states::Spectrum::flat(3, 4).unwrap();
        let rho = crate::sampling::state_with_spectrum(&e3, (2, 2), &mut rng).unwrap();
        assert!((rho.purity() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            modulus_bisect(&rho, Oracle::Ppt, BisectOptions::default())
                .unwrap()
                .ell,
            1.0
        );
    }

    #[test]
    fn criterion2_examples_and_sweep() {
        let near_tau = DensityMatrix::diagonal(&[0.26, 0.25, 0.25, 0.24], (2, 2)).unwrap();
        assert!(
            criterion2_check(&near_tau, Oracle::Ppt, BisectOptions::default())
                .unwrap()
                .separable
        );
        let b = criterion2_check(&bell(), Oracle::Ppt, BisectOptions::default()).unwrap();
        assert!(!b.separable);
        assert!((b.ell_omega.ell - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(
            criterion2_check(
                &DensityMatrix::maximally_mixed((2, 2)),
                Oracle::Ppt,
                BisectOptions::default()
            )
            .unwrap_err(),
            Error::DegenerateTau
        );

        let mut rng = rng_for(8, 0);
        let opts = BisectOptions::default();
        for i in 0..1000 {
            let rho = if i % 3 == 0 {
                random_pure_state((2, 2), &mut rng)
            } else {
                random_state((2, 2), &mut rng)
            };
            let out = criterion2_check(&rho, Oracle::Ppt, opts).unwrap();
            if (out.weight - out.ell_omega.ell).abs() <= 2.0 * opts.tol {
                continue;
            }
            assert_eq!(out.separable, Oracle::Ppt.is_separable(&rho).unwrap());
        }
    }

    #[test]
    fn oracle_names_parse() {
        assert_eq!("ppt".parse::<Oracle>().unwrap(), Oracle::Ppt);
        assert_eq!("wootters".parse::<Oracle>().unwrap(), Oracle::Wootters);
        assert!("x".parse::<Oracle>().is_err());
        assert_eq!("auto".parse::<MethodChoice>().unwrap(), MethodChoice::Auto);
    }
}
