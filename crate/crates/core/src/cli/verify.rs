//! Seeded verification suites. Each check reduces a sweep to its largest
//! residual and compares it with a tolerance; residuals of a sweep are
//! combined with `max`, so the report does not depend on the worker count.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use clap::ValueEnum;
use rand::Rng;
use serde::Serialize;

use crate::criteria::{purity_ball_not_a, theorem1_vertices, Region};
use crate::error::Result;
use crate::gap::{gap_decompose, theorem1_from_proposition, theorem2_from_proposition};
use crate::linalg::{eigvals_hermitian, Complex64};
use crate::robustness::{
    criterion2_check, modulus_bisect, ppt_min_eigenvalue, segment_state, BisectOptions, Oracle,
};
use crate::sampling::{
    map_indexed, random_pure_state, random_state, rank2_shared_line_state, rng_for,
    spectrum_in_region, spectrum_on_inscribed_sphere, spectrum_uniform, state_with_spectrum,
    SampleRng,
};
use crate::states::{fixtures, Spectrum, B_TOL};
use crate::wootters::{
    rank2_closed_form, separability_threshold, w2_matrix, wootters_check, zeta_pm,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Vertices,
    Containment,
    Gap,
    Appendix,
    Convexity,
    All,
}

impl Suite {
    const EACH: [Suite; 5] = [
        Suite::Vertices,
        Suite::Containment,
        Suite::Gap,
        Suite::Appendix,
        Suite::Convexity,
    ];
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub suite: Suite,
    pub name: &'static str,
    pub samples: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub passed: bool,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

struct Runner {
    suite: Suite,
    seed: u64,
    jobs: usize,
    tag: u64,
    checks: Vec<CheckResult>,
}

/// NaN counts as an infinite residual.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::INFINITY
    } else {
        a.max(b)
    }
}

impl Runner {
    fn record(&mut self, name: &'static str, samples: u64, tolerance: f64, max_residual: f64) {
        self.checks.push(CheckResult {
            suite: self.suite,
            name,
            samples,
            tolerance,
            max_residual,
            passed: max_residual <= tolerance,
        });
    }

    /// Runs `f` on `count` independent streams and records the largest residual.
    fn sweep<F>(&mut self, name: &'static str, count: u64, tolerance: f64, f: F) -> Result<()>
    where
        F: Fn(&mut SampleRng) -> Result<f64> + Sync + Send,
    {
        self.tag += 1;
        let (seed, tag) = (self.seed, self.tag);
        let residuals = map_indexed(count, self.jobs, |i| f(&mut rng_for(seed, (tag << 32) | i)));
        let mut max = 0.0;
        for r in residuals {
            max = worst(max, r?);
        }
        self.record(name, count, tolerance, max);
        Ok(())
    }
}

fn spec(values: &[f64]) -> Spectrum {
    Spectrum::new(values.to_vec()).expect("valid spectrum")
}

fn vertices(r: &mut Runner) -> Result<()> {
    let verts = theorem1_vertices();
    // τ spans the simplex but sits strictly inside the inequality.
    let mut max = (Region::A.margin(&spec(&verts[3]))? + 0.5).abs();
    for v in &verts[..3] {
        max = worst(max, Region::A.margin(&spec(v))?.abs());
    }
    r.record("theorem1_vertex_margins", 4, 1e-12, max);

    r.sweep("theorem1_vertex_hull", 100, 1e-12, |rng| {
        let w = spectrum_uniform(4, rng);
        let mut mix = [0.0; 4];
        for (k, v) in verts.iter().enumerate() {
            for (m, x) in mix.iter_mut().zip(v) {
                *m += w.values()[k] * x;
            }
        }
        Ok(Region::A.margin(&spec(&mix))?.max(0.0))
    })?;

    let hi = (2.0 + SQRT_2) / 8.0;
    let lo = (2.0 - SQRT_2) / 8.0;
    let s = spec(&[hi, hi, lo, lo]);
    let residual = worst((s.purity() - 0.375).abs(), Region::A.margin(&s)?.max(0.0));
    let outside_b = Region::B.margin(&s)? > B_TOL;
    r.record(
        "in_a_not_b",
        1,
        1e-12,
        if outside_b { residual } else { f64::INFINITY },
    );

    let s = spec(&purity_ball_not_a());
    let expected = 5.0 / 3.0 + SQRT_2 / 4.0 - 2.0;
    let residual = worst(
        (s.purity() - 1.0 / 3.0).abs(),
        (Region::A.margin(&s)? - expected).abs(),
    );
    r.record(
        "in_b_not_a",
        1,
        1e-12,
        if expected > 0.0 {
            residual
        } else {
            f64::INFINITY
        },
    );
    Ok(())
}

fn containment(r: &mut Runner) -> Result<()> {
    r.sweep("a_subset_c", 100_000, B_TOL, |rng| {
        let s = spectrum_in_region(Region::A, 4, rng)?;
        Ok(Region::C.margin(&s)?.max(0.0))
    })?;
    r.sweep("purity_sphere_identity", 100_000, 1e-9, |rng| {
        let s = spectrum_on_inscribed_sphere(4, rng);
        let l = s.values();
        let lhs = (l[0] - l[2]).powi(2) - 4.0 * l[1] * l[3];
        let rhs = -3.0 * (l[0] + l[2] - 2.0 / 3.0).powi(2);
        Ok((lhs - rhs).abs())
    })?;
    r.sweep("theorem2_implies_theorem1", 100_000, B_TOL, |rng| {
        let s = spectrum_uniform(4, rng);
        if Region::Theorem2.margin(&s)? <= 0.0 {
            Ok(Region::A.margin(&s)?.max(0.0))
        } else {
            Ok(0.0)
        }
    })?;
    for (name, region) in [
        ("soundness_theorem1", Region::A),
        ("soundness_purity_ball", Region::B),
        ("soundness_region_c", Region::C),
        ("soundness_theorem2", Region::Theorem2),
        ("soundness_gurvits_barnum", Region::GurvitsBarnum),
    ] {
        r.sweep(name, 2000, 1e-9, move |rng| {
            let s = spectrum_in_region(region, 4, rng)?;
            let rho = state_with_spectrum(&s, (2, 2), rng)?;
            Ok((-ppt_min_eigenvalue(&rho)?).max(0.0))
        })?;
    }
    r.sweep("wootters_ppt_concordance", 2000, 0.0, |rng| {
        let rho = random_state((2, 2), rng);
        let ppt = Oracle::Ppt.margin(&rho)?;
        let w = wootters_check(&rho)?.margin();
        if ppt.abs() <= 1e-7 || w.abs() <= 1e-7 {
            return Ok(0.0);
        }
        Ok(if (ppt <= 0.0) == (w <= 0.0) { 0.0 } else { 1.0 })
    })?;
    Ok(())
}

fn gap(r: &mut Runner) -> Result<()> {
    for (name, dims) in [
        ("gap_reconstruction_d4", (2, 2)),
        ("gap_reconstruction_d6", (2, 3)),
    ] {
        r.sweep(name, 500, 1e-12, move |rng| {
            let rho = random_state(dims, rng);
            Ok(gap_decompose(&rho).reconstruct().distance(rho.matrix()))
        })?;
    }
    for (name, dims) in [
        ("averaged_spectra_d4", (2, 2)),
        ("averaged_spectra_d6", (2, 3)),
    ] {
        r.sweep(name, 500, 1e-10, move |rng| {
            let rho = random_state(dims, rng);
            let gap = gap_decompose(&rho);
            let d = rho.dim();
            let mut max = 0.0;
            for (k, state) in gap.averaged_states().iter().enumerate() {
                let flat = Spectrum::flat(k + 1, d)?;
                max = worst(max, state.spectrum().max_deviation(flat.values()));
            }
            Ok(max)
        })?;
    }
    for (name, dims) in [
        ("gb_boundary_purity_d4", (2, 2)),
        ("gb_boundary_purity_d6", (2, 3)),
    ] {
        r.sweep(name, 200, 1e-12, move |rng| {
            let rho = random_state(dims, rng);
            let d = rho.dim();
            let top = gap_decompose(&rho).averaged_state(d - 1).expect("j < d");
            Ok((top.purity() - 1.0 / (d as f64 - 1.0)).abs())
        })?;
    }
    r.sweep("theorem1_proposition_identity", 10_000, 1e-12, |rng| {
        let w = theorem1_from_proposition(&spectrum_uniform(4, rng))?;
        let residual = (w.proposition_sum - 1.0 - 2.0 * w.region_margin).abs();
        Ok(if w.agrees() { residual } else { f64::INFINITY })
    })?;
    for (name, d) in [
        ("theorem2_proposition_identity_d4", 4),
        ("theorem2_proposition_identity_d6", 6),
        ("theorem2_proposition_identity_d9", 9),
    ] {
        r.sweep(name, 10_000, 1e-12, move |rng| {
            let w = theorem2_from_proposition(&spectrum_uniform(d, rng), d)?;
            let residual = (w.proposition_sum - 1.0 - d as f64 / 2.0 * w.region_margin).abs();
            Ok(if w.agrees() { residual } else { f64::INFINITY })
        })?;
    }
    Ok(())
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn appendix(r: &mut Runner) -> Result<()> {
    let mut max = 0.0;
    for k in 0..50 {
        let alpha = 0.25 + 0.25 * k as f64 / 49.0;
        max = worst(max, (zeta_pm(alpha, 1.0)?.plus - alpha * alpha).abs());
    }
    r.record("zeta_plus_at_xi_one", 50, 1e-12, max);

    let grid: Vec<(f64, f64)> = (0..20)
        .flat_map(|i| (0..20).map(move |j| (0.25 + 0.25 * i as f64 / 19.0, j as f64 / 20.0)))
        .collect();
    let mut block = 0.0;
    let mut forms = 0.0;
    let mut rng = rng_for(r.seed, (r.tag + 1) << 32);
    r.tag += 1;
    for &(alpha, xi) in &grid {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let norm = (1.0 - xi).sqrt();
        let eta = [
            Complex64::new(norm * theta.cos(), 0.0),
            Complex64::from_polar(norm * theta.sin(), phase),
        ];
        let numeric = eigvals_hermitian(&w2_matrix(alpha, xi, eta)?)?;
        let z = zeta_pm(alpha, xi)?;
        let beta = 0.5 - alpha;
        let expected = sorted_desc(vec![alpha * alpha, beta * beta, z.plus, z.minus]);
        for (a, b) in numeric.iter().zip(&expected) {
            block = worst(block, (a - b).abs());
        }
        if !separability_threshold(alpha, xi)?.consistent() {
            forms = f64::INFINITY;
        }
    }
    r.record("w2_block_spectrum", grid.len() as u64, 1e-9, block);
    r.record("threshold_forms_agree", grid.len() as u64, 0.0, forms);

    let fine = BisectOptions {
        tol: 1e-12,
        max_iter: 60,
        lower: None,
    };
    let minimizer = fixtures::lhat2_minimizer();
    let closed = rank2_closed_form(&minimizer)?.ell_closed;
    let bisect = modulus_bisect(&minimizer, Oracle::Ppt, fine)?.ell;
    r.record(
        "lhat2_fixture",
        1,
        1e-9,
        worst(
            (closed - FRAC_1_SQRT_2).abs(),
            (bisect - FRAC_1_SQRT_2).abs(),
        ),
    );
    let bell = modulus_bisect(&fixtures::bell(), Oracle::Wootters, fine)?.ell;
    r.record("bell_modulus", 1, 1e-9, (bell - 1.0 / 3.0).abs());

    r.sweep("shared_line_closed_form", 200, 1e-9, move |rng| {
        let rho = rank2_shared_line_state(rng);
        let analysis = rank2_closed_form(&rho)?;
        if !analysis.closed_form_applies() {
            return Ok(f64::INFINITY);
        }
        let bisect = modulus_bisect(&rho, Oracle::Ppt, fine)?.ell;
        Ok((analysis.ell_closed - bisect).abs())
    })?;
    Ok(())
}

fn convexity(r: &mut Runner) -> Result<()> {
    let opts = BisectOptions::with_tol(1e-9);
    let ell = move |rho: &crate::states::DensityMatrix| -> Result<f64> {
        Ok(modulus_bisect(rho, Oracle::Ppt, opts)?.ell)
    };
    let draw = |rng: &mut SampleRng| {
        if rng.random::<bool>() {
            random_pure_state((2, 2), rng)
        } else {
            random_state((2, 2), rng)
        }
    };
    r.sweep("convexity_of_inverse_modulus", 200, 1e-6, move |rng| {
        let rho = draw(rng);
        let phi = draw(rng);
        let (lr, lp) = (ell(&rho)?, ell(&phi)?);
        let mut max = 0.0;
        for s in [0.25, 0.5, 0.75] {
            let bound = 1.0 / (s / lr + (1.0 - s) / lp);
            max = worst(max, (bound - ell(&rho.mix(&phi, s)?)?).max(0.0));
        }
        Ok(max)
    })?;
    r.sweep("oracle_concordance", 200, 2.0 * opts.tol, move |rng| {
        let rho = draw(rng);
        let a = modulus_bisect(&rho, Oracle::Ppt, opts)?.ell;
        let b = modulus_bisect(&rho, Oracle::Wootters, opts)?.ell;
        Ok((a - b).abs())
    })?;
    r.sweep("vidal_tarrach_floor", 200, 1e-9, move |rng| {
        Ok((1.0 / 3.0 - ell(&draw(rng))?).max(0.0))
    })?;
    r.sweep("monotone_segment", 100, 0.0, move |rng| {
        let rho = draw(rng);
        let mut seen_entangled = false;
        for k in 0..=10 {
            let sep = Oracle::Ppt.is_separable(&segment_state(&rho, k as f64 / 10.0)?)?;
            if sep && seen_entangled {
                return Ok(1.0);
            }
            seen_entangled |= !sep;
        }
        Ok(0.0)
    })?;
    r.sweep("criterion2_equivalence", 300, 0.0, move |rng| {
        let rho = draw(rng);
        let out = criterion2_check(&rho, Oracle::Ppt, opts)?;
        if (out.weight - out.ell_omega.ell).abs() <= 2.0 * opts.tol {
            return Ok(0.0);
        }
        Ok(if out.separable == Oracle::Ppt.is_separable(&rho)? {
            0.0
        } else {
            1.0
        })
    })?;
    Ok(())
}

pub fn run_suite(suite: Suite, seed: u64, jobs: usize) -> Result<VerifyReport> {
    let suites: Vec<Suite> = if suite == Suite::All {
        Suite::EACH.to_vec()
    } else {
        vec![suite]
    };
    let mut checks = Vec::new();
    for (k, s) in suites.into_iter().enumerate() {
        let mut runner = Runner {
            suite: s,
            seed,
            jobs,
            // Streams are keyed by suite so a suite draws the same samples
            // alone or inside `all`.
            tag: (Suite::EACH.iter().position(|x| *x == s).unwrap_or(k) as u64) << 16,
            checks: Vec::new(),
        };
        match s {
            Suite::Vertices => vertices(&mut runner)?,
            Suite::Containment => containment(&mut runner)?,
            Suite::Gap => gap(&mut runner)?,
            Suite::Appendix => appendix(&mut runner)?,
            Suite::Convexity => convexity(&mut runner)?,
            Suite::All => unreachable!("expanded above"),
        }
        checks.extend(runner.checks);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(VerifyReport {
        suite,
        seed,
        passed: failed == 0,
        failed,
        checks,
    })
}
