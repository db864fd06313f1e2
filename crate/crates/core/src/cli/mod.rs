//! Command-line front end. Every command builds a JSON value; `main` prints
//! it (or a plain-text rendering with `--pretty`) and maps the outcome to an
//! exit code: 0 success, 1 verification failure, 2 input error.

mod pretty;
pub mod verify;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::criteria::{evaluate_all, Region};
use crate::error::{Error, Result};
use crate::gap::{gap_decompose, proposition_sum, PVector};
use crate::linalg::ComplexMatrix;
use crate::robustness::{modulus, modulus_bisect, BisectOptions, MethodChoice, Oracle};
use crate::sampling::{map_indexed, SampleConfig};
use crate::states::io::{parse_spectrum, read_spectrum, read_state, to_json};
use crate::states::{CriteriaReport, CriterionRecord, DensityMatrix, Spectrum, Verdict};
use crate::wootters::wootters_check;

pub use pretty::render as render_pretty;

pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "sepcrit",
    version,
    about = "Spectral separability criteria for bipartite states"
)]
pub struct Cli {
    /// Human-readable tables instead of JSON.
    #[arg(long, global = true)]
    pub pretty: bool,

    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Ppt,
    Wootters,
}

impl From<OracleArg> for Oracle {
    fn from(o: OracleArg) -> Self {
        match o {
            OracleArg::Ppt => Oracle::Ppt,
            OracleArg::Wootters => Oracle::Wootters,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bisect,
    Closed,
    Auto,
}

impl From<MethodArg> for MethodChoice {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bisect => MethodChoice::Bisect,
            MethodArg::Closed => MethodChoice::Closed,
            MethodArg::Auto => MethodChoice::Auto,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// All spectral criteria plus PPT and Wootters on one state file.
    Check { state: PathBuf },

    /// Region membership for a spectrum given as values or a CSV file.
    Spectrum {
        #[arg(allow_negative_numbers = true, required_unless_present = "file")]
        values: Vec<f64>,
        #[arg(long, conflicts_with = "values")]
        file: Option<PathBuf>,
    },

    /// Gap representation and proposition sums.
    Gap { state: PathBuf },

    /// Modulus of separability.
    Ell {
        state: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "ppt")]
        oracle: OracleArg,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },

    /// Batch statistics over seeded random states.
    Sample {
        /// Comma-separated fixed spectrum.
        #[arg(long, conflicts_with = "region")]
        spectrum: Option<String>,
        /// a, b, c, thm2 or gb.
        #[arg(long)]
        region: Option<String>,
        #[arg(long, default_value_t = 1000)]
        count: u64,
        #[arg(long, env = "SEPCRIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_parser = parse_dims, default_value = "2x2")]
        dims: (usize, usize),
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },

    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: verify::Suite,
        #[arg(long, env = "SEPCRIT_SEED", default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(['x', 'X', ','])
        .ok_or_else(|| format!("expected AxB, got {s:?}"))?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a == 0 || b == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((a, b))
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub value: Value,
    /// False only for verification failures.
    pub passed: bool,
}

impl Outcome {
    fn ok(value: Value) -> Self {
        Self {
            value,
            passed: true,
        }
    }

    pub fn exit_code(&self) -> u8 {
        if self.passed {
            0
        } else {
            1
        }
    }

    pub fn render(&self, pretty: bool) -> String {
        if pretty {
            render_pretty(&self.value)
        } else {
            to_json(&self.value)
        }
    }
}

/// JSON document written to stderr for input errors.
pub fn error_json(err: &Error) -> String {
    let mut body = json!({ "kind": err.kind(), "message": err.to_string() });
    if let Error::MalformedInput { location, .. } = err {
        body["location"] = json!(location);
    }
    if let Error::ValidationFailure(inner) = err {
        body["cause"] = json!(inner.kind());
    }
    to_json(&json!({ "error": body }))
}

fn value_of<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

pub fn run(command: &Command) -> Result<Outcome> {
    match command {
        Command::Check { state } => cmd_check(&read_state(state)?).map(Outcome::ok),
        Command::Spectrum { values, file } => {
            let spectrum = match file {
                Some(path) => read_spectrum(path)?,
                None => Spectrum::new(values.clone())?,
            };
            Ok(Outcome::ok(cmd_spectrum(&spectrum)))
        }
        Command::Gap { state } => cmd_gap(&read_state(state)?).map(Outcome::ok),
        Command::Ell {
            state,
            method,
            oracle,
            tol,
        } => cmd_ell(
            &read_state(state)?,
            (*method).into(),
            (*oracle).into(),
            *tol,
        )
        .map(Outcome::ok),
        Command::Sample {
            spectrum,
            region,
            count,
            seed,
            dims,
            jobs,
        } => {
            let config = SampleConfig {
                seed: *seed,
                count: *count,
                dims: *dims,
                spectrum: spectrum.as_deref().map(parse_spectrum).transpose()?,
                region: region.as_deref().map(str::parse::<Region>).transpose()?,
            };
            cmd_sample(&config, *jobs).map(Outcome::ok)
        }
        Command::Verify { suite, seed, jobs } => {
            let report = verify::run_suite(*suite, *seed, *jobs)?;
            Ok(Outcome {
                passed: report.passed,
                value: value_of(&report),
            })
        }
    }
}

/// Spectral criteria with the state's own dims, plus the two exact oracles.
pub fn check_report(rho: &DensityMatrix) -> Result<CriteriaReport> {
    let mut report = evaluate_all(&rho.spectrum());
    report.dims = vec![rho.dims().0, rho.dims().1];
    if rho.is_two_qubit() {
        report.criteria.push(CriterionRecord::from_margin(
            "ppt",
            Oracle::Ppt.margin(rho)?,
        ));
        report.criteria.push(CriterionRecord::from_margin(
            "wootters",
            wootters_check(rho)?.margin(),
        ));
    } else {
        report.criteria.push(CriterionRecord::not_applicable("ppt"));
        report
            .criteria
            .push(CriterionRecord::not_applicable("wootters"));
    }
    Ok(report)
}

pub fn cmd_check(rho: &DensityMatrix) -> Result<Value> {
    let report = check_report(rho)?;
    let mut value = value_of(&report);
    if rho.is_two_qubit() {
        value["concurrence"] = json!(wootters_check(rho)?.concurrence);
    }
    Ok(value)
}

pub fn cmd_spectrum(spectrum: &Spectrum) -> Value {
    value_of(&evaluate_all(spectrum))
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect();
    value_of(&rows)
}

pub fn cmd_gap(rho: &DensityMatrix) -> Result<Value> {
    let gap = gap_decompose(rho);
    let d = rho.dim();
    let spectrum = gap.spectrum();
    let averaged: Vec<Value> = gap
        .averaged_states()
        .iter()
        .zip(gap.gaps())
        .enumerate()
        .map(|(k, (state, mu))| {
            json!({
                "j": k + 1,
                "mu": mu,
                "purity": state.purity(),
                "matrix": matrix_json(state.matrix()),
            })
        })
        .collect();
    let mut presets = Vec::new();
    if d == 4 {
        presets.push(("two_qubit_lhat", PVector::two_qubit_lhat()));
    }
    if d >= 2 {
        presets.push(("vidal_tarrach", PVector::vidal_tarrach(d)?));
    }
    let propositions: Vec<Value> = presets
        .into_iter()
        .map(|(name, p)| {
            let sum = proposition_sum(spectrum, &p)?;
            Ok(json!({
                "preset": name,
                "p": p.values(),
                "sum": sum,
                "separable_certified": sum <= 1.0 + crate::states::B_TOL,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "dims": [rho.dims().0, rho.dims().1],
        "spectrum": spectrum.values(),
        "gaps": gap.gaps(),
        "residual_weight": gap.residual_weight(),
        "reconstruction_error": gap.reconstruct().distance(rho.matrix()),
        "averaged_states": averaged,
        "propositions": propositions,
    }))
}

pub fn cmd_ell(
    rho: &DensityMatrix,
    method: MethodChoice,
    oracle: Oracle,
    tol: f64,
) -> Result<Value> {
    let result = modulus(rho, method, oracle, BisectOptions::with_tol(tol))?;
    let mut value = value_of(&result);
    value["dim"] = json!(rho.dim());
    Ok(value)
}

#[derive(Debug, Clone, Serialize)]
struct CriterionStats {
    name: String,
    inside: u64,
    outside: u64,
    boundary: u64,
    not_applicable: u64,
    min_margin: Option<f64>,
    max_margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
struct SampleStats {
    seed: u64,
    count: u64,
    dims: [usize; 2],
    spectrum: Option<Vec<f64>>,
    region: Option<String>,
    criteria: Vec<CriterionStats>,
    /// `agreement[i][j]`: fraction of samples where both criteria apply and
    /// agree on inside-or-boundary.
    agreement_names: Vec<String>,
    agreement: Vec<Vec<Option<f64>>>,
    /// Samples a spectral criterion certifies but PPT rejects.
    soundness_violations: u64,
    min_ell: Option<f64>,
    max_ell: Option<f64>,
}

pub fn cmd_sample(config: &SampleConfig, jobs: usize) -> Result<Value> {
    config.validate()?;
    let per_sample: Vec<Result<(CriteriaReport, Option<f64>)>> =
        map_indexed(config.count, jobs, |i| {
            let (_, rho) = config.draw(i)?;
            let report = check_report(&rho)?;
            let ell = if rho.is_two_qubit() {
                Some(modulus_bisect(&rho, Oracle::Ppt, BisectOptions::default())?.ell)
            } else {
                None
            };
            Ok((report, ell))
        });
    let samples: Vec<(CriteriaReport, Option<f64>)> =
        per_sample.into_iter().collect::<Result<_>>()?;

    let names: Vec<String> = samples[0]
        .0
        .criteria
        .iter()
        .map(|c| c.name.clone())
        .collect();
    let mut stats: Vec<CriterionStats> = names
        .iter()
        .map(|name| CriterionStats {
            name: name.clone(),
            inside: 0,
            outside: 0,
            boundary: 0,
            not_applicable: 0,
            min_margin: None,
            max_margin: None,
        })
        .collect();
    let n = names.len();
    let mut agree = vec![vec![0u64; n]; n];
    let mut both = vec![vec![0u64; n]; n];
    let mut violations = 0;
    for (report, _) in &samples {
        for (s, rec) in stats.iter_mut().zip(&report.criteria) {
            match rec.verdict {
                Verdict::In => s.inside += 1,
                Verdict::Out => s.outside += 1,
                Verdict::Boundary => s.boundary += 1,
                Verdict::NotApplicable => s.not_applicable += 1,
            }
            if let Some(m) = rec.margin {
                s.min_margin = Some(s.min_margin.map_or(m, |x| x.min(m)));
                s.max_margin = Some(s.max_margin.map_or(m, |x| x.max(m)));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (report.criteria[i].verdict, report.criteria[j].verdict);
                if a != Verdict::NotApplicable && b != Verdict::NotApplicable {
                    both[i][j] += 1;
                    if a.is_inside_closure() == b.is_inside_closure() {
                        agree[i][j] += 1;
                    }
                }
            }
        }
        let ppt_out = report.get("ppt").is_some_and(|r| r.verdict == Verdict::Out);
        let certified = Region::ALL.iter().any(|r| {
            report
                .get(r.name())
                .is_some_and(|rec| rec.verdict.is_inside_closure())
        });
        if ppt_out && certified {
            violations += 1;
        }
    }
    let agreement = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (both[i][j] > 0).then(|| agree[i][j] as f64 / both[i][j] as f64))
                .collect()
        })
        .collect();
    let ells: Vec<f64> = samples.iter().filter_map(|(_, e)| *e).collect();
    let stats = SampleStats {
        seed: config.seed,
        count: config.count,
        dims: [config.dims.0, config.dims.1],
        spectrum: config.spectrum.as_ref().map(|s| s.values().to_vec()),
        region: config.region.map(|r| r.name().to_string()),
        criteria: stats,
        agreement_names: names,
        agreement,
        soundness_violations: violations,
        min_ell: ells.iter().copied().reduce(f64::min),
        max_ell: ells.iter().copied().reduce(f64::max),
    };
    Ok(value_of(&stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Complex64;

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [h, 0.0, 0.0, h].map(|x| Complex64::new(x, 0.0));
        DensityMatrix::pure(&psi, (2, 2)).unwrap()
    }

    #[test]
    fn spectrum_of_tau() {
        let v = cmd_spectrum(&Spectrum::uniform(4));
        let criteria = v["criteria"].as_array().unwrap();
        assert_eq!(criteria.len(), 5);
        assert_eq!(criteria[0]["name"], "theorem1");
        assert_eq!(criteria[0]["margin"].as_f64().unwrap(), -0.5);
        for c in criteria {
            assert_eq!(c["verdict"], "in", "{c}");
        }
    }

    #[test]
    fn check_bell_and_product() {
        let v = cmd_check(&bell()).unwrap();
        assert_eq!(v["dims"], json!([2, 2]));
        let names: Vec<&str> = v["criteria"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["name"].as_str().unwrap())
            .collect();
        assert!(names.contains(&"ppt") && names.contains(&"wootters"));
        let ppt = v["criteria"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == "ppt")
            .unwrap();
        assert_eq!(ppt["verdict"], "out");
        assert!((v["concurrence"].as_f64().unwrap() - 1.0).abs() < 1e-9);

        let six = DensityMatrix::maximally_mixed((2, 3));
        let v = cmd_check(&six).unwrap();
        let ppt = v["criteria"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == "ppt")
            .unwrap();
        assert_eq!(ppt["verdict"], "not_applicable");
    }

    #[test]
    fn ell_on_bell() {
        let v = cmd_ell(&bell(), MethodChoice::Auto, Oracle::Ppt, 1e-8).unwrap();
        assert!((v["ell"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert_eq!(v["method"], "bisection");
        assert_eq!(v["oracle"], "ppt");
    }

    #[test]
    fn gap_dump_has_both_presets() {
        let v = cmd_gap(&bell()).unwrap();
        assert_eq!(v["propositions"].as_array().unwrap().len(), 2);
        assert!(v["reconstruction_error"].as_f64().unwrap() < 1e-12);
        assert_eq!(v["averaged_states"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn sample_is_job_independent() {
        let config = SampleConfig {
            seed: 9,
            count: 40,
            dims: (2, 2),
            spectrum: None,
            region: Some(Region::A),
        };
        let a = to_json(&cmd_sample(&config, 1).unwrap());
        let b = to_json(&cmd_sample(&config, 4).unwrap());
        assert_eq!(a, b);
        let v = cmd_sample(&config, 1).unwrap();
        assert_eq!(v["soundness_violations"], 0);
        assert_eq!(v["criteria"][0]["outside"], 0);
        assert!(v["min_ell"].as_f64().unwrap() >= 1.0 / 3.0 - 1e-9);
    }

    #[test]
    fn error_document_shape() {
        let err = Error::ValidationFailure(Box::new(Error::NotPsd {
            min_eigenvalue: -0.1,
        }));
        let v: Value = serde_json::from_str(&error_json(&err)).unwrap();
        assert_eq!(v["error"]["kind"], "validation_failure");
        assert_eq!(v["error"]["cause"], "not_psd");
    }

    #[test]
    fn dims_parser() {
        assert_eq!(parse_dims("2x3").unwrap(), (2, 3));
        assert_eq!(parse_dims("3,3").unwrap(), (3, 3));
        assert!(parse_dims("0x2").is_err());
        assert!(parse_dims("4").is_err());
    }
}
