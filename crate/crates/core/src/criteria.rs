//! Spectral regions that certify separability.
//!
//! Every margin is normalized so that `margin ≤ 0` means "inside". The
//! two-qubit regions (theorem 1, the purity ball and region C) refuse any
//! other dimension.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{CriteriaReport, CriterionRecord, Spectrum, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    /// `3λ₁ + √2·λ₂ + (3 − √2)·λ₃ ≤ 2` (two qubits)
    A,
    /// `tr ρ² ≤ 1/3` (two qubits)
    B,
    /// `λ₁ − λ₃ − 2√(λ₂λ₄) ≤ 0` (two qubits)
    C,
    /// `3λ_d + (d − 1)·λ_{d−1} ≥ 1`
    Theorem2,
    /// `tr ρ² ≤ 1/(d − 1)`
    GurvitsBarnum,
}

impl Region {
    pub const ALL: [Region; 5] = [
        Region::A,
        Region::B,
        Region::C,
        Region::Theorem2,
        Region::GurvitsBarnum,
    ];

    /// Name used in reports.
    pub fn name(self) -> &'static str {
        match self {
            Region::A => "theorem1",
            Region::B => "purity_ball",
            Region::C => "region_c",
            Region::Theorem2 => "theorem2",
            Region::GurvitsBarnum => "gurvits_barnum",
        }
    }

    pub fn two_qubit_only(self) -> bool {
        matches!(self, Region::A | Region::B | Region::C)
    }

    pub fn margin(self, spectrum: &Spectrum) -> Result<f64> {
        let lam = spectrum.values();
        let d = lam.len();
        if self.two_qubit_only() && d != 4 {
            return Err(Error::WrongDimension {
                expected: 4,
                found: d,
            });
        }
        if d < 2 {
            return Err(Error::Domain(format!(
                "bipartite criteria need d >= 2, got {d}"
            )));
        }
        Ok(match self {
            Region::A => 3.0 * lam[0] + SQRT_2 * lam[1] + (3.0 - SQRT_2) * lam[2] - 2.0,
            Region::B => spectrum.purity() - 1.0 / 3.0,
            Region::C => lam[0] - lam[2] - 2.0 * (lam[1] * lam[3]).sqrt(),
            Region::Theorem2 => 1.0 - 3.0 * lam[d - 1] - (d as f64 - 1.0) * lam[d - 2],
            Region::GurvitsBarnum => spectrum.purity() - 1.0 / (d as f64 - 1.0),
        })
    }

    pub fn evaluate(self, spectrum: &Spectrum) -> Result<RegionVerdict> {
        let margin = self.margin(spectrum)?;
        Ok(RegionVerdict {
            region: self,
            margin,
            verdict: Verdict::from_margin(margin),
        })
    }

    /// Whether the region is defined for total dimension `d`.
    pub fn applies_to(self, d: usize) -> bool {
        if self.two_qubit_only() {
            d == 4
        } else {
            d >= 2
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Region {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" | "theorem1" => Ok(Region::A),
            "b" | "purity_ball" => Ok(Region::B),
            "c" | "region_c" => Ok(Region::C),
            "thm2" | "theorem2" => Ok(Region::Theorem2),
            "gb" | "gurvits_barnum" => Ok(Region::GurvitsBarnum),
            other => Err(Error::Domain(format!("unknown region {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionVerdict {
    pub region: Region,
    pub margin: f64,
    pub verdict: Verdict,
}

impl RegionVerdict {
    pub fn record(&self) -> CriterionRecord {
        CriterionRecord::from_margin(self.region.name(), self.margin)
    }
}

pub fn region_a(spectrum: &Spectrum) -> Result<RegionVerdict> {
    Region::A.evaluate(spectrum)
}

pub fn region_b(spectrum: &Spectrum) -> Result<RegionVerdict> {
    Region::B.evaluate(spectrum)
}

pub fn region_c(spectrum: &Spectrum) -> Result<RegionVerdict> {
    Region::C.evaluate(spectrum)
}

/// `d` must equal the spectrum length.
pub fn theorem2(spectrum: &Spectrum, d: usize) -> Result<RegionVerdict> {
    check_len(spectrum, d)?;
    Region::Theorem2.evaluate(spectrum)
}

pub fn gurvits_barnum(spectrum: &Spectrum, d: usize) -> Result<RegionVerdict> {
    check_len(spectrum, d)?;
    Region::GurvitsBarnum.evaluate(spectrum)
}

fn check_len(spectrum: &Spectrum, d: usize) -> Result<()> {
    if spectrum.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            found: spectrum.len(),
        });
    }
    Ok(())
}

/// Runs every region; two-qubit regions are "not applicable" for `d ≠ 4`.
pub fn evaluate_all(spectrum: &Spectrum) -> CriteriaReport {
    let d = spectrum.len();
    let criteria = Region::ALL
        .iter()
        .map(|&region| match region.evaluate(spectrum) {
            Ok(v) => v.record(),
            Err(_) => CriterionRecord::not_applicable(region.name()),
        })
        .collect();
    CriteriaReport {
        dims: vec![d],
        spectrum: spectrum.values().to_vec(),
        purity: spectrum.purity(),
        criteria,
    }
}

/// The four spectra spanning region A.
pub fn theorem1_vertices() -> [[f64; 4]; 4] {
    let hi = (2.0 + SQRT_2) / 8.0;
    let lo = (2.0 - SQRT_2) / 8.0;
    [
        [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0],
        [hi, hi, lo, lo],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0],
        [0.25, 0.25, 0.25, 0.25],
    ]
}

/// `(√2/3)(3/4, 1/4, 0, 0) + (1 − √2/3)(1/4, 1/4, 1/4, 1/4)`: on the purity
/// sphere but outside region A.
pub fn purity_ball_not_a() -> [f64; 4] {
    let s = SQRT_2 / 3.0;
    let a = [0.75, 0.25, 0.0, 0.0];
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = s * a[k] + (1.0 - s) * 0.25;
    }
    out
}
