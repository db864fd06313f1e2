//! File formats.
//!
//! * State JSON: `{"dims":[dA,dB],"matrix":[[[re,im], ...], ...]}`, row-major.
//! * Spectrum CSV: a single line of comma-separated decimals.
//! * Report JSON: [`CriteriaReport`] serialized with 17 significant digits.

use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};

use super::{CriteriaReport, DensityMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix};

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    dims: [usize; 2],
    matrix: Vec<Vec<[f64; 2]>>,
}

fn malformed(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::MalformedInput {
        location: location.into(),
        message: message.into(),
    }
}

fn validation(err: Error) -> Error {
    Error::ValidationFailure(Box::new(err))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| malformed(path.display().to_string(), e.to_string()))
}

pub fn parse_state(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| {
        malformed(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })?;
    let n = file.matrix.len();
    if n == 0 {
        return Err(malformed("matrix", "empty matrix"));
    }
    let mut entries = Vec::with_capacity(n * n);
    for (i, row) in file.matrix.iter().enumerate() {
        if row.len() != n {
            return Err(malformed(
                format!("matrix row {i}"),
                format!("expected {n} entries, found {}", row.len()),
            ));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(malformed(format!("matrix[{i}][{j}]"), "non-finite entry"));
            }
            entries.push(Complex64::new(re, im));
        }
    }
    let matrix = ComplexMatrix::new(n, n, entries).map_err(validation)?;
    DensityMatrix::new(matrix, (file.dims[0], file.dims[1])).map_err(validation)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    parse_state(&read_text(path.as_ref())?)
}

pub fn write_state(rho: &DensityMatrix) -> String {
    let m = rho.matrix();
    let file = StateFile {
        dims: [rho.dims().0, rho.dims().1],
        matrix: (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| [m[(i, j)].re, m[(i, j)].im])
                    .collect()
            })
            .collect(),
    };
    to_json(&file)
}

pub fn parse_spectrum(text: &str) -> Result<Spectrum> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let line = match lines.as_slice() {
        [] => return Err(malformed("line 1", "empty spectrum")),
        [(_, line)] => *line,
        [_, (extra, _), ..] => {
            return Err(malformed(
                format!("line {}", extra + 1),
                "spectrum must be a single line",
            ))
        }
    };
    let values = line
        .split(',')
        .enumerate()
        .map(|(k, field)| {
            let field = field.trim();
            field
                .parse::<f64>()
                .map_err(|e| malformed(format!("field {}", k + 1), format!("{field:?}: {e}")))
        })
        .collect::<Result<Vec<f64>>>()?;
    Spectrum::new(values).map_err(validation)
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Spectrum> {
    parse_spectrum(&read_text(path.as_ref())?)
}

pub fn write_spectrum(spectrum: &Spectrum) -> String {
    let fields: Vec<String> = spectrum.values().iter().map(|x| format_f64(*x)).collect();
    format!("{}\n", fields.join(","))
}

pub fn write_report(report: &CriteriaReport) -> String {
    to_json(report)
}

/// Formats a double with 17 significant digits, enough to round-trip.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Compact JSON formatter that writes every double with 17 significant digits.
#[derive(Debug, Default, Clone, Copy)]
pub struct SigDigitsFormatter;

impl Formatter for SigDigitsFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            writer.write_all(format_f64(value).as_bytes())
        } else {
            CompactFormatter.write_null(writer)
        }
    }
}

/// Serializes `value` as compact JSON through [`SigDigitsFormatter`].
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitsFormatter);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}
