//! Tabulated dispersion in CSV form.
//!
//! ```text
//! # first comment block: provenance
//! # mode: HE12
//! # fiber: hybrid-pbg
//! wavelength_m,n_eff
//! 5.0e-07,1.5512
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::label::ModeLabel;
use crate::error::{Error, Result};

/// Minimum number of rows accepted.
pub const MIN_TABLE_ROWS: usize = 8;

pub const TABLE_HEADER: &str = "wavelength_m,n_eff";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionTable {
    /// `(wavelength m, effective index)`, wavelengths strictly increasing.
    pub rows: Vec<(f64, f64)>,
    pub label: Option<ModeLabel>,
    pub fiber_id: String,
    /// Lines of the leading comment block, without the `#`.
    pub provenance: Vec<String>,
}

impl DispersionTable {
    pub fn new(
        rows: Vec<(f64, f64)>,
        label: Option<ModeLabel>,
        fiber_id: String,
        provenance: Vec<String>,
    ) -> Result<Self> {
        if rows.len() < MIN_TABLE_ROWS {
            return Err(Error::InvalidInput(format!(
                "dispersion table needs at least {MIN_TABLE_ROWS} rows, got {}",
                rows.len()
            )));
        }
        if rows.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Monotonicity("dispersion table wavelengths".into()));
        }
        Ok(Self {
            rows,
            label,
            fiber_id,
            provenance,
        })
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut provenance = Vec::new();
        let mut label = None;
        let mut fiber_id = String::new();
        let mut in_leading_block = true;
        let mut header_seen = false;
        let mut rows: Vec<(f64, f64)> = Vec::new();
        let mut last_line = 0;
        for (i, raw) in text.lines().enumerate() {
            let ln = i + 1;
            last_line = ln;
            let line = raw.trim();
            if line.is_empty() {
                in_leading_block = false;
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some((key, value)) = comment.split_once(':') {
                    match key.trim().to_ascii_lowercase().as_str() {
                        "mode" => {
                            label = Some(
                                value
                                    .trim()
                                    .parse()
                                    .map_err(|e: Error| err(ln, e.to_string()))?,
                            )
                        }
                        "fiber" => fiber_id = value.trim().to_string(),
                        _ => {}
                    }
                }
                if in_leading_block {
                    provenance.push(comment.to_string());
                }
                continue;
            }
            in_leading_block = false;
            if !header_seen {
                if line.replace(' ', "") != TABLE_HEADER {
                    return Err(err(ln, format!("expected header '{TABLE_HEADER}'")));
                }
                header_seen = true;
                continue;
            }
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| err(ln, "expected two comma-separated columns".into()))?;
            if b.contains(',') {
                return Err(err(ln, "expected two comma-separated columns".into()));
            }
            let lambda: f64 = a
                .trim()
                .parse()
                .map_err(|_| err(ln, format!("bad wavelength '{}'", a.trim())))?;
            let n: f64 = b
                .trim()
                .parse()
                .map_err(|_| err(ln, format!("bad index '{}'", b.trim())))?;
            if !(lambda > 0.0 && lambda.is_finite() && n > 0.0 && n.is_finite()) {
                return Err(err(
                    ln,
                    "wavelength and index must be positive and finite".into(),
                ));
            }
            if let Some(&(prev, _)) = rows.last() {
                if !(lambda > prev) {
                    return Err(Error::Monotonicity(format!("{source_name} at line {ln}")));
                }
            }
            rows.push((lambda, n));
        }
        if !header_seen {
            return Err(err(
                last_line.max(1),
                format!("missing header '{TABLE_HEADER}'"),
            ));
        }
        if rows.len() < MIN_TABLE_ROWS {
            return Err(err(
                last_line,
                format!("need at least {MIN_TABLE_ROWS} rows, found {}", rows.len()),
            ));
        }
        Self::new(rows, label, fiber_id, provenance)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in &self.provenance {
            let _ = writeln!(out, "# {line}");
        }
        if let Some(l) = self.label {
            let _ = writeln!(out, "# mode: {l}");
        }
        if !self.fiber_id.is_empty() {
            let _ = writeln!(out, "# fiber: {}", self.fiber_id);
        }
        let _ = writeln!(out, "{TABLE_HEADER}");
        for (l, n) in &self.rows {
            let _ = writeln!(out, "{l:.17e},{n:.17e}");
        }
        out
    }
}

/// Reads and validates a dispersion CSV file.
pub fn ingest_dispersion(path: &Path) -> Result<DispersionTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    DispersionTable::parse(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(rows: &[(f64, f64)]) -> String {
        let mut s = String::from("# test table\n# mode: HE11\n# fiber: toy\nwavelength_m,n_eff\n");
        for (l, n) in rows {
            s.push_str(&format!("{l},{n}\n"));
        }
        s
    }

    #[test]
    fn parses_metadata_and_rows() {
        let rows: Vec<(f64, f64)> = (0..10).map(|i| (1e-6 + i as f64 * 1e-8, 1.45)).collect();
        let t = DispersionTable::parse(&sample(&rows), "t").unwrap();
        assert_eq!(t.rows.len(), 10);
        assert_eq!(t.label, Some(ModeLabel::he(1, 1)));
        assert_eq!(t.fiber_id, "toy");
        assert_eq!(t.provenance[0], "test table");
        let again = DispersionTable::parse(&t.to_csv(), "t2").unwrap();
        assert_eq!(again.rows, t.rows);
    }

    #[test]
    fn duplicate_wavelength_is_a_monotonicity_error() {
        let mut rows: Vec<(f64, f64)> = (0..10).map(|i| (1e-6 + i as f64 * 1e-8, 1.45)).collect();
        rows[5].0 = rows[4].0;
        assert!(matches!(
            DispersionTable::parse(&sample(&rows), "t"),
            Err(Error::Monotonicity(_))
        ));
    }

    #[test]
    fn bad_number_reports_line() {
        let text = "wavelength_m,n_eff\n1e-6,1.4\n2e-6,abc\n";
        match DispersionTable::parse(text, "t") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let rows: Vec<(f64, f64)> = (0..5).map(|i| (1e-6 + i as f64 * 1e-8, 1.45)).collect();
        assert!(matches!(
            DispersionTable::parse(&sample(&rows), "t"),
            Err(Error::Parse { .. })
        ));
    }
}
