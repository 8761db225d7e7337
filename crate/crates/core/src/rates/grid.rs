use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ProcessKind;
use crate::constants::wavelength_of;
use crate::error::{Error, Result};
use crate::provenance::Provenance;

/// Center-to-peak ratio at or above which a density is degenerate.
pub const DEGENERATE_RATIO: f64 = 0.9;
/// Center-to-peak ratio below which a density is split.
pub const SPLIT_RATIO: f64 = 0.5;
/// Fraction of the peak defining the emission extent.
pub const EXTENT_THRESHOLD: f64 = 0.1;

/// Shape of a spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// Peak at the degenerate point.
    Degenerate,
    /// Emission away from the degenerate point with a dip at its center.
    Split,
    Intermediate,
    /// No emission anywhere on the grid.
    Empty,
}

/// Density values on a uniform (ω₁, ω₂) grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub kind: ProcessKind,
    pub pump_frequency: f64,
    /// Frequency of each photon at the degenerate point (rad/s).
    pub degenerate_frequency: f64,
    /// ω₁ axis (rad/s); row index.
    pub omega1: Vec<f64>,
    /// ω₂ axis (rad/s); column index.
    pub omega2: Vec<f64>,
    /// Row-major density values; masked cells hold 0.
    pub values: Vec<f64>,
    /// Row-major mask of cells with ω₁ + ω₂ ≥ ω_p.
    pub mask: Vec<bool>,
    /// Trapezoidal integral over unmasked cells.
    pub total: f64,
    /// Masked area ((rad/s)²).
    pub excluded_area: f64,
    pub sweep_value: Option<f64>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct Axes<'a> {
    omega1_rad_s: &'a [f64],
    omega2_rad_s: &'a [f64],
    wavelength1_nm: Vec<f64>,
    wavelength2_nm: Vec<f64>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    kind: ProcessKind,
    units: &'static str,
    total_units: &'static str,
    pump_frequency_rad_s: f64,
    degenerate_frequency_rad_s: f64,
    sweep_value: Option<f64>,
    axes: Axes<'a>,
    values: Vec<Option<f64>>,
    mask: &'a [bool],
    total: f64,
    excluded_area_rad2_s2: f64,
    topology: Topology,
    extent_nm: f64,
    provenance: &'a Provenance,
}

impl SpectralGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.omega1.len(), self.omega2.len())
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.omega2.len() + j]
    }

    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.omega2.len() + j]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Value at the cell nearest the degenerate point.
    pub fn center_value(&self) -> f64 {
        let nearest = |axis: &[f64]| {
            axis.iter()
                .enumerate()
                .min_by(|a, b| {
                    (a.1 - self.degenerate_frequency)
                        .abs()
                        .total_cmp(&(b.1 - self.degenerate_frequency).abs())
                })
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        self.value(nearest(&self.omega1), nearest(&self.omega2))
    }

    /// Classification from the ratio of the value at the degenerate point
    /// to the peak.
    pub fn topology(&self) -> Topology {
        let max = self.max_value();
        if !(max > 0.0) {
            return Topology::Empty;
        }
        let r = self.center_value() / max;
        if r >= DEGENERATE_RATIO {
            Topology::Degenerate
        } else if r < SPLIT_RATIO {
            Topology::Split
        } else {
            Topology::Intermediate
        }
    }

    /// Wavelength span (m) along ω₁ of the rows holding any value at or
    /// above `threshold` times the peak.
    pub fn extent(&self, threshold: f64) -> f64 {
        let max = self.max_value();
        if !(max > 0.0) {
            return 0.0;
        }
        let n2 = self.omega2.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, &w) in self.omega1.iter().enumerate() {
            let row = &self.values[i * n2..(i + 1) * n2];
            if row.iter().any(|&v| v >= threshold * max) {
                lo = lo.min(w);
                hi = hi.max(w);
            }
        }
        wavelength_of(lo) - wavelength_of(hi)
    }

    /// CSV of unmasked `(ω₁, ω₂, S)` triplets with a commented header.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# kind: {}", kind_name(self.kind));
        if let Some(h) = &self.provenance.config_hash {
            let _ = writeln!(s, "# config_sha256: {h}");
        }
        if let Some(v) = self.sweep_value {
            let _ = writeln!(s, "# sweep_value: {v:e}");
        }
        let _ = writeln!(s, "# total: {:e}", self.total);
        let masked = self.mask.iter().filter(|&&m| m).count();
        let _ = writeln!(s, "# masked_cells: {masked}");
        let _ = writeln!(s, "omega1_rad_s,omega2_rad_s,density");
        let n2 = self.omega2.len();
        for (i, &w1) in self.omega1.iter().enumerate() {
            for (j, &w2) in self.omega2.iter().enumerate() {
                if !self.mask[i * n2 + j] {
                    let _ = writeln!(s, "{w1:e},{w2:e},{:e}", self.values[i * n2 + j]);
                }
            }
        }
        s
    }

    /// JSON envelope with axes, values (masked cells as null), mask,
    /// total, shape diagnostics and provenance.
    pub fn to_json(&self) -> Result<String> {
        let nm = |axis: &[f64]| axis.iter().map(|&w| wavelength_of(w) * 1e9).collect();
        let env = Envelope {
            kind: self.kind,
            units: match self.kind {
                ProcessKind::Spontaneous => "Hz s^2 / rad^2",
                ProcessKind::Seeded => "pairs s^2 / rad^2",
            },
            total_units: match self.kind {
                ProcessKind::Spontaneous => "Hz",
                ProcessKind::Seeded => "pairs per pulse",
            },
            pump_frequency_rad_s: self.pump_frequency,
            degenerate_frequency_rad_s: self.degenerate_frequency,
            sweep_value: self.sweep_value,
            axes: Axes {
                omega1_rad_s: &self.omega1,
                omega2_rad_s: &self.omega2,
                wavelength1_nm: nm(&self.omega1),
                wavelength2_nm: nm(&self.omega2),
            },
            values: self
                .values
                .iter()
                .zip(&self.mask)
                .map(|(&v, &m)| (!m).then_some(v))
                .collect(),
            mask: &self.mask,
            total: self.total,
            excluded_area_rad2_s2: self.excluded_area,
            topology: self.topology(),
            extent_nm: self.extent(EXTENT_THRESHOLD) * 1e9,
            provenance: &self.provenance,
        };
        serde_json::to_string_pretty(&env)
            .map_err(|e| Error::InvalidInput(format!("grid serialization failed: {e}")))
    }
}

fn kind_name(kind: ProcessKind) -> &'static str {
    match kind {
        ProcessKind::Spontaneous => "spontaneous",
        ProcessKind::Seeded => "seeded",
    }
}
