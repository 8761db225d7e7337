//! Refractive-index and nonlinear-susceptibility models.

mod database;
mod gas;

use serde::{Deserialize, Serialize};

pub use database::{FiberSpec, MaterialDatabase, DATA_SCHEMA_VERSION, EMBEDDED_DATA};
pub use gas::{
    effective_chi3, gas_index, GasSpecies, GasState, REFERENCE_PRESSURE, REFERENCE_TEMPERATURE,
};

use crate::error::{Error, Result};

/// A solid described by a Sellmeier fit `n² = 1 + Σ B λ²/(λ² − C)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialModel {
    pub name: String,
    /// `(B, C)` pairs, C in µm².
    pub sellmeier: Vec<(f64, f64)>,
    /// Vacuum wavelength interval of the fit (m).
    pub valid_range: (f64, f64),
    /// Third-order susceptibility (m²/V²), when known.
    pub chi3: Option<f64>,
    /// Further published χ⁽³⁾ values, kept for comparison.
    #[serde(default)]
    pub chi3_alternates: Vec<f64>,
    #[serde(default)]
    pub citation: String,
}

impl MaterialModel {
    /// Refractive index at vacuum wavelength `wavelength` (m).
    pub fn index(&self, wavelength: f64) -> Result<f64> {
        let (lo, hi) = self.valid_range;
        if !(wavelength >= lo && wavelength <= hi) {
            return Err(Error::OutOfRange {
                material: self.name.clone(),
                wavelength,
                min: lo,
                max: hi,
            });
        }
        Ok(self.index_unchecked(wavelength))
    }

    fn index_unchecked(&self, wavelength: f64) -> f64 {
        let l2 = (wavelength * 1e6).powi(2);
        let n2 = 1.0
            + self
                .sellmeier
                .iter()
                .map(|&(b, c)| b * l2 / (l2 - c))
                .sum::<f64>();
        n2.sqrt()
    }
}

/// Sellmeier index of `material` at `wavelength` (m).
pub fn solid_index(material: &MaterialModel, wavelength: f64) -> Result<f64> {
    material.index(wavelength)
}

/// Any medium that can fill or surround a waveguide.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Medium {
    /// Wavelength-independent index; `Constant(1.0)` is vacuum.
    Constant {
        index: f64,
    },
    Solid(MaterialModel),
    Gas(GasState),
    /// A doped core described by its host glass and numerical aperture,
    /// `n = sqrt(n_host² + NA²)`.
    Doped {
        host: MaterialModel,
        numerical_aperture: f64,
    },
}

impl Medium {
    pub fn vacuum() -> Self {
        Medium::Constant { index: 1.0 }
    }

    pub fn index(&self, wavelength: f64) -> Result<f64> {
        match self {
            Medium::Constant { index } => Ok(*index),
            Medium::Solid(m) => m.index(wavelength),
            Medium::Gas(g) => gas_index(g, wavelength),
            Medium::Doped {
                host,
                numerical_aperture,
            } => {
                let n = host.index(wavelength)?;
                Ok((n * n + numerical_aperture * numerical_aperture).sqrt())
            }
        }
    }

    /// Short human-readable description used in reports.
    pub fn describe(&self) -> String {
        match self {
            Medium::Constant { index } if *index == 1.0 => "vacuum".into(),
            Medium::Constant { index } => format!("n={index}"),
            Medium::Solid(m) => m.name.clone(),
            Medium::Gas(g) => format!(
                "{} at {:.6} bar, {:.2} K",
                g.species.name,
                g.pressure / crate::constants::BAR,
                g.temperature
            ),
            Medium::Doped {
                host,
                numerical_aperture,
            } => format!("{} core, NA {numerical_aperture}", host.name),
        }
    }

    /// Third-order susceptibility of the medium, when known.
    pub fn chi3(&self) -> Option<f64> {
        match self {
            Medium::Constant { .. } => None,
            Medium::Solid(m) => m.chi3,
            Medium::Gas(g) => Some(effective_chi3(g)),
            Medium::Doped { host, .. } => host.chi3,
        }
    }
}
