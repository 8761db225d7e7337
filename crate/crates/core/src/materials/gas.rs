use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reference pressure for gas properties (Pa).
pub const REFERENCE_PRESSURE: f64 = 1.0e5;
/// Reference temperature for gas properties (K).
pub const REFERENCE_TEMPERATURE: f64 = 293.15;

/// Static data for one gas species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasSpecies {
    pub name: String,
    /// `(B, C)` pairs of `n − 1 = Σ B/(C − λ⁻²)`, λ in µm, C in µm⁻².
    pub refractivity: Vec<(f64, f64)>,
    pub fit_pressure: f64,
    pub fit_temperature: f64,
    /// Vacuum wavelength interval of the fit (m).
    pub valid_range: (f64, f64),
    /// χ⁽³⁾ at the reference condition (m²/V²).
    pub chi3_ref: f64,
    #[serde(default)]
    pub citation: String,
}

impl GasSpecies {
    /// `n − 1` at the reference condition.
    pub fn reference_refractivity(&self, wavelength: f64) -> Result<f64> {
        let (lo, hi) = self.valid_range;
        if !(wavelength >= lo && wavelength <= hi) {
            return Err(Error::OutOfRange {
                material: self.name.clone(),
                wavelength,
                min: lo,
                max: hi,
            });
        }
        let sigma2 = (1e-6 / wavelength).powi(2);
        let fit: f64 = self
            .refractivity
            .iter()
            .map(|&(b, c)| b / (c - sigma2))
            .sum();
        let to_reference = (REFERENCE_PRESSURE / self.fit_pressure)
            * (self.fit_temperature / REFERENCE_TEMPERATURE);
        Ok(fit * to_reference)
    }
}

/// A gas at a given pressure and temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub species: GasSpecies,
    /// Pa.
    pub pressure: f64,
    /// K.
    pub temperature: f64,
}

impl GasState {
    pub fn new(species: GasSpecies, pressure: f64, temperature: f64) -> Result<Self> {
        if !(pressure >= 0.0) || !pressure.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gas pressure must be finite and non-negative, got {pressure}"
            )));
        }
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gas temperature must be positive, got {temperature}"
            )));
        }
        Ok(Self {
            species,
            pressure,
            temperature,
        })
    }

    /// Ideal-gas density relative to the reference condition.
    pub fn density_ratio(&self) -> f64 {
        (self.pressure / REFERENCE_PRESSURE) * (REFERENCE_TEMPERATURE / self.temperature)
    }

    pub fn with_pressure(&self, pressure: f64) -> Result<Self> {
        GasState::new(self.species.clone(), pressure, self.temperature)
    }

    /// χ⁽³⁾ at the reference condition.
    pub fn base_chi3(&self) -> f64 {
        self.species.chi3_ref
    }
}

/// Refractive index of a gas, scaled from the reference condition by
/// ideal-gas density.
pub fn gas_index(state: &GasState, wavelength: f64) -> Result<f64> {
    let delta = state.species.reference_refractivity(wavelength)?;
    Ok(1.0 + delta * state.density_ratio())
}

/// χ⁽³⁾ of a gas, proportional to its density.
pub fn effective_chi3(state: &GasState) -> f64 {
    state.species.chi3_ref * state.density_ratio()
}
