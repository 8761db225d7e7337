//! The three fiber platforms as phase-matching problem builders.
//!
//! * Tapered silica fiber: exact step-index modes of a silica strand in
//!   vacuum or gas; pump in HE12, triplet photons in HE11.
//! * Hollow-core fiber: capillary modes of a gas-filled core; pump in a
//!   high-order HE1m mode, triplet photons in HE11.
//! * Hybrid fiber: tabulated dispersion of the pump and infrared modes.

use serde::{Deserialize, Serialize};

use crate::constants::{omega_of, BAR};
use crate::error::{Error, Result};
use crate::materials::{GasState, MaterialDatabase, MaterialModel, Medium};
use crate::modes::{solve_step_index, DispersionTable, GuidedMode, ModeLabel};
use crate::phasematch::PhaseMatchProblem;

/// Wavelength band covered by photon-mode dispersion (m).
pub const PHOTON_BAND: (f64, f64) = (1.2e-6, 2.2e-6);
/// Wavelength band covered by pump-mode dispersion (m).
pub const PUMP_BAND: (f64, f64) = (0.45e-6, 0.65e-6);
/// Spline knots used when tabulating solver-based photon dispersion.
pub const PHOTON_TABLE_SAMPLES: usize = 256;

fn band_domain(band: (f64, f64)) -> (f64, f64) {
    (omega_of(band.1), omega_of(band.0))
}

/// Silica strand of uniform diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaperPlatform {
    pub diameter: f64,
    pub glass: MaterialModel,
    pub surround: Medium,
    pub pump_mode: ModeLabel,
    pub photon_mode: ModeLabel,
}

impl TaperPlatform {
    pub fn new(db: &MaterialDatabase, diameter: f64) -> Result<Self> {
        if !(diameter > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "taper diameter must be positive, got {diameter}"
            )));
        }
        Ok(Self {
            diameter,
            glass: db.solid("silica")?.clone(),
            surround: Medium::vacuum(),
            pump_mode: ModeLabel::he(1, 2),
            photon_mode: ModeLabel::he(1, 1),
        })
    }

    pub fn with_surround(mut self, surround: Medium) -> Self {
        self.surround = surround;
        self
    }

    pub fn with_diameter(&self, diameter: f64) -> Self {
        Self {
            diameter,
            ..self.clone()
        }
    }

    fn mode(&self, label: ModeLabel, band: (f64, f64)) -> Result<GuidedMode> {
        GuidedMode::step_index(
            label,
            0.5 * self.diameter,
            Medium::Solid(self.glass.clone()),
            self.surround.clone(),
            band_domain(band),
        )
    }

    /// Pump mode solved on demand.
    pub fn pump(&self) -> Result<GuidedMode> {
        self.mode(self.pump_mode, PUMP_BAND)
    }

    /// Photon mode solved on demand.
    pub fn photon_exact(&self) -> Result<GuidedMode> {
        self.mode(self.photon_mode, PHOTON_BAND)
    }

    /// Photon mode splined through exact solutions across [`PHOTON_BAND`].
    pub fn photon(&self) -> Result<GuidedMode> {
        self.photon_exact()?.tabulate(PHOTON_TABLE_SAMPLES)
    }

    /// Problem with the tabulated photon mode, for dense rate grids.
    pub fn problem(&self, pump_wavelength: f64) -> Result<PhaseMatchProblem> {
        Ok(PhaseMatchProblem::degenerate_modes(
            self.pump()?,
            self.photon()?,
            omega_of(pump_wavelength),
        ))
    }

    /// Problem with every mode solved on demand, for scans.
    pub fn problem_exact(&self, pump_wavelength: f64) -> Result<PhaseMatchProblem> {
        Ok(PhaseMatchProblem::degenerate_modes(
            self.pump()?,
            self.photon_exact()?,
            omega_of(pump_wavelength),
        ))
    }
}

/// Gas-filled capillary core.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HollowCorePlatform {
    pub core_radius: f64,
    pub gas: GasState,
    pub pump_mode: ModeLabel,
    pub photon_mode: ModeLabel,
}

/// Core radius of the single-ring fiber (m).
pub const HOLLOW_CORE_RADIUS: f64 = 19.35e-6;

impl HollowCorePlatform {
    pub fn new(db: &MaterialDatabase, pressure: f64) -> Result<Self> {
        Ok(Self {
            core_radius: HOLLOW_CORE_RADIUS,
            gas: db.gas("Xe", pressure, crate::materials::REFERENCE_TEMPERATURE)?,
            pump_mode: ModeLabel::he(1, 3),
            photon_mode: ModeLabel::he(1, 1),
        })
    }

    pub fn with_pressure(&self, pressure: f64) -> Result<Self> {
        Ok(Self {
            gas: self.gas.with_pressure(pressure)?,
            ..self.clone()
        })
    }

    pub fn pressure_bar(&self) -> f64 {
        self.gas.pressure / BAR
    }

    pub fn pump(&self) -> Result<GuidedMode> {
        GuidedMode::capillary(
            self.pump_mode,
            self.core_radius,
            Medium::Gas(self.gas.clone()),
            band_domain(PUMP_BAND),
        )
    }

    pub fn photon(&self) -> Result<GuidedMode> {
        GuidedMode::capillary(
            self.photon_mode,
            self.core_radius,
            Medium::Gas(self.gas.clone()),
            band_domain(PHOTON_BAND),
        )
    }

    pub fn problem(&self, pump_wavelength: f64) -> Result<PhaseMatchProblem> {
        Ok(PhaseMatchProblem::degenerate_modes(
            self.pump()?,
            self.photon()?,
            omega_of(pump_wavelength),
        ))
    }
}

/// Model-generated pump dispersion of the hybrid fiber.
pub const HYBRID_PUMP_TABLE: &str = include_str!("../data/hybrid_pump.csv");
/// Model-generated infrared dispersion of the hybrid fiber.
pub const HYBRID_IR_TABLE: &str = include_str!("../data/hybrid_ir.csv");

/// Fiber defined by two dispersion tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridPlatform {
    pub pump: GuidedMode,
    pub photon: GuidedMode,
}

impl HybridPlatform {
    pub fn from_tables(pump: &DispersionTable, ir: &DispersionTable) -> Result<Self> {
        let label = |t: &DispersionTable| t.label.unwrap_or(ModeLabel::he(1, 1));
        Ok(Self {
            pump: GuidedMode::tabulated(pump, label(pump))?,
            photon: GuidedMode::tabulated(ir, label(ir))?,
        })
    }

    /// Platform built from the tables shipped with the crate.
    pub fn embedded() -> Result<Self> {
        Self::from_tables(
            &DispersionTable::parse(HYBRID_PUMP_TABLE, "hybrid_pump.csv")?,
            &DispersionTable::parse(HYBRID_IR_TABLE, "hybrid_ir.csv")?,
        )
    }

    pub fn problem(&self, pump_wavelength: f64) -> Result<PhaseMatchProblem> {
        Ok(PhaseMatchProblem::degenerate_modes(
            self.pump.clone(),
            self.photon.clone(),
            omega_of(pump_wavelength),
        ))
    }
}

/// Parameters of the model behind the shipped hybrid tables.
pub mod hybrid_model {
    use super::*;

    /// Pump wavelength at which the model phase-matches at degeneracy (m).
    pub const DESIGN_PUMP_WAVELENGTH: f64 = 526.865e-9;
    /// Radius of the infrared-guiding core (m).
    pub const IR_CORE_RADIUS: f64 = 4.0e-6;
    /// SF6 area fraction of the infrared core.
    pub const SF6_FILL_FRACTION: f64 = 0.9069 * (0.38 / 1.05) * (0.38 / 1.05);
    /// Air fraction of the cladding.
    pub const CLADDING_AIR_FRACTION: f64 = 0.5;
    /// Transverse constant of the pump mode (first zero of J₀).
    pub const PUMP_MODE_CONSTANT: f64 = 2.404_825_557_695_773;
    pub const ROWS: usize = 201;

    fn ir_indices(db: &MaterialDatabase, wavelength: f64) -> Result<(f64, f64)> {
        let sf6 = db.solid("SF6")?.index(wavelength)?;
        let llf1 = db.solid("LLF1")?.index(wavelength)?;
        let f = SF6_FILL_FRACTION;
        let core = (f * sf6 * sf6 + (1.0 - f) * llf1 * llf1).sqrt();
        let a = CLADDING_AIR_FRACTION;
        let clad = (a + (1.0 - a) * llf1 * llf1).sqrt();
        Ok((core, clad))
    }

    /// Effective index of the infrared HE11 mode.
    pub fn ir_index(db: &MaterialDatabase, wavelength: f64) -> Result<f64> {
        let (core, clad) = ir_indices(db, wavelength)?;
        solve_step_index(IR_CORE_RADIUS, core, clad, wavelength, ModeLabel::he(1, 1))
    }

    /// Radius of the pump-guiding structure that phase-matches the design
    /// pump wavelength at degeneracy.
    pub fn pump_radius(db: &MaterialDatabase) -> Result<f64> {
        let lp = DESIGN_PUMP_WAVELENGTH;
        let target = ir_index(db, 3.0 * lp)?;
        let n = db.solid("LLF1")?.index(lp)?;
        let r = target / n;
        if !(r < 1.0) {
            return Err(Error::NoRoot(
                "infrared index exceeds the pump host index".into(),
            ));
        }
        Ok(PUMP_MODE_CONSTANT * lp
            / (2.0 * std::f64::consts::PI * n * ((1.0 - r) * (1.0 + r)).sqrt()))
    }

    /// Effective index of the pump mode, `n sqrt(1 − (uλ/(2π a n))²)` in LLF1.
    pub fn pump_index(db: &MaterialDatabase, radius: f64, wavelength: f64) -> Result<f64> {
        let n = db.solid("LLF1")?.index(wavelength)?;
        let q = PUMP_MODE_CONSTANT * wavelength / (2.0 * std::f64::consts::PI * radius * n);
        Ok(n * ((1.0 - q) * (1.0 + q)).sqrt())
    }

    fn band(lo: f64, hi: f64) -> Vec<f64> {
        (0..ROWS)
            .map(|i| {
                if i + 1 == ROWS {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (ROWS - 1) as f64
                }
            })
            .collect()
    }

    /// Regenerates the `(pump, infrared)` tables.
    pub fn tables(db: &MaterialDatabase) -> Result<(DispersionTable, DispersionTable)> {
        let radius = pump_radius(db)?;
        let common = [
            "Model-generated dispersion, not measured or digitized data.".to_string(),
            format!(
                "Infrared core: SF6/LLF1 effective medium (SF6 fraction {:.6}), radius {:e} m, cladding LLF1 with air fraction {}.",
                SF6_FILL_FRACTION, IR_CORE_RADIUS, CLADDING_AIR_FRACTION
            ),
            format!(
                "Pump mode: LLF1 guide, n = n_LLF1 sqrt(1 - (u lambda / (2 pi a n_LLF1))^2), u = {PUMP_MODE_CONSTANT}, a = {radius:e} m,"
            ),
            format!(
                "chosen so that the degenerate process phase-matches at {:e} m.",
                DESIGN_PUMP_WAVELENGTH
            ),
            "Regenerate with: cargo run -p topdc-core --example hybrid_tables".to_string(),
        ];
        let pump_rows = band(PUMP_BAND.0, PUMP_BAND.1)
            .into_iter()
            .map(|l| Ok((l, pump_index(db, radius, l)?)))
            .collect::<Result<Vec<_>>>()?;
        let ir_rows = band(PHOTON_BAND.0, PHOTON_BAND.1)
            .into_iter()
            .map(|l| Ok((l, ir_index(db, l)?)))
            .collect::<Result<Vec<_>>>()?;
        let pump = DispersionTable::new(
            pump_rows,
            Some(ModeLabel::he(1, 1)),
            "hybrid-pump".into(),
            common.to_vec(),
        )?;
        let ir = DispersionTable::new(
            ir_rows,
            Some(ModeLabel::he(1, 1)),
            "hybrid-ir".into(),
            common.to_vec(),
        )?;
        Ok((pump, ir))
    }
}
