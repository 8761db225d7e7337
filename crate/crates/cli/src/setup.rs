//! Material data, platforms and processes built from a configuration.

use std::path::{Path, PathBuf};

use topdc_core::constants::BAR;
use topdc_core::materials::{
    MaterialDatabase, MaterialModel, EMBEDDED_DATA, REFERENCE_TEMPERATURE,
};
use topdc_core::modes::{DispersionTable, ModeLabel};
use topdc_core::overlap::OverlapSet;
use topdc_core::phasematch::PhaseMatchProblem;
use topdc_core::platform::{
    HollowCorePlatform, HybridPlatform, TaperPlatform, HOLLOW_CORE_RADIUS, HYBRID_IR_TABLE,
    HYBRID_PUMP_TABLE,
};
use topdc_core::provenance::sha256_hex;
use topdc_core::rates::{Coupling, ProcessConfig, RateOptions, SeedConfig};

use crate::config::{LoadedConfig, ProcessSection, SweepParameter};
use crate::error::{CliError, CliResult};

/// Default capillary wall thickness for loss estimates (m).
pub const DEFAULT_WALL_THICKNESS: f64 = 350e-9;
/// Default grid resolution per axis.
pub const DEFAULT_GRID: usize = 801;

/// Hashes of every data source read during a run, in reading order.
#[derive(Debug, Clone, Default)]
pub struct DataHashes(pub Vec<(String, String)>);

impl DataHashes {
    fn add(&mut self, name: impl Into<String>, bytes: &[u8]) {
        self.0.push((name.into(), sha256_hex(bytes)));
    }
}

fn read_file(path: &Path, field: &str) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{field}: cannot read {}: {e}", path.display())))
}

/// Material database from `TOPDC_DATA`, the configuration, or the
/// compiled-in copy, in that order of precedence.
pub fn load_database(cfg: &LoadedConfig, hashes: &mut DataHashes) -> CliResult<MaterialDatabase> {
    let (path, field) = match std::env::var_os("TOPDC_DATA") {
        Some(p) => (Some(PathBuf::from(p)), "TOPDC_DATA"),
        None => (
            cfg.config.material_data.as_ref().map(|p| cfg.resolve(p)),
            "material_data",
        ),
    };
    match path {
        Some(path) => {
            let text = read_file(&path, field)?;
            hashes.add(path.display().to_string(), text.as_bytes());
            Ok(MaterialDatabase::parse(&text, &path.display().to_string())?)
        }
        None => {
            hashes.add("embedded:materials.toml", EMBEDDED_DATA.as_bytes());
            Ok(MaterialDatabase::embedded())
        }
    }
}

fn label(text: &Option<String>, default: ModeLabel, field: &str) -> CliResult<ModeLabel> {
    match text {
        None => Ok(default),
        Some(s) => s
            .parse()
            .map_err(|e: topdc_core::Error| CliError::Config(format!("{field}: {e}"))),
    }
}

/// One configured fiber platform.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Platform {
    Taper(TaperPlatform),
    HollowCore {
        fiber: HollowCorePlatform,
        wall_thickness: f64,
        glass: MaterialModel,
    },
    Hybrid(HybridPlatform),
}

impl Platform {
    pub fn build(
        cfg: &LoadedConfig,
        db: &MaterialDatabase,
        hashes: &mut DataHashes,
    ) -> CliResult<Self> {
        let p = &cfg.config.platform;
        if let Some(t) = &p.taper {
            let mut taper = TaperPlatform::new(db, t.diameter)?;
            taper.pump_mode = label(&t.pump_mode, taper.pump_mode, "platform.taper.pump_mode")?;
            taper.photon_mode = label(
                &t.photon_mode,
                taper.photon_mode,
                "platform.taper.photon_mode",
            )?;
            return Ok(Platform::Taper(taper));
        }
        if let Some(h) = &p.hollow_core {
            if !(h.pressure.is_finite() && h.pressure >= 0.0) {
                return Err(CliError::Config(format!(
                    "platform.hollow_core.pressure: must be non-negative, got {}",
                    h.pressure
                )));
            }
            let gas = db.gas(
                h.gas.as_deref().unwrap_or("Xe"),
                h.pressure,
                h.temperature.unwrap_or(REFERENCE_TEMPERATURE),
            )?;
            let mut fiber = HollowCorePlatform::new(db, BAR)?;
            fiber.gas = gas;
            fiber.core_radius = h.core_radius.unwrap_or(HOLLOW_CORE_RADIUS);
            fiber.pump_mode = label(
                &h.pump_mode,
                fiber.pump_mode,
                "platform.hollow_core.pump_mode",
            )?;
            fiber.photon_mode = label(
                &h.photon_mode,
                fiber.photon_mode,
                "platform.hollow_core.photon_mode",
            )?;
            return Ok(Platform::HollowCore {
                fiber,
                wall_thickness: h.wall_thickness.unwrap_or(DEFAULT_WALL_THICKNESS),
                glass: db.solid("silica")?.clone(),
            });
        }
        let h = p.hybrid.clone().unwrap_or_default();
        let table = |path: &Option<PathBuf>,
                     embedded: &str,
                     name: &str,
                     field: &str,
                     hashes: &mut DataHashes| {
            let (text, source) = match path {
                Some(p) => {
                    let full = cfg.resolve(p);
                    (read_file(&full, field)?, p.display().to_string())
                }
                None => (embedded.to_string(), format!("embedded:{name}")),
            };
            hashes.add(source.clone(), text.as_bytes());
            Ok::<_, CliError>(DispersionTable::parse(&text, &source)?)
        };
        let pump = table(
            &h.pump_table,
            HYBRID_PUMP_TABLE,
            "hybrid_pump.csv",
            "platform.hybrid.pump_table",
            hashes,
        )?;
        let ir = table(
            &h.ir_table,
            HYBRID_IR_TABLE,
            "hybrid_ir.csv",
            "platform.hybrid.ir_table",
            hashes,
        )?;
        Ok(Platform::Hybrid(HybridPlatform::from_tables(&pump, &ir)?))
    }

    /// Platform with the sweep parameter set to `value`.
    pub fn with(&self, parameter: SweepParameter, value: f64) -> CliResult<Self> {
        Ok(match (self, parameter) {
            (_, SweepParameter::PumpWavelength) => self.clone(),
            (Platform::Taper(t), SweepParameter::Diameter) => {
                Platform::Taper(t.with_diameter(value))
            }
            (
                Platform::HollowCore {
                    fiber,
                    wall_thickness,
                    glass,
                },
                SweepParameter::Pressure,
            ) => Platform::HollowCore {
                fiber: fiber.with_pressure(value)?,
                wall_thickness: *wall_thickness,
                glass: glass.clone(),
            },
            _ => {
                return Err(CliError::Config(format!(
                    "sweep.parameter: {} does not apply to this platform",
                    parameter.name()
                )))
            }
        })
    }

    /// Problem for dense grids; taper photons are splined.
    pub fn problem(&self, pump_wavelength: f64) -> CliResult<PhaseMatchProblem> {
        Ok(match self {
            Platform::Taper(t) => t.problem(pump_wavelength)?,
            Platform::HollowCore { fiber, .. } => fiber.problem(pump_wavelength)?,
            Platform::Hybrid(h) => h.problem(pump_wavelength)?,
        })
    }

    /// Problem with every mode solved on demand, for scans.
    pub fn problem_exact(&self, pump_wavelength: f64) -> CliResult<PhaseMatchProblem> {
        Ok(match self {
            Platform::Taper(t) => t.problem_exact(pump_wavelength)?,
            _ => self.problem(pump_wavelength)?,
        })
    }
}

/// Process inputs resolved from a `[process]` section.
#[derive(Debug, Clone)]
pub struct Process {
    pub config: ProcessConfig,
    pub coupling: Coupling,
    pub options: RateOptions,
    pub bound: bool,
}

impl Process {
    pub fn build(section: Option<&ProcessSection>, grid: Option<usize>) -> CliResult<Self> {
        let s = section
            .ok_or_else(|| CliError::Config("process: a [process] section is required".into()))?;
        let mut config = ProcessConfig::spontaneous(
            s.pump_power,
            s.pump_wavelength,
            s.fiber_length,
            s.detection_bandwidth,
        )
        .with_resolution(grid.or(s.grid_resolution).unwrap_or(DEFAULT_GRID));
        if let Some(seed) = &s.seed {
            config = config.with_seed(SeedConfig {
                power: seed.power,
                wavelength: seed.wavelength,
                pulse_duration: seed.pulse_duration,
                inverse_duty_cycle: seed.inverse_duty_cycle,
                repetition_rate: seed.repetition_rate,
            });
        }
        config.validate()?;
        let overlap = OverlapSet::supplied(s.effective_area)
            .map_err(|e| CliError::Config(format!("process.effective_area: {e}")))?;
        let mut coupling = Coupling::new(s.chi3, overlap);
        coupling.kerr = s.kerr;
        let mut options = if s.refine.unwrap_or(true) {
            RateOptions::default()
        } else {
            RateOptions::fixed()
        };
        if let Some(m) = s.max_resolution {
            options.max_resolution = m;
        }
        Ok(Self {
            config,
            coupling,
            options,
            bound: s.perfect_phase_matching_bound.unwrap_or(false),
        })
    }

    /// Process with the pump wavelength replaced when sweeping it.
    pub fn with(&self, parameter: SweepParameter, value: f64) -> Self {
        let mut p = self.clone();
        if parameter == SweepParameter::PumpWavelength {
            p.config.pump_wavelength = value;
        }
        p
    }
}
