//! Run configuration: one TOML file per run, exactly one platform.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Material database; the compiled-in copy when absent.
    pub material_data: Option<PathBuf>,
    pub platform: PlatformSection,
    pub process: Option<ProcessSection>,
    pub sweep: Option<SweepSection>,
    pub scan: Option<ScanSection>,
    pub modes: Option<ModesSection>,
    pub taper_check: Option<TaperCheckSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformSection {
    pub taper: Option<TaperSection>,
    pub hollow_core: Option<HollowCoreSection>,
    pub hybrid: Option<HybridSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperSection {
    /// Strand diameter (m).
    pub diameter: f64,
    pub pump_mode: Option<String>,
    pub photon_mode: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HollowCoreSection {
    /// Gas pressure (Pa).
    pub pressure: f64,
    pub gas: Option<String>,
    /// Gas temperature (K).
    pub temperature: Option<f64>,
    /// Core radius (m).
    pub core_radius: Option<f64>,
    /// Capillary wall thickness used for the loss estimate (m).
    pub wall_thickness: Option<f64>,
    pub pump_mode: Option<String>,
    pub photon_mode: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HybridSection {
    /// Pump dispersion table; the shipped table when absent.
    pub pump_table: Option<PathBuf>,
    /// Infrared dispersion table; the shipped table when absent.
    pub ir_table: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    /// Pump power (W), peak power for seeded runs.
    pub pump_power: f64,
    /// Pump vacuum wavelength (m).
    pub pump_wavelength: f64,
    /// Fiber length (m).
    pub fiber_length: f64,
    /// Full width of the detection window (m).
    pub detection_bandwidth: f64,
    /// Points per axis of the spectral grid.
    pub grid_resolution: Option<usize>,
    /// χ⁽³⁾ (m²/V²).
    pub chi3: f64,
    /// Effective area used in every coupling slot (m²).
    pub effective_area: f64,
    /// Kerr mismatch override.
    pub kerr: Option<bool>,
    /// Marks a continuous-wave spontaneous run; contradicts a seed block.
    pub cw: Option<bool>,
    /// Refine the quadrature until converged (default true).
    pub refine: Option<bool>,
    /// Largest grid the refinement may reach.
    pub max_resolution: Option<usize>,
    /// Also report the rate with perfect phase matching.
    pub perfect_phase_matching_bound: Option<bool>,
    pub seed: Option<SeedSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSection {
    /// Seed peak power (W).
    pub power: f64,
    /// Seed vacuum wavelength (m).
    pub wavelength: f64,
    /// Pulse duration (s).
    pub pulse_duration: f64,
    pub inverse_duty_cycle: Option<f64>,
    /// Pulse repetition rate (Hz).
    pub repetition_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Diameter,
    Pressure,
    PumpWavelength,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Diameter => "diameter",
            SweepParameter::Pressure => "pressure",
            SweepParameter::PumpWavelength => "pump_wavelength",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: SweepParameter,
    /// Values in SI units.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    pub parameter: SweepParameter,
    pub start: f64,
    pub end: f64,
    pub points: usize,
    /// Pump wavelength for diameter and pressure scans; falls back to
    /// `process.pump_wavelength`.
    pub pump_wavelength: Option<f64>,
    /// Photon frequencies (rad/s) of a non-degenerate evaluation point.
    pub omega1: Option<f64>,
    pub omega2: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesSection {
    /// Vacuum wavelengths (m).
    pub wavelengths: Vec<f64>,
    /// Mode labels such as `HE11`; the pump and photon tables for the
    /// hybrid platform, which takes no labels.
    #[serde(default)]
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaperCheckSection {
    /// Fiber record in the material database.
    pub fiber: String,
    /// Two-column `z, radius` profile file.
    pub profile: Option<PathBuf>,
    pub linear: Option<LinearProfile>,
    /// Pump wavelength (m).
    pub pump_wavelength: f64,
    /// Triplet wavelength (m); three times the pump wavelength when absent.
    pub triplet_wavelength: Option<f64>,
    /// Outer radius below which the core is neglected (m).
    pub rod_threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearProfile {
    pub start_radius: f64,
    pub end_radius: f64,
    pub length: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

impl Format {
    pub fn csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    pub format: Option<Format>,
    /// Write spectral grids next to the rate summary.
    #[serde(default)]
    pub grids: bool,
}

/// Which platform section is present.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlatformKind {
    Taper,
    HollowCore,
    Hybrid,
}

impl PlatformKind {
    pub fn name(self) -> &'static str {
        match self {
            PlatformKind::Taper => "taper",
            PlatformKind::HollowCore => "hollow_core",
            PlatformKind::Hybrid => "hybrid",
        }
    }
}

/// Parsed configuration with its source text and location.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Config(format!("--config: cannot read {}: {e}", path.display()))
        })?;
        let config: RunConfig = toml::from_str(&text).map_err(|e| {
            CliError::Config(format!("{}: {}", path.display(), e.to_string().trim_end()))
        })?;
        config.validate()?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(Self {
            config,
            text,
            base_dir,
        })
    }

    /// Path from the configuration, relative to the configuration file.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }
}

fn config_error<T>(message: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(message.into()))
}

impl RunConfig {
    pub fn platform_kind(&self) -> PlatformKind {
        let p = &self.platform;
        if p.taper.is_some() {
            PlatformKind::Taper
        } else if p.hollow_core.is_some() {
            PlatformKind::HollowCore
        } else {
            PlatformKind::Hybrid
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        let p = &self.platform;
        let count = [
            p.taper.is_some(),
            p.hollow_core.is_some(),
            p.hybrid.is_some(),
        ]
        .iter()
        .filter(|&&b| b)
        .count();
        if count != 1 {
            return config_error(format!(
                "platform: exactly one of [platform.taper], [platform.hollow_core], [platform.hybrid] is required, found {count}"
            ));
        }
        let kind = self.platform_kind();
        if let Some(process) = &self.process {
            if process.cw == Some(true) && process.seed.is_some() {
                return config_error(
                    "process.cw: a continuous-wave run cannot carry a [process.seed] block",
                );
            }
        }
        let applicable = |parameter: SweepParameter, field: &str| -> CliResult<()> {
            let ok = match parameter {
                SweepParameter::Diameter => kind == PlatformKind::Taper,
                SweepParameter::Pressure => kind == PlatformKind::HollowCore,
                SweepParameter::PumpWavelength => true,
            };
            if ok {
                Ok(())
            } else {
                config_error(format!(
                    "{field}: parameter {} does not apply to the {} platform",
                    parameter.name(),
                    kind.name()
                ))
            }
        };
        if let Some(sweep) = &self.sweep {
            applicable(sweep.parameter, "sweep.parameter")?;
            if sweep.values.is_empty() {
                return config_error("sweep.values: at least one value is required");
            }
            if sweep.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return config_error("sweep.values: values must be positive");
            }
        }
        if let Some(scan) = &self.scan {
            applicable(scan.parameter, "scan.parameter")?;
            if scan.omega1.is_some() != scan.omega2.is_some() {
                return config_error("scan.omega1: omega1 and omega2 must be given together");
            }
        }
        if let Some(check) = &self.taper_check {
            if check.profile.is_some() == check.linear.is_some() {
                return config_error(
                    "taper_check.profile: give exactly one of profile and [taper_check.linear]",
                );
            }
        }
        if let Some(modes) = &self.modes {
            if kind == PlatformKind::Hybrid && !modes.labels.is_empty() {
                return config_error("modes.labels: the hybrid platform reports its two tabulated modes and takes no labels");
            }
            if kind != PlatformKind::Hybrid && modes.labels.is_empty() {
                return config_error("modes.labels: at least one mode label is required");
            }
        }
        Ok(())
    }
}
