use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{GasSpecies, GasState, MaterialModel, Medium};
use crate::error::{Error, Result};

/// Material data shipped with the crate.
pub const EMBEDDED_DATA: &str = include_str!("../../data/materials.toml");

/// Schema version understood by this build.
pub const DATA_SCHEMA_VERSION: u32 = 1;

/// A two-layer step-index fiber.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiberSpec {
    pub name: String,
    pub core_radius: f64,
    pub numerical_aperture: f64,
    pub cladding_radius: f64,
    pub cladding: MaterialModel,
    pub citation: String,
}

impl FiberSpec {
    pub fn core_medium(&self) -> Medium {
        Medium::Doped {
            host: self.cladding.clone(),
            numerical_aperture: self.numerical_aperture,
        }
    }

    pub fn cladding_medium(&self) -> Medium {
        Medium::Solid(self.cladding.clone())
    }
}

/// All materials, gases and fibers known to a run.
#[derive(Debug, Clone)]
pub struct MaterialDatabase {
    solids: Vec<MaterialModel>,
    gases: Vec<GasSpecies>,
    fibers: Vec<FiberSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u32,
    #[serde(default)]
    solid: Vec<RawSolid>,
    #[serde(default)]
    gas: Vec<RawGas>,
    #[serde(default)]
    fiber: Vec<RawFiber>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolid {
    name: String,
    citation: String,
    valid_range_um: [f64; 2],
    sellmeier: Vec<[f64; 2]>,
    chi3: Option<f64>,
    #[serde(default)]
    chi3_alternates: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGas {
    name: String,
    citation: String,
    valid_range_um: [f64; 2],
    refractivity: Vec<[f64; 2]>,
    fit_pressure_pa: f64,
    fit_temperature_k: f64,
    chi3_ref: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFiber {
    name: String,
    citation: String,
    core_radius_m: f64,
    numerical_aperture: f64,
    cladding_radius_m: f64,
    cladding: String,
}

impl MaterialDatabase {
    /// The database compiled into the crate.
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED_DATA, "embedded materials.toml")
            .expect("embedded material data is valid")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let raw: RawFile = toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                source_name: source_name.to_string(),
                line,
                message: e.message().to_string(),
            }
        })?;
        let bad = |message: String| Error::Parse {
            source_name: source_name.to_string(),
            line: 0,
            message,
        };
        if raw.schema_version != DATA_SCHEMA_VERSION {
            return Err(bad(format!(
                "unsupported schema_version {} (expected {DATA_SCHEMA_VERSION})",
                raw.schema_version
            )));
        }
        let range = |name: &str, r: [f64; 2]| -> Result<(f64, f64)> {
            if !(r[0] > 0.0 && r[1] > r[0]) {
                return Err(bad(format!("{name}: invalid valid_range_um {r:?}")));
            }
            Ok((r[0] * 1e-6, r[1] * 1e-6))
        };
        let mut solids = Vec::with_capacity(raw.solid.len());
        for s in raw.solid {
            solids.push(MaterialModel {
                valid_range: range(&s.name, s.valid_range_um)?,
                sellmeier: s.sellmeier.iter().map(|p| (p[0], p[1])).collect(),
                name: s.name,
                chi3: s.chi3,
                chi3_alternates: s.chi3_alternates,
                citation: s.citation,
            });
        }
        let mut gases = Vec::with_capacity(raw.gas.len());
        for g in raw.gas {
            if !(g.fit_pressure_pa > 0.0 && g.fit_temperature_k > 0.0) {
                return Err(bad(format!("{}: fit conditions must be positive", g.name)));
            }
            gases.push(GasSpecies {
                valid_range: range(&g.name, g.valid_range_um)?,
                refractivity: g.refractivity.iter().map(|p| (p[0], p[1])).collect(),
                name: g.name,
                fit_pressure: g.fit_pressure_pa,
                fit_temperature: g.fit_temperature_k,
                chi3_ref: g.chi3_ref,
                citation: g.citation,
            });
        }
        let mut fibers = Vec::with_capacity(raw.fiber.len());
        for f in raw.fiber {
            let cladding = solids
                .iter()
                .find(|s| s.name == f.cladding)
                .cloned()
                .ok_or_else(|| bad(format!("{}: unknown cladding {}", f.name, f.cladding)))?;
            if !(f.core_radius_m > 0.0
                && f.cladding_radius_m > f.core_radius_m
                && f.numerical_aperture > 0.0)
            {
                return Err(bad(format!("{}: invalid fiber geometry", f.name)));
            }
            fibers.push(FiberSpec {
                name: f.name,
                core_radius: f.core_radius_m,
                numerical_aperture: f.numerical_aperture,
                cladding_radius: f.cladding_radius_m,
                cladding,
                citation: f.citation,
            });
        }
        Ok(Self {
            solids,
            gases,
            fibers,
        })
    }

    pub fn solid(&self, name: &str) -> Result<&MaterialModel> {
        self.solids
            .iter()
            .find(|s| s.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn species(&self, name: &str) -> Result<&GasSpecies> {
        self.gases
            .iter()
            .find(|g| g.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownSpecies(name.to_string()))
    }

    /// A gas state for a named species.
    pub fn gas(&self, name: &str, pressure: f64, temperature: f64) -> Result<GasState> {
        GasState::new(self.species(name)?.clone(), pressure, temperature)
    }

    pub fn fiber(&self, name: &str) -> Result<&FiberSpec> {
        self.fibers
            .iter()
            .find(|f| f.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownMaterial(name.to_string()))
    }

    pub fn solids(&self) -> &[MaterialModel] {
        &self.solids
    }

    pub fn gases(&self) -> &[GasSpecies] {
        &self.gases
    }

    pub fn fibers(&self) -> &[FiberSpec] {
        &self.fibers
    }
}
