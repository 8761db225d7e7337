use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Variants fall into two groups: input/validation problems (bad files,
/// unknown names, inconsistent configuration) and numerical failures
/// (cutoff, missing roots, unconverged quadrature). [`Error::is_numerical`]
/// tells them apart.
#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "wavelength {wavelength:e} m is outside the valid range [{min:e}, {max:e}] m of {material}"
    )]
    OutOfRange {
        material: String,
        wavelength: f64,
        min: f64,
        max: f64,
    },

    #[error("unknown gas species: {0}")]
    UnknownSpecies(String),

    #[error("unknown material or fiber: {0}")]
    UnknownMaterial(String),

    #[error("mode {label} is cut off (V = {v:.4})")]
    ModeCutOff { label: String, v: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("parse error in {source_name} at line {line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("values in {0} are not strictly increasing")]
    Monotonicity(String),

    #[error(
        "frequency {omega:e} rad/s is not strictly inside the sampled domain [{min:e}, {max:e}]"
    )]
    DomainEdge { omega: f64, min: f64, max: f64 },

    #[error("field grids do not share geometry")]
    GridMismatch,

    #[error("overlap integral is not positive ({0:e})")]
    NonPositiveOverlap(f64),

    #[error("pump and mode fields have disjoint support")]
    DisjointModes,

    #[error("modes are degenerate at this frequency")]
    DegenerateModes,

    #[error("energy conservation violated: relative mismatch {0:e}")]
    EnergyViolation(f64),

    #[error("third photon frequency is not positive")]
    NonPositiveOmega3,

    #[error("quadrature did not converge: relative change {change:e} at resolution {resolution}")]
    GridTooCoarse { resolution: usize, change: f64 },

    #[error("seeded process requires a seed with positive power and a pulse duration")]
    MissingSeed,

    #[error("invalid scan range: {0}")]
    NoRoot(String),

    #[error("taper profile has {0} samples, at least 3 are required")]
    ProfileTooShort(usize),

    #[error("step-index root residual {0:e} exceeds tolerance")]
    Residual(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ModeCutOff { .. }
                | Error::DomainEdge { .. }
                | Error::NonPositiveOverlap(_)
                | Error::DisjointModes
                | Error::DegenerateModes
                | Error::EnergyViolation(_)
                | Error::NonPositiveOmega3
                | Error::GridTooCoarse { .. }
                | Error::Residual(_)
        )
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
