//! Shared fixtures for the benchmarks.

use topdc_core::materials::MaterialDatabase;
use topdc_core::overlap::OverlapSet;
use topdc_core::phasematch::PhaseMatchProblem;
use topdc_core::platform::TaperPlatform;
use topdc_core::rates::{Coupling, ProcessConfig};

/// Pump wavelength of the benchmark problems (m).
pub const PUMP_WAVELENGTH: f64 = 532e-9;
/// Phase-matched taper diameter (m).
pub const TAPER_DIAMETER: f64 = 790.3695863613e-9;

/// Taper problem with splined photon dispersion.
pub fn taper_problem() -> PhaseMatchProblem {
    let db = MaterialDatabase::embedded();
    TaperPlatform::new(&db, TAPER_DIAMETER)
        .and_then(|t| t.problem(PUMP_WAVELENGTH))
        .expect("taper problem builds")
}

/// Coupling with the taper effective area.
pub fn taper_coupling() -> Coupling {
    Coupling::new(2.5e-22, OverlapSet::supplied(7.89e-12).expect("valid area"))
}

/// Spontaneous process in a 10 cm taper with a 150 nm window.
pub fn taper_process() -> ProcessConfig {
    ProcessConfig::spontaneous(0.02, PUMP_WAVELENGTH, 0.1, 150e-9)
}
