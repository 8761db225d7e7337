//! Guided-mode records from exact step-index solutions, the capillary model
//! and tabulated dispersion.

mod field;
mod guided;
mod label;
mod loss;
mod step_index;
mod table;

pub use field::{FieldGrid, GridSpec, DEFAULT_FIELD_SAMPLES, NORMALIZATION_TOLERANCE};
pub use guided::{
    capillary_mode, group_velocity_of, Dispersion, GuidedMode, ModeSource, GROUP_VELOCITY_STEP,
};
pub use label::{ModeFamily, ModeLabel};
pub use loss::{
    antiresonant_loss_estimate, resonance_wavelength, LossEstimate, DEFAULT_GUARD_BAND,
};
pub use step_index::{
    characteristic_residual, normalized_frequency, solve_step_index, solve_step_index_full,
    StepIndexSolution, MAX_V, MIN_SCAN_SAMPLES, RESIDUAL_TOLERANCE,
};
pub use table::{ingest_dispersion, DispersionTable, MIN_TABLE_ROWS, TABLE_HEADER};
