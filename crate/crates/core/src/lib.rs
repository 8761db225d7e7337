//! Dispersion, phase matching and rate estimation for third-order
//! parametric down-conversion (one pump photon splitting into a photon
//! triplet) in optical fibers.
//!
//! The crate is organized bottom-up:
//!
//! * [`materials`]: Sellmeier solids, gases and fiber records.
//! * [`modes`]: guided modes from step-index, capillary and tabulated sources.
//! * [`overlap`]: effective areas and nonlinear coefficients.
//! * [`phasematch`]: propagation-constant mismatch and root scans.
//! * [`rates`]: spectral densities, triplet rates and seeded pair numbers.
//! * [`taper`]: adiabaticity, mode beating and launch overlap.
//! * [`platform`]: the three fiber platforms as problem builders.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod error;
pub mod materials;
pub mod modes;
pub mod overlap;
pub mod phasematch;
pub mod platform;
pub mod provenance;
pub mod rates;
pub mod special;
pub mod spline;
pub mod taper;

pub use error::{Error, Result};
