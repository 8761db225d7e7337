//! Confinement loss of a single anti-resonant tube.
//!
//! M. Zeisberger and M. A. Schmidt, "Analytic model for the complex
//! effective index of the leaky modes of tube-type anti-resonant hollow core
//! fibers", Sci. Rep. 7, 11761 (2017):
//!
//! ```text
//! Im n = j01³ / (k R)⁴ · (1 + cot² φ)/(ε − 1) · (ε² + 1)/2,
//! φ = k t sqrt(ε − 1),  ε = n_glass²
//! ```
//!
//! Resonances sit at `λ_m = 2 t sqrt(n_glass² − 1)/m`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default half-width of the resonance guard band, relative to `λ_m`.
pub const DEFAULT_GUARD_BAND: f64 = 0.02;

const J01: f64 = 2.404_825_557_695_773;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossEstimate {
    /// Power loss in dB/m (infinite exactly on a resonance).
    pub db_per_m: f64,
    /// True when the wavelength lies within the guard band of a resonance.
    pub on_resonance: bool,
    /// Closest resonance wavelength (m).
    pub nearest_resonance: f64,
    /// Order `m` of the closest resonance.
    pub resonance_order: u32,
}

/// Resonance wavelength of order `m` for a wall of thickness `t`.
pub fn resonance_wavelength(wall_thickness: f64, n_glass: f64, m: u32) -> f64 {
    2.0 * wall_thickness * ((n_glass - 1.0) * (n_glass + 1.0)).sqrt() / m as f64
}

/// Fundamental-mode loss of a tube with core radius `core_radius` and wall
/// thickness `wall_thickness`.
pub fn antiresonant_loss_estimate(
    core_radius: f64,
    wall_thickness: f64,
    wavelength: f64,
    n_glass: f64,
    guard_band: f64,
) -> Result<LossEstimate> {
    if !(core_radius > 0.0 && wall_thickness > 0.0 && wavelength > 0.0) {
        return Err(Error::InvalidGeometry(
            "core radius, wall thickness and wavelength must be positive".into(),
        ));
    }
    if !(n_glass > 1.0) || !(guard_band >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "need n_glass > 1 and a non-negative guard band, got {n_glass} and {guard_band}"
        )));
    }
    let eps = n_glass * n_glass;
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let phi = k * wall_thickness * (eps - 1.0).sqrt();
    let lambda1 = resonance_wavelength(wall_thickness, n_glass, 1);
    // Orders bracketing the wavelength: λ_m decreases with m.
    let m_real = lambda1 / wavelength;
    let lower = m_real.floor().max(1.0) as u32;
    let candidates = [lower, lower + 1];
    let (order, nearest) = candidates
        .iter()
        .map(|&m| (m, resonance_wavelength(wall_thickness, n_glass, m)))
        .min_by(|a, b| {
            (a.1 - wavelength)
                .abs()
                .total_cmp(&(b.1 - wavelength).abs())
        })
        .expect("two candidates");
    let on_resonance = (wavelength - nearest).abs() <= guard_band * nearest;
    let sin2 = phi.sin().powi(2);
    let cot2_plus_1 = if sin2 == 0.0 {
        f64::INFINITY
    } else {
        1.0 / sin2
    };
    let im_n = J01.powi(3) / (k * core_radius).powi(4) * cot2_plus_1 / (eps - 1.0)
        * (eps * eps + 1.0)
        / 2.0;
    let db_per_m = 20.0 / std::f64::consts::LN_10 * k * im_n;
    Ok(LossEstimate {
        db_per_m,
        on_resonance,
        nearest_resonance: nearest,
        resonance_order: order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resonance_is_flagged() {
        let t = 350e-9;
        let n = 1.45;
        for m in 1..4 {
            let l = resonance_wavelength(t, n, m);
            let e = antiresonant_loss_estimate(19.35e-6, t, l, n, DEFAULT_GUARD_BAND).unwrap();
            assert!(e.on_resonance);
            assert_eq!(e.resonance_order, m);
            assert!(e.db_per_m > 1e3);
        }
    }

    #[test]
    fn larger_core_has_lower_loss() {
        let a = antiresonant_loss_estimate(19.35e-6, 350e-9, 532e-9, 1.4607, 0.02).unwrap();
        let b = antiresonant_loss_estimate(38.7e-6, 350e-9, 532e-9, 1.4607, 0.02).unwrap();
        assert!(!a.on_resonance);
        assert!(b.db_per_m < a.db_per_m);
    }
}
