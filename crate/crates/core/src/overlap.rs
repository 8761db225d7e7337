//! Effective areas and nonlinear coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{C, EPSILON_0};
use crate::error::{Error, Result};
use crate::modes::FieldGrid;

/// Whether an area comes from field integrals or was given directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaSource {
    Computed,
    Supplied,
}

/// How a four-field overlap with non-positive real part is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverlapSign {
    /// Reject overlaps whose real part is not positive.
    #[default]
    Strict,
    /// Use the modulus of the overlap integral.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapSet {
    /// Four-mode area entering the triplet coupling (m²).
    pub a_eff_4mode: f64,
    /// Pump self-phase-modulation area (m²).
    pub a_eff_spm: f64,
    /// Pump/photon cross-phase-modulation areas (m²).
    pub a_eff_xpm: [f64; 3],
    pub source: AreaSource,
}

impl OverlapSet {
    /// All areas set to one supplied value.
    pub fn supplied(area: f64) -> Result<Self> {
        if !(area > 0.0 && area.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "effective area must be positive, got {area}"
            )));
        }
        Ok(Self {
            a_eff_4mode: area,
            a_eff_spm: area,
            a_eff_xpm: [area; 3],
            source: AreaSource::Supplied,
        })
    }

    /// Areas integrated from the pump and three photon fields.
    pub fn computed(fp: &FieldGrid, f: [&FieldGrid; 3], sign: OverlapSign) -> Result<Self> {
        Ok(Self {
            a_eff_4mode: effective_area_4mode(fp, f[0], f[1], f[2], sign)?,
            a_eff_spm: effective_area_spm(fp)?,
            a_eff_xpm: [
                effective_area_xpm(fp, f[0])?,
                effective_area_xpm(fp, f[1])?,
                effective_area_xpm(fp, f[2])?,
            ],
            source: AreaSource::Computed,
        })
    }
}

fn check_geometry(grids: &[&FieldGrid]) -> Result<()> {
    let first = grids[0];
    if grids.iter().any(|g| !g.same_geometry(first)) {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

fn cell(g: &FieldGrid) -> f64 {
    g.spec.dx * g.spec.dy
}

/// `1 / ∫ Fp F1* F2* F3* dx dy`.
pub fn effective_area_4mode(
    fp: &FieldGrid,
    f1: &FieldGrid,
    f2: &FieldGrid,
    f3: &FieldGrid,
    sign: OverlapSign,
) -> Result<f64> {
    check_geometry(&[fp, f1, f2, f3])?;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..fp.values.len() {
        s += fp.values[i] * f1.values[i].conj() * f2.values[i].conj() * f3.values[i].conj();
    }
    let integral = s * cell(fp);
    let value = match sign {
        OverlapSign::Strict => {
            if !(integral.re > 0.0) {
                return Err(Error::NonPositiveOverlap(integral.re));
            }
            integral.re
        }
        OverlapSign::Absolute => integral.norm(),
    };
    if value == 0.0 {
        return Err(Error::NonPositiveOverlap(0.0));
    }
    Ok(1.0 / value)
}

/// `1 / ∫ |Fp|⁴ dx dy`.
pub fn effective_area_spm(fp: &FieldGrid) -> Result<f64> {
    effective_area_xpm(fp, fp)
}

/// `1 / ∫ |Fp|² |Fn|² dx dy`.
pub fn effective_area_xpm(fp: &FieldGrid, fn_: &FieldGrid) -> Result<f64> {
    check_geometry(&[fp, fn_])?;
    let s: f64 = fp
        .values
        .iter()
        .zip(&fn_.values)
        .map(|(a, b)| a.norm_sqr() * b.norm_sqr())
        .sum();
    let integral = s * cell(fp);
    if !(integral > 0.0) {
        return Err(Error::DisjointModes);
    }
    Ok(1.0 / integral)
}

/// Pump self-phase-modulation coefficient `3χω_p/(4ε₀c²n_p²A_spm)` (1/(W m)).
pub fn gamma_spm(chi3: f64, omega_p: f64, n_p: f64, a_spm: f64) -> f64 {
    3.0 * chi3 * omega_p / (4.0 * EPSILON_0 * C * C * n_p * n_p * a_spm)
}

/// Cross-phase-modulation coefficient `3χω_n/(4ε₀c²n_p n_n A_xpm)` (1/(W m)).
pub fn gamma_xpm(chi3: f64, omega_n: f64, n_p: f64, n_n: f64, a_xpm: f64) -> f64 {
    3.0 * chi3 * omega_n / (4.0 * EPSILON_0 * C * C * n_p * n_n * a_xpm)
}

/// Kerr contribution to the mismatch, `[γ_p − 2(γ_p1 + γ_p2 + γ_p3)] P_p`.
pub fn nonlinear_mismatch(gamma_p: f64, gamma_xpm: [f64; 3], pump_power: f64) -> f64 {
    (gamma_p - 2.0 * (gamma_xpm[0] + gamma_xpm[1] + gamma_xpm[2])) * pump_power
}

/// Triplet coupling `9χ²ω_p²/(ε₀²c⁴ n_p n₁ n₂ n₃ A²)`.
pub fn gamma_squared_spontaneous(
    chi3: f64,
    omega_p: f64,
    n_p: f64,
    n1: f64,
    n2: f64,
    n3: f64,
    a_eff: f64,
) -> f64 {
    9.0 * chi3 * chi3 * omega_p * omega_p
        / (EPSILON_0 * EPSILON_0 * C.powi(4) * n_p * n1 * n2 * n3 * a_eff * a_eff)
}

/// Seeded pair coupling: the spontaneous form with `ω̃_p = ω_p − ω_s` and
/// the seed index in place of `n₃`.
pub fn gamma_squared_seeded(
    chi3: f64,
    omega_p_reduced: f64,
    n_p: f64,
    n1: f64,
    n2: f64,
    n_s: f64,
    a_eff: f64,
) -> f64 {
    gamma_squared_spontaneous(chi3, omega_p_reduced, n_p, n1, n2, n_s, a_eff)
}

/// All nonlinear coefficients of one process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonlinearCoefficients {
    pub gamma_p: f64,
    pub gamma_xpm: [f64; 3],
    pub gamma_123_sq: f64,
    pub gamma_12s_sq: Option<f64>,
    pub beta_nl: f64,
}
