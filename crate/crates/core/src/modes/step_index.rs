//! Exact vector modes of a two-layer step-index waveguide.
//!
//! Roots are located in the core parameter `U = a k sqrt(n_core² − n²)`.
//! For hybrid modes the characteristic equation
//!
//! ```text
//! (ηJ + ηK)(ηJ + r ηK) = ν² (1/U² + 1/W²)(1/U² + r/W²),
//! ηJ = J'ν(U)/(U Jν(U)),  ηK = K'ν(W)/(W Kν(W)),  r = n_clad²/n_core²
//! ```
//!
//! is a quadratic in ηJ. Solving it and multiplying by Jν(U) gives
//! `G(U) = J'ν(U)/U − Jν(U) x±`, which is continuous on `0 < U < V` and
//! vanishes exactly at the roots. The lower branch gives HE modes and the
//! upper branch EH modes. TE and TM modes use
//! `J1(U)/U + s J0(U) K1(W)/(W K0(W))` with `s = 1` and `s = r`.

use serde::{Deserialize, Serialize};

use super::label::{ModeFamily, ModeLabel};
use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_k, bisect};

/// Largest normalized frequency accepted; beyond it `K_ν(W)` leaves the
/// double-precision range.
pub const MAX_V: f64 = 650.0;

/// Bound on the normalized characteristic-equation residual of every root.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Minimum number of samples of the bracketing scan.
pub const MIN_SCAN_SAMPLES: usize = 2000;

/// A solved step-index mode at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepIndexSolution {
    pub n_eff: f64,
    pub u: f64,
    pub w: f64,
    pub v: f64,
    /// Normalized residual of the characteristic equation at the root.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy)]
struct Guide {
    v: f64,
    r: f64,
    nu: f64,
    family: ModeFamily,
}

impl Guide {
    fn w_of(&self, u: f64) -> f64 {
        ((self.v - u) * (self.v + u)).sqrt()
    }

    /// Pole-free characteristic function.
    fn g(&self, u: f64) -> f64 {
        let w = self.w_of(u);
        match self.family {
            ModeFamily::TE | ModeFamily::TM => {
                let s = if self.family == ModeFamily::TE {
                    1.0
                } else {
                    self.r
                };
                let (j0, _) = bessel_j(0.0, u);
                let (j1, _) = bessel_j(1.0, u);
                let (k0, _) = bessel_k(0.0, w);
                let (k1, _) = bessel_k(1.0, w);
                j1 / u + s * j0 * k1 / (w * k0)
            }
            ModeFamily::HE | ModeFamily::EH => {
                let (j, dj) = bessel_j(self.nu, u);
                let (k, dk) = bessel_k(self.nu, w);
                let eta_k = dk / (w * k);
                let r = self.r;
                let big_r = self.nu
                    * self.nu
                    * (1.0 / (u * u) + 1.0 / (w * w))
                    * (1.0 / (u * u) + r / (w * w));
                let half = 0.5 * (1.0 - r) * eta_k;
                let root = (half * half + big_r).sqrt();
                let sign = if self.family == ModeFamily::HE {
                    -1.0
                } else {
                    1.0
                };
                let x = -0.5 * (1.0 + r) * eta_k + sign * root;
                dj / u - j * x
            }
        }
    }

    /// Normalized residual of the characteristic equation in its product
    /// form, independent of the branch used to find the root.
    fn residual(&self, u: f64) -> f64 {
        let w = self.w_of(u);
        match self.family {
            ModeFamily::TE | ModeFamily::TM => {
                let s = if self.family == ModeFamily::TE {
                    1.0
                } else {
                    self.r
                };
                let (j0, _) = bessel_j(0.0, u);
                let (j1, _) = bessel_j(1.0, u);
                let (k0, _) = bessel_k(0.0, w);
                let (k1, _) = bessel_k(1.0, w);
                let a = j1 * w * k0;
                let b = s * u * j0 * k1;
                normalized(a, -b)
            }
            ModeFamily::HE | ModeFamily::EH => {
                let (j, dj) = bessel_j(self.nu, u);
                let (k, dk) = bessel_k(self.nu, w);
                let eta_k = dk / (w * k);
                let r = self.r;
                let lhs = (dj / u + j * eta_k) * (dj / u + r * j * eta_k);
                let rhs = j
                    * j
                    * self.nu
                    * self.nu
                    * (1.0 / (u * u) + 1.0 / (w * w))
                    * (1.0 / (u * u) + r / (w * w));
                normalized(lhs, rhs)
            }
        }
    }
}

fn normalized(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs() + rhs.abs();
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs) / scale
    }
}

fn validate(core_radius: f64, n_core: f64, n_clad: f64, wavelength: f64) -> Result<f64> {
    if !(core_radius > 0.0 && core_radius.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "core radius must be positive, got {core_radius}"
        )));
    }
    if !(wavelength > 0.0 && wavelength.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "wavelength must be positive, got {wavelength}"
        )));
    }
    if !(n_core > n_clad && n_clad >= 1.0 && n_core.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "need n_core > n_clad >= 1, got n_core = {n_core}, n_clad = {n_clad}"
        )));
    }
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let v = core_radius * k * ((n_core - n_clad) * (n_core + n_clad)).sqrt();
    if v > MAX_V {
        return Err(Error::InvalidGeometry(format!(
            "normalized frequency V = {v:.1} exceeds the supported maximum {MAX_V}"
        )));
    }
    Ok(v)
}

/// Normalized frequency `V = a k sqrt(n_core² − n_clad²)`.
pub fn normalized_frequency(core_radius: f64, n_core: f64, n_clad: f64, wavelength: f64) -> f64 {
    2.0 * std::f64::consts::PI / wavelength
        * core_radius
        * ((n_core - n_clad) * (n_core + n_clad)).sqrt()
}

/// Effective index of the labeled mode of a step-index guide.
pub fn solve_step_index(
    core_radius: f64,
    n_core: f64,
    n_clad: f64,
    wavelength: f64,
    label: ModeLabel,
) -> Result<f64> {
    solve_step_index_full(core_radius, n_core, n_clad, wavelength, label).map(|s| s.n_eff)
}

/// Like [`solve_step_index`], returning the modal parameters as well.
///
/// The `radial_order`-th sign change of the characteristic function is taken
/// while scanning from `U → 0` (effective index near `n_core`) towards
/// `U → V` (effective index near `n_clad`).
pub fn solve_step_index_full(
    core_radius: f64,
    n_core: f64,
    n_clad: f64,
    wavelength: f64,
    label: ModeLabel,
) -> Result<StepIndexSolution> {
    let v = validate(core_radius, n_core, n_clad, wavelength)?;
    let guide = Guide {
        v,
        r: (n_clad * n_clad) / (n_core * n_core),
        nu: label.azimuthal_order as f64,
        family: label.family,
    };
    let samples = MIN_SCAN_SAMPLES.max((50.0 * v).ceil() as usize);
    let step = v / samples as f64;
    let mut found = 0;
    let mut u0 = step;
    let mut g0 = guide.g(u0);
    let mut root = None;
    for i in 2..samples {
        let u1 = step * i as f64;
        let g1 = guide.g(u1);
        if g0 != 0.0 && g1 != 0.0 && g0.signum() != g1.signum() {
            found += 1;
            if found == label.radial_order {
                root = Some(bisect(|u| guide.g(u), u0, u1, g0));
                break;
            }
        } else if g1 == 0.0 {
            found += 1;
            if found == label.radial_order {
                root = Some(u1);
                break;
            }
        }
        u0 = u1;
        g0 = g1;
    }
    let u = root.ok_or(Error::ModeCutOff {
        label: label.to_string(),
        v,
    })?;
    let residual = guide.residual(u);
    if !(residual.abs() < RESIDUAL_TOLERANCE) {
        return Err(Error::Residual(residual));
    }
    let w = guide.w_of(u);
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let q = u / (core_radius * k);
    let n_eff = ((n_core - q) * (n_core + q)).sqrt();
    Ok(StepIndexSolution {
        n_eff,
        u,
        w,
        v,
        residual,
    })
}

/// Normalized residual of the characteristic equation for a trial
/// effective index.
pub fn characteristic_residual(
    core_radius: f64,
    n_core: f64,
    n_clad: f64,
    wavelength: f64,
    label: ModeLabel,
    n_eff: f64,
) -> Result<f64> {
    let v = validate(core_radius, n_core, n_clad, wavelength)?;
    if !(n_eff > n_clad && n_eff < n_core) {
        return Err(Error::InvalidInput(format!(
            "trial index {n_eff} is not between the cladding and core indices"
        )));
    }
    let k = 2.0 * std::f64::consts::PI / wavelength;
    let u = core_radius * k * ((n_core - n_eff) * (n_core + n_eff)).sqrt();
    let guide = Guide {
        v,
        r: (n_clad * n_clad) / (n_core * n_core),
        nu: label.azimuthal_order as f64,
        family: label.family,
    };
    Ok(guide.residual(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn te01_cut_off_below_first_zero() {
        let (n_core, n_clad, lambda) = (1.46, 1.45, 1e-6);
        let na: f64 = (n_core * n_core) - n_clad * n_clad;
        let a_cut = 2.404_825_557_695_773 / (2.0 * std::f64::consts::PI / lambda * na.sqrt());
        let err = solve_step_index(a_cut * 0.999, n_core, n_clad, lambda, ModeLabel::te(1));
        assert!(matches!(err, Err(Error::ModeCutOff { .. })));
        assert!(solve_step_index(a_cut * 1.01, n_core, n_clad, lambda, ModeLabel::te(1)).is_ok());
    }

    #[test]
    fn fundamental_mode_bounds() {
        let s = solve_step_index_full(2e-6, 1.46, 1.45, 1.0e-6, ModeLabel::he(1, 1)).unwrap();
        assert!(s.n_eff > 1.45 && s.n_eff < 1.46);
        assert!(s.residual.abs() < RESIDUAL_TOLERANCE);
    }

    #[test]
    fn mode_ordering_in_index() {
        let (a, nco, ncl, l) = (0.395e-6, 1.4607, 1.0, 532e-9);
        let he11 = solve_step_index(a, nco, ncl, l, ModeLabel::he(1, 1)).unwrap();
        let te01 = solve_step_index(a, nco, ncl, l, ModeLabel::te(1)).unwrap();
        let he12 = solve_step_index(a, nco, ncl, l, ModeLabel::he(1, 2)).unwrap();
        assert!(he11 > te01 && te01 > he12);
    }

    #[test]
    fn invalid_geometry() {
        assert!(matches!(
            solve_step_index(-1.0, 1.5, 1.4, 1e-6, ModeLabel::he(1, 1)),
            Err(Error::InvalidGeometry(_))
        ));
        assert!(matches!(
            solve_step_index(1e-6, 1.4, 1.5, 1e-6, ModeLabel::he(1, 1)),
            Err(Error::InvalidGeometry(_))
        ));
    }
}
