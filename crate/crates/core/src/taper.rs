//! Taper design utilities: adiabaticity along a transition profile, mode
//! beating and splice launch overlap.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::omega_of;
use crate::error::{Error, Result};
use crate::materials::{FiberSpec, Medium};
use crate::modes::{
    solve_step_index, solve_step_index_full, FieldGrid, GridSpec, GuidedMode, ModeLabel,
};

/// Outer radius below which the transition is modeled as a bare glass rod.
pub const DEFAULT_ROD_THRESHOLD: f64 = 15e-6;

/// `Ω = ρ |β_i − β_j| / (2π)` (rad).
pub fn adiabatic_limit(local_radius: f64, beta_i: f64, beta_neighbor: f64) -> f64 {
    local_radius * (beta_i - beta_neighbor).abs() / (2.0 * std::f64::consts::PI)
}

/// Beat length `2π/|β_a − β_b|` (m).
pub fn beat_period(mode_a: &GuidedMode, mode_b: &GuidedMode, omega: f64) -> Result<f64> {
    let d = (mode_a.beta(omega)? - mode_b.beta(omega)?).abs();
    if d == 0.0 {
        return Err(Error::DegenerateModes);
    }
    Ok(2.0 * std::f64::consts::PI / d)
}

/// `|⟨a, b⟩|² / (⟨a, a⟩⟨b, b⟩)` for two fields on the same grid.
pub fn field_overlap(a: &FieldGrid, b: &FieldGrid) -> Result<f64> {
    let ab = a.inner(b)?;
    let aa = a.inner(a)?.re;
    let bb = b.inner(b)?.re;
    if !(aa > 0.0 && bb > 0.0) {
        return Err(Error::InvalidInput("overlap of a zero field".into()));
    }
    Ok((ab.norm_sqr() / (aa * bb)).min(1.0))
}

/// Power coupling between the fields carried by two modes.
pub fn launch_overlap(mode_in: &GuidedMode, mode_out: &GuidedMode) -> Result<f64> {
    fn field(m: &GuidedMode) -> Result<&FieldGrid> {
        m.field
            .as_ref()
            .ok_or_else(|| Error::InvalidInput(format!("mode {} carries no field", m.label)))
    }
    field_overlap(field(mode_in)?, field(mode_out)?)
}

/// Field of a fiber mode at `wavelength` sampled on `spec`.
pub fn fiber_mode_field(
    fiber: &FiberSpec,
    label: ModeLabel,
    wavelength: f64,
    spec: GridSpec,
) -> Result<FieldGrid> {
    let nco = fiber.core_medium().index(wavelength)?;
    let ncl = fiber.cladding_medium().index(wavelength)?;
    let sol = solve_step_index_full(fiber.core_radius, nco, ncl, wavelength, label)?;
    FieldGrid::step_index(spec, fiber.core_radius, nco, ncl, label, &sol)
}

/// Taper radius samples along z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaperProfile {
    /// `(z, radius)` pairs in m, strictly increasing in z.
    pub samples: Vec<(f64, f64)>,
    pub waist_radius: f64,
}

impl TaperProfile {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::ProfileTooShort(samples.len()));
        }
        for w in samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidInput(format!(
                    "profile z values must increase strictly ({:e} then {:e})",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(z, r)) = samples.iter().find(|(z, r)| !(*r > 0.0) || !z.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid profile sample z={z:e}, radius={r:e}"
            )));
        }
        let (iw, waist_radius) =
            samples
                .iter()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |acc, (i, &(_, r))| if r < acc.1 { (i, r) } else { acc },
                );
        let down = samples[..=iw].windows(2).all(|w| w[1].1 <= w[0].1);
        let up = samples[iw..].windows(2).all(|w| w[1].1 >= w[0].1);
        if !(down && up) {
            return Err(Error::InvalidInput(
                "profile radius must not increase toward the waist on either side".into(),
            ));
        }
        Ok(Self {
            samples,
            waist_radius,
        })
    }

    /// Parses `z_m,radius_m` rows; `#` starts a comment.
    pub fn parse(text: &str, source_name: &str) -> Result<Self> {
        let mut samples = Vec::new();
        let mut header_seen = false;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if !header_seen && line.starts_with(|c: char| c.is_ascii_alphabetic()) {
                if line.replace(' ', "") != "z_m,radius_m" {
                    return Err(Error::Parse {
                        source_name: source_name.into(),
                        line: k + 1,
                        message: format!("expected header `z_m,radius_m`, found `{line}`"),
                    });
                }
                header_seen = true;
                continue;
            }
            let parse = |s: Option<&str>| -> Result<f64> {
                s.map(str::trim)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        source_name: source_name.into(),
                        line: k + 1,
                        message: format!("expected two numbers, found `{line}`"),
                    })
            };
            let mut parts = line.split(',');
            let z = parse(parts.next())?;
            let r = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse {
                    source_name: source_name.into(),
                    line: k + 1,
                    message: "too many columns".into(),
                });
            }
            samples.push((z, r));
        }
        Self::new(samples)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("z_m,radius_m\n");
        for (z, r) in &self.samples {
            let _ = writeln!(s, "{z:e},{r:e}");
        }
        s
    }

    /// Local taper angle `|dr/dz|` from centered differences, one-sided at
    /// the ends.
    pub fn local_angles(&self) -> Vec<f64> {
        let s = &self.samples;
        let n = s.len();
        (0..n)
            .map(|i| {
                let (a, b) = match i {
                    0 => (0, 1),
                    _ if i == n - 1 => (n - 2, n - 1),
                    _ => (i - 1, i + 1),
                };
                ((s[b].1 - s[a].1) / (s[b].0 - s[a].0)).abs()
            })
            .collect()
    }

    /// Linear taper from `r0` to `r1` over `length`, `n` samples.
    pub fn linear(r0: f64, r1: f64, length: f64, n: usize) -> Result<Self> {
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / (n.max(2) - 1) as f64;
                (t * length, r0 + (r1 - r0) * t)
            })
            .collect();
        Self::new(samples)
    }
}

/// Two modes whose coupling limits the taper angle at one wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModePair {
    pub wavelength: f64,
    pub a: ModeLabel,
    pub b: ModeLabel,
}

/// `(HE11, HE12)` at the pump and triplet wavelengths and `(HE12, HE13)`
/// at the pump.
pub fn default_mode_pairs(pump_wavelength: f64, triplet_wavelength: f64) -> Vec<ModePair> {
    vec![
        ModePair {
            wavelength: pump_wavelength,
            a: ModeLabel::he(1, 1),
            b: ModeLabel::he(1, 2),
        },
        ModePair {
            wavelength: triplet_wavelength,
            a: ModeLabel::he(1, 1),
            b: ModeLabel::he(1, 2),
        },
        ModePair {
            wavelength: pump_wavelength,
            a: ModeLabel::he(1, 2),
            b: ModeLabel::he(1, 3),
        },
    ]
}

/// Waveguide seen by the modes at one point of the transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionModel {
    /// Untapered fiber.
    pub fiber: FiberSpec,
    /// Medium around the glass.
    pub surround: Medium,
    /// Outer radius below which the core is neglected.
    pub rod_threshold: f64,
}

impl TransitionModel {
    pub fn new(fiber: FiberSpec) -> Self {
        Self {
            fiber,
            surround: Medium::vacuum(),
            rod_threshold: DEFAULT_ROD_THRESHOLD,
        }
    }

    /// Propagation constant at outer radius `r`. Above the threshold a mode
    /// is guided by the core scaled with the outer radius, or by the
    /// cladding-surround interface once the scaled core no longer supports
    /// it. Below the threshold the glass is a rod in the surrounding medium.
    pub fn beta(&self, outer_radius: f64, wavelength: f64, label: ModeLabel) -> Result<f64> {
        let k = 2.0 * std::f64::consts::PI / wavelength;
        let ncl = self.fiber.cladding_medium().index(wavelength)?;
        let rod = || {
            solve_step_index(
                outer_radius,
                ncl,
                self.surround.index(wavelength)?,
                wavelength,
                label,
            )
        };
        let n = if outer_radius >= self.rod_threshold {
            let a = self.fiber.core_radius * outer_radius / self.fiber.cladding_radius;
            let nco = self.fiber.core_medium().index(wavelength)?;
            match solve_step_index(a, nco, ncl, wavelength, label) {
                Err(Error::ModeCutOff { .. }) => rod()?,
                other => other?,
            }
        } else {
            rod()?
        };
        Ok(k * n)
    }

    /// Limit angle of one pair at outer radius `r`; `None` when a mode is
    /// cut off or lies beyond the range of the mode solver.
    pub fn limit(&self, outer_radius: f64, pair: &ModePair) -> Result<Option<f64>> {
        let ba = match self.beta(outer_radius, pair.wavelength, pair.a) {
            Ok(b) => b,
            Err(Error::ModeCutOff { .. } | Error::InvalidGeometry(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let bb = match self.beta(outer_radius, pair.wavelength, pair.b) {
            Ok(b) => b,
            Err(Error::ModeCutOff { .. } | Error::InvalidGeometry(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        Ok(Some(adiabatic_limit(outer_radius, ba, bb)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub z: f64,
    pub radius: f64,
    /// Local taper angle (rad).
    pub angle: f64,
    /// Limit per mode pair; `None` where a mode of the pair is unavailable.
    pub limits: Vec<Option<f64>>,
    /// Smallest limit over the pairs divided by the angle.
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub pairs: Vec<ModePair>,
    pub samples: Vec<ProfileSample>,
    /// True when the angle is strictly below every available limit at every sample.
    pub pass: bool,
    /// Smallest margin along the profile; `None` when nothing constrains the angle.
    pub worst_margin: Option<f64>,
}

impl AdiabaticityReport {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidInput(format!("report serialization failed: {e}")))
    }
}

/// True when `angle` is strictly below every available limit.
fn admissible(angle: f64, limits: &[Option<f64>]) -> bool {
    limits.iter().flatten().all(|&l| angle < l)
}

/// Compares the local angle of `profile` with the limit of every pair.
pub fn check_profile(
    profile: &TaperProfile,
    pairs: &[ModePair],
    model: &TransitionModel,
) -> Result<AdiabaticityReport> {
    if profile.samples.len() < 3 {
        return Err(Error::ProfileTooShort(profile.samples.len()));
    }
    let angles = profile.local_angles();
    let samples: Vec<ProfileSample> = profile
        .samples
        .par_iter()
        .zip(angles.par_iter())
        .map(|(&(z, r), &angle)| {
            let limits = pairs.iter().map(|p| model.limit(r, p)).collect::<Result<Vec<_>>>()?;
            for (p, l) in pairs.iter().zip(&limits) {
                if l.is_none() {
                    log::info!(
                        "z = {z:e} m: pair {}/{} at {:.1} nm dropped (mode unavailable at radius {r:e} m)",
                        p.a,
                        p.b,
                        p.wavelength * 1e9
                    );
                }
            }
            let min = limits.iter().flatten().copied().fold(f64::INFINITY, f64::min);
            let margin = (min.is_finite() && angle > 0.0).then(|| min / angle);
            Ok(ProfileSample {
                z,
                radius: r,
                angle,
                limits,
                margin,
            })
        })
        .collect::<Result<_>>()?;
    let pass = samples.iter().all(|s| admissible(s.angle, &s.limits));
    let worst_margin = samples.iter().filter_map(|s| s.margin).reduce(f64::min);
    Ok(AdiabaticityReport {
        pairs: pairs.to_vec(),
        samples,
        pass,
        worst_margin,
    })
}

/// Beat length of two modes of `fiber` at `wavelength` (m).
pub fn fiber_beat_period(
    fiber: &FiberSpec,
    a: ModeLabel,
    b: ModeLabel,
    wavelength: f64,
) -> Result<f64> {
    let w = omega_of(wavelength);
    let domain = (w * (1.0 - 1e-6), w * (1.0 + 1e-6));
    let ma = GuidedMode::step_index(
        a,
        fiber.core_radius,
        fiber.core_medium(),
        fiber.cladding_medium(),
        domain,
    )?;
    let mb = GuidedMode::step_index(
        b,
        fiber.core_radius,
        fiber.core_medium(),
        fiber.cladding_medium(),
        domain,
    )?;
    beat_period(&ma, &mb, w)
}
