//! Propagation-constant mismatch, the phase-matching function and
//! phase-matching scans.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{GuidedMode, ModeLabel};
use crate::special::sinc;

/// Relative tolerance of the energy-conservation check.
pub const ENERGY_TOLERANCE: f64 = 1e-9;

/// Default bound on |Δβ| at a reported root (rad/m).
pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-3;

/// Minimum number of scan points.
pub const MIN_SCAN_POINTS: usize = 100;

/// Maximum bisection steps per bracket.
pub const MAX_BISECTIONS: usize = 80;

/// Pump, two photon modes and a third photon (or seed) mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchProblem {
    pub pump: GuidedMode,
    pub modes: [GuidedMode; 3],
    /// Pump angular frequency (rad/s).
    pub pump_frequency: f64,
    /// Kerr mismatch β_NL (rad/m).
    pub beta_nl: f64,
}

impl PhaseMatchProblem {
    pub fn new(pump: GuidedMode, modes: [GuidedMode; 3], pump_frequency: f64) -> Self {
        Self {
            pump,
            modes,
            pump_frequency,
            beta_nl: 0.0,
        }
    }

    /// Pump and a single photon mode shared by all three photons.
    pub fn degenerate_modes(pump: GuidedMode, photon: GuidedMode, pump_frequency: f64) -> Self {
        Self::new(
            pump,
            [photon.clone(), photon.clone(), photon],
            pump_frequency,
        )
    }

    pub fn with_beta_nl(mut self, beta_nl: f64) -> Self {
        self.beta_nl = beta_nl;
        self
    }

    pub fn labels(&self) -> [ModeLabel; 4] {
        [
            self.pump.label,
            self.modes[0].label,
            self.modes[1].label,
            self.modes[2].label,
        ]
    }

    /// `β_p − β₁ − β₂ − β₃ − β_NL` with the photon frequencies given
    /// explicitly and no energy check.
    fn mismatch(&self, omega1: f64, omega2: f64, omega3: f64) -> Result<f64> {
        self.mismatch_with_pump(self.pump.beta(self.pump_frequency)?, omega1, omega2, omega3)
    }

    /// Mismatch with the pump propagation constant supplied.
    pub(crate) fn mismatch_with_pump(
        &self,
        bp: f64,
        omega1: f64,
        omega2: f64,
        omega3: f64,
    ) -> Result<f64> {
        let b1 = self.modes[0].beta(omega1)?;
        let b2 = self.modes[1].beta(omega2)?;
        let b3 = self.modes[2].beta(omega3)?;
        // Fixed summation order so that exchanging photons 1 and 2 gives a
        // bit-identical result.
        let pair = b1.min(b2) + b1.max(b2);
        Ok(bp - pair - b3 - self.beta_nl)
    }
}

/// Δβ for an energy-conserving triple.
pub fn delta_beta(
    problem: &PhaseMatchProblem,
    omega1: f64,
    omega2: f64,
    omega3: f64,
) -> Result<f64> {
    if !(omega1 > 0.0 && omega2 > 0.0) {
        return Err(Error::InvalidInput(
            "photon frequencies must be positive".into(),
        ));
    }
    if !(omega3 > 0.0) {
        return Err(Error::NonPositiveOmega3);
    }
    let wp = problem.pump_frequency;
    let mismatch = ((omega1 + omega2 + omega3) - wp) / wp;
    if mismatch.abs() > ENERGY_TOLERANCE {
        return Err(Error::EnergyViolation(mismatch));
    }
    problem.mismatch(omega1, omega2, omega3)
}

/// Δβ of the seeded process, `β_p − β₁ − β₂ − β_s − β_NL`. The frequency
/// mismatch `ω_p − ω₁ − ω₂ − ω_s` is handled by the pulse envelope, so no
/// energy check is made.
pub fn delta_beta_seeded(
    problem: &PhaseMatchProblem,
    omega1: f64,
    omega2: f64,
    omega_s: f64,
) -> Result<f64> {
    problem.mismatch(omega1, omega2, omega_s)
}

/// `f(Δβ) = L sinc(ΔβL/2) exp(iΔβL/2)` (m).
pub fn phase_matching_function(delta_beta: f64, length: f64) -> Complex64 {
    let x = 0.5 * (delta_beta * length);
    Complex64::from_polar(length * sinc(x), x)
}

/// `|f(Δβ)|² = L² sinc²(ΔβL/2)` (m²).
#[inline]
pub fn phase_matching_intensity(delta_beta: f64, length: f64) -> f64 {
    let s = length * sinc(0.5 * (delta_beta * length));
    s * s
}

/// Quantity varied by a phase-matching scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanParameter {
    /// Gas pressure (Pa).
    Pressure,
    /// Fiber or taper diameter (m).
    Diameter,
    /// Pump vacuum wavelength (m).
    PumpWavelength,
    None,
}

/// Photon frequencies at which Δβ is evaluated during a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvaluationPoint {
    /// ω₁ = ω₂ = ω₃ = ω_p/3.
    Degenerate,
    /// Fixed ω₁, ω₂ with ω₃ = ω_p − ω₁ − ω₂.
    Pair { omega1: f64, omega2: f64 },
}

impl EvaluationPoint {
    pub fn frequencies(&self, pump_frequency: f64) -> [f64; 3] {
        match *self {
            EvaluationPoint::Degenerate => {
                let w = pump_frequency / 3.0;
                [w, w, pump_frequency - w - w]
            }
            EvaluationPoint::Pair { omega1, omega2 } => {
                [omega1, omega2, pump_frequency - omega1 - omega2]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub parameter: ScanParameter,
    pub start: f64,
    pub end: f64,
    pub points: usize,
    pub point: EvaluationPoint,
    pub tolerance: f64,
}

impl ScanSpec {
    pub fn new(parameter: ScanParameter, start: f64, end: f64, points: usize) -> Self {
        Self {
            parameter,
            start,
            end,
            points,
            point: EvaluationPoint::Degenerate,
            tolerance: DEFAULT_ROOT_TOLERANCE,
        }
    }

    pub fn at(mut self, point: EvaluationPoint) -> Self {
        self.point = point;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.end > self.start) {
            return Err(Error::NoRoot(format!(
                "scan range [{}, {}] is empty or not finite",
                self.start, self.end
            )));
        }
        if self.points < MIN_SCAN_POINTS {
            return Err(Error::NoRoot(format!(
                "scan needs at least {MIN_SCAN_POINTS} points, got {}",
                self.points
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::NoRoot("root tolerance must be positive".into()));
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                if i == n - 1 {
                    self.end
                } else {
                    self.start + (self.end - self.start) * i as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}

/// A root of Δβ along a scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseMatchSolution {
    pub parameter: ScanParameter,
    pub value: f64,
    /// Δβ at `value` (rad/m).
    pub residual: f64,
    /// dΔβ/d(parameter) across the bracketing scan cell.
    pub slope: f64,
    /// True when ω₁ = ω₂ = ω₃ within the energy tolerance.
    pub degenerate: bool,
    /// Set when Δβ stays within tolerance over a run of scan points.
    pub zero_interval: Option<(f64, f64)>,
    pub labels: [ModeLabel; 4],
    /// Photon frequencies at the root (rad/s).
    pub omegas: [f64; 3],
}

/// Mismatch, mode labels and photon frequencies at one scan value.
type Sample = (f64, [ModeLabel; 4], [f64; 3]);

fn evaluate<F>(build: &F, point: EvaluationPoint, x: f64) -> Result<Option<Sample>>
where
    F: Fn(f64) -> Result<PhaseMatchProblem>,
{
    let problem = match build(x) {
        Ok(p) => p,
        Err(Error::ModeCutOff { label, v }) => {
            log::debug!("scan point {x:e}: {label} cut off (V = {v:.3})");
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let w = point.frequencies(problem.pump_frequency);
    match delta_beta(&problem, w[0], w[1], w[2]) {
        Ok(d) => Ok(Some((d, problem.labels(), w))),
        Err(Error::ModeCutOff { label, v }) => {
            log::debug!("scan point {x:e}: {label} cut off (V = {v:.3})");
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn is_degenerate(w: &[f64; 3]) -> bool {
    let tol = ENERGY_TOLERANCE * w[0].abs().max(w[1].abs()).max(w[2].abs());
    (w[0] - w[1]).abs() <= tol && (w[0] - w[2]).abs() <= tol
}

/// All phase-matching points along a scan, sorted by parameter value.
///
/// `build` maps a parameter value to a problem. Scan points where a mode
/// is cut off are skipped. Runs of consecutive points with |Δβ| below the
/// tolerance collapse into one solution carrying a `zero_interval`; sign
/// changes are bisected until |Δβ| is below the tolerance.
pub fn find_phase_match<F>(build: F, scan: &ScanSpec) -> Result<Vec<PhaseMatchSolution>>
where
    F: Fn(f64) -> Result<PhaseMatchProblem> + Sync,
{
    scan.validate()?;
    let xs = scan.grid();
    let values: Vec<Option<Sample>> = xs
        .par_iter()
        .map(|&x| evaluate(&build, scan.point, x))
        .collect::<Result<_>>()?;
    let tol = scan.tolerance;
    let mut out = Vec::new();
    let mut i = 0;
    while i < xs.len() {
        let Some((v, labels, w)) = values[i] else {
            i += 1;
            continue;
        };
        if v.abs() < tol {
            let mut j = i;
            while j + 1 < xs.len() && matches!(values[j + 1], Some((u, _, _)) if u.abs() < tol) {
                j += 1;
            }
            let slope = slope_around(&xs, &values, i, j);
            out.push(PhaseMatchSolution {
                parameter: scan.parameter,
                value: xs[i],
                residual: v,
                slope,
                degenerate: is_degenerate(&w),
                zero_interval: (j > i).then(|| (xs[i], xs[j])),
                labels,
                omegas: w,
            });
            i = j + 1;
            continue;
        }
        if let Some(Some((v1, _, _))) = values.get(i + 1) {
            if v1.abs() >= tol && v.signum() != v1.signum() {
                match bisect_root(&build, scan.point, xs[i], xs[i + 1], v, tol)? {
                    Some((x, r, labels, w)) => out.push(PhaseMatchSolution {
                        parameter: scan.parameter,
                        value: x,
                        residual: r,
                        slope: (v1 - v) / (xs[i + 1] - xs[i]),
                        degenerate: is_degenerate(&w),
                        zero_interval: None,
                        labels,
                        omegas: w,
                    }),
                    None => log::warn!(
                        "sign change of Δβ between {:e} and {:e} did not converge to a root; skipped",
                        xs[i],
                        xs[i + 1]
                    ),
                }
            }
        }
        i += 1;
    }
    Ok(out)
}

fn slope_around(xs: &[f64], values: &[Option<Sample>], i: usize, j: usize) -> f64 {
    let lo = if i > 0 { i - 1 } else { i };
    let hi = if j + 1 < xs.len() { j + 1 } else { j };
    match (values[lo], values[hi]) {
        (Some((a, _, _)), Some((b, _, _))) if hi > lo => (b - a) / (xs[hi] - xs[lo]),
        _ => 0.0,
    }
}

type Root = (f64, f64, [ModeLabel; 4], [f64; 3]);

fn bisect_root<F>(
    build: &F,
    point: EvaluationPoint,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    tol: f64,
) -> Result<Option<Root>>
where
    F: Fn(f64) -> Result<PhaseMatchProblem>,
{
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (a + b);
        let Some((fm, labels, w)) = evaluate(build, point, mid)? else {
            return Ok(None);
        };
        if fm.abs() < tol {
            return Ok(Some((mid, fm, labels, w)));
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_matching_function_values() {
        let f = phase_matching_function(0.0, 0.1);
        assert_eq!(f.norm(), 0.1);
        assert!((f.norm_sqr() - 0.01).abs() < 1e-17);
        let l = 1.0;
        assert!(phase_matching_function(2.0 * std::f64::consts::PI / l, l).norm() < 1e-15);
        let half = phase_matching_intensity(std::f64::consts::PI / l, l);
        assert!((half - (2.0 / std::f64::consts::PI).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_point_conserves_energy() {
        let w = EvaluationPoint::Degenerate.frequencies(3.5e15);
        assert!(((w[0] + w[1] + w[2]) / 3.5e15 - 1.0).abs() < 1e-15);
        assert!(is_degenerate(&w));
    }
}
