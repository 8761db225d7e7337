//! Spectral densities and integrated rates for the spontaneous (CW) and
//! seeded (pulsed) processes.
//!
//! The detection bandwidth Δλ is a wavelength window of full width Δλ
//! centered on the degenerate down-converted wavelength: `3λ_p` for the
//! spontaneous process and the wavelength of `ω̃_p/2 = (ω_p − ω_s)/2` for
//! the seeded one. Each axis of the (ω₁, ω₂) grid spans that window
//! converted to angular frequency.

mod grid;
mod rotated;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use grid::{SpectralGrid, Topology, DEGENERATE_RATIO, EXTENT_THRESHOLD, SPLIT_RATIO};

use crate::constants::{omega_of, wavelength_of};
use crate::error::{Error, Result};
use crate::overlap::{
    gamma_spm, gamma_squared_seeded, gamma_squared_spontaneous, gamma_xpm, nonlinear_mismatch,
    NonlinearCoefficients, OverlapSet,
};
use crate::phasematch::{phase_matching_intensity, PhaseMatchProblem};
use crate::provenance::Provenance;
use crate::special::sinc;

pub const DEFAULT_GRID_RESOLUTION: usize = 801;
pub const DEFAULT_MAX_RESOLUTION: usize = 6401;
pub const DEFAULT_CONVERGENCE_TOLERANCE: f64 = 0.01;

const PI2: f64 = std::f64::consts::PI * std::f64::consts::PI;

/// Seed beam and pulse parameters. All present or the whole block absent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedConfig {
    /// Peak seed power (W).
    pub power: f64,
    /// Seed vacuum wavelength (m).
    pub wavelength: f64,
    /// Square-pulse duration (s).
    pub pulse_duration: f64,
    /// Recorded for reports; never applied to powers.
    #[serde(default)]
    pub inverse_duty_cycle: Option<f64>,
    /// Pulse repetition rate (Hz), used to convert pairs per pulse to pairs per second.
    #[serde(default)]
    pub repetition_rate: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessConfig {
    /// CW power or pulse peak power (W).
    pub pump_power: f64,
    /// Pump vacuum wavelength (m).
    pub pump_wavelength: f64,
    /// Fiber length (m).
    pub fiber_length: f64,
    /// Full width of the wavelength detection window (m).
    pub detection_bandwidth: f64,
    /// Points per grid axis.
    #[serde(default = "default_resolution")]
    pub grid_resolution: usize,
    #[serde(default)]
    pub seed: Option<SeedConfig>,
}

fn default_resolution() -> usize {
    DEFAULT_GRID_RESOLUTION
}

impl ProcessConfig {
    pub fn spontaneous(
        pump_power: f64,
        pump_wavelength: f64,
        fiber_length: f64,
        detection_bandwidth: f64,
    ) -> Self {
        Self {
            pump_power,
            pump_wavelength,
            fiber_length,
            detection_bandwidth,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: SeedConfig) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_resolution(mut self, n: usize) -> Self {
        self.grid_resolution = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidInput(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        if !(self.pump_power >= 0.0 && self.pump_power.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "pump_power must be non-negative, got {}",
                self.pump_power
            )));
        }
        positive("pump_wavelength", self.pump_wavelength)?;
        positive("fiber_length", self.fiber_length)?;
        positive("detection_bandwidth", self.detection_bandwidth)?;
        if self.grid_resolution < 2 {
            return Err(Error::InvalidInput(format!(
                "grid_resolution must be at least 2, got {}",
                self.grid_resolution
            )));
        }
        if let Some(s) = &self.seed {
            if !(s.power >= 0.0 && s.power.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "seed power must be non-negative, got {}",
                    s.power
                )));
            }
            positive("seed wavelength", s.wavelength)?;
            positive("pulse_duration", s.pulse_duration)?;
        }
        Ok(())
    }
}

/// Which refractive indices enter the coupling prefactors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexConvention {
    /// Modal effective indices.
    #[default]
    Effective,
    /// Bulk index of each mode's host material.
    Material,
}

/// Nonlinear material and overlap data of one process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    /// χ⁽³⁾ (m²/V²).
    pub chi3: f64,
    pub overlap: OverlapSet,
    #[serde(default)]
    pub convention: IndexConvention,
    /// Kerr mismatch override. `None` leaves it off for spontaneous runs
    /// and on for seeded runs.
    #[serde(default)]
    pub kerr: Option<bool>,
}

impl Coupling {
    pub fn new(chi3: f64, overlap: OverlapSet) -> Self {
        Self {
            chi3,
            overlap,
            convention: IndexConvention::Effective,
            kerr: None,
        }
    }

    pub fn with_convention(mut self, convention: IndexConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_kerr(mut self, on: bool) -> Self {
        self.kerr = Some(on);
        self
    }

    fn index(&self, mode: &crate::modes::GuidedMode, omega: f64) -> Result<f64> {
        match self.convention {
            IndexConvention::Effective => mode.n_eff(omega),
            IndexConvention::Material => mode.host_index(omega)?.ok_or_else(|| {
                Error::InvalidInput(format!(
                    "mode {} has no host material for the material-index convention",
                    mode.label
                ))
            }),
        }
    }

    /// Pump index and photon indices at the given photon frequencies.
    fn indices(&self, problem: &PhaseMatchProblem, omegas: [f64; 3]) -> Result<(f64, [f64; 3])> {
        let np = self.index(&problem.pump, problem.pump_frequency)?;
        Ok((
            np,
            [
                self.index(&problem.modes[0], omegas[0])?,
                self.index(&problem.modes[1], omegas[1])?,
                self.index(&problem.modes[2], omegas[2])?,
            ],
        ))
    }

    fn validate(&self) -> Result<()> {
        if !(self.chi3.is_finite() && self.chi3 >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "chi3 must be non-negative, got {}",
                self.chi3
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessKind {
    Spontaneous,
    Seeded,
}

/// Quadrature control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateOptions {
    /// Repeat on the `2N − 1` grid until the relative change is below `tolerance`.
    pub refine: bool,
    pub max_resolution: usize,
    pub tolerance: f64,
}

impl Default for RateOptions {
    fn default() -> Self {
        Self {
            refine: true,
            max_resolution: DEFAULT_MAX_RESOLUTION,
            tolerance: DEFAULT_CONVERGENCE_TOLERANCE,
        }
    }
}

impl RateOptions {
    /// Single quadrature at the configured resolution.
    pub fn fixed() -> Self {
        Self {
            refine: false,
            ..Self::default()
        }
    }
}

/// Angular-frequency interval `[ω(λc + Δλ/2), ω(λc − Δλ/2)]`.
pub fn detection_window(center_omega: f64, bandwidth: f64) -> Result<(f64, f64)> {
    let lc = wavelength_of(center_omega);
    if !(bandwidth > 0.0 && bandwidth < 2.0 * lc) {
        return Err(Error::InvalidInput(format!(
            "detection bandwidth {bandwidth:e} m must lie in (0, {:e}) m",
            2.0 * lc
        )));
    }
    Ok((
        omega_of(lc + 0.5 * bandwidth),
        omega_of(lc - 0.5 * bandwidth),
    ))
}

/// `n` uniformly spaced points spanning `[lo, hi]` inclusive.
pub fn uniform_axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

fn trapezoid_weights(axis: &[f64]) -> Vec<f64> {
    let n = axis.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = 0.5 * (axis[i + 1] - axis[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}

/// `ρ(Δω, t) = t² sinc²(Δω t/2)` (s²).
#[inline]
pub fn pulse_envelope_density(delta_omega: f64, duration: f64) -> f64 {
    let s = duration * sinc(0.5 * (delta_omega * duration));
    s * s
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Spontaneous,
    Seeded { omega_s: f64, duration: f64 },
}

/// A process with all constant factors precomputed, ready for dense
/// evaluation of the spectral density.
#[derive(Debug, Clone)]
pub struct RateModel {
    problem: PhaseMatchProblem,
    beta_p: f64,
    kind: Kind,
    prefactor: f64,
    length: f64,
    window: (f64, f64),
    coefficients: NonlinearCoefficients,
    perfect: bool,
}

fn check_pump(problem: &PhaseMatchProblem, config: &ProcessConfig) -> Result<()> {
    let wp = omega_of(config.pump_wavelength);
    if ((wp - problem.pump_frequency) / wp).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "pump wavelength {:e} m does not match the problem's pump frequency {:e} rad/s",
            config.pump_wavelength, problem.pump_frequency
        )));
    }
    Ok(())
}

impl RateModel {
    /// Spontaneous triplet density `ħ/(2π²) P_p γ² ω₁ω₂ω₃/ω_p² |f|²`.
    pub fn spontaneous(
        problem: &PhaseMatchProblem,
        coupling: &Coupling,
        config: &ProcessConfig,
    ) -> Result<Self> {
        config.validate()?;
        coupling.validate()?;
        check_pump(problem, config)?;
        let wp = problem.pump_frequency;
        let center = wp / 3.0;
        let window = detection_window(center, config.detection_bandwidth)?;
        let (np, n) = coupling.indices(problem, [center; 3])?;
        let a = &coupling.overlap;
        let g2 = gamma_squared_spontaneous(coupling.chi3, wp, np, n[0], n[1], n[2], a.a_eff_4mode);
        let gamma_p = gamma_spm(coupling.chi3, wp, np, a.a_eff_spm);
        let gx = [0, 1, 2].map(|k| gamma_xpm(coupling.chi3, center, np, n[k], a.a_eff_xpm[k]));
        let beta_nl = if coupling.kerr.unwrap_or(false) {
            nonlinear_mismatch(gamma_p, gx, config.pump_power)
        } else {
            0.0
        };
        let problem = problem.clone().with_beta_nl(beta_nl);
        let prefactor = crate::constants::HBAR / (2.0 * PI2) * config.pump_power * g2 / (wp * wp);
        Ok(Self {
            beta_p: problem.pump.beta(wp)?,
            problem,
            kind: Kind::Spontaneous,
            prefactor,
            length: config.fiber_length,
            window,
            coefficients: NonlinearCoefficients {
                gamma_p,
                gamma_xpm: gx,
                gamma_123_sq: g2,
                gamma_12s_sq: None,
                beta_nl,
            },
            perfect: false,
        })
    }

    /// Seeded pair density `(1/π²) P_p P_s γ²₁₂ₛ ω₁ω₂/ω̃_p² |f|² ρ(Δω, t)`.
    pub fn seeded(
        problem: &PhaseMatchProblem,
        coupling: &Coupling,
        config: &ProcessConfig,
    ) -> Result<Self> {
        config.validate()?;
        coupling.validate()?;
        check_pump(problem, config)?;
        let seed = match config.seed {
            Some(s) if s.power > 0.0 => s,
            _ => return Err(Error::MissingSeed),
        };
        let wp = problem.pump_frequency;
        let omega_s = omega_of(seed.wavelength);
        let reduced = wp - omega_s;
        if !(reduced > 0.0) {
            return Err(Error::InvalidInput(format!(
                "seed wavelength {:e} m is not longer than the pump wavelength",
                seed.wavelength
            )));
        }
        let center = 0.5 * reduced;
        let window = detection_window(center, config.detection_bandwidth)?;
        let (np, n) = coupling.indices(problem, [center, center, omega_s])?;
        let a = &coupling.overlap;
        let g2 = gamma_squared_seeded(coupling.chi3, reduced, np, n[0], n[1], n[2], a.a_eff_4mode);
        let gamma_p = gamma_spm(coupling.chi3, wp, np, a.a_eff_spm);
        let photon = [center, center, omega_s];
        let gx = [0, 1, 2].map(|k| gamma_xpm(coupling.chi3, photon[k], np, n[k], a.a_eff_xpm[k]));
        let beta_nl = if coupling.kerr.unwrap_or(true) {
            nonlinear_mismatch(gamma_p, gx, config.pump_power)
        } else {
            0.0
        };
        let problem = problem.clone().with_beta_nl(beta_nl);
        let prefactor = config.pump_power * seed.power * g2 / (PI2 * reduced * reduced);
        Ok(Self {
            beta_p: problem.pump.beta(wp)?,
            problem,
            kind: Kind::Seeded {
                omega_s,
                duration: seed.pulse_duration,
            },
            prefactor,
            length: config.fiber_length,
            window,
            coefficients: NonlinearCoefficients {
                gamma_p,
                gamma_xpm: gx,
                gamma_123_sq: g2,
                gamma_12s_sq: Some(g2),
                beta_nl,
            },
            perfect: false,
        })
    }

    /// Model selected by the presence of a seed block.
    pub fn for_config(
        problem: &PhaseMatchProblem,
        coupling: &Coupling,
        config: &ProcessConfig,
    ) -> Result<Self> {
        if config.seed.is_some() {
            Self::seeded(problem, coupling, config)
        } else {
            Self::spontaneous(problem, coupling, config)
        }
    }

    pub fn kind(&self) -> ProcessKind {
        match self.kind {
            Kind::Spontaneous => ProcessKind::Spontaneous,
            Kind::Seeded { .. } => ProcessKind::Seeded,
        }
    }

    /// Detection window on each axis (rad/s).
    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    /// Replaces the detection window.
    pub fn with_window(mut self, lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::InvalidInput(format!(
                "invalid window [{lo:e}, {hi:e}]"
            )));
        }
        self.window = (lo, hi);
        Ok(self)
    }

    /// Same model with `|f|² ≡ L²` everywhere, an upper bound on the
    /// phase-mismatched density.
    pub fn with_perfect_phase_matching(mut self) -> Self {
        self.perfect = true;
        self
    }

    fn intensity(&self, db: f64) -> f64 {
        if self.perfect {
            self.length * self.length
        } else {
            phase_matching_intensity(db, self.length)
        }
    }

    pub fn coefficients(&self) -> &NonlinearCoefficients {
        &self.coefficients
    }

    pub fn problem(&self) -> &PhaseMatchProblem {
        &self.problem
    }

    /// Photon frequency at the degenerate point: `ω_p/3` for spontaneous
    /// runs and `(ω_p − ω_s)/2` for seeded runs.
    pub fn degenerate_frequency(&self) -> f64 {
        match self.kind {
            Kind::Spontaneous => self.problem.pump_frequency / 3.0,
            Kind::Seeded { omega_s, .. } => 0.5 * (self.problem.pump_frequency - omega_s),
        }
    }

    /// True for cells excluded from every grid, `ω₁ + ω₂ ≥ ω_p`.
    #[inline]
    pub fn is_masked(&self, omega1: f64, omega2: f64) -> bool {
        omega1 + omega2 >= self.problem.pump_frequency
    }

    /// Density at one point: Hz per (rad/s)² for spontaneous runs and
    /// pairs per pulse per (rad/s)² for seeded runs.
    pub fn density(&self, omega1: f64, omega2: f64) -> Result<f64> {
        if !(omega1 > 0.0 && omega2 > 0.0) {
            return Err(Error::InvalidInput(
                "photon frequencies must be positive".into(),
            ));
        }
        let wp = self.problem.pump_frequency;
        let rest = wp - (omega1 + omega2);
        match self.kind {
            Kind::Spontaneous => {
                if !(rest > 0.0) {
                    return Err(Error::NonPositiveOmega3);
                }
                let db = self
                    .problem
                    .mismatch_with_pump(self.beta_p, omega1, omega2, rest)?;
                Ok(self.prefactor * (omega1 * omega2) * rest * self.intensity(db))
            }
            Kind::Seeded { omega_s, duration } => {
                if !(rest > 0.0) {
                    return Err(Error::NonPositiveOmega3);
                }
                let db = self
                    .problem
                    .mismatch_with_pump(self.beta_p, omega1, omega2, omega_s)?;
                let dw = rest - omega_s;
                Ok(self.prefactor
                    * (omega1 * omega2)
                    * self.intensity(db)
                    * pulse_envelope_density(dw, duration))
            }
        }
    }

    fn rows(&self, n: usize, store: bool) -> Result<(Vec<f64>, Vec<RowResult>)> {
        let axis = uniform_axis(self.window.0, self.window.1, n);
        let w = trapezoid_weights(&axis);
        let rows: Vec<RowResult> = axis
            .par_iter()
            .map(|&w1| {
                let mut sum = 0.0;
                let mut excluded = 0.0;
                let mut values = if store {
                    Vec::with_capacity(n)
                } else {
                    Vec::new()
                };
                let mut mask = if store {
                    Vec::with_capacity(n)
                } else {
                    Vec::new()
                };
                for (j, &w2) in axis.iter().enumerate() {
                    if self.is_masked(w1, w2) {
                        excluded += w[j];
                        if store {
                            values.push(0.0);
                            mask.push(true);
                        }
                        continue;
                    }
                    let s = self.density(w1, w2)?;
                    sum += w[j] * s;
                    if store {
                        values.push(s);
                        mask.push(false);
                    }
                }
                Ok(RowResult {
                    sum,
                    excluded,
                    values,
                    mask,
                })
            })
            .collect::<Result<_>>()?;
        Ok((axis, rows))
    }

    /// Trapezoidal integral over the window on an `n × n` grid, with the
    /// masked area in (rad/s)².
    pub fn integrate(&self, n: usize) -> Result<(f64, f64)> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be at least 2, got {n}"
            )));
        }
        let (axis, rows) = self.rows(n, false)?;
        Ok(reduce(&axis, &rows))
    }

    /// Full grid of density values at resolution `n`.
    pub fn grid(&self, n: usize) -> Result<SpectralGrid> {
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be at least 2, got {n}"
            )));
        }
        let (axis, rows) = self.rows(n, true)?;
        let (total, excluded_area) = reduce(&axis, &rows);
        let mut values = Vec::with_capacity(n * n);
        let mut mask = Vec::with_capacity(n * n);
        for r in rows {
            values.extend(r.values);
            mask.extend(r.mask);
        }
        let provenance = Provenance {
            dispersion_sources: std::iter::once(&self.problem.pump)
                .chain(self.problem.modes.iter())
                .map(|m| m.description.clone())
                .collect(),
            ..Provenance::default()
        };
        Ok(SpectralGrid {
            kind: self.kind(),
            pump_frequency: self.problem.pump_frequency,
            degenerate_frequency: self.degenerate_frequency(),
            omega1: axis.clone(),
            omega2: axis,
            values,
            mask,
            total,
            excluded_area,
            sweep_value: None,
            provenance,
        })
    }

    /// Integrated rate with the convergence check of `options`.
    pub fn rate(&self, resolution: usize, options: &RateOptions) -> Result<RateResult> {
        let quadrature = |n: usize| match self.kind {
            Kind::Spontaneous => self.integrate(n),
            Kind::Seeded { .. } => self.integrate_rotated(n),
        };
        let mut n = resolution;
        let (mut total, mut excluded) = quadrature(n)?;
        let mut change = None;
        if options.refine {
            let max = options.max_resolution.max(2 * n - 1);
            loop {
                let m = 2 * n - 1;
                if m > max {
                    return Err(Error::GridTooCoarse {
                        resolution: n,
                        change: change.unwrap_or(f64::NAN),
                    });
                }
                let (fine, fine_excluded) = quadrature(m)?;
                let c = if fine == total {
                    0.0
                } else {
                    ((fine - total) / fine).abs()
                };
                log::debug!("quadrature {n} -> {m}: relative change {c:.3e}");
                n = m;
                total = fine;
                excluded = fine_excluded;
                change = Some(c);
                if c < options.tolerance {
                    break;
                }
            }
        }
        Ok(RateResult {
            kind: self.kind(),
            value: total,
            resolution: n,
            relative_change: change,
            excluded_area: excluded,
            window: self.window,
            coefficients: self.coefficients,
        })
    }
}

struct RowResult {
    sum: f64,
    excluded: f64,
    values: Vec<f64>,
    mask: Vec<bool>,
}

fn reduce(axis: &[f64], rows: &[RowResult]) -> (f64, f64) {
    let w = trapezoid_weights(axis);
    let mut total = 0.0;
    let mut excluded = 0.0;
    for (wi, r) in w.iter().zip(rows) {
        total += wi * r.sum;
        excluded += wi * r.excluded;
    }
    (total, excluded)
}

/// Integrated rate and quadrature diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult {
    pub kind: ProcessKind,
    /// Hz for spontaneous runs, pairs per pulse for seeded runs.
    pub value: f64,
    /// Points per axis of the reported quadrature.
    pub resolution: usize,
    /// Relative change against the previous grid, when refined.
    pub relative_change: Option<f64>,
    /// Masked area inside the window ((rad/s)²).
    pub excluded_area: f64,
    /// Detection window on each axis (rad/s).
    pub window: (f64, f64),
    pub coefficients: NonlinearCoefficients,
}

/// Spectral density at one point for the process selected by `config`.
pub fn spectral_density(
    problem: &PhaseMatchProblem,
    coupling: &Coupling,
    config: &ProcessConfig,
    omega1: f64,
    omega2: f64,
) -> Result<f64> {
    RateModel::for_config(problem, coupling, config)?.density(omega1, omega2)
}

/// Spontaneous triplet rate (Hz).
pub fn spontaneous_rate(
    problem: &PhaseMatchProblem,
    coupling: &Coupling,
    config: &ProcessConfig,
    options: &RateOptions,
) -> Result<RateResult> {
    RateModel::spontaneous(problem, coupling, config)?.rate(config.grid_resolution, options)
}

/// Seeded pairs per pulse.
pub fn seeded_pairs_per_pulse(
    problem: &PhaseMatchProblem,
    coupling: &Coupling,
    config: &ProcessConfig,
    options: &RateOptions,
) -> Result<RateResult> {
    RateModel::seeded(problem, coupling, config)?.rate(config.grid_resolution, options)
}

/// One spectral grid per sweep value. `build` maps a sweep value to the
/// problem and coupling at that value.
pub fn grid_sweep<F>(values: &[f64], build: F, config: &ProcessConfig) -> Result<Vec<SpectralGrid>>
where
    F: Fn(f64) -> Result<(PhaseMatchProblem, Coupling)>,
{
    values
        .iter()
        .map(|&v| {
            let (problem, coupling) = build(v)?;
            let mut g =
                RateModel::for_config(&problem, &coupling, config)?.grid(config.grid_resolution)?;
            g.sweep_value = Some(v);
            Ok(g)
        })
        .collect()
}
