use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::FieldGrid;
use super::label::ModeLabel;
use super::step_index::solve_step_index;
use super::table::DispersionTable;
use crate::constants::{wavelength_of, C};
use crate::error::{Error, Result};
use crate::materials::{GasState, Medium};
use crate::spline::CubicSpline;

/// Relative frequency step of the central difference used for group
/// velocities.
pub const GROUP_VELOCITY_STEP: f64 = 1e-6;

/// Where a mode's dispersion comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSource {
    StepIndex,
    Capillary,
    Tabulated,
    Analytic,
}

/// A propagation-constant model `ω ↦ β`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Dispersion {
    /// Cubic spline through sampled `(ω, β)` pairs.
    Spline(CubicSpline),
    /// `β = Σ c_k (ω − ω0)^k / k!`.
    Taylor { omega0: f64, coefficients: Vec<f64> },
    /// Capillary (hollow dielectric tube) mode with Bessel constant `u`.
    Capillary {
        core_radius: f64,
        u: f64,
        fill: Medium,
    },
    /// Exact step-index mode, solved at every evaluation.
    StepIndex {
        core_radius: f64,
        core: Medium,
        cladding: Medium,
        label: ModeLabel,
    },
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `n − 1` of a medium, formed without cancellation for gases.
fn excess_index(medium: &Medium, wavelength: f64) -> Result<f64> {
    match medium {
        Medium::Gas(g) => Ok(g.species.reference_refractivity(wavelength)? * g.density_ratio()),
        m => Ok(m.index(wavelength)? - 1.0),
    }
}

impl Dispersion {
    /// Propagation constant at `omega`, with no domain check.
    pub fn beta(&self, omega: f64) -> Result<f64> {
        match self {
            Dispersion::Spline(s) => Ok(s.eval(omega)),
            Dispersion::Taylor {
                omega0,
                coefficients,
            } => {
                let x = omega - omega0;
                // Horner scheme with the 1/k! factors folded in.
                let mut sum = 0.0;
                for (k, c) in coefficients.iter().enumerate().rev() {
                    sum = sum * x / (k as f64 + 1.0) + c;
                }
                Ok(sum)
            }
            Dispersion::Capillary {
                core_radius,
                u,
                fill,
            } => {
                let n = fill.index(wavelength_of(omega))?;
                let kn = omega * n / C;
                let q = u / core_radius;
                let b2 = (kn - q) * (kn + q);
                if !(b2 > 0.0) {
                    return Err(Error::InvalidGeometry(format!(
                        "capillary mode is not guided at {:.4e} m",
                        wavelength_of(omega)
                    )));
                }
                Ok(b2.sqrt())
            }
            Dispersion::StepIndex {
                core_radius,
                core,
                cladding,
                label,
            } => {
                let lambda = wavelength_of(omega);
                let n = solve_step_index(
                    *core_radius,
                    core.index(lambda)?,
                    cladding.index(lambda)?,
                    lambda,
                    *label,
                )?;
                Ok(n * omega / C)
            }
        }
    }

    /// `β(omega1) − β(omega0)`, evaluated so that nearby frequencies do not
    /// lose precision to cancellation where the model allows it.
    pub fn beta_difference(&self, omega0: f64, omega1: f64) -> Result<f64> {
        match self {
            Dispersion::Spline(s) => Ok(s.difference(omega0, omega1)),
            Dispersion::Taylor {
                omega0: w0,
                coefficients,
            } => {
                let x1 = omega1 - w0;
                let x0 = omega0 - w0;
                let dx = omega1 - omega0;
                // x1^k − x0^k = dx Σ_{j<k} x1^{k−1−j} x0^j
                let mut total = 0.0;
                for (k, c) in coefficients.iter().enumerate().skip(1) {
                    let mut s = 0.0;
                    for j in 0..k {
                        s += x1.powi((k - 1 - j) as i32) * x0.powi(j as i32);
                    }
                    total += c * dx * s / factorial(k);
                }
                Ok(total)
            }
            Dispersion::Capillary {
                core_radius: _,
                u: _,
                fill,
            } => {
                let b0 = self.beta(omega0)?;
                let b1 = self.beta(omega1)?;
                let d0 = excess_index(fill, wavelength_of(omega0))?;
                let d1 = excess_index(fill, wavelength_of(omega1))?;
                let kn0 = omega0 * (1.0 + d0) / C;
                let kn1 = omega1 * (1.0 + d1) / C;
                let dkn = ((omega1 - omega0) + (omega1 * d1 - omega0 * d0)) / C;
                Ok(dkn * (kn1 + kn0) / (b1 + b0))
            }
            Dispersion::StepIndex { .. } => Ok(self.beta(omega1)? - self.beta(omega0)?),
        }
    }
}

/// One labeled spatial mode with its dispersion over a frequency domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuidedMode {
    pub label: ModeLabel,
    pub source: ModeSource,
    pub dispersion: Dispersion,
    /// Closed angular-frequency interval on which the mode may be evaluated.
    pub domain: (f64, f64),
    pub field: Option<FieldGrid>,
    /// Material in which the mode's power mostly travels.
    pub host: Option<Medium>,
    /// Free-form origin description carried into reports.
    pub description: String,
}

impl GuidedMode {
    fn check_domain(domain: (f64, f64)) -> Result<()> {
        if !(domain.0 > 0.0 && domain.1 > domain.0 && domain.1.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "invalid frequency domain [{:e}, {:e}]",
                domain.0, domain.1
            )));
        }
        Ok(())
    }

    /// Exact step-index mode. Dispersion is solved on demand; call
    /// [`GuidedMode::tabulate`] before dense evaluation.
    pub fn step_index(
        label: ModeLabel,
        core_radius: f64,
        core: Medium,
        cladding: Medium,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::check_domain(domain)?;
        if !(core_radius > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "core radius must be positive, got {core_radius}"
            )));
        }
        let description = format!(
            "step-index {label}, radius {core_radius:e} m, core {}, cladding {}",
            core.describe(),
            cladding.describe()
        );
        Ok(Self {
            label,
            source: ModeSource::StepIndex,
            host: Some(core.clone()),
            dispersion: Dispersion::StepIndex {
                core_radius,
                core,
                cladding,
                label,
            },
            domain,
            field: None,
            description,
        })
    }

    /// Capillary mode of a tube of radius `core_radius` filled with `fill`.
    pub fn capillary(
        label: ModeLabel,
        core_radius: f64,
        fill: Medium,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::check_domain(domain)?;
        let longest = wavelength_of(domain.0);
        if !(core_radius > longest) {
            return Err(Error::InvalidGeometry(format!(
                "capillary radius {core_radius:e} m must exceed the wavelength {longest:e} m"
            )));
        }
        let description = format!(
            "capillary {label}, radius {core_radius:e} m, fill {}",
            fill.describe()
        );
        Ok(Self {
            label,
            source: ModeSource::Capillary,
            host: Some(fill.clone()),
            dispersion: Dispersion::Capillary {
                core_radius,
                u: label.capillary_constant(),
                fill,
            },
            domain,
            field: None,
            description,
        })
    }

    /// Mode with a closed-form Taylor dispersion about `omega0`.
    pub fn analytic(
        label: ModeLabel,
        omega0: f64,
        coefficients: Vec<f64>,
        domain: (f64, f64),
    ) -> Result<Self> {
        Self::check_domain(domain)?;
        Ok(Self {
            label,
            source: ModeSource::Analytic,
            dispersion: Dispersion::Taylor {
                omega0,
                coefficients,
            },
            domain,
            field: None,
            host: None,
            description: format!("analytic {label}"),
        })
    }

    /// Mode whose dispersion is splined from a table in `(ω, β)`.
    pub fn tabulated(table: &DispersionTable, label: ModeLabel) -> Result<Self> {
        let mut omega = Vec::with_capacity(table.rows.len());
        let mut beta = Vec::with_capacity(table.rows.len());
        for &(lambda, n) in table.rows.iter().rev() {
            let w = crate::constants::omega_of(lambda);
            omega.push(w);
            beta.push(n * w / C);
        }
        let spline = CubicSpline::new(omega, beta)?;
        let domain = spline.domain();
        Ok(Self {
            label,
            source: ModeSource::Tabulated,
            dispersion: Dispersion::Spline(spline),
            domain,
            field: None,
            host: None,
            description: format!("tabulated {label} ({})", table.fiber_id),
        })
    }

    pub fn with_field(mut self, field: FieldGrid) -> Self {
        self.field = Some(field);
        self
    }

    pub fn with_host(mut self, host: Medium) -> Self {
        self.host = Some(host);
        self
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega >= self.domain.0 && omega <= self.domain.1
    }

    fn require(&self, omega: f64) -> Result<()> {
        if self.contains(omega) {
            Ok(())
        } else {
            Err(Error::DomainEdge {
                omega,
                min: self.domain.0,
                max: self.domain.1,
            })
        }
    }

    /// Propagation constant (rad/m).
    pub fn beta(&self, omega: f64) -> Result<f64> {
        self.require(omega)?;
        self.dispersion.beta(omega)
    }

    /// Effective index `β c/ω`.
    pub fn n_eff(&self, omega: f64) -> Result<f64> {
        Ok(self.beta(omega)? * C / omega)
    }

    /// Group velocity (m/s); see [`group_velocity_of`].
    pub fn group_velocity(&self, omega: f64) -> Result<f64> {
        group_velocity_of(self, omega)
    }

    /// Index of the host material at `omega`, when a host is recorded.
    pub fn host_index(&self, omega: f64) -> Result<Option<f64>> {
        match &self.host {
            Some(m) => Ok(Some(m.index(wavelength_of(omega))?)),
            None => Ok(None),
        }
    }

    /// Samples `β` at `n` uniformly spaced frequencies spanning the domain.
    pub fn sample(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        if n < 8 {
            return Err(Error::InvalidInput(format!(
                "need at least 8 samples, got {n}"
            )));
        }
        let (lo, hi) = self.domain;
        let omega: Vec<f64> = (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect();
        let beta: Result<Vec<f64>> = omega.par_iter().map(|&w| self.dispersion.beta(w)).collect();
        Ok((omega, beta?))
    }

    /// Replaces the dispersion by a spline through `n` samples. The result
    /// reports the original source.
    pub fn tabulate(&self, n: usize) -> Result<Self> {
        let (omega, beta) = self.sample(n)?;
        if beta.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Monotonicity(format!("β(ω) of {}", self.label)));
        }
        let mut out = self.clone();
        out.dispersion = Dispersion::Spline(CubicSpline::new(omega, beta)?);
        Ok(out)
    }

    /// Dispersion table with `n` rows, wavelengths increasing.
    pub fn to_table(&self, n: usize, fiber_id: &str) -> Result<DispersionTable> {
        let (omega, beta) = self.sample(n)?;
        let rows = omega
            .iter()
            .zip(&beta)
            .rev()
            .map(|(&w, &b)| (wavelength_of(w), b * C / w))
            .collect();
        DispersionTable::new(
            rows,
            Some(self.label),
            fiber_id.to_string(),
            vec![format!("sampled from {}", self.description)],
        )
    }
}

/// Group velocity `(dβ/dω)⁻¹` by a central difference with relative step
/// [`GROUP_VELOCITY_STEP`]. Both stencil points must lie inside the domain.
pub fn group_velocity_of(mode: &GuidedMode, omega: f64) -> Result<f64> {
    let h = GROUP_VELOCITY_STEP * omega;
    let lo = omega - h;
    let hi = omega + h;
    if !(lo > mode.domain.0 && hi < mode.domain.1) {
        return Err(Error::DomainEdge {
            omega,
            min: mode.domain.0,
            max: mode.domain.1,
        });
    }
    let db = mode.dispersion.beta_difference(lo, hi)?;
    Ok((hi - lo) / db)
}

/// Effective index of a capillary mode,
/// `n_gas sqrt(1 − (u λ / (2π a n_gas))²)`.
pub fn capillary_mode(
    core_radius: f64,
    gas: &GasState,
    wavelength: f64,
    label: ModeLabel,
) -> Result<f64> {
    if !(core_radius > wavelength) {
        return Err(Error::InvalidGeometry(format!(
            "capillary radius {core_radius:e} m must exceed the wavelength {wavelength:e} m"
        )));
    }
    let n = crate::materials::gas_index(gas, wavelength)?;
    let q =
        label.capillary_constant() * wavelength / (2.0 * std::f64::consts::PI * core_radius * n);
    Ok(n * ((1.0 - q) * (1.0 + q)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vacuum_line() -> GuidedMode {
        GuidedMode::analytic(ModeLabel::he(1, 1), 0.0, vec![0.0, 1.0 / C], (1e14, 1e16)).unwrap()
    }

    #[test]
    fn linear_dispersion_has_light_speed_group_velocity() {
        let m = vacuum_line();
        for w in [2e14, 1.234e15, 5e15] {
            let vg = group_velocity_of(&m, w).unwrap();
            assert!((vg / C - 1.0).abs() < 1e-12, "{vg}");
        }
    }

    #[test]
    fn domain_edges_are_rejected() {
        let m = vacuum_line();
        assert!(matches!(
            group_velocity_of(&m, 1e14),
            Err(Error::DomainEdge { .. })
        ));
        assert!(matches!(
            group_velocity_of(&m, 1e16),
            Err(Error::DomainEdge { .. })
        ));
        assert!(matches!(m.beta(2e16), Err(Error::DomainEdge { .. })));
    }

    #[test]
    fn taylor_evaluation() {
        let m = GuidedMode::analytic(
            ModeLabel::he(1, 1),
            1.0,
            vec![2.0, 3.0, 4.0, 6.0],
            (0.5, 3.0),
        )
        .unwrap();
        let x: f64 = 0.7;
        let expect = 2.0 + 3.0 * x + 2.0 * x * x + x * x * x;
        assert!((m.beta(1.7).unwrap() - expect).abs() < 1e-13);
        let d = m.dispersion.beta_difference(1.2, 1.7).unwrap();
        assert!((d - (m.beta(1.7).unwrap() - m.beta(1.2).unwrap())).abs() < 1e-13);
    }
}
