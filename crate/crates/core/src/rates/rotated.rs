//! Seeded-process quadrature in the rotated coordinates `u = ω₁ + ω₂`,
//! `v = ω₁ − ω₂`.
//!
//! With the seed frequency fixed, Δβ changes along `u` at roughly the
//! inverse group velocity, so `|f|²` is a ridge only `2π v_g / L` wide in
//! `u`, far narrower than a uniform grid over the window can resolve. Each
//! row of constant `v` is therefore integrated on its own graded node set,
//! fine around the phase-matching ridge and around the center of the pulse
//! envelope and coarsening geometrically away from them. The `v` direction
//! is smooth and uses a uniform trapezoid.

use rayon::prelude::*;

use super::{trapezoid_weights, uniform_axis, Kind, RateModel};
use crate::error::{Error, Result};

/// Half-width of each finely sampled band, in lobes of its feature.
const FINE_LOBES: f64 = 32.0;
/// Nodes per lobe at the base resolution.
const NODES_PER_LOBE: f64 = 16.0;
/// Resolution at which [`NODES_PER_LOBE`] applies; finer resolutions scale it.
const BASE_RESOLUTION: f64 = 800.0;
/// Growth of the node spacing per unit distance outside a fine band.
const GROWTH: f64 = 0.05;

/// Area of `{ω₁ + ω₂ ≥ ω_p}` inside the square `[lo, hi]²`.
pub(super) fn masked_area(lo: f64, hi: f64, wp: f64) -> f64 {
    let side = hi - lo;
    if wp >= 2.0 * hi {
        0.0
    } else if wp <= 2.0 * lo {
        side * side
    } else if wp >= lo + hi {
        let s = 2.0 * hi - wp;
        0.5 * s * s
    } else {
        let s = wp - 2.0 * lo;
        side * side - 0.5 * s * s
    }
}

struct Feature {
    center: f64,
    lobe: f64,
}

fn graded_nodes(a: f64, b: f64, features: &[Feature], coarse: f64, scale: f64) -> Vec<f64> {
    let spacing = |u: f64| {
        features
            .iter()
            .map(|f| {
                let fine = f.lobe / (NODES_PER_LOBE * scale);
                fine + GROWTH * ((u - f.center).abs() - FINE_LOBES * f.lobe).max(0.0)
            })
            .fold(coarse, f64::min)
    };
    let mut nodes = vec![a];
    let mut u = a;
    loop {
        let next = u + spacing(u);
        if next >= b {
            nodes.push(b);
            break;
        }
        nodes.push(next);
        u = next;
    }
    nodes
}

impl RateModel {
    /// Integral of the seeded density over the window in rotated
    /// coordinates, with `n` rows of constant `ω₁ − ω₂`. Returns the
    /// integral and the masked area.
    pub fn integrate_rotated(&self, n: usize) -> Result<(f64, f64)> {
        let Kind::Seeded { omega_s, duration } = self.kind else {
            return Err(Error::InvalidInput(
                "rotated quadrature applies to seeded runs only".into(),
            ));
        };
        if n < 2 {
            return Err(Error::InvalidInput(format!(
                "grid resolution must be at least 2, got {n}"
            )));
        }
        let (lo, hi) = self.window;
        let wp = self.problem.pump_frequency;
        let half = hi - lo;
        let vs = uniform_axis(-half, half, n);
        let wv = trapezoid_weights(&vs);
        let scale = ((n - 1) as f64 / BASE_RESOLUTION).max(1.0 / NODES_PER_LOBE);
        let envelope = Feature {
            center: wp - omega_s,
            lobe: 2.0 * std::f64::consts::PI / duration,
        };
        let rows: Vec<f64> = vs
            .par_iter()
            .map(|&v| {
                let a = 2.0 * lo + v.abs();
                let b = (2.0 * hi - v.abs()).min(wp);
                if !(b > a) {
                    return Ok(0.0);
                }
                let mismatch = |u: f64| {
                    self.problem.mismatch_with_pump(
                        self.beta_p,
                        0.5 * (u + v),
                        0.5 * (u - v),
                        omega_s,
                    )
                };
                let mut features = vec![Feature {
                    center: envelope.center,
                    lobe: envelope.lobe,
                }];
                if let Some(ridge) = self.ridge(a, b, &mismatch)? {
                    features.push(ridge);
                }
                let coarse = (b - a) / (n - 1) as f64;
                let nodes = graded_nodes(a, b, &features, coarse, scale);
                let mut sum = 0.0;
                let mut prev: Option<(f64, f64)> = None;
                for &u in &nodes {
                    let (w1, w2) = (0.5 * (u + v), 0.5 * (u - v));
                    let s = if self.is_masked(w1, w2) {
                        0.0
                    } else {
                        self.density(w1, w2)?
                    };
                    if let Some((pu, ps)) = prev {
                        sum += 0.5 * (u - pu) * (s + ps);
                    }
                    prev = Some((u, s));
                }
                Ok(sum)
            })
            .collect::<Result<_>>()?;
        // dω₁ dω₂ = ½ du dv.
        let total = 0.5 * wv.iter().zip(&rows).map(|(w, r)| w * r).sum::<f64>();
        Ok((total, masked_area(lo, hi, wp)))
    }

    /// Location and lobe width of the zero of Δβ along a row, when the
    /// zero lies in `[a, b]` or close enough to matter.
    fn ridge(
        &self,
        a: f64,
        b: f64,
        mismatch: &dyn Fn(f64) -> Result<f64>,
    ) -> Result<Option<Feature>> {
        let length = self.length;
        let (mut x0, mut x1) = (a, b);
        let (mut g0, g1) = (mismatch(x0)?, mismatch(x1)?);
        let center = if g0 == 0.0 {
            x0
        } else if g1 == 0.0 {
            x1
        } else if g0.signum() != g1.signum() {
            for _ in 0..200 {
                let mid = 0.5 * (x0 + x1);
                if mid <= x0 || mid >= x1 {
                    break;
                }
                let gm = mismatch(mid)?;
                if gm == 0.0 {
                    x0 = mid;
                    x1 = mid;
                    break;
                }
                if gm.signum() == g0.signum() {
                    x0 = mid;
                    g0 = gm;
                } else {
                    x1 = mid;
                }
            }
            0.5 * (x0 + x1)
        } else if g0.abs().min(g1.abs()) * length < 2.0 * std::f64::consts::PI * FINE_LOBES {
            if g0.abs() < g1.abs() {
                a
            } else {
                b
            }
        } else {
            return Ok(None);
        };
        let h = 1e-7 * center;
        let lo = (center - h).max(a);
        let hi = (center + h).min(b);
        if !(hi > lo) {
            return Ok(None);
        }
        let slope = (mismatch(hi)? - mismatch(lo)?) / (hi - lo);
        if !(slope.abs() > 0.0) {
            return Ok(None);
        }
        Ok(Some(Feature {
            center,
            lobe: 2.0 * std::f64::consts::PI / (length * slope.abs()),
        }))
    }
}
