//! Natural cubic spline on strictly increasing abscissae.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    /// Second derivatives at the knots.
    m: Vec<f64>,
}

impl CubicSpline {
    /// Builds a natural spline. Needs at least three knots with strictly
    /// increasing `x`.
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidInput(format!(
                "spline abscissae ({}) and ordinates ({}) differ in length",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "spline needs at least 3 knots, got {}",
                x.len()
            )));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Monotonicity("spline abscissae".into()));
        }
        let n = x.len();
        let mut m = vec![0.0; n];
        // Tridiagonal system for interior second derivatives (Thomas algorithm).
        let mut c_prime = vec![0.0; n];
        let mut d_prime = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = x[i] - x[i - 1];
            let h1 = x[i + 1] - x[i];
            let a = h0;
            let b = 2.0 * (h0 + h1);
            let c = h1;
            let d = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            let denom = b - a * c_prime[i - 1];
            c_prime[i] = c / denom;
            d_prime[i] = (d - a * d_prime[i - 1]) / denom;
        }
        for i in (1..n - 1).rev() {
            m[i] = d_prime[i] - c_prime[i] * m[i + 1];
        }
        Ok(Self { x, y, m })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn interval(&self, t: f64) -> usize {
        let n = self.x.len();
        match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Value at `t`. Outside the knot range the end cubic is extended; callers
    /// are responsible for domain checks.
    pub fn eval(&self, t: f64) -> f64 {
        let i = self.interval(t);
        self.eval_in(i, t)
    }

    fn eval_in(&self, i: usize, t: f64) -> f64 {
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    /// First derivative at `t`.
    pub fn derivative(&self, t: f64) -> f64 {
        let i = self.interval(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * self.m[i]
            + (3.0 * b * b - 1.0) / 6.0 * h * self.m[i + 1]
    }

    /// `eval(t1) - eval(t0)`. When both points fall in the same interval
    /// the difference is formed from the polynomial increments, which avoids
    /// cancelling two nearly equal values.
    pub fn difference(&self, t0: f64, t1: f64) -> f64 {
        let i = self.interval(t0);
        if i != self.interval(t1) {
            return self.eval(t1) - self.eval(t0);
        }
        let h = self.x[i + 1] - self.x[i];
        let dt = t1 - t0;
        // With b = (t - x_i)/h and a = 1 - b, the spline is
        // y_i + b (y_{i+1} - y_i) + h²/6 [ (a³ - a) m_i + (b³ - b) m_{i+1} ].
        let b0 = (t0 - self.x[i]) / h;
        let b1 = (t1 - self.x[i]) / h;
        let a0 = (self.x[i + 1] - t0) / h;
        let a1 = (self.x[i + 1] - t1) / h;
        let db = dt / h;
        // x³ - x differences: (x1 - x0)(x1² + x1 x0 + x0² - 1).
        let cubic_a = -db * (a1 * a1 + a1 * a0 + a0 * a0 - 1.0);
        let cubic_b = db * (b1 * b1 + b1 * b0 + b0 * b0 - 1.0);
        db * (self.y[i + 1] - self.y[i])
            + (cubic_a * self.m[i] + cubic_b * self.m[i + 1]) * h * h / 6.0
    }
}
