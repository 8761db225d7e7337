//! Sampled transverse field distributions.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::label::{ModeFamily, ModeLabel};
use super::step_index::StepIndexSolution;
use crate::error::{Error, Result};
use crate::special::{bessel_j, bessel_jn, bessel_kn};

/// Bound on `|Σ|F|² dx dy − 1|` for a normalized grid.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Default number of samples per axis for computed fields.
pub const DEFAULT_FIELD_SAMPLES: usize = 256;

/// Geometry of a square-cell grid centered on the fiber axis.
///
/// Sample `(ix, iy)` sits at `x = (ix − (nx − 1)/2) dx`,
/// `y = (iy − (ny − 1)/2) dy`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl GridSpec {
    /// An `n × n` grid covering `[−half_width, half_width]` on both axes.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        if n < 2 || !(half_width > 0.0) {
            return Err(Error::InvalidInput(format!(
                "grid needs n >= 2 and a positive extent, got n = {n}, half width = {half_width}"
            )));
        }
        let d = 2.0 * half_width / n as f64;
        Ok(Self {
            nx: n,
            ny: n,
            dx: d,
            dy: d,
        })
    }

    pub fn x(&self, ix: usize) -> f64 {
        (ix as f64 - 0.5 * (self.nx as f64 - 1.0)) * self.dx
    }

    pub fn y(&self, iy: usize) -> f64 {
        (iy as f64 - 0.5 * (self.ny as f64 - 1.0)) * self.dy
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A complex scalar field on a [`GridSpec`], stored row-major (x fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub spec: GridSpec,
    pub values: Vec<Complex64>,
}

impl FieldGrid {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != spec.len() || spec.nx == 0 || spec.ny == 0 {
            return Err(Error::InvalidInput(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                spec.nx,
                spec.ny
            )));
        }
        if !(spec.dx > 0.0 && spec.dy > 0.0) {
            return Err(Error::InvalidInput("grid spacing must be positive".into()));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "field contains non-finite values".into(),
            ));
        }
        Ok(Self { spec, values })
    }

    /// Samples `f(x, y)` on `spec` without normalizing.
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        for iy in 0..spec.ny {
            let y = spec.y(iy);
            for ix in 0..spec.nx {
                values.push(f(spec.x(ix), y));
            }
        }
        Self::new(spec, values)
    }

    /// `Σ|F|² dx dy`.
    pub fn power(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.spec.dx * self.spec.dy
    }

    /// Returns a copy scaled to unit power.
    pub fn normalized(mut self) -> Result<Self> {
        let p = self.power();
        if !(p > 0.0) {
            return Err(Error::InvalidInput("cannot normalize a zero field".into()));
        }
        let s = 1.0 / p.sqrt();
        for v in &mut self.values {
            *v *= s;
        }
        Ok(self)
    }

    pub fn is_normalized(&self) -> bool {
        (self.power() - 1.0).abs() < NORMALIZATION_TOLERANCE
    }

    pub fn same_geometry(&self, other: &FieldGrid) -> bool {
        self.spec == other.spec
    }

    /// `Σ conj(self)·other dx dy`.
    pub fn inner(&self, other: &FieldGrid) -> Result<Complex64> {
        if !self.same_geometry(other) {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * (self.spec.dx * self.spec.dy))
    }

    /// Bilinear resampling onto `spec`, zero outside the source grid,
    /// followed by renormalization.
    pub fn resample(&self, spec: GridSpec) -> Result<Self> {
        let src = &self.spec;
        let at = |ix: isize, iy: isize| -> Complex64 {
            if ix < 0 || iy < 0 || ix >= src.nx as isize || iy >= src.ny as isize {
                Complex64::new(0.0, 0.0)
            } else {
                self.values[iy as usize * src.nx + ix as usize]
            }
        };
        let grid = FieldGrid::from_fn(spec, |x, y| {
            let fx = x / src.dx + 0.5 * (src.nx as f64 - 1.0);
            let fy = y / src.dy + 0.5 * (src.ny as f64 - 1.0);
            let ix = fx.floor();
            let iy = fy.floor();
            let tx = fx - ix;
            let ty = fy - iy;
            let (ix, iy) = (ix as isize, iy as isize);
            at(ix, iy) * ((1.0 - tx) * (1.0 - ty))
                + at(ix + 1, iy) * (tx * (1.0 - ty))
                + at(ix, iy + 1) * ((1.0 - tx) * ty)
                + at(ix + 1, iy + 1) * (tx * ty)
        })?;
        grid.normalized()
    }

    /// Moves the field by whole cells; samples shifted in from outside
    /// are zero.
    pub fn shifted(&self, sx: isize, sy: isize) -> Self {
        let spec = self.spec;
        let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
        for iy in 0..spec.ny as isize {
            for ix in 0..spec.nx as isize {
                let (ox, oy) = (ix - sx, iy - sy);
                if ox >= 0 && oy >= 0 && ox < spec.nx as isize && oy < spec.ny as isize {
                    values[(iy as usize) * spec.nx + ix as usize] =
                        self.values[oy as usize * spec.nx + ox as usize];
                }
            }
        }
        Self { spec, values }
    }

    /// Normalized Gaussian `exp(−r²/w²)`, with `w` the 1/e² intensity radius.
    pub fn gaussian(spec: GridSpec, w: f64) -> Result<Self> {
        if !(w > 0.0) {
            return Err(Error::InvalidInput(format!(
                "Gaussian radius must be positive, got {w}"
            )));
        }
        Self::from_fn(spec, |x, y| {
            Complex64::new((-(x * x + y * y) / (w * w)).exp(), 0.0)
        })?
        .normalized()
    }

    /// Dominant transverse component of the x-polarized, cos-type step-index
    /// mode, normalized.
    pub fn step_index(
        spec: GridSpec,
        core_radius: f64,
        n_core: f64,
        n_clad: f64,
        label: ModeLabel,
        solution: &StepIndexSolution,
    ) -> Result<Self> {
        let shape = step_index_shape(core_radius, n_core, n_clad, label, solution);
        Self::from_fn(spec, |x, y| Complex64::new(shape(x, y), 0.0))?.normalized()
    }

    /// Scalar field of a capillary mode: Bessel profile in the core and zero
    /// in the wall.
    pub fn capillary(spec: GridSpec, core_radius: f64, label: ModeLabel) -> Result<Self> {
        let u = label.capillary_constant();
        let (order, angular): (i32, Box<dyn Fn(f64) -> f64>) = match label.family {
            ModeFamily::HE => {
                let p = label.azimuthal_order as i32 - 1;
                (p, Box::new(move |phi: f64| (p as f64 * phi).cos()))
            }
            ModeFamily::EH => {
                let p = label.azimuthal_order as i32 + 1;
                (p, Box::new(move |phi: f64| (p as f64 * phi).cos()))
            }
            ModeFamily::TE => (1, Box::new(|phi: f64| phi.sin())),
            ModeFamily::TM => (1, Box::new(|phi: f64| phi.cos())),
        };
        Self::from_fn(spec, |x, y| {
            let r = x.hypot(y) / core_radius;
            if r >= 1.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(bessel_jn(order, u * r) * angular(y.atan2(x)), 0.0)
            }
        })?
        .normalized()
    }

    /// Text serialization: header `nx ny dx dy [complex]`, then one line per
    /// row of values (pairs `re im` for complex grids).
    pub fn to_text(&self) -> String {
        let complex = self.values.iter().any(|v| v.im != 0.0);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} {:e} {:e}{}",
            self.spec.nx,
            self.spec.ny,
            self.spec.dx,
            self.spec.dy,
            if complex { " complex" } else { "" }
        );
        for row in self.values.chunks(self.spec.nx) {
            let mut first = true;
            for v in row {
                if !first {
                    out.push(' ');
                }
                first = false;
                if complex {
                    let _ = write!(out, "{:e} {:e}", v.re, v.im);
                } else {
                    let _ = write!(out, "{:e}", v.re);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses [`FieldGrid::to_text`] output. The grid is not renormalized.
    pub fn from_text(text: &str, source_name: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse {
            source_name: source_name.to_string(),
            line,
            message,
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines
            .next()
            .ok_or_else(|| err(1, "missing header".into()))?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() < 4 || parts.len() > 5 {
            return Err(err(hline, "header must be 'nx ny dx dy [complex]'".into()));
        }
        let nx: usize = parts[0].parse().map_err(|_| err(hline, "bad nx".into()))?;
        let ny: usize = parts[1].parse().map_err(|_| err(hline, "bad ny".into()))?;
        let dx: f64 = parts[2].parse().map_err(|_| err(hline, "bad dx".into()))?;
        let dy: f64 = parts[3].parse().map_err(|_| err(hline, "bad dy".into()))?;
        let complex = match parts.get(4) {
            None => false,
            Some(&"complex") => true,
            Some(other) => return Err(err(hline, format!("unknown flag '{other}'"))),
        };
        let per = if complex { 2 } else { 1 };
        let mut values = Vec::with_capacity(nx * ny);
        let mut last_line = hline;
        for (ln, line) in lines {
            last_line = ln;
            let nums: std::result::Result<Vec<f64>, _> =
                line.split_whitespace().map(str::parse::<f64>).collect();
            let nums = nums.map_err(|e| err(ln, format!("bad number: {e}")))?;
            if nums.len() != nx * per {
                return Err(err(
                    ln,
                    format!("expected {} numbers, found {}", nx * per, nums.len()),
                ));
            }
            for c in nums.chunks(per) {
                values.push(Complex64::new(c[0], if complex { c[1] } else { 0.0 }));
            }
        }
        if values.len() != nx * ny {
            return Err(err(
                last_line,
                format!("expected {ny} rows, found {}", values.len() / nx.max(1)),
            ));
        }
        Self::new(GridSpec { nx, ny, dx, dy }, values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, &path.display().to_string())
    }
}

/// Closure evaluating the unnormalized dominant field component at `(x, y)`.
fn step_index_shape(
    a: f64,
    n_core: f64,
    n_clad: f64,
    label: ModeLabel,
    s: &StepIndexSolution,
) -> Box<dyn Fn(f64, f64) -> f64> {
    let (u, w) = (s.u, s.w);
    // Cladding samples where K underflows are set to zero.
    let k_limit = 700.0;
    match label.family {
        ModeFamily::HE | ModeFamily::EH => {
            let nu = label.azimuthal_order as i32;
            let jn = bessel_j(nu as f64, u).0;
            let kn = bessel_kn(nu, w);
            let b1 = (bessel_jn(nu - 1, u) / jn - bessel_jn(nu + 1, u) / jn) / (2.0 * u);
            let b2 = -(bessel_kn(nu - 1, w) / kn + bessel_kn(nu + 1, w) / kn) / (2.0 * w);
            let v = s.v;
            let f2 = (v / (u * w)).powi(2) * nu as f64 / (b1 + b2);
            let a1 = 0.5 * (f2 - 1.0);
            let a2 = 0.5 * (f2 + 1.0);
            Box::new(move |x, y| {
                let r = x.hypot(y) / a;
                let phi = y.atan2(x);
                let cm = ((nu - 1) as f64 * phi).cos();
                let cp = ((nu + 1) as f64 * phi).cos();
                if r < 1.0 {
                    -(a1 * bessel_jn(nu - 1, u * r) * cm + a2 * bessel_jn(nu + 1, u * r) * cp) / jn
                } else if w * r > k_limit {
                    0.0
                } else {
                    -(u / w)
                        * (a1 * bessel_kn(nu - 1, w * r) * cm - a2 * bessel_kn(nu + 1, w * r) * cp)
                        / kn
                }
            })
        }
        ModeFamily::TE | ModeFamily::TM => {
            let te = label.family == ModeFamily::TE;
            let j1 = bessel_j(1.0, u).0;
            let k1 = bessel_kn(1, w);
            let clad_scale = if te {
                1.0
            } else {
                (n_core * n_core) / (n_clad * n_clad)
            };
            Box::new(move |x, y| {
                let r = x.hypot(y) / a;
                let phi = y.atan2(x);
                let radial = if r < 1.0 {
                    bessel_jn(1, u * r) / j1
                } else if w * r > k_limit {
                    0.0
                } else {
                    clad_scale * bessel_kn(1, w * r) / k1
                };
                if te {
                    radial * phi.sin()
                } else {
                    radial * phi.cos()
                }
            })
        }
    }
}
