//! Special functions: unnormalized sinc, Bessel functions with derivatives,
//! and zeros of J_ν.

use puruspe::{besselik, besseljy};

/// `sin(x)/x` with `sinc(0) = 1`.
///
/// Below |x| = 1e-4 a two-term Taylor series is used, which is exact to
/// double precision there.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `J_ν(x)` and its derivative for real order ν ≥ 0 and x ≥ 0.
pub fn bessel_j(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && x >= 0.0);
    if x == 0.0 {
        let j = if nu == 0.0 { 1.0 } else { 0.0 };
        let dj = if nu == 1.0 {
            0.5
        } else if nu > 0.0 && nu < 1.0 {
            f64::INFINITY
        } else {
            0.0
        };
        return (j, dj);
    }
    let (j, _, dj, _) = besseljy(nu, x);
    (j, dj)
}

/// `K_ν(x)` and its derivative for real order ν ≥ 0 and x > 0.
pub fn bessel_k(nu: f64, x: f64) -> (f64, f64) {
    debug_assert!(nu >= 0.0 && x > 0.0);
    let (_, k, _, dk) = besselik(nu, x);
    (k, dk)
}

/// `J_n(x)` for signed integer order, using `J_{-n} = (-1)^n J_n`.
pub fn bessel_jn(n: i32, x: f64) -> f64 {
    let j = bessel_j(n.unsigned_abs() as f64, x.abs()).0;
    let mut s = 1.0;
    if n < 0 && n % 2 != 0 {
        s = -s;
    }
    if x < 0.0 && n % 2 != 0 {
        s = -s;
    }
    s * j
}

/// `K_n(x)` for signed integer order, using `K_{-n} = K_n`.
pub fn bessel_kn(n: i32, x: f64) -> f64 {
    bessel_k(n.unsigned_abs() as f64, x).0
}

/// The `m`-th positive zero (m ≥ 1) of `J_ν`, for integer order ν ≥ 0.
///
/// Zeros are bracketed by a scan with step 0.05 starting just above the
/// origin and refined by bisection to full precision.
pub fn bessel_j_zero(nu: u32, m: u32) -> f64 {
    assert!(m >= 1, "zero index starts at 1");
    let order = nu as f64;
    let f = |x: f64| bessel_j(order, x).0;
    let step = 0.05;
    let mut x0 = 1e-3;
    let mut f0 = f(x0);
    let mut found = 0;
    loop {
        let x1 = x0 + step;
        let f1 = f(x1);
        if f0 == 0.0 {
            found += 1;
            if found == m {
                return x0;
            }
        } else if f0.signum() != f1.signum() && f1 != 0.0 {
            found += 1;
            if found == m {
                return bisect(f, x0, x1, f0);
            }
        }
        x0 = x1;
        f0 = f1;
    }
}

/// Bisection on a bracket `[a, b]` with `f(a) = fa`; runs until the
/// midpoint no longer moves.
pub(crate) fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    loop {
        let mid = 0.5 * (a + b);
        if mid <= a.min(b) || mid >= a.max(b) {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
}
