//! Physical constants (CODATA 2018, SI).

/// Speed of light in vacuum (m/s).
pub const C: f64 = 299_792_458.0;

/// Vacuum permittivity (F/m).
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;

/// Reduced Planck constant (J s).
pub const HBAR: f64 = 1.054_571_817e-34;

/// 1 bar in pascal.
pub const BAR: f64 = 1.0e5;

/// Angular frequency (rad/s) of light with vacuum wavelength `lambda` (m).
#[inline]
pub fn omega_of(lambda: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / lambda
}

/// Vacuum wavelength (m) of light with angular frequency `omega` (rad/s).
#[inline]
pub fn wavelength_of(omega: f64) -> f64 {
    2.0 * std::f64::consts::PI * C / omega
}
