//! Physical constants (CODATA 2018) and unit helpers.

use std::f64::consts::PI;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Atomic unit of electric dipole moment e·a0, C·m.
pub const ATOMIC_DIPOLE_UNIT: f64 = 8.478_353_625_5e-30;

/// Converts a frequency in Hz to angular frequency in rad/s.
#[inline]
pub fn angular(hz: f64) -> f64 {
    2.0 * PI * hz
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm) * 1e-3
}

#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    linear_to_db(w * 1e3)
}

/// Free-space wavelength of a carrier at `hz`.
#[inline]
pub fn wavelength(hz: f64) -> f64 {
    SPEED_OF_LIGHT / hz
}
