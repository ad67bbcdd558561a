//! Physical constants (SI, exact where CODATA defines them exactly).

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability, H/m, consistent with `VACUUM_PERMITTIVITY`.
pub const VACUUM_PERMEABILITY: f64 = 1.0 / (VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * SPEED_OF_LIGHT);
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Carrier frequency of the on-chip link, Hz.
pub const DESIGN_FREQUENCY: f64 = 28.0e9;

/// Free-space wavelength at `frequency` (Hz).
pub fn wavelength(frequency: f64) -> f64 {
    SPEED_OF_LIGHT / frequency
}

pub fn watts_to_dbm(p: f64) -> f64 {
    10.0 * (p * 1.0e3).log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1.0e-3
}

pub fn to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}
