//! Dipole sizing and analytic radiation patterns.

use serde::{Deserialize, Serialize};

use crate::constants::{wavelength, DESIGN_FREQUENCY};
use crate::error::{Error, Result};
use crate::materials::SIO2_PERMITTIVITY_4K;
use crate::scene::NORMALIZATION_TOL;
use crate::Vec3;

/// Dipole length after full-wave tuning inside the cryostat, m. Recorded
/// as published, not computed.
pub const OPTIMIZED_LENGTH_CRYOSTAT: f64 = 3.06e-3;

/// Peak directivity of a thin half-wave dipole, `4 / Cin(2π)`.
pub const HALF_WAVE_DIPOLE_PEAK_GAIN: f64 = 1.640_922_376;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleDesign {
    pub center_frequency: f64,
    pub substrate_relative_permittivity: f64,
    pub free_space_wavelength: f64,
    pub effective_permittivity: f64,
    /// `λ0 / (2 √ε_eff)`, m.
    pub estimated_length: f64,
    pub optimized_length: Option<f64>,
}

/// Initial resonant length of a dipole on a substrate of permittivity `eps_r`.
pub fn design_dipole(center_frequency: f64, eps_r: f64) -> Result<DipoleDesign> {
    if !(center_frequency > 0.0) || !center_frequency.is_finite() {
        return Err(Error::invalid(format!(
            "center frequency {center_frequency} Hz must be positive"
        )));
    }
    if !(eps_r >= 1.0) || !eps_r.is_finite() {
        return Err(Error::invalid(format!("substrate permittivity {eps_r} must be >= 1")));
    }
    let lambda0 = wavelength(center_frequency);
    let eps_eff = (eps_r + 1.0) / 2.0;
    Ok(DipoleDesign {
        center_frequency,
        substrate_relative_permittivity: eps_r,
        free_space_wavelength: lambda0,
        effective_permittivity: eps_eff,
        estimated_length: lambda0 / (2.0 * eps_eff.sqrt()),
        optimized_length: None,
    })
}

impl DipoleDesign {
    /// The 28 GHz SiO2 design with the tuned cryostat length attached.
    pub fn cryostat_reference() -> Self {
        let mut d =
            design_dipole(DESIGN_FREQUENCY, SIO2_PERMITTIVITY_4K).expect("reference design parameters are valid");
        d.optimized_length = Some(OPTIMIZED_LENGTH_CRYOSTAT);
        d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Isotropic,
    #[default]
    HalfWaveDipole,
}

impl Pattern {
    pub fn peak_gain(self) -> f64 {
        match self {
            Pattern::Isotropic => 1.0,
            Pattern::HalfWaveDipole => HALF_WAVE_DIPOLE_PEAK_GAIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntennaModel {
    pub design: DipoleDesign,
    pub axis: Vec3,
    pub pattern: Pattern,
    pub peak_gain: f64,
}

impl AntennaModel {
    pub fn new(design: DipoleDesign, axis: Vec3, pattern: Pattern) -> Result<Self> {
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::invalid("antenna axis must be non-zero"));
        }
        Ok(AntennaModel {
            design,
            axis: axis / n,
            pattern,
            peak_gain: pattern.peak_gain(),
        })
    }

    pub fn isotropic() -> Self {
        AntennaModel::new(DipoleDesign::cryostat_reference(), Vec3::z(), Pattern::Isotropic).expect("valid axis")
    }

    /// Linear gain toward unit `direction`.
    pub fn gain(&self, direction: &Vec3) -> Result<f64> {
        if (direction.norm() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!(
                "gain direction must be unit length (|d| = {})",
                direction.norm()
            )));
        }
        Ok(self.gain_unchecked(direction))
    }

    pub(crate) fn gain_unchecked(&self, direction: &Vec3) -> f64 {
        match self.pattern {
            Pattern::Isotropic => 1.0,
            Pattern::HalfWaveDipole => {
                let c = direction.dot(&self.axis).clamp(-1.0, 1.0);
                let s2 = 1.0 - c * c;
                if s2 < 1e-24 {
                    return 0.0;
                }
                let f = (std::f64::consts::FRAC_PI_2 * c).cos();
                self.peak_gain * f * f / s2
            }
        }
    }
}
