//! Temperature-tagged electromagnetic material properties and Fresnel
//! reflection against a complex permittivity.
//!
//! Conventions: time dependence `exp(+jωt)`, so a lossy medium has
//! `ε_c = ε_r − j σ/(ω ε0)`. The TM coefficient is the usual field ratio
//! `r_p`, which tends to `+1` on a perfect conductor while `r_s → −1`.

use serde::{Deserialize, Serialize};

use crate::constants::VACUUM_PERMITTIVITY;
use crate::error::{Error, Result};
use crate::Complex64;

/// Cryogenic (4 K) conductivity of copper, S/m.
pub const COPPER_CONDUCTIVITY_4K: f64 = 2.9e8;
/// Cryogenic conductivity of silicon, S/m.
pub const SILICON_CONDUCTIVITY_4K: f64 = 4.26e-7;
/// Cryogenic relative permittivity of silicon.
pub const SILICON_PERMITTIVITY_4K: f64 = 11.45;
/// Cryogenic relative permittivity of silicon dioxide.
pub const SIO2_PERMITTIVITY_4K: f64 = 3.9;

/// Ratio `σ / (ω ε0 ε_r)` above which a material is treated as a good conductor.
pub const GOOD_CONDUCTOR_RATIO: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    /// Electric field perpendicular to the plane of incidence (s).
    Te,
    /// Electric field in the plane of incidence (p).
    Tm,
}

/// Deserializes from either a preset name (`"copper_4K"`) or an inline table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MaterialRepr")]
pub struct Material {
    pub name: String,
    pub relative_permittivity: f64,
    /// S/m. `f64::INFINITY` denotes a perfect electric conductor; serialized
    /// as the string `"inf"`.
    #[serde(with = "conductivity_serde")]
    pub conductivity: f64,
    /// Kelvin.
    pub temperature: f64,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MaterialRepr {
    Preset(String),
    Inline(InlineMaterial),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineMaterial {
    name: String,
    relative_permittivity: f64,
    #[serde(with = "conductivity_serde")]
    conductivity: f64,
    temperature: f64,
}

impl TryFrom<MaterialRepr> for Material {
    type Error = String;

    fn try_from(r: MaterialRepr) -> std::result::Result<Self, String> {
        match r {
            MaterialRepr::Preset(name) => Material::preset(&name).ok_or_else(|| {
                format!(
                    "unknown material preset {name:?} (expected one of {})",
                    Material::PRESET_NAMES.join(", ")
                )
            }),
            MaterialRepr::Inline(m) => {
                Material::new(m.name, m.relative_permittivity, m.conductivity, m.temperature).map_err(|e| e.to_string())
            }
        }
    }
}

impl Material {
    pub fn new(
        name: impl Into<String>,
        relative_permittivity: f64,
        conductivity: f64,
        temperature: f64,
    ) -> Result<Self> {
        let m = Material {
            name: name.into(),
            relative_permittivity,
            conductivity,
            temperature,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.relative_permittivity >= 1.0) || !self.relative_permittivity.is_finite() {
            return Err(Error::invalid(format!(
                "material {}: relative permittivity {} must be finite and >= 1",
                self.name, self.relative_permittivity
            )));
        }
        if !(self.conductivity >= 0.0) {
            return Err(Error::invalid(format!(
                "material {}: conductivity {} must be >= 0",
                self.name, self.conductivity
            )));
        }
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid(format!(
                "material {}: temperature {} K must be > 0",
                self.name, self.temperature
            )));
        }
        Ok(())
    }

    pub fn copper_4k() -> Self {
        Material {
            name: "copper_4K".into(),
            relative_permittivity: 1.0,
            conductivity: COPPER_CONDUCTIVITY_4K,
            temperature: 4.0,
        }
    }

    pub fn silicon_4k() -> Self {
        Material {
            name: "silicon_4K".into(),
            relative_permittivity: SILICON_PERMITTIVITY_4K,
            conductivity: SILICON_CONDUCTIVITY_4K,
            temperature: 4.0,
        }
    }

    pub fn sio2_4k() -> Self {
        Material {
            name: "sio2_4K".into(),
            relative_permittivity: SIO2_PERMITTIVITY_4K,
            conductivity: 0.0,
            temperature: 4.0,
        }
    }

    pub fn pec() -> Self {
        Material {
            name: "pec".into(),
            relative_permittivity: 1.0,
            conductivity: f64::INFINITY,
            temperature: 4.0,
        }
    }

    /// Index-matched to free space: reflects nothing, so it acts as an
    /// absorbing boundary.
    pub fn vacuum() -> Self {
        Material {
            name: "vacuum".into(),
            relative_permittivity: 1.0,
            conductivity: 0.0,
            temperature: 4.0,
        }
    }

    /// Built-in presets by name.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "copper_4K" => Some(Self::copper_4k()),
            "silicon_4K" => Some(Self::silicon_4k()),
            "sio2_4K" => Some(Self::sio2_4k()),
            "pec" => Some(Self::pec()),
            "vacuum" => Some(Self::vacuum()),
            _ => None,
        }
    }

    pub const PRESET_NAMES: [&'static str; 5] = ["copper_4K", "silicon_4K", "sio2_4K", "pec", "vacuum"];

    pub fn is_perfect_conductor(&self) -> bool {
        self.conductivity.is_infinite()
    }

    /// True when `σ / (2π f ε0 ε_r)` exceeds [`GOOD_CONDUCTOR_RATIO`].
    pub fn is_good_conductor(&self, frequency: f64) -> bool {
        let loss_tangent = self.conductivity
            / (2.0 * std::f64::consts::PI * frequency * VACUUM_PERMITTIVITY * self.relative_permittivity);
        loss_tangent > GOOD_CONDUCTOR_RATIO
    }

    /// True when the material reflects nothing at any angle.
    pub fn is_transparent(&self) -> bool {
        self.relative_permittivity == 1.0 && self.conductivity == 0.0
    }
}

/// `ε_c = ε_r − j σ / (2π f ε0)`.
pub fn complex_permittivity(m: &Material, frequency: f64) -> Result<Complex64> {
    if !(frequency > 0.0) || !frequency.is_finite() {
        return Err(Error::invalid(format!("frequency {frequency} Hz must be positive")));
    }
    let imag = m.conductivity / (2.0 * std::f64::consts::PI * frequency * VACUUM_PERMITTIVITY);
    Ok(Complex64::new(m.relative_permittivity, -imag))
}

/// Fresnel reflection coefficient for a plane wave in vacuum incident on a
/// half-space of material `m`.
pub fn reflection_coefficient(
    m: &Material,
    frequency: f64,
    incidence_angle: f64,
    polarization: Polarization,
) -> Result<Complex64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&incidence_angle) {
        return Err(Error::invalid(format!(
            "incidence angle {incidence_angle} rad outside [0, pi/2)"
        )));
    }
    let eps = complex_permittivity(m, frequency)?;
    Ok(fresnel(eps, incidence_angle.cos(), polarization))
}

/// Fresnel coefficient from the cosine of the incidence angle. Does not
/// validate; `cos_i` must lie in (0, 1].
pub(crate) fn fresnel(eps: Complex64, cos_i: f64, polarization: Polarization) -> Complex64 {
    if eps.im.is_infinite() {
        return match polarization {
            Polarization::Te => Complex64::new(-1.0, 0.0),
            Polarization::Tm => Complex64::new(1.0, 0.0),
        };
    }
    let sin2 = 1.0 - cos_i * cos_i;
    let root = (eps - sin2).sqrt();
    match polarization {
        Polarization::Te => (cos_i - root) / (cos_i + root),
        Polarization::Tm => (eps * cos_i - root) / (eps * cos_i + root),
    }
}

/// Per-frequency reflection evaluator for one material, caching `ε_c`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Reflector {
    eps: Complex64,
    transparent: bool,
}

impl Reflector {
    pub fn new(m: &Material, frequency: f64) -> Result<Self> {
        Ok(Reflector {
            eps: complex_permittivity(m, frequency)?,
            transparent: m.is_transparent(),
        })
    }

    pub fn is_transparent(&self) -> bool {
        self.transparent
    }

    pub fn te(&self, cos_i: f64) -> Complex64 {
        fresnel(self.eps, cos_i, Polarization::Te)
    }

    pub fn tm(&self, cos_i: f64) -> Complex64 {
        fresnel(self.eps, cos_i, Polarization::Tm)
    }
}

mod conductivity_serde {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(de::Error::custom(format!(
                "conductivity must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}
