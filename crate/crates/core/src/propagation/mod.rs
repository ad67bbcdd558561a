//! Multipath resolution between a transmitter and receivers.
//!
//! Two engines share the same per-path amplitude model:
//!
//! ```text
//! a = Π Γ_i · λ/(4π d) · √(G_tx G_rx) · exp(−j 2π d / λ)
//! ```
//!
//! where `d` is the unfolded path length and `Γ_i` the per-bounce scalar
//! reflection coefficient (see [`Link::bounce`]).
//!
//! - [`trace_images`]: exact image-source enumeration for planar scenes.
//! - [`trace_rays`] / [`trace_rays_multi`]: ray launching from a Fibonacci
//!   sphere with reception spheres, for arbitrary scenes.

mod images;
mod rays;

pub use images::{trace_images, MAX_IMAGE_ORDER};
pub use rays::{fibonacci_sphere, trace_rays, trace_rays_multi, RayParams, MIN_RAY_COUNT};

use serde::{Deserialize, Serialize};

use crate::antenna::AntennaModel;
use crate::constants::wavelength;
use crate::error::{Error, Result};
use crate::materials::Reflector;
use crate::scene::Scene;
use crate::{Complex64, Vec3};

/// One resolved multipath component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathComponent {
    /// Seconds.
    pub delay: f64,
    /// Field transfer coefficient at the carrier, including spreading loss,
    /// antenna gains and reflection products.
    pub amplitude: Complex64,
    pub bounce_count: u32,
    /// Unit launch direction at the transmitter.
    pub departure: Vec3,
    /// Unit propagation direction of the wave arriving at the receiver.
    pub arrival: Vec3,
    /// Indices of the surfaces hit, in order.
    pub surfaces: Vec<u16>,
}

impl PathComponent {
    pub fn power(&self) -> f64 {
        self.amplitude.norm_sqr()
    }

    /// Bare tap with no geometry attached, for synthetic channels.
    pub fn tap(delay: f64, amplitude: Complex64) -> Self {
        PathComponent {
            delay,
            amplitude,
            bounce_count: 0,
            departure: Vec3::x(),
            arrival: Vec3::x(),
            surfaces: Vec::new(),
        }
    }
}

/// Total received energy for unit transmitted energy, `Σ|a_k|²`.
pub fn total_energy(paths: &[PathComponent]) -> f64 {
    paths.iter().map(PathComponent::power).sum()
}

/// Scene, carrier and antennas shared by every path of a link.
#[derive(Debug, Clone)]
pub struct Link<'a> {
    pub scene: &'a Scene,
    pub frequency: f64,
    pub tx_antenna: &'a AntennaModel,
    pub rx_antenna: &'a AntennaModel,
    reflectors: Vec<Reflector>,
    wavelength: f64,
}

impl<'a> Link<'a> {
    pub fn new(
        scene: &'a Scene,
        frequency: f64,
        tx_antenna: &'a AntennaModel,
        rx_antenna: &'a AntennaModel,
    ) -> Result<Self> {
        if !(frequency > 0.0) || !frequency.is_finite() {
            return Err(Error::invalid(format!("frequency {frequency} Hz must be positive")));
        }
        let reflectors = scene
            .surfaces
            .iter()
            .map(|s| Reflector::new(&s.material, frequency))
            .collect::<Result<Vec<_>>>()?;
        Ok(Link {
            scene,
            frequency,
            tx_antenna,
            rx_antenna,
            reflectors,
            wavelength: wavelength(frequency),
        })
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub(crate) fn is_absorbing(&self, surface: usize) -> bool {
        self.reflectors[surface].is_transparent()
    }

    /// Scalar reflection for a ray along `k` hitting `surface` with normal
    /// `n`; returns the coefficient and the reflected direction.
    ///
    /// The wave is treated as unpolarized: the magnitude carries the mean
    /// reflected power `(|Γ_TE|² + |Γ_TM|²) / 2` and the phase is that of
    /// `Γ_TE − Γ_TM`. At normal incidence this reduces to `Γ_TE`, a perfect
    /// conductor gives −1, and the coefficient depends on the incidence
    /// angle only, which keeps links reciprocal.
    pub(crate) fn bounce(&self, surface: usize, k: &Vec3, n: &Vec3) -> (Complex64, Vec3) {
        let kn = k.dot(n);
        let cos_i = kn.abs().min(1.0);
        let r = &self.reflectors[surface];
        let (te, tm) = (r.te(cos_i), r.tm(cos_i));
        let magnitude = ((te.norm_sqr() + tm.norm_sqr()) / 2.0).sqrt();
        let d = te - tm;
        let phase = if d.norm() > 1e-300 { d.arg() } else { te.arg() };
        (Complex64::from_polar(magnitude, phase), k - n * (2.0 * kn))
    }

    /// Builds the component for a path of unfolded length `length`.
    pub(crate) fn component(
        &self,
        length: f64,
        reflection: Complex64,
        departure: Vec3,
        arrival: Vec3,
        surfaces: Vec<u16>,
    ) -> PathComponent {
        let g_tx = self.tx_antenna.gain_unchecked(&departure);
        let g_rx = self.rx_antenna.gain_unchecked(&(-arrival));
        let spreading = self.wavelength / (4.0 * std::f64::consts::PI * length);
        let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * length / self.wavelength);
        PathComponent {
            delay: length / crate::constants::SPEED_OF_LIGHT,
            amplitude: reflection * phase * (spreading * (g_tx * g_rx).sqrt()),
            bounce_count: surfaces.len() as u32,
            departure,
            arrival,
            surfaces,
        }
    }
}

/// Orders by delay, then by surface sequence for equal delays.
pub(crate) fn sort_paths(paths: &mut [PathComponent]) {
    paths.sort_by(|a, b| a.delay.total_cmp(&b.delay).then_with(|| a.surfaces.cmp(&b.surfaces)));
}
