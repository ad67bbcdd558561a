//! Geometric multipath channel simulation for metallic cryostat enclosures.
//!
//! The crate is organised bottom-up:
//!
//! - [`materials`]: cryogenic material constants, complex permittivity and
//!   Fresnel reflection.
//! - [`scene`]: surfaces, ray queries, and the default cryostat geometry.
//! - [`antenna`]: dipole sizing and analytic radiation patterns.
//! - [`propagation`]: image-source and ray-launching path engines.
//! - [`channel`]: band-limited impulse and frequency responses.
//! - [`metrics`]: delay statistics, thermal noise, SNR and received power.
//! - [`scenario`] / [`run`]: JSON scenario files and the sweep harness
//!   used by the `cryowave` binary.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod channel;
pub mod constants;
pub mod error;
pub mod export;
pub mod materials;
pub mod metrics;
pub mod propagation;
pub mod run;
pub mod scenario;
pub mod scene;

pub use error::{Error, Result};

/// 3-vector in meters (or a unit direction).
pub type Vec3 = nalgebra::Vector3<f64>;
pub use num_complex::Complex64;
