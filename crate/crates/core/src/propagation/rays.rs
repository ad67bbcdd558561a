//! Ray launching with reception spheres.
//!
//! Rays leave the transmitter on a Fibonacci-sphere grid and reflect
//! specularly. A ray whose segment passes within `rx_radius` of a receiver
//! registers a candidate keyed by its surface sequence; candidates sharing a
//! sequence are merged keeping the one passing closest to the receiver. The
//! unfolded length of a candidate is `√(s² + δ²)`, with `s` the distance
//! travelled to the point of closest approach and `δ` the miss distance,
//! which is exact for planar reflections.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sort_paths, Link, PathComponent};
use crate::error::{Error, Result};
use crate::{Complex64, Vec3};

pub const MIN_RAY_COUNT: usize = 10_000;

/// Rays handled per parallel work item.
const CHUNK: usize = 4096;

/// Reflection products below this magnitude stop a ray.
const MIN_REFLECTION: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayParams {
    pub ray_count: usize,
    pub max_bounces: usize,
    /// Reception sphere radius, m.
    pub rx_radius: f64,
}

impl RayParams {
    pub const DEFAULT_RAY_COUNT: usize = 1_000_000;
    pub const DEFAULT_MAX_BOUNCES: usize = 12;

    /// Default parameters with a half-wavelength reception sphere.
    pub fn for_frequency(frequency: f64) -> Self {
        RayParams {
            ray_count: Self::DEFAULT_RAY_COUNT,
            max_bounces: Self::DEFAULT_MAX_BOUNCES,
            rx_radius: crate::constants::wavelength(frequency) / 2.0,
        }
    }
}

/// `n` near-uniform unit directions.
pub fn fibonacci_sphere(n: usize) -> impl Iterator<Item = Vec3> + Clone {
    (0..n).map(move |i| fibonacci_direction(i, n))
}

fn fibonacci_direction(i: usize, n: usize) -> Vec3 {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2 * i + 1) as f64 / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

#[derive(Debug, Clone)]
struct Candidate {
    ray: usize,
    miss: f64,
    travelled: f64,
    reflection: Complex64,
    departure: Vec3,
    arrival: Vec3,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        self.miss < other.miss || (self.miss == other.miss && self.ray < other.ray)
    }
}

type Catch = HashMap<Vec<u16>, Candidate>;

fn merge_into(into: &mut Catch, key: Vec<u16>, c: Candidate) {
    match into.get_mut(&key) {
        Some(existing) => {
            if c.beats(existing) {
                *existing = c;
            }
        }
        None => {
            into.insert(key, c);
        }
    }
}

/// Paths from `tx` to a single receiver.
pub fn trace_rays(link: &Link, tx: Vec3, rx: Vec3, params: &RayParams) -> Result<Vec<PathComponent>> {
    Ok(trace_rays_multi(link, tx, &[rx], params)?.pop().expect("one receiver"))
}

/// Paths from `tx` to each receiver, sharing one ray launch.
pub fn trace_rays_multi(
    link: &Link,
    tx: Vec3,
    receivers: &[Vec3],
    params: &RayParams,
) -> Result<Vec<Vec<PathComponent>>> {
    if params.ray_count < MIN_RAY_COUNT {
        return Err(Error::invalid(format!(
            "ray count {} below minimum {MIN_RAY_COUNT}",
            params.ray_count
        )));
    }
    if !(params.rx_radius > 0.0) {
        return Err(Error::invalid(format!(
            "reception radius {} must be positive",
            params.rx_radius
        )));
    }
    let limit = 0.1 * link.scene.enclosure.diameter();
    if params.rx_radius > limit {
        return Err(Error::invalid(format!(
            "reception radius {} m exceeds 10% of the scene diameter ({limit} m)",
            params.rx_radius
        )));
    }

    let n = params.ray_count;
    let chunks: Vec<Vec<Catch>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut catches = vec![Catch::new(); receivers.len()];
            for ray in c * CHUNK..((c + 1) * CHUNK).min(n) {
                trace_one(
                    link,
                    tx,
                    receivers,
                    params,
                    ray,
                    fibonacci_direction(ray, n),
                    &mut catches,
                );
            }
            catches
        })
        .collect();

    let mut merged = vec![Catch::new(); receivers.len()];
    for catches in chunks {
        for (into, from) in merged.iter_mut().zip(catches) {
            let mut entries: Vec<_> = from.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            for (k, c) in entries {
                merge_into(into, k, c);
            }
        }
    }

    Ok(merged
        .into_iter()
        .map(|catch| {
            let mut paths: Vec<PathComponent> = catch
                .into_iter()
                .map(|(surfaces, c)| {
                    let length = (c.travelled * c.travelled + c.miss * c.miss).sqrt();
                    link.component(length, c.reflection, c.departure, c.arrival, surfaces)
                })
                .collect();
            sort_paths(&mut paths);
            paths
        })
        .collect())
}

fn trace_one(
    link: &Link,
    tx: Vec3,
    receivers: &[Vec3],
    params: &RayParams,
    ray: usize,
    departure: Vec3,
    catches: &mut [Catch],
) {
    if link.tx_antenna.gain_unchecked(&departure) <= 0.0 {
        return;
    }
    let r2 = params.rx_radius * params.rx_radius;
    let mut origin = tx;
    let mut dir = departure;
    let mut travelled = 0.0;
    let mut reflection = Complex64::new(1.0, 0.0);
    let mut surfaces: Vec<u16> = Vec::new();
    for bounce in 0..=params.max_bounces {
        let hit = link.scene.intersect_unchecked(&origin, &dir);
        let seg = hit.map_or(f64::INFINITY, |h| h.distance);
        for (k, rx) in receivers.iter().enumerate() {
            let w = rx - origin;
            let t = w.dot(&dir);
            if t <= 0.0 || t >= seg {
                continue;
            }
            let miss2 = w.norm_squared() - t * t;
            if miss2 <= r2 {
                merge_into(
                    &mut catches[k],
                    surfaces.clone(),
                    Candidate {
                        ray,
                        miss: miss2.max(0.0).sqrt(),
                        travelled: travelled + t,
                        reflection,
                        departure,
                        arrival: dir,
                    },
                );
            }
        }
        let Some(hit) = hit else { break };
        if bounce == params.max_bounces || link.is_absorbing(hit.surface) {
            break;
        }
        let (g, out) = link.bounce(hit.surface, &dir, &hit.normal);
        reflection *= g;
        if reflection.norm() < MIN_REFLECTION {
            break;
        }
        travelled += hit.distance;
        origin = hit.point;
        dir = out;
        surfaces.push(hit.surface as u16);
    }
}
