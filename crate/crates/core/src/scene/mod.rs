//! Enclosure geometry and ray–surface queries.

mod cryostat;
mod layout;

pub use cryostat::{build_cryostat_scene, CryostatParams, PcbParams, PlateParams};
pub use layout::{default_cryostat_layout, AntennaLayout, LabeledPoint, DEFAULT_ORIENTATION, LAYOUT_SEPARATIONS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::materials::Material;
use crate::Vec3;

/// Self-intersection guard, m. Hits closer than this to the ray origin are ignored.
pub const EPS_GEO: f64 = 1e-6;

/// Tolerance on `|direction| - 1` accepted by [`Scene::intersect`].
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Which side of a cylinder faces the enclosure interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Facing {
    /// Normal points toward the axis (an enclosing shell).
    Inward,
    /// Normal points away from the axis (a tube inside the enclosure).
    Outward,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    /// Open finite cylinder from `base` to `base + length * axis`.
    Cylinder {
        base: Vec3,
        axis: Vec3,
        radius: f64,
        length: f64,
        facing: Facing,
    },
    /// Annulus when `aperture_radius > 0`.
    Disc {
        center: Vec3,
        normal: Vec3,
        outer_radius: f64,
        #[serde(default)]
        aperture_radius: f64,
    },
    /// Rectangle with orthogonal edges; normal is `edge_u × edge_v`.
    Rectangle { corner: Vec3, edge_u: Vec3, edge_v: Vec3 },
}

impl Shape {
    fn validate(&self) -> std::result::Result<(), String> {
        match self {
            Shape::Cylinder {
                axis, radius, length, ..
            } => {
                if !(*radius > 0.0) || !(*length > 0.0) {
                    return Err(format!("cylinder radius {radius} and length {length} must be positive"));
                }
                if (axis.norm() - 1.0).abs() > 1e-9 {
                    return Err("cylinder axis must be a unit vector".into());
                }
            }
            Shape::Disc {
                normal,
                outer_radius,
                aperture_radius,
                ..
            } => {
                if !(*outer_radius > 0.0) {
                    return Err(format!("disc radius {outer_radius} must be positive"));
                }
                if !(*aperture_radius >= 0.0) || aperture_radius >= outer_radius {
                    return Err(format!(
                        "aperture radius {aperture_radius} must be in [0, {outer_radius})"
                    ));
                }
                if (normal.norm() - 1.0).abs() > 1e-9 {
                    return Err("disc normal must be a unit vector".into());
                }
            }
            Shape::Rectangle { edge_u, edge_v, .. } => {
                let (lu, lv) = (edge_u.norm(), edge_v.norm());
                if !(lu > 0.0) || !(lv > 0.0) {
                    return Err("rectangle edges must have positive length".into());
                }
                if edge_u.dot(edge_v).abs() > 1e-9 * lu * lv {
                    return Err("rectangle edges must be orthogonal".into());
                }
            }
        }
        Ok(())
    }

    /// Supporting plane `(point, unit normal)` for planar shapes.
    pub fn plane(&self) -> Option<(Vec3, Vec3)> {
        match self {
            Shape::Cylinder { .. } => None,
            Shape::Disc { center, normal, .. } => Some((*center, *normal)),
            Shape::Rectangle { corner, edge_u, edge_v } => Some((*corner, edge_u.cross(edge_v).normalize())),
        }
    }

    /// Whether a point already on the supporting plane lies on the finite surface.
    pub(crate) fn contains_planar_point(&self, p: &Vec3) -> bool {
        match self {
            Shape::Cylinder { .. } => false,
            Shape::Disc {
                center,
                outer_radius,
                aperture_radius,
                ..
            } => {
                let rho = (p - center).norm();
                rho >= *aperture_radius && rho <= *outer_radius
            }
            Shape::Rectangle { corner, edge_u, edge_v } => {
                let w = p - corner;
                let s = w.dot(edge_u) / edge_u.norm_squared();
                let t = w.dot(edge_v) / edge_v.norm_squared();
                (-1e-12..=1.0 + 1e-12).contains(&s) && (-1e-12..=1.0 + 1e-12).contains(&t)
            }
        }
    }

    /// Nearest hit distance beyond `EPS_GEO`, with the interior-facing normal.
    pub(crate) fn intersect(&self, origin: &Vec3, dir: &Vec3) -> Option<(f64, Vec3)> {
        match self {
            Shape::Cylinder {
                base,
                axis,
                radius,
                length,
                facing,
            } => {
                let w = origin - base;
                let w_ax = w.dot(axis);
                let d_ax = dir.dot(axis);
                let wp = w - axis * w_ax;
                let dp = dir - axis * d_ax;
                let a = dp.norm_squared();
                if a < 1e-24 {
                    return None;
                }
                let b = wp.dot(&dp);
                let c = wp.norm_squared() - radius * radius;
                let disc = b * b - a * c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                // numerically stable pair of roots
                let q = if b >= 0.0 { -(b + sq) } else { -b + sq };
                let (mut t1, mut t2) = (q / a, if q != 0.0 { c / q } else { q / a });
                if t1 > t2 {
                    std::mem::swap(&mut t1, &mut t2);
                }
                for t in [t1, t2] {
                    if t > EPS_GEO {
                        let h = w_ax + t * d_ax;
                        if (0.0..=*length).contains(&h) {
                            let radial = (wp + dp * t) / *radius;
                            let n = match facing {
                                Facing::Inward => -radial,
                                Facing::Outward => radial,
                            };
                            return Some((t, n));
                        }
                    }
                }
                None
            }
            Shape::Disc { .. } | Shape::Rectangle { .. } => {
                let (p0, n) = self.plane()?;
                let denom = dir.dot(&n);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let t = (p0 - origin).dot(&n) / denom;
                if t <= EPS_GEO {
                    return None;
                }
                let p = origin + dir * t;
                self.contains_planar_point(&p).then_some((t, n))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Surface {
    pub shape: Shape,
    pub material: Material,
    pub label: String,
}

impl Surface {
    pub fn new(shape: Shape, material: Material, label: impl Into<String>) -> Self {
        Surface {
            shape,
            material,
            label: label.into(),
        }
    }
}

/// Outer boundary used for containment and scale checks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Enclosure {
    /// No boundary (free space or open test scenes).
    #[default]
    Open,
    /// Vertical cylinder with its base on the z = `base_z` plane, centred on the z axis.
    Cylinder {
        radius: f64,
        base_z: f64,
        height: f64,
    },
    Box {
        min: Vec3,
        max: Vec3,
    },
}

impl Enclosure {
    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            Enclosure::Open => true,
            Enclosure::Cylinder { radius, base_z, height } => {
                p.x.hypot(p.y) < *radius && p.z > *base_z && p.z < base_z + height
            }
            Enclosure::Box { min, max } => (0..3).all(|i| p[i] > min[i] && p[i] < max[i]),
        }
    }

    /// Largest linear extent, m. Infinite for open scenes.
    pub fn diameter(&self) -> f64 {
        match self {
            Enclosure::Open => f64::INFINITY,
            Enclosure::Cylinder { radius, height, .. } => (2.0 * radius).max(*height),
            Enclosure::Box { min, max } => {
                let d = max - min;
                d.x.max(d.y).max(d.z)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hit {
    pub surface: usize,
    pub point: Vec3,
    pub distance: f64,
    /// Unit normal facing the enclosure interior.
    pub normal: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scene {
    pub surfaces: Vec<Surface>,
    pub enclosure: Enclosure,
}

impl Scene {
    pub fn new(surfaces: Vec<Surface>, enclosure: Enclosure) -> Result<Self> {
        let scene = Scene { surfaces, enclosure };
        scene.validate()?;
        Ok(scene)
    }

    /// Empty scene: every ray escapes.
    pub fn free_space() -> Self {
        Scene {
            surfaces: Vec::new(),
            enclosure: Enclosure::Open,
        }
    }

    /// Axis-aligned closed box with inward-facing walls, ordered
    /// x-min, x-max, y-min, y-max, z-min, z-max.
    pub fn closed_box(min: Vec3, max: Vec3, material: Material) -> Result<Self> {
        let d = max - min;
        if !(d.x > 0.0 && d.y > 0.0 && d.z > 0.0) {
            return Err(Error::Construction(vec![format!("box extents {d:?} must be positive")]));
        }
        let (ex, ey, ez) = (Vec3::x() * d.x, Vec3::y() * d.y, Vec3::z() * d.z);
        let rect = |corner: Vec3, u: Vec3, v: Vec3, label: &str| {
            Surface::new(
                Shape::Rectangle {
                    corner,
                    edge_u: u,
                    edge_v: v,
                },
                material.clone(),
                label,
            )
        };
        let surfaces = vec![
            rect(min, ey, ez, "wall_x_min"),
            rect(min + ex, ez, ey, "wall_x_max"),
            rect(min, ez, ex, "wall_y_min"),
            rect(min + ey, ex, ez, "wall_y_max"),
            rect(min, ex, ey, "floor"),
            rect(min + ez, ey, ex, "ceiling"),
        ];
        Scene::new(surfaces, Enclosure::Box { min, max })
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (i, s) in self.surfaces.iter().enumerate() {
            if let Err(e) = s.shape.validate() {
                problems.push(format!("surface {i} ({}): {e}", s.label));
            }
            if let Err(e) = s.material.validate() {
                problems.push(format!("surface {i} ({}): {e}", s.label));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Construction(problems))
        }
    }

    pub fn is_planar(&self) -> bool {
        self.surfaces.iter().all(|s| s.shape.plane().is_some())
    }

    /// Nearest hit farther than [`EPS_GEO`]. Ties go to the surface listed first.
    pub fn intersect(&self, origin: &Vec3, direction: &Vec3) -> Result<Option<Hit>> {
        if (direction.norm() - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::invalid(format!(
                "ray direction must be unit length (|d| = {})",
                direction.norm()
            )));
        }
        Ok(self.intersect_unchecked(origin, direction))
    }

    pub(crate) fn intersect_unchecked(&self, origin: &Vec3, direction: &Vec3) -> Option<Hit> {
        let mut best: Option<Hit> = None;
        for (i, s) in self.surfaces.iter().enumerate() {
            if let Some((t, normal)) = s.shape.intersect(origin, direction) {
                if best.is_none_or(|b| t < b.distance) {
                    best = Some(Hit {
                        surface: i,
                        point: origin + direction * t,
                        distance: t,
                        normal,
                    });
                }
            }
        }
        best
    }

    /// Point strictly inside the enclosure and outside every outward-facing tube.
    pub fn contains(&self, p: &Vec3) -> bool {
        if !self.enclosure.contains(p) {
            return false;
        }
        self.surfaces.iter().all(|s| match &s.shape {
            Shape::Cylinder {
                base,
                axis,
                radius,
                length,
                facing: Facing::Outward,
            } => {
                let w = p - base;
                let h = w.dot(axis);
                let rho = (w - axis * h).norm();
                !(rho <= *radius && (0.0..=*length).contains(&h))
            }
            _ => true,
        })
    }

    /// Human-readable surface listing for audit.
    pub fn describe(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "enclosure: {}", describe_enclosure(&self.enclosure));
        let _ = writeln!(out, "surfaces: {}", self.surfaces.len());
        for (i, s) in self.surfaces.iter().enumerate() {
            let m = &s.material;
            let _ = writeln!(
                out,
                "  [{i}] {:<14} {:<44} material={} eps_r={} sigma={:e} S/m T={} K",
                s.label,
                describe_shape(&s.shape),
                m.name,
                m.relative_permittivity,
                m.conductivity,
                m.temperature
            );
        }
        out
    }
}

fn v(p: &Vec3) -> String {
    format!("({:.4}, {:.4}, {:.4})", p.x, p.y, p.z)
}

fn describe_enclosure(e: &Enclosure) -> String {
    match e {
        Enclosure::Open => "open".into(),
        Enclosure::Cylinder { radius, base_z, height } => {
            format!("cylinder r={radius} m, z=[{base_z}, {}] m", base_z + height)
        }
        Enclosure::Box { min, max } => format!("box {} .. {}", v(min), v(max)),
    }
}

fn describe_shape(s: &Shape) -> String {
    match s {
        Shape::Cylinder {
            base,
            radius,
            length,
            facing,
            ..
        } => {
            format!("cylinder base={} r={radius} len={length} {facing:?}", v(base))
        }
        Shape::Disc {
            center,
            outer_radius,
            aperture_radius,
            ..
        } => {
            format!("disc c={} r={outer_radius} ap={aperture_radius}", v(center))
        }
        Shape::Rectangle { corner, edge_u, edge_v } => {
            format!("rect c={} {}x{}", v(corner), edge_u.norm(), edge_v.norm())
        }
    }
}
