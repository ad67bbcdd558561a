//! Default cryostat geometry: a closed copper can with a stack of cooling
//! plates threaded by a central tube, plus a thin PCB carrying the antennas.
//!
//! Coordinates: the can's axis is the z axis, its floor is z = 0.

use serde::{Deserialize, Serialize};

use super::{Enclosure, Facing, Scene, Shape, Surface};
use crate::error::{Error, Result};
use crate::materials::Material;
use crate::Vec3;

/// Shell radius, m (30 cm diameter).
pub const SHELL_RADIUS: f64 = 0.15;
/// Shell height, m.
pub const SHELL_HEIGHT: f64 = 0.70;
/// Top-to-middle and middle-to-bottom plate separations, m.
pub const PLATE_SEPARATIONS: [f64; 2] = [0.15, 0.10];
/// Height of the top plate above the floor, m.
pub const TOP_PLATE_Z: f64 = 0.45;
/// Gap between plate rim and shell wall, m.
pub const PLATE_RIM_GAP: f64 = 0.005;
/// Antenna plane height above the second plate from the top, m.
pub const ANTENNA_PLANE_OFFSET: f64 = 0.06;
pub const TUBE_RADIUS: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateParams {
    /// Height above the floor, m.
    pub z: f64,
    pub outer_radius: f64,
    /// Central hole, m. Must be at least the tube radius when a tube is present.
    #[serde(default)]
    pub aperture_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcbParams {
    /// Centre of the board in the xy plane, m.
    pub center: [f64; 2],
    /// Board size along x and y, m.
    pub size: [f64; 2],
    /// Distance of the board surface below the antenna plane, m.
    pub depth_below_plane: f64,
    pub material: Material,
}

impl Default for PcbParams {
    fn default() -> Self {
        PcbParams {
            center: [0.08, 0.0],
            size: [0.10, 0.10],
            depth_below_plane: 0.001,
            material: Material::sio2_4k(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CryostatParams {
    pub shell_radius: f64,
    pub height: f64,
    /// Thermal shield and end caps.
    pub shell_material: Material,
    /// Top to bottom.
    pub plates: Vec<PlateParams>,
    pub plate_material: Material,
    /// Central tube from the lowest plate to the top cap. Omitted when there are no plates.
    pub tube_radius: Option<f64>,
    pub tube_material: Material,
    /// Explicit antenna plane height; defaults to the second plate plus
    /// [`ANTENNA_PLANE_OFFSET`].
    pub antenna_plane_z: Option<f64>,
    pub pcb: Option<PcbParams>,
}

impl Default for CryostatParams {
    fn default() -> Self {
        CryostatParams {
            shell_radius: SHELL_RADIUS,
            height: SHELL_HEIGHT,
            shell_material: Material::copper_4k(),
            plates: Self::plate_stack(
                TOP_PLATE_Z,
                &PLATE_SEPARATIONS,
                SHELL_RADIUS - PLATE_RIM_GAP,
                TUBE_RADIUS,
            ),
            plate_material: Material::copper_4k(),
            tube_radius: Some(TUBE_RADIUS),
            tube_material: Material::copper_4k(),
            antenna_plane_z: None,
            pcb: Some(PcbParams::default()),
        }
    }
}

impl CryostatParams {
    /// Plates from `top_z` downward, spaced by `separations` (top first).
    pub fn plate_stack(top_z: f64, separations: &[f64], outer_radius: f64, aperture_radius: f64) -> Vec<PlateParams> {
        let mut z = top_z;
        let mut plates = vec![PlateParams {
            z,
            outer_radius,
            aperture_radius,
        }];
        for s in separations {
            z -= s;
            plates.push(PlateParams {
                z,
                outer_radius,
                aperture_radius,
            });
        }
        plates
    }

    pub fn antenna_plane_z(&self) -> Option<f64> {
        self.antenna_plane_z
            .or_else(|| self.plates.get(1).map(|p| p.z + ANTENNA_PLANE_OFFSET))
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.shell_radius > 0.0) || !(self.height > 0.0) {
            out.push(format!(
                "shell: radius {} and height {} must be positive",
                self.shell_radius, self.height
            ));
            return out;
        }
        for m in [&self.shell_material, &self.plate_material, &self.tube_material] {
            if let Err(e) = m.validate() {
                out.push(e.to_string());
            }
        }
        let tube = if self.plates.is_empty() { None } else { self.tube_radius };
        if let Some(r) = tube {
            if !(r > 0.0) || r >= self.shell_radius {
                out.push(format!(
                    "tube: radius {r} must be in (0, shell radius {})",
                    self.shell_radius
                ));
            }
        }
        for (i, p) in self.plates.iter().enumerate() {
            let label = format!("plate_{i}");
            if !(p.z > 0.0 && p.z < self.height) {
                out.push(format!("{label}: z = {} outside (0, {})", p.z, self.height));
            }
            if !(p.outer_radius > 0.0) {
                out.push(format!("{label}: radius {} must be positive", p.outer_radius));
            }
            if p.outer_radius > self.shell_radius {
                out.push(format!(
                    "{label}: radius {} exceeds shell radius {}",
                    p.outer_radius, self.shell_radius
                ));
            }
            if !(p.aperture_radius >= 0.0) || p.aperture_radius >= p.outer_radius {
                out.push(format!(
                    "{label}: aperture {} must be in [0, {})",
                    p.aperture_radius, p.outer_radius
                ));
            }
            if let Some(r) = tube {
                if p.aperture_radius < r {
                    out.push(format!(
                        "{label}: aperture {} overlaps tube of radius {r}",
                        p.aperture_radius
                    ));
                }
            }
            if i > 0 && !(p.z < self.plates[i - 1].z) {
                out.push(format!(
                    "plate_{} and {label}: plates overlap or are out of top-to-bottom order (z {} then {})",
                    i - 1,
                    self.plates[i - 1].z,
                    p.z
                ));
            }
        }
        if let Some(z) = self.antenna_plane_z() {
            if !(z > 0.0 && z < self.height) {
                out.push(format!("antenna plane: z = {z} outside (0, {})", self.height));
            }
            if let Some(pcb) = &self.pcb {
                out.extend(self.pcb_problems(pcb, z, tube));
            }
        }
        out
    }

    fn pcb_problems(&self, pcb: &PcbParams, plane_z: f64, tube: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = pcb.material.validate() {
            out.push(format!("pcb: {e}"));
        }
        if !(pcb.size[0] > 0.0 && pcb.size[1] > 0.0) {
            out.push(format!("pcb: size {:?} must be positive", pcb.size));
            return out;
        }
        if !(pcb.depth_below_plane > 0.0) {
            out.push(format!(
                "pcb: depth below plane {} must be positive",
                pcb.depth_below_plane
            ));
        }
        let [cx, cy] = pcb.center;
        let (hx, hy) = (pcb.size[0] / 2.0, pcb.size[1] / 2.0);
        let far = (cx.abs() + hx).hypot(cy.abs() + hy);
        if far > self.shell_radius {
            out.push(format!(
                "pcb: corner at radius {far:.4} outside shell radius {}",
                self.shell_radius
            ));
        }
        if let Some(r) = tube {
            let near = (cx.abs() - hx).max(0.0).hypot((cy.abs() - hy).max(0.0));
            if near <= r {
                out.push(format!("pcb: board reaches radius {near:.4}, inside tube radius {r}"));
            }
        }
        let pcb_z = plane_z - pcb.depth_below_plane;
        for (i, p) in self.plates.iter().enumerate() {
            if (p.z - pcb_z).abs() < 1e-9 {
                out.push(format!("pcb and plate_{i}: coincident at z = {pcb_z}"));
            }
        }
        out
    }
}

/// Builds the enclosure: shell, two caps, plates (top to bottom), tube, PCB.
/// With no plates the result is a plain closed cylinder.
pub fn build_cryostat_scene(params: &CryostatParams) -> Result<Scene> {
    let problems = params.problems();
    if !problems.is_empty() {
        return Err(Error::Construction(problems));
    }
    let r = params.shell_radius;
    let h = params.height;
    let mut surfaces = vec![
        Surface::new(
            Shape::Cylinder {
                base: Vec3::zeros(),
                axis: Vec3::z(),
                radius: r,
                length: h,
                facing: Facing::Inward,
            },
            params.shell_material.clone(),
            "shell",
        ),
        Surface::new(
            Shape::Disc {
                center: Vec3::zeros(),
                normal: Vec3::z(),
                outer_radius: r,
                aperture_radius: 0.0,
            },
            params.shell_material.clone(),
            "bottom_cap",
        ),
        Surface::new(
            Shape::Disc {
                center: Vec3::new(0.0, 0.0, h),
                normal: -Vec3::z(),
                outer_radius: r,
                aperture_radius: 0.0,
            },
            params.shell_material.clone(),
            "top_cap",
        ),
    ];
    if params.plates.is_empty() {
        return Scene::new(
            surfaces,
            Enclosure::Cylinder {
                radius: r,
                base_z: 0.0,
                height: h,
            },
        );
    }
    for (i, p) in params.plates.iter().enumerate() {
        surfaces.push(Surface::new(
            Shape::Disc {
                center: Vec3::new(0.0, 0.0, p.z),
                normal: Vec3::z(),
                outer_radius: p.outer_radius,
                aperture_radius: p.aperture_radius,
            },
            params.plate_material.clone(),
            format!("plate_{i}"),
        ));
    }
    if let Some(tr) = params.tube_radius {
        let bottom = params.plates.last().map_or(0.0, |p| p.z);
        surfaces.push(Surface::new(
            Shape::Cylinder {
                base: Vec3::new(0.0, 0.0, bottom),
                axis: Vec3::z(),
                radius: tr,
                length: h - bottom,
                facing: Facing::Outward,
            },
            params.tube_material.clone(),
            "tube",
        ));
    }
    if let (Some(pcb), Some(plane_z)) = (&params.pcb, params.antenna_plane_z()) {
        let [cx, cy] = pcb.center;
        let [sx, sy] = pcb.size;
        surfaces.push(Surface::new(
            Shape::Rectangle {
                corner: Vec3::new(cx - sx / 2.0, cy - sy / 2.0, plane_z - pcb.depth_below_plane),
                edge_u: Vec3::x() * sx,
                edge_v: Vec3::y() * sy,
            },
            pcb.material.clone(),
            "pcb",
        ));
    }
    Scene::new(
        surfaces,
        Enclosure::Cylinder {
            radius: r,
            base_z: 0.0,
            height: h,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_component_list() {
        let scene = build_cryostat_scene(&CryostatParams::default()).unwrap();
        let labels: Vec<_> = scene.surfaces.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(
            labels,
            [
                "shell",
                "bottom_cap",
                "top_cap",
                "plate_0",
                "plate_1",
                "plate_2",
                "tube",
                "pcb"
            ]
        );
        let shells = scene
            .surfaces
            .iter()
            .filter(|s| {
                matches!(
                    s.shape,
                    Shape::Cylinder {
                        facing: Facing::Inward,
                        ..
                    }
                )
            })
            .count();
        assert_eq!(shells, 1);
        assert_eq!(
            scene.enclosure,
            Enclosure::Cylinder {
                radius: 0.15,
                base_z: 0.0,
                height: 0.70
            }
        );
    }

    #[test]
    fn zero_plates_is_plain_cylinder() {
        let params = CryostatParams {
            plates: Vec::new(),
            ..CryostatParams::default()
        };
        let scene = build_cryostat_scene(&params).unwrap();
        assert_eq!(scene.surfaces.len(), 3);
    }

    #[test]
    fn plate_heights_from_separations() {
        let p = CryostatParams::default();
        let z: Vec<f64> = p.plates.iter().map(|p| p.z).collect();
        // 0.45 top, 0.45 - 0.15 middle, 0.30 - 0.10 bottom
        assert_relative_eq!(z[0], 0.45, epsilon = 1e-15);
        assert_relative_eq!(z[1], 0.30, epsilon = 1e-15);
        assert_relative_eq!(z[2], 0.20, epsilon = 1e-15);
        assert_relative_eq!(p.antenna_plane_z().unwrap(), 0.36, epsilon = 1e-15);
    }

    #[test]
    fn oversized_plate_rejected() {
        let mut p = CryostatParams::default();
        p.plates[1].outer_radius = 0.2;
        match build_cryostat_scene(&p) {
            Err(Error::Construction(list)) => {
                assert_eq!(list.len(), 1, "{list:?}");
                assert!(list[0].contains("plate_1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn overlapping_plates_rejected() {
        let mut p = CryostatParams::default();
        p.plates[2].z = p.plates[1].z;
        let err = build_cryostat_scene(&p).unwrap_err();
        assert!(matches!(&err, Error::Construction(l) if l.iter().any(|m| m.contains("overlap"))));
    }

    #[test]
    fn pcb_must_clear_tube_and_shell() {
        let mut p = CryostatParams::default();
        p.pcb.as_mut().unwrap().center = [0.0, 0.0];
        assert!(build_cryostat_scene(&p).is_err());
        let mut p = CryostatParams::default();
        p.pcb.as_mut().unwrap().center = [0.12, 0.0];
        assert!(build_cryostat_scene(&p).is_err());
    }
}
