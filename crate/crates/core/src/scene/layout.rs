use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::{CryostatParams, Scene};
use crate::constants::wavelength;
use crate::Vec3;

/// TX–RX separations of the default layout, in wavelengths, for B1…B6.
pub const LAYOUT_SEPARATIONS: [f64; 6] = [0.75, 1.1, 1.5, 1.9, 2.25, 2.6];

/// Shared dipole axis of the default layout: the in-plane diagonal, at 45°
/// to both receiver rows.
pub const DEFAULT_ORIENTATION: Vec3 = Vec3::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0);

/// Accepted range of in-plane TX–RX separations, in wavelengths.
pub const SEPARATION_RANGE: (f64, f64) = (0.75, 2.6);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledPoint {
    pub label: String,
    pub position: Vec3,
}

impl LabeledPoint {
    pub fn new(label: impl Into<String>, position: Vec3) -> Self {
        LabeledPoint {
            label: label.into(),
            position,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AntennaLayout {
    pub tx: LabeledPoint,
    pub rx: Vec<LabeledPoint>,
    /// Shared dipole axis.
    pub orientation: Vec3,
}

impl AntennaLayout {
    /// In-plane (xy) distance from TX to each RX, m.
    pub fn separations(&self) -> Vec<f64> {
        self.rx
            .iter()
            .map(|r| (r.position - self.tx.position).xy().norm())
            .collect()
    }

    /// Layout diagnostics against a scene. `plane_z`, when given, pins every
    /// antenna to that height; `frequency`, when given, checks the in-plane
    /// separation range.
    pub fn diagnostics(&self, scene: &Scene, plane_z: Option<f64>, frequency: Option<f64>) -> Vec<String> {
        let mut out = Vec::new();
        if (self.orientation.norm() - 1.0).abs() > 1e-9 {
            out.push(format!(
                "layout: orientation {:?} is not a unit vector",
                self.orientation
            ));
        }
        let mut labels = std::collections::BTreeSet::new();
        for p in std::iter::once(&self.tx).chain(&self.rx) {
            if !labels.insert(p.label.as_str()) {
                out.push(format!("layout: duplicate antenna label {}", p.label));
            }
            if !scene.contains(&p.position) {
                out.push(format!(
                    "layout: antenna {} at {:?} is outside the enclosure",
                    p.label, p.position
                ));
            }
            if let Some(z) = plane_z {
                if (p.position.z - z).abs() > 1e-9 {
                    out.push(format!(
                        "layout: antenna {} at z = {} is off the antenna plane z = {z}",
                        p.label, p.position.z
                    ));
                }
            }
        }
        if let Some(f) = frequency {
            let lambda = wavelength(f);
            for (r, d) in self.rx.iter().zip(self.separations()) {
                let k = d / lambda;
                if k < SEPARATION_RANGE.0 - 1e-6 || k > SEPARATION_RANGE.1 + 1e-6 {
                    out.push(format!(
                        "layout: {}–{} separation {k:.3} wavelengths outside [{}, {}]",
                        self.tx.label, r.label, SEPARATION_RANGE.0, SEPARATION_RANGE.1
                    ));
                }
            }
        }
        out
    }
}

/// Default A/B1…B6 layout on the antenna plane of `params`.
///
/// A sits near one corner of the PCB; odd receivers lie along +x and even
/// receivers along +y, at [`LAYOUT_SEPARATIONS`]. The dipole axis is
/// [`DEFAULT_ORIENTATION`].
pub fn default_cryostat_layout(params: &CryostatParams, frequency: f64) -> Option<AntennaLayout> {
    let z = params.antenna_plane_z()?;
    let lambda = wavelength(frequency);
    let (cx, cy) = params.pcb.as_ref().map_or((0.08, 0.0), |p| (p.center[0], p.center[1]));
    let tx = Vec3::new(cx - 0.03, cy - 0.03, z);
    let directions = [Vec3::x(), Vec3::y()];
    let rx = LAYOUT_SEPARATIONS
        .iter()
        .enumerate()
        .map(|(i, k)| LabeledPoint::new(format!("B{}", i + 1), tx + directions[i % 2] * (k * lambda)))
        .collect();
    Some(AntennaLayout {
        tx: LabeledPoint::new("A", tx),
        rx,
        orientation: DEFAULT_ORIENTATION,
    })
}
