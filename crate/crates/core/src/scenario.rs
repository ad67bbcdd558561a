//! JSON scenario files: schema, defaults and validation.
//!
//! Every block except `scene` may be omitted. [`Scenario::resolve`] fills
//! in all defaults so the resolved scenario, written to the run manifest,
//! reproduces the run when loaded back.
//!
//! ```json
//! {
//!   "name": "cryostat_default",
//!   "scene": { "kind": "cryostat" },
//!   "antenna": { "frequency": 28e9, "pattern": "half_wave_dipole" },
//!   "layout": { "kind": "default" },
//!   "tracer": { "engine": "rays", "ray_count": 1000000, "max_bounces": 12 },
//!   "channel": { "bandwidth": 5e9, "sample_interval": 2e-11 },
//!   "metrics": { "bandwidths": [1e9, 5e9], "p_tx_w": 1e-6 }
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::antenna::{design_dipole, AntennaModel, DipoleDesign, Pattern, OPTIMIZED_LENGTH_CRYOSTAT};
use crate::channel::{CirParams, PulseShape, DEFAULT_BANDWIDTH, DEFAULT_SAMPLE_INTERVAL};
use crate::constants::{wavelength, DESIGN_FREQUENCY};
use crate::error::{Error, Result};
use crate::materials::{Material, SIO2_PERMITTIVITY_4K};
use crate::metrics::{DelayOptions, NoiseKind, NoiseModel, DEFAULT_PDP_THRESHOLD_DB};
use crate::propagation::{RayParams, MAX_IMAGE_ORDER};
use crate::scene::{
    build_cryostat_scene, default_cryostat_layout, AntennaLayout, CryostatParams, Enclosure, LabeledPoint, Scene,
    Surface, DEFAULT_ORIENTATION,
};
use crate::Vec3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub scene: SceneSpec,
    #[serde(default)]
    pub antenna: AntennaSpec,
    #[serde(default)]
    pub layout: LayoutSpec,
    #[serde(default)]
    pub tracer: TracerSpec,
    #[serde(default)]
    pub channel: ChannelSpec,
    #[serde(default)]
    pub metrics: MetricsSpec,
    /// Relative paths are taken relative to the working directory.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum SceneSpec {
    Cryostat(CryostatParams),
    /// Axis-aligned closed box.
    Box {
        min: Vec3,
        max: Vec3,
        #[serde(default = "Material::pec")]
        material: Material,
    },
    FreeSpace,
    Custom {
        surfaces: Vec<Surface>,
        #[serde(default)]
        enclosure: Enclosure,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaSpec {
    /// Hz.
    pub frequency: f64,
    pub pattern: Pattern,
    /// Dipole axis shared by all antennas; defaults to the layout's.
    pub axis: Option<Vec3>,
    pub substrate_permittivity: f64,
    /// Tuned dipole length, m. Defaults to the published cryostat value for
    /// the 28 GHz SiO2 design and is otherwise absent.
    pub length: Option<f64>,
}

impl Default for AntennaSpec {
    fn default() -> Self {
        AntennaSpec {
            frequency: DESIGN_FREQUENCY,
            pattern: Pattern::default(),
            axis: None,
            substrate_permittivity: SIO2_PERMITTIVITY_4K,
            length: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LayoutSpec {
    /// A and B1…B6 on the cryostat antenna plane.
    #[default]
    Default,
    Explicit {
        tx: LabeledPoint,
        rx: Vec<LabeledPoint>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Images,
    #[default]
    Rays,
    /// Both engines, plus an agreement report.
    Both,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Images => "images",
            Engine::Rays => "rays",
            Engine::Both => "both",
        }
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "images" => Ok(Engine::Images),
            "rays" => Ok(Engine::Rays),
            "both" => Ok(Engine::Both),
            _ => Err(format!("unknown engine {s:?} (expected images, rays or both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TracerSpec {
    pub engine: Engine,
    pub ray_count: usize,
    pub max_bounces: usize,
    /// Reception sphere radius, m; defaults to half a wavelength.
    pub rx_radius: Option<f64>,
    /// Image-source reflection order.
    pub max_order: usize,
}

impl Default for TracerSpec {
    fn default() -> Self {
        TracerSpec {
            engine: Engine::default(),
            ray_count: RayParams::DEFAULT_RAY_COUNT,
            max_bounces: RayParams::DEFAULT_MAX_BOUNCES,
            rx_radius: None,
            max_order: DEFAULT_IMAGE_ORDER,
        }
    }
}

pub const DEFAULT_IMAGE_ORDER: usize = 4;
pub const DEFAULT_FREQUENCY_POINTS: usize = 401;
pub const DEFAULT_P_TX_W: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSpec {
    /// CIR bandwidth, Hz.
    pub bandwidth: f64,
    /// s.
    pub sample_interval: f64,
    pub pulse: PulseShape,
    /// CIR record length, s; by default just long enough for the latest
    /// path of any link.
    pub duration: Option<f64>,
    /// Points of the exported frequency response.
    pub frequency_points: usize,
    /// Span of the exported frequency response about the carrier, Hz;
    /// defaults to the CIR bandwidth.
    pub frequency_span: Option<f64>,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec {
            bandwidth: DEFAULT_BANDWIDTH,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            pulse: PulseShape::default(),
            duration: None,
            frequency_points: DEFAULT_FREQUENCY_POINTS,
            frequency_span: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// K.
    pub temperature: f64,
    /// Hz; defaults to the antenna frequency.
    #[serde(default)]
    pub center_frequency: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSpec {
    /// SNR bandwidths, Hz.
    pub bandwidths: Vec<f64>,
    pub noise_models: Vec<NoiseSpec>,
    /// Transmit power, W.
    pub p_tx_w: f64,
    /// Paths weaker than the strongest by more than this are left out of
    /// delay statistics; `null` keeps every path.
    pub pdp_threshold_db: Option<f64>,
}

impl Default for MetricsSpec {
    fn default() -> Self {
        MetricsSpec {
            bandwidths: vec![0.5e9, 1e9, 2e9, 5e9, 10e9],
            noise_models: vec![
                NoiseSpec {
                    kind: NoiseKind::PlanckNyquist,
                    temperature: 4.0,
                    center_frequency: None,
                },
                NoiseSpec {
                    kind: NoiseKind::ClassicalKtb,
                    temperature: 4.0,
                    center_frequency: None,
                },
                NoiseSpec {
                    kind: NoiseKind::ClassicalKtb,
                    temperature: 300.0,
                    center_frequency: None,
                },
            ],
            p_tx_w: DEFAULT_P_TX_W,
            pdp_threshold_db: Some(DEFAULT_PDP_THRESHOLD_DB),
        }
    }
}

impl Scenario {
    /// Parses JSON, reporting the offending field path, line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let (line, column) = (inner.line(), inner.column());
            let full = inner.to_string();
            let msg = full
                .strip_suffix(&format!(" at line {line} column {column}"))
                .unwrap_or(&full);
            Error::Scenario(format!("line {line} column {column}: field `{path}`: {msg}"))
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn frequency(&self) -> f64 {
        self.antenna.frequency
    }

    pub fn build_scene(&self) -> Result<Scene> {
        match &self.scene {
            SceneSpec::Cryostat(p) => build_cryostat_scene(p),
            SceneSpec::Box { min, max, material } => Scene::closed_box(*min, *max, material.clone()),
            SceneSpec::FreeSpace => Ok(Scene::free_space()),
            SceneSpec::Custom { surfaces, enclosure } => Scene::new(surfaces.clone(), enclosure.clone()),
        }
    }

    /// Antenna layout with the shared dipole axis applied.
    pub fn layout(&self) -> Result<AntennaLayout> {
        let mut layout = match (&self.layout, &self.scene) {
            (LayoutSpec::Explicit { tx, rx }, _) => AntennaLayout {
                tx: tx.clone(),
                rx: rx.clone(),
                orientation: DEFAULT_ORIENTATION,
            },
            (LayoutSpec::Default, SceneSpec::Cryostat(p)) => {
                default_cryostat_layout(p, self.frequency()).ok_or_else(|| {
                    Error::Scenario("default layout needs an antenna plane (set antenna_plane_z or add plates)".into())
                })?
            }
            (LayoutSpec::Default, _) => {
                return Err(Error::Scenario(
                    "the default layout exists only for cryostat scenes".into(),
                ))
            }
        };
        if let Some(axis) = self.antenna.axis {
            layout.orientation = axis;
        }
        Ok(layout)
    }

    pub fn antenna_model(&self) -> Result<AntennaModel> {
        let mut design = design_dipole(self.frequency(), self.antenna.substrate_permittivity)?;
        design.optimized_length = self.antenna.length.or_else(|| default_length(&design));
        AntennaModel::new(design, self.layout()?.orientation, self.antenna.pattern)
    }

    pub fn ray_params(&self) -> RayParams {
        RayParams {
            ray_count: self.tracer.ray_count,
            max_bounces: self.tracer.max_bounces,
            rx_radius: self
                .tracer
                .rx_radius
                .unwrap_or_else(|| RayParams::for_frequency(self.frequency()).rx_radius),
        }
    }

    pub fn cir_params(&self) -> CirParams {
        CirParams {
            bandwidth: self.channel.bandwidth,
            sample_interval: self.channel.sample_interval,
            pulse: self.channel.pulse,
            carrier_frequency: self.frequency(),
        }
    }

    pub fn noise_models(&self) -> Result<Vec<NoiseModel>> {
        self.metrics
            .noise_models
            .iter()
            .map(|n| NoiseModel::new(n.kind, n.temperature, n.center_frequency.unwrap_or(self.frequency())))
            .collect()
    }

    pub fn delay_options(&self) -> DelayOptions {
        DelayOptions {
            threshold_db: self.metrics.pdp_threshold_db,
        }
    }

    /// Copy with every defaulted field made explicit.
    pub fn resolve(&self) -> Result<Scenario> {
        let layout = self.layout()?;
        let antenna = self.antenna_model()?;
        let mut out = self.clone();
        out.layout = LayoutSpec::Explicit {
            tx: layout.tx,
            rx: layout.rx,
        };
        out.antenna.axis = Some(layout.orientation);
        out.antenna.length = antenna.design.optimized_length;
        out.tracer.rx_radius = Some(self.ray_params().rx_radius);
        out.channel.frequency_span = Some(self.channel.frequency_span.unwrap_or(self.channel.bandwidth));
        for n in &mut out.metrics.noise_models {
            n.center_frequency.get_or_insert(self.frequency());
        }
        if let SceneSpec::Cryostat(p) = &mut out.scene {
            p.antenna_plane_z = p.antenna_plane_z();
        }
        Ok(out)
    }

    /// All schema-level and geometric problems; empty when the scenario can run.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let f = self.frequency();
        if !(f > 0.0) || !f.is_finite() {
            out.push(format!("antenna: frequency {f} Hz must be positive"));
            return out;
        }
        if let Err(e) = design_dipole(f, self.antenna.substrate_permittivity) {
            out.push(format!("antenna: {e}"));
        }
        if let Some(axis) = self.antenna.axis {
            if (axis.norm() - 1.0).abs() > 1e-9 {
                out.push(format!("antenna: axis {:?} is not a unit vector", axis.as_slice()));
            }
        }
        if let Some(l) = self.antenna.length {
            if !(l > 0.0) {
                out.push(format!("antenna: length {l} m must be positive"));
            }
        }

        let scene = match self.build_scene() {
            Ok(s) => Some(s),
            Err(Error::Construction(list)) => {
                out.extend(list.into_iter().map(|m| format!("scene: {m}")));
                None
            }
            Err(e) => {
                out.push(format!("scene: {e}"));
                None
            }
        };
        if let Some(scene) = &scene {
            let mut seen = std::collections::BTreeSet::new();
            for s in &scene.surfaces {
                if !seen.insert(s.label.as_str()) {
                    out.push(format!("scene: duplicate surface label {}", s.label));
                }
            }
        }

        match self.layout() {
            Err(e) => out.push(format!("layout: {e}")),
            Ok(layout) => {
                if layout.rx.is_empty() {
                    out.push("layout: no receivers".into());
                }
                if let Some(scene) = &scene {
                    let (plane, freq) = match &self.scene {
                        SceneSpec::Cryostat(p) => (p.antenna_plane_z(), Some(f)),
                        _ => (None, None),
                    };
                    out.extend(layout.diagnostics(scene, plane, freq));
                }
            }
        }

        let t = &self.tracer;
        if matches!(t.engine, Engine::Rays | Engine::Both) {
            if t.ray_count < crate::propagation::MIN_RAY_COUNT {
                out.push(format!(
                    "tracer: ray_count {} below minimum {}",
                    t.ray_count,
                    crate::propagation::MIN_RAY_COUNT
                ));
            }
            let r = self.ray_params().rx_radius;
            if !(r > 0.0) {
                out.push(format!("tracer: rx_radius {r} m must be positive"));
            } else if let Some(scene) = &scene {
                let limit = 0.1 * scene.enclosure.diameter();
                if r > limit {
                    out.push(format!(
                        "tracer: rx_radius {r} m exceeds 10% of the scene diameter ({limit} m)"
                    ));
                }
            }
        }
        if matches!(t.engine, Engine::Images | Engine::Both) {
            if t.max_order > MAX_IMAGE_ORDER {
                out.push(format!("tracer: max_order {} exceeds {MAX_IMAGE_ORDER}", t.max_order));
            }
            if let Some(scene) = &scene {
                if !scene.is_planar() {
                    out.push("tracer: the image engine needs a planar scene".into());
                }
            }
        }

        let c = &self.channel;
        if let Err(e) = crate::channel::Pulse::new(c.pulse, c.bandwidth) {
            out.push(format!("channel: {e}"));
        } else if !(c.sample_interval > 0.0) || c.sample_interval > 1.0 / (2.0 * c.bandwidth) {
            out.push(format!(
                "channel: sample_interval {} s must be in (0, {} s]",
                c.sample_interval,
                1.0 / (2.0 * c.bandwidth)
            ));
        }
        if let Some(d) = c.duration {
            if !(d > 0.0) {
                out.push(format!("channel: duration {d} s must be positive"));
            }
        }
        if c.frequency_points < 2 {
            out.push("channel: frequency_points must be at least 2".into());
        }
        if let Some(s) = c.frequency_span {
            if !(s > 0.0) {
                out.push(format!("channel: frequency_span {s} Hz must be positive"));
            }
        }

        let m = &self.metrics;
        for b in &m.bandwidths {
            if !(*b > 0.0) || !b.is_finite() {
                out.push(format!("metrics: bandwidth {b} Hz must be positive"));
            }
        }
        if let Err(e) = self.noise_models() {
            out.push(format!("metrics: {e}"));
        }
        if !(m.p_tx_w > 0.0) || !m.p_tx_w.is_finite() {
            out.push(format!("metrics: p_tx_w {} W must be positive", m.p_tx_w));
        }
        if let Some(th) = m.pdp_threshold_db {
            if !(th > 0.0) {
                out.push(format!("metrics: pdp_threshold_db {th} must be positive"));
            }
        }
        out
    }

    /// Text dump of the scene and layout.
    pub fn describe(&self) -> Result<String> {
        use std::fmt::Write;
        let scene = self.build_scene()?;
        let layout = self.layout()?;
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.name.as_deref().unwrap_or("(unnamed)"));
        let _ = writeln!(
            out,
            "frequency: {:e} Hz (wavelength {:e} m)",
            self.frequency(),
            wavelength(self.frequency())
        );
        out.push_str(&scene.describe());
        let o = layout.orientation;
        let _ = writeln!(out, "antennas: dipole axis [{}, {}, {}]", o.x, o.y, o.z);
        for (p, d) in std::iter::once((&layout.tx, 0.0)).chain(layout.rx.iter().zip(layout.separations())) {
            let q = p.position;
            let _ = writeln!(
                out,
                "  {:<4} [{:.6}, {:.6}, {:.6}] in-plane distance {:.6} m",
                p.label, q.x, q.y, q.z, d
            );
        }
        Ok(out)
    }
}

fn default_length(design: &DipoleDesign) -> Option<f64> {
    let reference = DipoleDesign::cryostat_reference();
    (design.center_frequency == reference.center_frequency
        && design.substrate_relative_permittivity == reference.substrate_relative_permittivity)
        .then_some(OPTIMIZED_LENGTH_CRYOSTAT)
}
