//! Sweep harness: trace every TX→RX link of a scenario, derive CIRs,
//! frequency responses and metrics, and write them with a manifest.
//!
//! Output layout (one engine):
//!
//! ```text
//! <out>/manifest.json
//! <out>/metrics.csv
//! <out>/<rx>_paths.csv  <out>/<rx>_cir.csv  <out>/<rx>_hf.csv
//! <out>/<rx>.empty      (only for links that received nothing)
//! ```
//!
//! With `engine = both` each engine writes into its own `images/` or
//! `rays/` subdirectory and `agreement.csv` compares the two.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{frequency_response_about, required_duration, synthesize_cir};
use crate::constants::wavelength;
use crate::error::{Error, Result};
use crate::export::{cir_csv, frequency_response_csv, metrics_csv, paths_csv, MetricsRow};
use crate::metrics::{link_metrics, LinkMetrics};
use crate::propagation::{total_energy, trace_images, trace_rays_multi, Link, PathComponent};
use crate::scenario::{Engine, Scenario};
use crate::scene::LabeledPoint;

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CRYOWAVE_OUT";
pub const FALLBACK_OUTPUT_DIR: &str = "cryowave-out";

/// The ray grid is deterministic; recorded for completeness.
pub const SEED: u64 = 0;

/// Command-line values that replace scenario fields.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Overrides {
    /// Not written to the manifest, so runs into different directories
    /// produce identical files.
    #[serde(skip)]
    pub output_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub engine: Option<Engine>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ray_count: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_bounces: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, s: &mut Scenario) {
        if let Some(d) = &self.output_dir {
            s.output_dir = Some(d.clone());
        }
        if let Some(e) = self.engine {
            s.tracer.engine = e;
        }
        if let Some(n) = self.ray_count {
            s.tracer.ray_count = n;
        }
        if let Some(k) = self.max_bounces {
            s.tracer.max_bounces = k;
        }
    }
}

/// Why a run stopped; maps onto process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Unreadable, malformed or invalid scenario.
    Scenario(Vec<String>),
    /// Failure while tracing or post-processing.
    Runtime(Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Scenario(_) => 2,
            RunError::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Scenario(list) => {
                for (i, d) in list.iter().enumerate() {
                    if i > 0 {
                        writeln!(f)?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            RunError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for RunError {}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkResult {
    pub rx: LabeledPoint,
    /// `"<tx>-<rx>"`.
    pub label: String,
    /// TX–RX distance, m.
    pub distance: f64,
    pub paths: Vec<PathComponent>,
    /// `None` when no path was received.
    pub metrics: Option<LinkMetrics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineRun {
    pub engine: Engine,
    pub links: Vec<LinkResult>,
}

/// One paired path in the cross-engine comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementRow {
    pub rx: String,
    pub surfaces: Vec<u16>,
    pub images: Option<PathComponent>,
    pub rays: Option<PathComponent>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgreementSummary {
    /// Paths up to this many reflections are compared.
    pub max_order: usize,
    pub matched: usize,
    pub images_only: usize,
    pub rays_only: usize,
    pub max_delay_difference_s: f64,
    pub max_energy_difference_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    /// Resolved scenario with overrides applied and the CIR duration fixed.
    pub scenario: Scenario,
    pub runs: Vec<EngineRun>,
    pub agreement: Option<(Vec<AgreementRow>, AgreementSummary)>,
    pub warnings: Vec<String>,
}

fn runtime(e: Error) -> RunError {
    RunError::Runtime(e)
}

/// Validates and traces `scenario` without touching the filesystem.
pub fn simulate(scenario: &Scenario) -> std::result::Result<Simulation, RunError> {
    let diags = scenario.validate();
    if !diags.is_empty() {
        return Err(RunError::Scenario(diags));
    }
    let mut resolved = scenario
        .resolve()
        .map_err(|e| RunError::Scenario(vec![e.to_string()]))?;
    let scene = resolved.build_scene().map_err(runtime)?;
    let layout = resolved.layout().map_err(runtime)?;
    let antenna = resolved.antenna_model().map_err(runtime)?;
    let link = Link::new(&scene, resolved.frequency(), &antenna, &antenna).map_err(runtime)?;
    let tx = layout.tx.position;
    let receivers: Vec<_> = layout.rx.iter().map(|r| r.position).collect();

    let engines: &[Engine] = match resolved.tracer.engine {
        Engine::Both => &[Engine::Images, Engine::Rays],
        Engine::Images => &[Engine::Images],
        Engine::Rays => &[Engine::Rays],
    };
    let mut traced = Vec::new();
    for &engine in engines {
        let per_rx = match engine {
            Engine::Images => receivers
                .par_iter()
                .map(|&rx| trace_images(&link, tx, rx, resolved.tracer.max_order))
                .collect::<Result<Vec<_>>>(),
            _ => trace_rays_multi(&link, tx, &receivers, &resolved.ray_params()),
        }
        .map_err(runtime)?;
        traced.push((engine, per_rx));
    }

    let cir = resolved.cir_params();
    let duration = match resolved.channel.duration {
        Some(d) => d,
        None => traced
            .iter()
            .flat_map(|(_, per_rx)| per_rx.iter())
            .map(|paths| required_duration(paths, &cir))
            .fold(required_duration(&[], &cir), f64::max),
    };
    resolved.channel.duration = Some(duration);

    let models = resolved.noise_models().map_err(runtime)?;
    let opts = resolved.delay_options();
    let mut warnings = Vec::new();
    let mut runs = Vec::new();
    for (engine, per_rx) in traced {
        let mut links = Vec::new();
        for (rx, paths) in layout.rx.iter().zip(per_rx) {
            let distance = (rx.position - tx).norm();
            let label = format!("{}-{}", layout.tx.label, rx.label);
            let metrics = if paths.is_empty() {
                warnings.push(format!("{}: link {label} received no paths", engine.label()));
                None
            } else {
                Some(
                    link_metrics(
                        &paths,
                        resolved.metrics.p_tx_w,
                        &resolved.metrics.bandwidths,
                        &models,
                        &opts,
                    )
                    .map_err(runtime)?,
                )
            };
            links.push(LinkResult {
                rx: rx.clone(),
                label,
                distance,
                paths,
                metrics,
            });
        }
        runs.push(EngineRun { engine, links });
    }

    let agreement = (runs.len() == 2).then(|| {
        agreement(
            &runs[0],
            &runs[1],
            resolved.tracer.max_order.min(resolved.tracer.max_bounces),
        )
    });
    Ok(Simulation {
        scenario: resolved,
        runs,
        agreement,
        warnings,
    })
}

/// Pairs image and ray paths by surface sequence, up to `max_order` reflections.
pub fn agreement(images: &EngineRun, rays: &EngineRun, max_order: usize) -> (Vec<AgreementRow>, AgreementSummary) {
    let mut rows = Vec::new();
    let mut summary = AgreementSummary {
        max_order,
        matched: 0,
        images_only: 0,
        rays_only: 0,
        max_delay_difference_s: 0.0,
        max_energy_difference_db: 0.0,
    };
    for (li, lr) in images.links.iter().zip(&rays.links) {
        let mut pairs: BTreeMap<Vec<u16>, (Option<PathComponent>, Option<PathComponent>)> = BTreeMap::new();
        for p in li.paths.iter().filter(|p| p.bounce_count as usize <= max_order) {
            pairs.entry(p.surfaces.clone()).or_default().0 = Some(p.clone());
        }
        for p in lr.paths.iter().filter(|p| p.bounce_count as usize <= max_order) {
            pairs.entry(p.surfaces.clone()).or_default().1 = Some(p.clone());
        }
        let mut link_rows: Vec<_> = pairs
            .into_iter()
            .map(|(surfaces, (images, rays))| AgreementRow {
                rx: li.rx.label.clone(),
                surfaces,
                images,
                rays,
            })
            .collect();
        link_rows.sort_by(|a, b| {
            let d = |r: &AgreementRow| r.images.as_ref().or(r.rays.as_ref()).map_or(0.0, |p| p.delay);
            d(a).total_cmp(&d(b)).then_with(|| a.surfaces.cmp(&b.surfaces))
        });
        for r in &link_rows {
            match (&r.images, &r.rays) {
                (Some(i), Some(y)) => {
                    summary.matched += 1;
                    summary.max_delay_difference_s = summary.max_delay_difference_s.max((i.delay - y.delay).abs());
                    let db = 10.0 * (y.power() / i.power()).log10();
                    summary.max_energy_difference_db = summary.max_energy_difference_db.max(db.abs());
                }
                (Some(_), None) => summary.images_only += 1,
                (None, Some(_)) => summary.rays_only += 1,
                (None, None) => {}
            }
        }
        rows.extend(link_rows);
    }
    (rows, summary)
}

pub fn agreement_csv(rows: &[AgreementRow]) -> String {
    use std::fmt::Write;
    let mut out = String::from(
        "rx,surfaces,bounces,status,delay_images_s,delay_rays_s,delay_diff_s,energy_images,energy_rays,energy_diff_db\n",
    );
    let num = |x: f64| format!("{x:e}");
    for r in rows {
        let sig = r.surfaces.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("-");
        let (status, di, dr, ei, er) = match (&r.images, &r.rays) {
            (Some(i), Some(y)) => ("matched", i.delay, y.delay, i.power(), y.power()),
            (Some(i), None) => ("images_only", i.delay, f64::NAN, i.power(), f64::NAN),
            (None, Some(y)) => ("rays_only", f64::NAN, y.delay, f64::NAN, y.power()),
            (None, None) => continue,
        };
        let _ = writeln!(
            out,
            "{},{},{},{status},{},{},{},{},{},{}",
            r.rx,
            if sig.is_empty() { "direct".to_string() } else { sig },
            r.surfaces.len(),
            num(di),
            num(dr),
            num(dr - di),
            num(ei),
            num(er),
            num(10.0 * (er / ei).log10())
        );
    }
    out
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario_file: Option<String>,
    seed: u64,
    overrides: &'a Overrides,
    resolved: Scenario,
    derived: Derived,
    links: Vec<ManifestLink>,
    agreement: Option<&'a AgreementSummary>,
    warnings: &'a [String],
    files: Vec<String>,
}

#[derive(Serialize)]
struct Derived {
    wavelength_m: f64,
    antenna: crate::antenna::AntennaModel,
    frequency_grid_hz: [f64; 2],
}

#[derive(Serialize)]
struct ManifestLink {
    engine: Engine,
    label: String,
    distance_m: f64,
    paths: usize,
    received_energy: f64,
    rms_delay_spread_s: Option<f64>,
    coherence_bandwidth_hz: Option<f64>,
}

fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Output directory: override, then scenario, then [`OUTPUT_DIR_ENV`],
/// then [`FALLBACK_OUTPUT_DIR`].
pub fn output_dir(scenario: &Scenario) -> PathBuf {
    scenario
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
}

/// Frequency grid of the exported response, Hz.
pub fn frequency_grid(scenario: &Scenario) -> Vec<f64> {
    let fc = scenario.frequency();
    let span = scenario.channel.frequency_span.unwrap_or(scenario.channel.bandwidth);
    let n = scenario.channel.frequency_points.max(2);
    (0..n)
        .map(|i| fc - span / 2.0 + span * i as f64 / (n - 1) as f64)
        .collect()
}

/// Writes every artifact of `sim` under `dir`; returns the relative file
/// names in write order.
pub fn write_outputs(
    sim: &Simulation,
    dir: &Path,
    overrides: &Overrides,
    scenario_file: Option<&str>,
) -> std::result::Result<Vec<String>, RunError> {
    let io = |e: std::io::Error| RunError::Runtime(Error::Io(format!("{}: {e}", dir.display())));
    std::fs::create_dir_all(dir).map_err(io)?;
    let s = &sim.scenario;
    let cir_params = s.cir_params();
    let duration = s.channel.duration.expect("resolved duration");
    let grid = frequency_grid(s);
    let models = s.noise_models().map_err(runtime)?;
    let nested = sim.runs.len() > 1;

    let mut files = Vec::new();
    let mut write = |rel: String, body: String| -> std::result::Result<(), RunError> {
        let path = dir.join(&rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io)?;
        }
        std::fs::write(&path, body).map_err(io)?;
        files.push(rel);
        Ok(())
    };

    let mut manifest_links = Vec::new();
    for run in &sim.runs {
        let prefix = if nested {
            format!("{}/", run.engine.label())
        } else {
            String::new()
        };
        let mut rows = Vec::new();
        for l in &run.links {
            let stem = file_stem(&l.rx.label);
            let cir = synthesize_cir(&l.paths, &cir_params, duration).map_err(runtime)?;
            let fr = frequency_response_about(&l.paths, &grid, s.frequency());
            write(format!("{prefix}{stem}_paths.csv"), paths_csv(&l.paths))?;
            write(format!("{prefix}{stem}_cir.csv"), cir_csv(&cir))?;
            write(format!("{prefix}{stem}_hf.csv"), frequency_response_csv(&fr))?;
            if l.paths.is_empty() {
                write(
                    format!("{prefix}{stem}.empty"),
                    format!(
                        "link {} received no paths with engine {}\n",
                        l.label,
                        run.engine.label()
                    ),
                )?;
            }
            rows.push(MetricsRow {
                link_label: l.label.clone(),
                distance_m: l.distance,
                metrics: l.metrics.clone(),
            });
            manifest_links.push(ManifestLink {
                engine: run.engine,
                label: l.label.clone(),
                distance_m: l.distance,
                paths: l.paths.len(),
                received_energy: total_energy(&l.paths),
                rms_delay_spread_s: l.metrics.as_ref().map(|m| m.rms_delay_spread),
                coherence_bandwidth_hz: l.metrics.as_ref().and_then(|m| m.coherence_bandwidth_estimate),
            });
        }
        write(
            format!("{prefix}metrics.csv"),
            metrics_csv(&rows, s.metrics.p_tx_w, &s.metrics.bandwidths, &models),
        )?;
    }
    if let Some((rows, _)) = &sim.agreement {
        write("agreement.csv".into(), agreement_csv(rows))?;
    }

    let mut resolved = s.clone();
    // the destination does not affect results; leaving it out keeps
    // manifests identical across output directories
    resolved.output_dir = None;
    let mut listed = files;
    listed.push("manifest.json".into());
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        scenario_file: scenario_file.map(str::to_owned),
        seed: SEED,
        overrides,
        derived: Derived {
            wavelength_m: wavelength(s.frequency()),
            antenna: s.antenna_model().map_err(runtime)?,
            frequency_grid_hz: [grid[0], grid[grid.len() - 1]],
        },
        resolved,
        links: manifest_links,
        agreement: sim.agreement.as_ref().map(|(_, summary)| summary),
        warnings: &sim.warnings,
        files: listed,
    };
    let mut body = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    body.push('\n');
    std::fs::write(dir.join("manifest.json"), body).map_err(io)?;
    Ok(manifest.files)
}

/// Summary of a completed run.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub files: Vec<String>,
    pub simulation: Simulation,
}

/// Loads `path`, applies `overrides`, simulates and writes all artifacts.
pub fn run(path: &Path, overrides: &Overrides) -> std::result::Result<RunReport, RunError> {
    let mut scenario = Scenario::load(path).map_err(|e| RunError::Scenario(vec![e.to_string()]))?;
    overrides.apply(&mut scenario);
    let dir = output_dir(&scenario);
    let simulation = simulate(&scenario)?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned());
    let files = write_outputs(&simulation, &dir, overrides, name.as_deref())?;
    Ok(RunReport {
        output_dir: dir,
        files,
        simulation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free_space(d: f64) -> Scenario {
        Scenario::from_json(&format!(
            r#"{{"scene": {{"kind": "free_space"}},
                "antenna": {{"pattern": "isotropic"}},
                "layout": {{"kind": "explicit", "tx": {{"label": "A", "position": [0, 0, 0]}},
                           "rx": [{{"label": "B", "position": [{d}, 0, 0]}}]}},
                "tracer": {{"engine": "both", "ray_count": 20000, "max_order": 2}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn free_space_both_engines_agree() {
        let sim = simulate(&free_space(0.1)).unwrap();
        assert_eq!(sim.runs.len(), 2);
        for run in &sim.runs {
            assert_eq!(run.links[0].paths.len(), 1);
        }
        let (rows, summary) = sim.agreement.unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(summary.matched, 1);
        assert!(summary.max_delay_difference_s < 1e-15);
        assert_relative_eq!(sim.scenario.channel.duration.unwrap(), 0.1 / 299_792_458.0 + 4.0 / 5e9);
    }

    #[test]
    fn invalid_scenario_is_a_scenario_error() {
        let mut s = free_space(0.1);
        s.tracer.ray_count = 10;
        let err = simulate(&s).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn too_short_duration_is_a_runtime_error() {
        let mut s = free_space(0.1);
        s.channel.duration = Some(1e-10);
        let sim = simulate(&s).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let err = write_outputs(&sim, dir.path(), &Overrides::default(), None).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(err.to_string().contains("path 0"), "{err}");
    }

    #[test]
    fn empty_link_gets_marker() {
        // receiver hidden behind a closed PEC wall
        let s = Scenario::from_json(
            r#"{"scene": {"kind": "custom", "surfaces": [{"label": "wall", "material": "pec",
                  "shape": {"kind": "disc", "center": [0.05, 0, 0], "normal": [-1, 0, 0], "outer_radius": 1.0}}]},
                "antenna": {"pattern": "isotropic"},
                "layout": {"kind": "explicit", "tx": {"label": "A", "position": [0, 0, 0]},
                           "rx": [{"label": "B", "position": [0.1, 0, 0]}]},
                "tracer": {"engine": "images", "max_order": 2}}"#,
        )
        .unwrap();
        let sim = simulate(&s).unwrap();
        assert!(sim.runs[0].links[0].paths.is_empty());
        assert_eq!(sim.warnings.len(), 1);
        let dir = tempfile::tempdir().unwrap();
        let files = write_outputs(&sim, dir.path(), &Overrides::default(), None).unwrap();
        assert!(files.contains(&"B.empty".to_string()));
        let metrics = std::fs::read_to_string(dir.path().join("metrics.csv")).unwrap();
        assert!(metrics.lines().nth(1).unwrap().contains("-inf"));
    }

    #[test]
    fn overrides_are_applied_and_recorded() {
        let dir = tempfile::tempdir().unwrap();
        let sim = simulate(&free_space(0.1)).unwrap();
        let o = Overrides {
            ray_count: Some(30_000),
            ..Default::default()
        };
        write_outputs(&sim, dir.path(), &o, Some("x.scenario")).unwrap();
        let manifest: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["overrides"]["ray_count"], 30_000);
        assert_eq!(manifest["seed"], 0);
        assert_eq!(manifest["scenario_file"], "x.scenario");
        let mut s = free_space(0.1);
        o.apply(&mut s);
        assert_eq!(s.tracer.ray_count, 30_000);
    }
}
