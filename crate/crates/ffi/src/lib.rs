//! C ABI for the cryowave channel simulator.
//!
//! Every fallible call returns a [`CwStatus`] and writes its result through
//! an out-pointer. On failure the message is kept per thread and can be read
//! with [`cw_last_error_message`]. Scenarios and simulation results are
//! opaque handles released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use cryowave::antenna::design_dipole;
use cryowave::metrics::{noise_power, snr_db, NoiseKind, NoiseModel};
use cryowave::run::{simulate, Overrides, RunError, Simulation};
use cryowave::scenario::{Engine, Scenario};
use cryowave::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Scenario = 3,
    Runtime = 4,
    Io = 5,
    OutOfRange = 6,
    UndefinedMetric = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwNoiseKind {
    ClassicalKtb = 0,
    PlanckNyquist = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CwEngine {
    Images = 0,
    Rays = 1,
}

/// One multipath component.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwPath {
    pub delay_s: f64,
    pub amplitude_re: f64,
    pub amplitude_im: f64,
    pub bounces: u32,
    pub departure: [f64; 3],
    pub arrival: [f64; 3],
}

/// Delay and power summary of one link.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CwLinkMetrics {
    pub distance_m: f64,
    pub mean_delay_s: f64,
    pub rms_delay_spread_s: f64,
    pub received_energy: f64,
    /// `0` for a single-path link.
    pub coherence_bandwidth_hz: f64,
}

/// Parsed scenario.
pub struct CwScenario {
    inner: Scenario,
}

/// Traced links of one simulation.
pub struct CwSimulation {
    inner: Simulation,
    labels: Vec<Vec<CString>>,
}

struct Failure(CwStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::InvalidArgument(_) => CwStatus::InvalidArgument,
            Error::Scenario(_) => CwStatus::Scenario,
            Error::Io(_) => CwStatus::Io,
            Error::UndefinedMetric(_) => CwStatus::UndefinedMetric,
            _ => CwStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(_) => Failure(CwStatus::Scenario, e.to_string()),
            RunError::Runtime(inner) => inner.into(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CwStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            CwStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CwStatus::InvalidArgument, format!("{what} is not UTF-8: {e}")))
}

fn noise_model(kind: CwNoiseKind, temperature: f64, center_frequency: f64) -> Result<NoiseModel, Failure> {
    let kind = match kind {
        CwNoiseKind::ClassicalKtb => NoiseKind::ClassicalKtb,
        CwNoiseKind::PlanckNyquist => NoiseKind::PlanckNyquist,
    };
    Ok(NoiseModel::new(kind, temperature, center_frequency)?)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cw_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Estimated resonant dipole length on a substrate, m.
///
/// # Safety
/// `length_m` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_design_dipole(
    center_frequency_hz: f64,
    substrate_permittivity: f64,
    length_m: *mut f64,
) -> CwStatus {
    guard(|| {
        let slot = out(length_m, "length_m")?;
        *slot = design_dipole(center_frequency_hz, substrate_permittivity)?.estimated_length;
        Ok(())
    })
}

/// Thermal noise power in `bandwidth_hz`, W.
///
/// # Safety
/// `power_w` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_noise_power(
    kind: CwNoiseKind,
    temperature_k: f64,
    center_frequency_hz: f64,
    bandwidth_hz: f64,
    power_w: *mut f64,
) -> CwStatus {
    guard(|| {
        let slot = out(power_w, "power_w")?;
        *slot = noise_power(&noise_model(kind, temperature_k, center_frequency_hz)?, bandwidth_hz)?;
        Ok(())
    })
}

/// SNR of a channel with energy `channel_energy` fed with `p_tx_w`, dB.
///
/// # Safety
/// `snr` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_snr_db(
    channel_energy: f64,
    p_tx_w: f64,
    kind: CwNoiseKind,
    temperature_k: f64,
    center_frequency_hz: f64,
    bandwidth_hz: f64,
    snr: *mut f64,
) -> CwStatus {
    guard(|| {
        let slot = out(snr, "snr")?;
        let model = noise_model(kind, temperature_k, center_frequency_hz)?;
        *slot = snr_db(channel_energy, p_tx_w, &model, bandwidth_hz)?;
        Ok(())
    })
}

fn hand_out(scenario: Scenario, handle: &mut *mut CwScenario) {
    *handle = Box::into_raw(Box::new(CwScenario { inner: scenario }));
}

/// Reads a scenario file.
///
/// # Safety
/// `path` must be NULL or a NUL-terminated string; `scenario` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_load(path: *const c_char, scenario: *mut *mut CwScenario) -> CwStatus {
    guard(|| {
        let slot = out(scenario, "scenario")?;
        *slot = ptr::null_mut();
        let s = Scenario::load(Path::new(text(path, "path")?))?;
        hand_out(s, slot);
        Ok(())
    })
}

/// Parses a scenario from JSON text.
///
/// # Safety
/// `json` must be NULL or a NUL-terminated string; `scenario` must be NULL
/// or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_from_json(json: *const c_char, scenario: *mut *mut CwScenario) -> CwStatus {
    guard(|| {
        let slot = out(scenario, "scenario")?;
        *slot = ptr::null_mut();
        let s = Scenario::from_json(text(json, "json")?)?;
        hand_out(s, slot);
        Ok(())
    })
}

/// Overrides the number of launched rays.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_set_ray_count(scenario: *mut CwScenario, ray_count: usize) -> CwStatus {
    guard(|| {
        let s = out(scenario, "scenario")?;
        Overrides {
            ray_count: Some(ray_count),
            ..Overrides::default()
        }
        .apply(&mut s.inner);
        Ok(())
    })
}

/// Overrides the bounce limit of the ray engine.
///
/// # Safety
/// `scenario` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_set_max_bounces(scenario: *mut CwScenario, max_bounces: usize) -> CwStatus {
    guard(|| {
        let s = out(scenario, "scenario")?;
        Overrides {
            max_bounces: Some(max_bounces),
            ..Overrides::default()
        }
        .apply(&mut s.inner);
        Ok(())
    })
}

/// Releases a scenario. NULL is ignored.
///
/// # Safety
/// `scenario` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_scenario_free(scenario: *mut CwScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Validates and traces every link of the scenario. Nothing is written to
/// disk.
///
/// # Safety
/// `scenario` must be NULL or a live handle; `simulation` must be NULL or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn cw_simulate(scenario: *const CwScenario, simulation: *mut *mut CwSimulation) -> CwStatus {
    guard(|| {
        let slot = out(simulation, "simulation")?;
        *slot = ptr::null_mut();
        let s = scenario.as_ref().ok_or_else(|| null("scenario"))?;
        let sim = simulate(&s.inner)?;
        let labels = sim
            .runs
            .iter()
            .map(|r| {
                r.links
                    .iter()
                    .map(|l| CString::new(l.label.replace('\0', " ")).expect("nuls removed"))
                    .collect()
            })
            .collect();
        *slot = Box::into_raw(Box::new(CwSimulation { inner: sim, labels }));
        Ok(())
    })
}

/// Releases a simulation. NULL is ignored.
///
/// # Safety
/// `simulation` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_free(simulation: *mut CwSimulation) {
    if !simulation.is_null() {
        drop(Box::from_raw(simulation));
    }
}

fn link(sim: &CwSimulation, run: usize, link: usize) -> Result<&cryowave::run::LinkResult, Failure> {
    let r = sim
        .inner
        .runs
        .get(run)
        .ok_or_else(|| Failure(CwStatus::OutOfRange, format!("run {run} of {}", sim.inner.runs.len())))?;
    r.links
        .get(link)
        .ok_or_else(|| Failure(CwStatus::OutOfRange, format!("link {link} of {}", r.links.len())))
}

unsafe fn handle<'a>(sim: *const CwSimulation) -> Result<&'a CwSimulation, Failure> {
    sim.as_ref().ok_or_else(|| null("simulation"))
}

/// Number of engine runs: two when both engines were requested.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `count` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_run_count(simulation: *const CwSimulation, count: *mut usize) -> CwStatus {
    guard(|| {
        *out(count, "count")? = handle(simulation)?.inner.runs.len();
        Ok(())
    })
}

/// Engine that produced run `run`.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `engine` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_engine(
    simulation: *const CwSimulation,
    run: usize,
    engine: *mut CwEngine,
) -> CwStatus {
    guard(|| {
        let slot = out(engine, "engine")?;
        let sim = handle(simulation)?;
        let r = sim
            .inner
            .runs
            .get(run)
            .ok_or_else(|| Failure(CwStatus::OutOfRange, format!("run {run} of {}", sim.inner.runs.len())))?;
        *slot = match r.engine {
            Engine::Images => CwEngine::Images,
            _ => CwEngine::Rays,
        };
        Ok(())
    })
}

/// Number of links (receivers) in run `run`.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `count` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_link_count(
    simulation: *const CwSimulation,
    run: usize,
    count: *mut usize,
) -> CwStatus {
    guard(|| {
        let slot = out(count, "count")?;
        let sim = handle(simulation)?;
        let r = sim
            .inner
            .runs
            .get(run)
            .ok_or_else(|| Failure(CwStatus::OutOfRange, format!("run {run} of {}", sim.inner.runs.len())))?;
        *slot = r.links.len();
        Ok(())
    })
}

/// Link label such as `A-B1`, owned by the simulation handle. NULL when the
/// indices are out of range.
///
/// # Safety
/// `simulation` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_link_label(
    simulation: *const CwSimulation,
    run: usize,
    link: usize,
) -> *const c_char {
    match simulation.as_ref() {
        Some(sim) => sim
            .labels
            .get(run)
            .and_then(|r| r.get(link))
            .map_or(ptr::null(), |c| c.as_ptr()),
        None => ptr::null(),
    }
}

/// Number of paths on a link.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `count` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_path_count(
    simulation: *const CwSimulation,
    run: usize,
    link_index: usize,
    count: *mut usize,
) -> CwStatus {
    guard(|| {
        let slot = out(count, "count")?;
        *slot = link(handle(simulation)?, run, link_index)?.paths.len();
        Ok(())
    })
}

/// Path `index` of a link, in order of increasing delay.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `path` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_path(
    simulation: *const CwSimulation,
    run: usize,
    link_index: usize,
    index: usize,
    path: *mut CwPath,
) -> CwStatus {
    guard(|| {
        let slot = out(path, "path")?;
        let l = link(handle(simulation)?, run, link_index)?;
        let p = l
            .paths
            .get(index)
            .ok_or_else(|| Failure(CwStatus::OutOfRange, format!("path {index} of {}", l.paths.len())))?;
        *slot = CwPath {
            delay_s: p.delay,
            amplitude_re: p.amplitude.re,
            amplitude_im: p.amplitude.im,
            bounces: p.bounce_count,
            departure: [p.departure.x, p.departure.y, p.departure.z],
            arrival: [p.arrival.x, p.arrival.y, p.arrival.z],
        };
        Ok(())
    })
}

/// Delay statistics and received energy of a link. Fails with
/// `UndefinedMetric` when the link received no paths.
///
/// # Safety
/// `simulation` must be NULL or a live handle; `metrics` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn cw_simulation_link_metrics(
    simulation: *const CwSimulation,
    run: usize,
    link_index: usize,
    metrics: *mut CwLinkMetrics,
) -> CwStatus {
    guard(|| {
        let slot = out(metrics, "metrics")?;
        let l = link(handle(simulation)?, run, link_index)?;
        let m = l
            .metrics
            .as_ref()
            .ok_or_else(|| Failure(CwStatus::UndefinedMetric, format!("link {} received no paths", l.label)))?;
        *slot = CwLinkMetrics {
            distance_m: l.distance,
            mean_delay_s: m.mean_delay,
            rms_delay_spread_s: m.rms_delay_spread,
            received_energy: m.received_energy,
            coherence_bandwidth_hz: m.coherence_bandwidth_estimate.unwrap_or(0.0),
        };
        Ok(())
    })
}
