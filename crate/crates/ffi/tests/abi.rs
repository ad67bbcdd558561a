use std::ffi::{CStr, CString};
use std::ptr;

use cryowave_ffi::*;

fn last_error() -> String {
    let p = cw_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn scenario_file(name: &str) -> CString {
    let p = format!("{}/../core/scenarios/{name}", env!("CARGO_MANIFEST_DIR"));
    CString::new(p).unwrap()
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(cw_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn dipole_and_noise() {
    let mut len = 0.0;
    assert_eq!(unsafe { cw_design_dipole(28e9, 3.9, &mut len) }, CwStatus::Ok);
    assert!((len - 3.420e-3).abs() < 1e-6);

    let mut n = 0.0;
    assert_eq!(
        unsafe { cw_noise_power(CwNoiseKind::ClassicalKtb, 4.0, 28e9, 1e9, &mut n) },
        CwStatus::Ok
    );
    assert!((n / 5.5226e-14 - 1.0).abs() < 1e-4);

    let mut snr = 0.0;
    let status = unsafe { cw_snr_db(1.0, 1e-6, CwNoiseKind::PlanckNyquist, 4.0, 28e9, 1e9, &mut snr) };
    assert_eq!(status, CwStatus::Ok);
    assert!((snr - 73.3).abs() < 0.1);
}

#[test]
fn errors_set_status_and_message() {
    let mut len = 0.0;
    assert_eq!(
        unsafe { cw_design_dipole(-1.0, 3.9, &mut len) },
        CwStatus::InvalidArgument
    );
    assert!(last_error().contains("center frequency"));

    assert_eq!(
        unsafe { cw_design_dipole(28e9, 3.9, ptr::null_mut()) },
        CwStatus::NullPointer
    );
    assert!(last_error().contains("length_m"));

    let mut n = 0.0;
    assert_eq!(
        unsafe { cw_noise_power(CwNoiseKind::PlanckNyquist, 4.0, 28e9, 0.0, &mut n) },
        CwStatus::InvalidArgument
    );
}

#[test]
fn scenario_errors() {
    let mut s: *mut CwScenario = ptr::null_mut();
    let missing = CString::new("/nonexistent/x.scenario").unwrap();
    assert_eq!(unsafe { cw_scenario_load(missing.as_ptr(), &mut s) }, CwStatus::Io);
    assert!(s.is_null());

    let bad = CString::new(r#"{"scene": {"kind": "free_space"}, "bogus": 1}"#).unwrap();
    assert_eq!(
        unsafe { cw_scenario_from_json(bad.as_ptr(), &mut s) },
        CwStatus::Scenario
    );
    assert!(last_error().contains("bogus"));
    assert!(s.is_null());

    unsafe { cw_scenario_free(ptr::null_mut()) };
    unsafe { cw_simulation_free(ptr::null_mut()) };
}

#[test]
fn free_space_simulation() {
    let mut s: *mut CwScenario = ptr::null_mut();
    assert_eq!(
        unsafe { cw_scenario_load(scenario_file("freespace.scenario").as_ptr(), &mut s) },
        CwStatus::Ok
    );
    assert_eq!(unsafe { cw_scenario_set_ray_count(s, 20_000) }, CwStatus::Ok);
    let mut sim: *mut CwSimulation = ptr::null_mut();
    assert_eq!(unsafe { cw_simulate(s, &mut sim) }, CwStatus::Ok);
    unsafe { cw_scenario_free(s) };

    let mut runs = 0;
    assert_eq!(unsafe { cw_simulation_run_count(sim, &mut runs) }, CwStatus::Ok);
    assert_eq!(runs, 1);
    let mut engine = CwEngine::Images;
    assert_eq!(unsafe { cw_simulation_engine(sim, 0, &mut engine) }, CwStatus::Ok);
    assert_eq!(engine, CwEngine::Rays);

    let mut links = 0;
    assert_eq!(unsafe { cw_simulation_link_count(sim, 0, &mut links) }, CwStatus::Ok);
    assert_eq!(links, 3);
    let label = unsafe { CStr::from_ptr(cw_simulation_link_label(sim, 0, 1)) };
    assert_eq!(label.to_str().unwrap(), "A-d10");
    assert!(unsafe { cw_simulation_link_label(sim, 0, 3) }.is_null());

    let mut count = 0;
    assert_eq!(unsafe { cw_simulation_path_count(sim, 0, 1, &mut count) }, CwStatus::Ok);
    assert_eq!(count, 1);
    let mut path = CwPath::default();
    assert_eq!(unsafe { cw_simulation_path(sim, 0, 1, 0, &mut path) }, CwStatus::Ok);
    assert!((path.delay_s - 0.1 / 299_792_458.0).abs() < 1e-18);
    assert_eq!(path.bounces, 0);
    assert_eq!(
        unsafe { cw_simulation_path(sim, 0, 1, 1, &mut path) },
        CwStatus::OutOfRange
    );

    let mut m = CwLinkMetrics::default();
    assert_eq!(unsafe { cw_simulation_link_metrics(sim, 0, 1, &mut m) }, CwStatus::Ok);
    assert_eq!(m.distance_m, 0.1);
    assert_eq!(m.rms_delay_spread_s, 0.0);
    assert_eq!(m.coherence_bandwidth_hz, 0.0);
    let power = path.amplitude_re.powi(2) + path.amplitude_im.powi(2);
    assert!((m.received_energy - power).abs() <= 1e-15 * power);

    assert_eq!(
        unsafe { cw_simulation_link_metrics(sim, 1, 0, &mut m) },
        CwStatus::OutOfRange
    );
    unsafe { cw_simulation_free(sim) };
}

#[test]
fn invalid_scenario_is_rejected_by_simulate() {
    let json = CString::new(
        r#"{"scene": {"kind": "free_space"},
            "layout": {"kind": "explicit",
                       "tx": {"label": "A", "position": [0, 0, 0]},
                       "rx": [{"label": "B", "position": [0.1, 0, 0]}]},
            "tracer": {"ray_count": 10}}"#,
    )
    .unwrap();
    let mut s: *mut CwScenario = ptr::null_mut();
    assert_eq!(unsafe { cw_scenario_from_json(json.as_ptr(), &mut s) }, CwStatus::Ok);
    let mut sim: *mut CwSimulation = ptr::null_mut();
    assert_eq!(unsafe { cw_simulate(s, &mut sim) }, CwStatus::Scenario);
    assert!(sim.is_null());
    assert!(last_error().contains("tracer:"));
    unsafe { cw_scenario_free(s) };
}
