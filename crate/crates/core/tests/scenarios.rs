use std::f64::consts::PI;
use std::path::Path;

use cryowave::constants::{to_db, wavelength};
use cryowave::propagation::total_energy;
use cryowave::run::{simulate, Overrides};
use cryowave::scenario::Scenario;
use cryowave::scene::LAYOUT_SEPARATIONS;

fn load(name: &str) -> Scenario {
    Scenario::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)).unwrap()
}

#[test]
fn free_space_matches_friis() {
    let sim = simulate(&load("freespace.scenario")).unwrap();
    let lambda = wavelength(sim.scenario.frequency());
    for link in &sim.runs[0].links {
        assert_eq!(link.paths.len(), 1, "{}", link.label);
        let friis = (lambda / (4.0 * PI * link.distance)).powi(2);
        assert!(to_db(total_energy(&link.paths) / friis).abs() < 0.5, "{}", link.label);
    }
}

#[test]
fn cryostat_links_follow_default_layout() {
    let mut s = load("cryostat_default.scenario");
    Overrides {
        ray_count: Some(100_000),
        ..Overrides::default()
    }
    .apply(&mut s);
    let sim = simulate(&s).unwrap();
    let lambda = wavelength(sim.scenario.frequency());
    let links = &sim.runs[0].links;
    let labels: Vec<&str> = links.iter().map(|l| l.label.as_str()).collect();
    assert_eq!(labels, ["A-B1", "A-B2", "A-B3", "A-B4", "A-B5", "A-B6"]);
    for (l, sep) in links.iter().zip(LAYOUT_SEPARATIONS) {
        assert!(
            (l.distance / lambda - sep).abs() < 1e-9,
            "{}: {}",
            l.label,
            l.distance / lambda
        );
        assert!(l.paths.windows(2).all(|w| w[0].delay <= w[1].delay));
        assert!(l.metrics.is_some());
    }
    assert!(sim.warnings.is_empty(), "{:?}", sim.warnings);
}

#[test]
fn cryostat_energy_converges_in_ray_count() {
    let energies = |rays: usize| {
        let mut s = load("cryostat_default.scenario");
        Overrides {
            ray_count: Some(rays),
            ..Overrides::default()
        }
        .apply(&mut s);
        let sim = simulate(&s).unwrap();
        sim.runs[0]
            .links
            .iter()
            .map(|l| total_energy(&l.paths))
            .collect::<Vec<_>>()
    };
    let (coarse, fine) = (energies(100_000), energies(200_000));
    for (i, (a, b)) in coarse.iter().zip(&fine).enumerate() {
        let change = to_db(b / a).abs();
        assert!(change < 0.5, "B{}: {change:.3} dB", i + 1);
    }
}
