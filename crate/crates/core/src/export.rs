//! CSV writers for paths, impulse responses, frequency responses and link
//! metrics.
//!
//! Numbers are written with Rust's shortest round-trip scientific format
//! (`{:e}`), so values parse back bit-exactly. Lines end in `\n`.

use std::fmt::Write;

use crate::channel::{ChannelImpulseResponse, FrequencyResponse};
use crate::constants::watts_to_dbm;
use crate::metrics::{LinkMetrics, NoiseModel};
use crate::propagation::PathComponent;

pub const PATHS_HEADER: &str = "delay_s,amp_real,amp_imag,bounces,dep_x,dep_y,dep_z,arr_x,arr_y,arr_z";
pub const CIR_HEADER: &str = "fc_hz,bandwidth_hz,dt_s";
pub const CIR_ROWS_HEADER: &str = "t_s,re,im";
pub const FREQUENCY_RESPONSE_HEADER: &str = "f_hz,re,im";
pub const METRICS_HEADER: &str = "link_label,distance_m,mean_delay_s,ds_rms_s,rx_energy,p_rx_dbm";

fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn paths_csv(paths: &[PathComponent]) -> String {
    let mut out = String::with_capacity(64 * (paths.len() + 1));
    out.push_str(PATHS_HEADER);
    out.push('\n');
    for p in paths {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            num(p.delay),
            num(p.amplitude.re),
            num(p.amplitude.im),
            p.bounce_count,
            num(p.departure.x),
            num(p.departure.y),
            num(p.departure.z),
            num(p.arrival.x),
            num(p.arrival.y),
            num(p.arrival.z)
        );
    }
    out
}

pub fn cir_csv(cir: &ChannelImpulseResponse) -> String {
    let mut out = String::with_capacity(48 * (cir.samples.len() + 4));
    let _ = writeln!(out, "{CIR_HEADER}");
    let _ = writeln!(
        out,
        "{},{},{}",
        num(cir.carrier_frequency),
        num(cir.bandwidth),
        num(cir.sample_interval)
    );
    let _ = writeln!(out, "{CIR_ROWS_HEADER}");
    for (n, h) in cir.samples.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", num(cir.time(n)), num(h.re), num(h.im));
    }
    out
}

pub fn frequency_response_csv(fr: &FrequencyResponse) -> String {
    let mut out = String::with_capacity(48 * (fr.grid.len() + 1));
    let _ = writeln!(out, "{FREQUENCY_RESPONSE_HEADER}");
    for (f, h) in fr.grid.iter().zip(&fr.values) {
        let _ = writeln!(out, "{},{},{}", num(*f), num(h.re), num(h.im));
    }
    out
}

/// One row of the metrics table. `metrics` is `None` for a link that
/// received no paths.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub link_label: String,
    pub distance_m: f64,
    pub metrics: Option<LinkMetrics>,
}

/// SNR column name for a bandwidth / noise model pair.
pub fn snr_column(bandwidth: f64, model: &NoiseModel) -> String {
    format!("snr_db@{}Hz:{}", num(bandwidth), model.label())
}

/// Metrics table with one SNR column per bandwidth and noise model, in
/// bandwidth-major order. Empty links report `NaN` delays, zero energy and
/// `-inf` powers.
pub fn metrics_csv(rows: &[MetricsRow], p_tx_w: f64, bandwidths: &[f64], models: &[NoiseModel]) -> String {
    let mut out = String::from(METRICS_HEADER);
    for b in bandwidths {
        for m in models {
            out.push(',');
            out.push_str(&snr_column(*b, m));
        }
    }
    out.push('\n');
    for row in rows {
        let _ = write!(out, "{},{}", row.link_label, num(row.distance_m));
        match &row.metrics {
            Some(m) => {
                let _ = write!(
                    out,
                    ",{},{},{},{}",
                    num(m.mean_delay),
                    num(m.rms_delay_spread),
                    num(m.received_energy),
                    num(watts_to_dbm(p_tx_w * m.received_energy))
                );
                for s in &m.snr {
                    let _ = write!(out, ",{}", num(s.snr_db));
                }
            }
            None => {
                let _ = write!(
                    out,
                    ",{},{},{},{}",
                    num(f64::NAN),
                    num(f64::NAN),
                    num(0.0),
                    num(f64::NEG_INFINITY)
                );
                for _ in 0..bandwidths.len() * models.len() {
                    let _ = write!(out, ",{}", num(f64::NEG_INFINITY));
                }
            }
        }
        out.push('\n');
    }
    out
}
