//! Band-limited impulse and frequency responses synthesized from path lists.
//!
//! CIRs are complex baseband about the carrier: path amplitudes already
//! carry the carrier phase `exp(−j2π f_c τ)`, and each path contributes
//! `a_k p(t − τ_k)` with `p` a unit-energy pulse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::propagation::PathComponent;
use crate::Complex64;

/// Pulses are truncated at this many symbol periods each side.
pub const PULSE_HALF_WIDTH_SYMBOLS: f64 = 4.0;
pub const DEFAULT_BANDWIDTH: f64 = 5.0e9;
pub const DEFAULT_SAMPLE_INTERVAL: f64 = 20.0e-12;
pub const DEFAULT_ROLL_OFF: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PulseShape {
    RootRaisedCosine {
        roll_off: f64,
    },
    /// Gaussian with its −3 dB power bandwidth equal to the channel bandwidth.
    Gaussian,
}

impl Default for PulseShape {
    fn default() -> Self {
        PulseShape::RootRaisedCosine {
            roll_off: DEFAULT_ROLL_OFF,
        }
    }
}

/// A unit-energy pulse (after truncation) for a given bandwidth.
#[derive(Debug, Clone, Copy)]
pub struct Pulse {
    shape: PulseShape,
    symbol_period: f64,
    scale: f64,
}

impl Pulse {
    pub fn new(shape: PulseShape, bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::invalid(format!("bandwidth {bandwidth} Hz must be positive")));
        }
        if let PulseShape::RootRaisedCosine { roll_off } = shape {
            if !(0.0..=1.0).contains(&roll_off) {
                return Err(Error::invalid(format!("roll-off {roll_off} outside [0, 1]")));
            }
        }
        let mut p = Pulse {
            shape,
            symbol_period: 1.0 / bandwidth,
            scale: 1.0,
        };
        // normalize the truncated pulse by fine midpoint quadrature
        let n = 40_000;
        let hw = p.half_width();
        let dt = 2.0 * hw / n as f64;
        let energy: f64 = (0..n).map(|i| p.raw(-hw + (i as f64 + 0.5) * dt).powi(2)).sum::<f64>() * dt;
        p.scale = 1.0 / energy.sqrt();
        Ok(p)
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    /// Support is `[-half_width, half_width]`.
    pub fn half_width(&self) -> f64 {
        PULSE_HALF_WIDTH_SYMBOLS * self.symbol_period
    }

    pub fn value(&self, t: f64) -> f64 {
        if t.abs() > self.half_width() {
            0.0
        } else {
            self.scale * self.raw(t)
        }
    }

    fn raw(&self, t: f64) -> f64 {
        let ts = self.symbol_period;
        match self.shape {
            PulseShape::RootRaisedCosine { roll_off: b } => rrc(t / ts, b) / ts.sqrt(),
            PulseShape::Gaussian => {
                let s = std::f64::consts::LN_2.sqrt() / (std::f64::consts::PI / ts);
                (-t * t / (2.0 * s * s)).exp()
            }
        }
    }
}

/// Root-raised-cosine of normalized time `x = t/T`, unit energy for `T = 1`.
fn rrc(x: f64, b: f64) -> f64 {
    use std::f64::consts::PI;
    if x.abs() < 1e-12 {
        return 1.0 - b + 4.0 * b / PI;
    }
    if b > 0.0 && (x.abs() - 1.0 / (4.0 * b)).abs() < 1e-9 {
        let a = PI / (4.0 * b);
        return b / 2f64.sqrt() * ((1.0 + 2.0 / PI) * a.sin() + (1.0 - 2.0 / PI) * a.cos());
    }
    let num = (PI * x * (1.0 - b)).sin() + 4.0 * b * x * (PI * x * (1.0 + b)).cos();
    let den = PI * x * (1.0 - (4.0 * b * x).powi(2));
    num / den
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CirParams {
    pub bandwidth: f64,
    pub sample_interval: f64,
    pub pulse: PulseShape,
    /// Carrier the baseband is referenced to; recorded in exports.
    pub carrier_frequency: f64,
}

impl Default for CirParams {
    fn default() -> Self {
        CirParams {
            bandwidth: DEFAULT_BANDWIDTH,
            sample_interval: DEFAULT_SAMPLE_INTERVAL,
            pulse: PulseShape::default(),
            carrier_frequency: crate::constants::DESIGN_FREQUENCY,
        }
    }
}

impl CirParams {
    pub fn with_bandwidth(bandwidth: f64) -> Self {
        CirParams {
            bandwidth,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelImpulseResponse {
    pub samples: Vec<Complex64>,
    pub sample_interval: f64,
    /// Time of `samples[0]`, s.
    pub start_time: f64,
    pub bandwidth: f64,
    pub carrier_frequency: f64,
    pub source_paths: Vec<PathComponent>,
}

impl ChannelImpulseResponse {
    pub fn time(&self, n: usize) -> f64 {
        self.start_time + n as f64 * self.sample_interval
    }

    /// `Σ|h|² dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.sample_interval
    }

    /// Continuous-time Fourier transform of the sampled record at baseband
    /// frequency `f`, `Σ h[n] exp(−j2π f t_n) dt`.
    pub fn dft(&self, f: f64) -> Complex64 {
        self.samples
            .iter()
            .enumerate()
            .map(|(n, h)| h * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * self.time(n)))
            .sum::<Complex64>()
            * self.sample_interval
    }
}

/// Samples `h(t) = Σ a_k p(t − τ_k)` on `[−w, duration]`, where `w` is the
/// pulse half-width, so a tap at zero delay is fully resolved.
pub fn synthesize_cir(paths: &[PathComponent], params: &CirParams, duration: f64) -> Result<ChannelImpulseResponse> {
    let pulse = Pulse::new(params.pulse, params.bandwidth)?;
    let dt = params.sample_interval;
    if !(dt > 0.0) || dt > 1.0 / (2.0 * params.bandwidth) {
        return Err(Error::invalid(format!(
            "sample interval {dt} s must be in (0, 1/(2B) = {} s]",
            1.0 / (2.0 * params.bandwidth)
        )));
    }
    let hw = pulse.half_width();
    for (i, p) in paths.iter().enumerate() {
        if p.delay < 0.0 {
            return Err(Error::invalid(format!("path {i} has negative delay {}", p.delay)));
        }
        if p.delay + hw > duration {
            return Err(Error::Truncation {
                index: i,
                delay_s: p.delay,
                needed_s: p.delay + hw,
                duration_s: duration,
            });
        }
    }
    let start = -hw;
    let n = ((duration - start) / dt).ceil() as usize + 1;
    let mut samples = vec![Complex64::new(0.0, 0.0); n];
    for p in paths {
        let lo = (((p.delay - hw - start) / dt).floor().max(0.0)) as usize;
        let hi = ((((p.delay + hw - start) / dt).ceil()) as usize).min(n - 1);
        for (k, s) in samples.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let t = start + k as f64 * dt;
            *s += p.amplitude * pulse.value(t - p.delay);
        }
    }
    Ok(ChannelImpulseResponse {
        samples,
        sample_interval: dt,
        start_time: start,
        bandwidth: params.bandwidth,
        carrier_frequency: params.carrier_frequency,
        source_paths: paths.to_vec(),
    })
}

/// Shortest record that holds every path of `paths` for `params`.
pub fn required_duration(paths: &[PathComponent], params: &CirParams) -> f64 {
    let max = paths.iter().map(|p| p.delay).fold(0.0, f64::max);
    max + PULSE_HALF_WIDTH_SYMBOLS / params.bandwidth
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyResponse {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// `H(f) = Σ a_k exp(−j2π f τ_k)` on `grid`, treating amplitudes as
/// frequency independent.
pub fn frequency_response(paths: &[PathComponent], grid: &[f64]) -> FrequencyResponse {
    frequency_response_about(paths, grid, 0.0)
}

/// Passband response for amplitudes referenced at `carrier`:
/// `H(f) = Σ a_k exp(−j2π (f − f_c) τ_k)`, so `H(f_c) = Σ a_k`.
pub fn frequency_response_about(paths: &[PathComponent], grid: &[f64], carrier: f64) -> FrequencyResponse {
    let values = grid
        .iter()
        .map(|&f| {
            paths
                .iter()
                .map(|p| {
                    p.amplitude * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (f - carrier) * p.delay)
                })
                .sum()
        })
        .collect();
    FrequencyResponse {
        grid: grid.to_vec(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{path_delay_stats, sampled_delay_stats, DelayOptions};
    use crate::propagation::total_energy;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn tap(delay: f64, re: f64, im: f64) -> PathComponent {
        PathComponent::tap(delay, Complex64::new(re, im))
    }

    #[test]
    fn rrc_pulse_has_unit_energy() {
        for shape in [
            PulseShape::default(),
            PulseShape::Gaussian,
            PulseShape::RootRaisedCosine { roll_off: 0.0 },
        ] {
            let p = Pulse::new(shape, 5e9).unwrap();
            let dt = 1e-13;
            let hw = p.half_width();
            let e: f64 = (0..=(2.0 * hw / dt) as usize)
                .map(|i| p.value(-hw + i as f64 * dt).powi(2))
                .sum::<f64>()
                * dt;
            assert_relative_eq!(e, 1.0, max_relative = 1e-3);
        }
    }

    #[test]
    fn rrc_handles_singular_points() {
        let b = 0.25;
        let x0 = 1.0 / (4.0 * b);
        let left = rrc(x0 - 1e-6, b);
        let right = rrc(x0 + 1e-6, b);
        assert_relative_eq!(rrc(x0, b), (left + right) / 2.0, max_relative = 1e-4);
        assert_relative_eq!(rrc(0.0, b), rrc(1e-7, b), max_relative = 1e-6);
    }

    #[test]
    fn single_tap_pulse() {
        let cir = synthesize_cir(&[tap(1e-9, 1.0, 0.0)], &CirParams::default(), 3e-9).unwrap();
        assert_relative_eq!(cir.energy(), 1.0, max_relative = 1e-2);
        let peak = (0..cir.samples.len())
            .max_by(|&a, &b| cir.samples[a].norm().total_cmp(&cir.samples[b].norm()))
            .unwrap();
        assert_relative_eq!(cir.time(peak), 1e-9, epsilon = 1e-12);
    }

    #[test]
    fn two_equal_taps_spread() {
        let paths = [tap(0.0, 1.0, 0.0), tap(1e-9, 1.0, 0.0)];
        let cir = synthesize_cir(&paths, &CirParams::default(), 3e-9).unwrap();
        let stats = sampled_delay_stats(&cir, &DelayOptions::unthresholded()).unwrap();
        assert_relative_eq!(stats.rms_delay_spread, 0.5e-9, max_relative = 0.02);
        assert_relative_eq!(stats.mean_delay, 0.5e-9, max_relative = 0.02);
        // each lobe carries half the energy
        let first: f64 = (0..cir.samples.len())
            .filter(|&n| cir.time(n) < 0.5e-9)
            .map(|n| cir.samples[n].norm_sqr() * cir.sample_interval)
            .sum();
        assert_relative_eq!(first, cir.energy() / 2.0, max_relative = 0.02);
    }

    #[test]
    fn truncation_reported() {
        let paths = [tap(0.0, 1.0, 0.0), tap(2e-9, 1.0, 0.0)];
        match synthesize_cir(&paths, &CirParams::default(), 2.5e-9) {
            Err(Error::Truncation { index, .. }) => assert_eq!(index, 1),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn undersampling_rejected() {
        let params = CirParams {
            sample_interval: 2e-10,
            ..CirParams::default()
        };
        assert!(synthesize_cir(&[tap(0.0, 1.0, 0.0)], &params, 2e-9).is_err());
        let params = CirParams {
            bandwidth: 0.0,
            ..CirParams::default()
        };
        assert!(synthesize_cir(&[tap(0.0, 1.0, 0.0)], &params, 2e-9).is_err());
    }

    #[test]
    fn unit_path_flat_response() {
        let grid: Vec<f64> = (1..50).map(|k| k as f64 * 1e9).collect();
        let h = frequency_response(&[tap(0.0, 1.0, 0.0)], &grid);
        assert!(h.values.iter().all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        assert_eq!(h.values.len(), h.grid.len());
    }

    #[test]
    fn delayed_path_linear_phase() {
        let grid = [1.0e9, 1.0e9 + 1e6];
        let h = frequency_response(&[tap(1e-9, 1.0, 0.0)], &grid);
        assert_relative_eq!(h.values[0].norm(), 1.0, epsilon = 1e-14);
        let slope = (h.values[1] / h.values[0]).arg() / 1e6;
        assert_relative_eq!(slope, -2.0 * PI * 1e-9, max_relative = 1e-9);
    }

    #[test]
    fn two_ray_interference_nulls() {
        let paths = [tap(0.0, 1.0, 0.0), tap(1e-9, 1.0, 0.0)];
        let grid: Vec<f64> = (1..400).map(|k| k as f64 * 1e7).collect();
        let h = frequency_response(&paths, &grid);
        for (f, v) in grid.iter().zip(&h.values) {
            assert_relative_eq!(v.norm_sqr(), 2.0 + 2.0 * (2.0 * PI * f * 1e-9).cos(), epsilon = 1e-10);
        }
        for k in 0..3 {
            let f = 0.5e9 + k as f64 * 1e9;
            assert!(frequency_response(&paths, &[f]).values[0].norm() < 1e-12);
        }
    }

    #[test]
    fn passband_response_at_carrier_sums_amplitudes() {
        let paths = [tap(0.3e-9, 0.2, 0.1), tap(0.8e-9, -0.05, 0.3)];
        let h = frequency_response_about(&paths, &[28e9], 28e9);
        assert_relative_eq!(h.values[0].re, 0.15, epsilon = 1e-15);
        assert_relative_eq!(h.values[0].im, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn time_shift_multiplies_response() {
        let paths = vec![tap(0.2e-9, 0.3, -0.2), tap(0.7e-9, 0.1, 0.4), tap(1.9e-9, -0.2, 0.05)];
        let shift = 0.37e-9;
        let shifted: Vec<_> = paths
            .iter()
            .map(|p| PathComponent {
                delay: p.delay + shift,
                ..p.clone()
            })
            .collect();
        let grid: Vec<f64> = (0..40).map(|k| 0.25e9 * k as f64).collect();
        let (a, b) = (frequency_response(&paths, &grid), frequency_response(&shifted, &grid));
        for ((f, x), y) in grid.iter().zip(&a.values).zip(&b.values) {
            let expect = x * Complex64::from_polar(1.0, -2.0 * PI * f * shift);
            assert!((y - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn response_matches_cir_transform_in_band() {
        let paths = vec![tap(0.1e-9, 0.3, -0.2), tap(0.9e-9, 0.1, 0.4), tap(2.1e-9, -0.2, 0.05)];
        let params = CirParams::default();
        let cir = synthesize_cir(&paths, &params, 4e-9).unwrap();
        // flat band of the RRC spectrum: |f| < (1 - β) B / 2, where P(f) = √T
        let sqrt_t = (1.0 / params.bandwidth).sqrt();
        for k in -9..=9 {
            let f = k as f64 * 0.2e9;
            let h = frequency_response(&paths, &[f]).values[0];
            let d = cir.dft(f) / sqrt_t;
            assert!((d - h).norm() <= 0.01 * h.norm().max(0.05), "f = {f}: {d} vs {h}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn parseval_for_resolved_taps(
            taps in prop::collection::vec((0.01f64..1.0, 0.0f64..(2.0 * PI)), 1..12),
            jitter in 0.0f64..0.15e-9,
        ) {
            // taps 2 ns apart never overlap (pulse support is ±0.8 ns)
            let paths: Vec<_> = taps.iter().enumerate()
                .map(|(i, (m, ph))| PathComponent::tap(i as f64 * 2e-9 + jitter, Complex64::from_polar(*m, *ph)))
                .collect();
            let params = CirParams::default();
            let cir = synthesize_cir(&paths, &params, required_duration(&paths, &params)).unwrap();
            let e = total_energy(&paths);
            prop_assert!((cir.energy() - e).abs() <= 0.01 * e);
            let stats = path_delay_stats(&paths, &DelayOptions::unthresholded()).unwrap();
            prop_assert!(stats.rms_delay_spread >= 0.0);
        }
    }
}
