//! Channel metrics: power-delay-profile moments, thermal noise, SNR and
//! received power.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelImpulseResponse;
use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};
use crate::propagation::{total_energy, PathComponent};

/// Taps weaker than this (dB below the strongest) are left out of delay
/// statistics by default.
pub const DEFAULT_PDP_THRESHOLD_DB: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayOptions {
    /// Dynamic range kept below the strongest tap, dB. `None` keeps every tap.
    pub threshold_db: Option<f64>,
}

impl Default for DelayOptions {
    fn default() -> Self {
        DelayOptions {
            threshold_db: Some(DEFAULT_PDP_THRESHOLD_DB),
        }
    }
}

impl DelayOptions {
    pub fn unthresholded() -> Self {
        DelayOptions { threshold_db: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayStats {
    /// Energy-weighted mean delay, s.
    pub mean_delay: f64,
    /// Root second central moment of the PDP, s.
    pub rms_delay_spread: f64,
    /// Energy retained after thresholding.
    pub energy: f64,
}

fn weighted_moments(taps: impl Iterator<Item = (f64, f64)> + Clone, opts: &DelayOptions) -> Result<DelayStats> {
    let peak = taps.clone().map(|(_, w)| w).fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::UndefinedMetric(
            "delay statistics of a zero-energy response".into(),
        ));
    }
    let floor = opts.threshold_db.map_or(0.0, |db| peak * 10f64.powf(-db / 10.0));
    let kept = taps.filter(|&(_, w)| w >= floor && w > 0.0);
    let total: f64 = kept.clone().map(|(_, w)| w).sum();
    let mean = kept.clone().map(|(t, w)| w * t).sum::<f64>() / total;
    let var = kept.map(|(t, w)| w * (t - mean) * (t - mean)).sum::<f64>() / total;
    Ok(DelayStats {
        mean_delay: mean,
        rms_delay_spread: var.max(0.0).sqrt(),
        energy: total,
    })
}

/// Exact moments over the discrete path list.
pub fn path_delay_stats(paths: &[PathComponent], opts: &DelayOptions) -> Result<DelayStats> {
    weighted_moments(paths.iter().map(|p| (p.delay, p.power())), opts)
}

/// Moments of `|h(t)|²` over the sampled record (sample sums stand in for
/// the integrals; `dt` cancels).
pub fn sampled_delay_stats(cir: &ChannelImpulseResponse, opts: &DelayOptions) -> Result<DelayStats> {
    let dt = cir.sample_interval;
    let mut s = weighted_moments(
        cir.samples.iter().enumerate().map(|(n, h)| (cir.time(n), h.norm_sqr())),
        opts,
    )?;
    s.energy *= dt;
    Ok(s)
}

/// `τ̄ = ∫|h|²τ dτ / ∫|h|² dτ` with the default PDP threshold.
pub fn mean_delay(cir: &ChannelImpulseResponse) -> Result<f64> {
    Ok(sampled_delay_stats(cir, &DelayOptions::default())?.mean_delay)
}

/// RMS delay spread of the sampled CIR with the default PDP threshold.
pub fn rms_delay_spread(cir: &ChannelImpulseResponse) -> Result<f64> {
    Ok(sampled_delay_stats(cir, &DelayOptions::default())?.rms_delay_spread)
}

/// `1 / DS`, or `None` for a single-tap channel.
pub fn coherence_bandwidth(rms_delay_spread: f64) -> Option<f64> {
    (rms_delay_spread > 0.0).then(|| 1.0 / rms_delay_spread)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    /// `k_B T B`.
    ClassicalKtb,
    /// `h f B / (exp(h f / k_B T) − 1)`.
    PlanckNyquist,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::ClassicalKtb => "classical_ktb",
            NoiseKind::PlanckNyquist => "planck_nyquist",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// Kelvin.
    pub temperature: f64,
    /// Hz.
    pub center_frequency: f64,
}

impl NoiseModel {
    pub fn new(kind: NoiseKind, temperature: f64, center_frequency: f64) -> Result<Self> {
        let m = NoiseModel {
            kind,
            temperature,
            center_frequency,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0) || !self.temperature.is_finite() {
            return Err(Error::invalid(format!(
                "noise temperature {} K must be positive",
                self.temperature
            )));
        }
        if !(self.center_frequency > 0.0) || !self.center_frequency.is_finite() {
            return Err(Error::invalid(format!(
                "noise center frequency {} Hz must be positive",
                self.center_frequency
            )));
        }
        Ok(())
    }

    /// `x = h f_c / (k_B T)`.
    pub fn quantum_ratio(&self) -> f64 {
        PLANCK * self.center_frequency / (BOLTZMANN * self.temperature)
    }

    pub fn label(&self) -> String {
        format!("{}_{}K", self.kind.label(), self.temperature)
    }
}

/// Thermal noise power in `bandwidth`, W.
pub fn noise_power(model: &NoiseModel, bandwidth: f64) -> Result<f64> {
    model.validate()?;
    if !(bandwidth > 0.0) || !bandwidth.is_finite() {
        return Err(Error::invalid(format!("bandwidth {bandwidth} Hz must be positive")));
    }
    Ok(match model.kind {
        NoiseKind::ClassicalKtb => BOLTZMANN * model.temperature * bandwidth,
        NoiseKind::PlanckNyquist => {
            let x = model.quantum_ratio();
            PLANCK * model.center_frequency * bandwidth / x.exp_m1()
        }
    })
}

/// `P_TX ∫|h|² / N` in dB. A zero-energy channel gives `−∞`.
pub fn snr_db(cir_energy: f64, p_tx: f64, model: &NoiseModel, bandwidth: f64) -> Result<f64> {
    if !(cir_energy >= 0.0) {
        return Err(Error::invalid(format!("channel energy {cir_energy} must be >= 0")));
    }
    if !(p_tx > 0.0) {
        return Err(Error::invalid(format!("transmit power {p_tx} W must be positive")));
    }
    let n = noise_power(model, bandwidth)?;
    Ok(10.0 * (p_tx * cir_energy / n).log10())
}

/// `P_RX = P_TX Σ|a_k|²`, W.
pub fn received_power(energy: f64, p_tx: f64) -> Result<f64> {
    if !(p_tx > 0.0) {
        return Err(Error::invalid(format!("transmit power {p_tx} W must be positive")));
    }
    if !(energy >= 0.0) {
        return Err(Error::invalid(format!("channel energy {energy} must be >= 0")));
    }
    Ok(p_tx * energy)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrEntry {
    pub bandwidth: f64,
    pub model: NoiseModel,
    pub snr_db: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMetrics {
    pub mean_delay: f64,
    pub rms_delay_spread: f64,
    /// Received energy for unit transmitted energy, all paths.
    pub received_energy: f64,
    pub coherence_bandwidth_estimate: Option<f64>,
    pub snr: Vec<SnrEntry>,
}

/// Metrics from the discrete path list. Delay statistics honour `opts`;
/// received energy and SNR use every path.
pub fn link_metrics(
    paths: &[PathComponent],
    p_tx: f64,
    bandwidths: &[f64],
    models: &[NoiseModel],
    opts: &DelayOptions,
) -> Result<LinkMetrics> {
    let stats = path_delay_stats(paths, opts)?;
    let energy = total_energy(paths);
    let mut snr = Vec::with_capacity(bandwidths.len() * models.len());
    for &b in bandwidths {
        for m in models {
            snr.push(SnrEntry {
                bandwidth: b,
                model: *m,
                snr_db: snr_db(energy, p_tx, m, b)?,
            });
        }
    }
    Ok(LinkMetrics {
        mean_delay: stats.mean_delay,
        rms_delay_spread: stats.rms_delay_spread,
        received_energy: energy,
        coherence_bandwidth_estimate: coherence_bandwidth(stats.rms_delay_spread),
        snr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{required_duration, synthesize_cir, CirParams};
    use crate::constants::{dbm_to_watts, watts_to_dbm};
    use crate::Complex64;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn taps(list: &[(f64, f64)]) -> Vec<PathComponent> {
        list.iter()
            .map(|&(t, p)| PathComponent::tap(t, Complex64::new(p.sqrt(), 0.0)))
            .collect()
    }

    fn cir(list: &[(f64, f64)]) -> ChannelImpulseResponse {
        let paths = taps(list);
        let params = CirParams::default();
        synthesize_cir(&paths, &params, required_duration(&paths, &params)).unwrap()
    }

    #[test]
    fn discrete_examples() {
        let all = DelayOptions::unthresholded();
        let s = path_delay_stats(&taps(&[(1e-9, 1.0)]), &all).unwrap();
        assert_eq!((s.mean_delay, s.rms_delay_spread), (1e-9, 0.0));
        let s = path_delay_stats(&taps(&[(0.0, 1.0), (1e-9, 1.0)]), &all).unwrap();
        assert_relative_eq!(s.mean_delay, 0.5e-9, max_relative = 1e-15);
        assert_relative_eq!(s.rms_delay_spread, 0.5e-9, max_relative = 1e-15);
        // 0.75·0 + 0.25·2 ns
        let s = path_delay_stats(&taps(&[(0.0, 0.75), (2e-9, 0.25)]), &all).unwrap();
        assert_relative_eq!(s.mean_delay, 0.5e-9, max_relative = 1e-15);
    }

    #[test]
    fn sampled_examples() {
        assert_relative_eq!(mean_delay(&cir(&[(1e-9, 1.0)])).unwrap(), 1e-9, max_relative = 1e-3);
        // pulse self-spread is well below 2% of 0.5 ns
        assert!(rms_delay_spread(&cir(&[(1e-9, 1.0)])).unwrap() < 0.1e-9);
        assert_relative_eq!(
            mean_delay(&cir(&[(0.0, 1.0), (1e-9, 1.0)])).unwrap(),
            0.5e-9,
            max_relative = 0.02
        );
        assert_relative_eq!(
            mean_delay(&cir(&[(0.0, 0.75), (2e-9, 0.25)])).unwrap(),
            0.5e-9,
            max_relative = 0.02
        );
    }

    #[test]
    fn zero_energy_undefined() {
        let p = vec![PathComponent::tap(1e-9, Complex64::new(0.0, 0.0))];
        assert!(matches!(
            path_delay_stats(&p, &DelayOptions::default()),
            Err(Error::UndefinedMetric(_))
        ));
        assert!(matches!(
            path_delay_stats(&[], &DelayOptions::default()),
            Err(Error::UndefinedMetric(_))
        ));
        let c = synthesize_cir(&p, &CirParams::default(), 2e-9).unwrap();
        assert!(mean_delay(&c).is_err());
        assert!(rms_delay_spread(&c).is_err());
    }

    #[test]
    fn threshold_drops_weak_taps() {
        let list = [(0.0, 1.0), (1e-9, 1e-3), (5e-9, 1e-5)];
        let s = path_delay_stats(&taps(&list), &DelayOptions::default()).unwrap();
        let kept = path_delay_stats(&taps(&list[..2]), &DelayOptions::unthresholded()).unwrap();
        assert_eq!(s, kept);
    }

    #[test]
    fn coherence_bandwidth_estimate() {
        assert_relative_eq!(coherence_bandwidth(0.5e-9).unwrap(), 2e9, max_relative = 1e-15);
        assert_eq!(coherence_bandwidth(0.0), None);
    }

    const FC: f64 = 28e9;

    #[test]
    fn classical_noise_at_4k() {
        let m = NoiseModel::new(NoiseKind::ClassicalKtb, 4.0, FC).unwrap();
        let n = noise_power(&m, 1e9).unwrap();
        assert_relative_eq!(n, 1.380649e-23 * 4.0 * 1e9, max_relative = 1e-15);
        assert_relative_eq!(n, 5.5226e-14, max_relative = 1e-4);
        assert_relative_eq!(watts_to_dbm(n), -102.58, epsilon = 0.01);
    }

    #[test]
    fn planck_noise_at_4k() {
        let m = NoiseModel::new(NoiseKind::PlanckNyquist, 4.0, FC).unwrap();
        let x = 6.626_070_15e-34 * 28e9 / (1.380649e-23 * 4.0);
        assert_relative_eq!(m.quantum_ratio(), x, max_relative = 1e-15);
        assert_relative_eq!(x, 0.33595, epsilon = 1e-5);
        let n = noise_power(&m, 1e9).unwrap();
        assert_relative_eq!(n, 4.6465e-14, max_relative = 2e-4);
        assert_relative_eq!(watts_to_dbm(n), -103.33, epsilon = 0.01);
    }

    #[test]
    fn planck_small_x_limit() {
        // x = 1e-6 at 4 K
        let f = 1e-6 * 1.380649e-23 * 4.0 / 6.626_070_15e-34;
        let p = noise_power(&NoiseModel::new(NoiseKind::PlanckNyquist, 4.0, f).unwrap(), 1e9).unwrap();
        let c = noise_power(&NoiseModel::new(NoiseKind::ClassicalKtb, 4.0, f).unwrap(), 1e9).unwrap();
        assert!((p / c - 1.0).abs() < 1e-4);
    }

    #[test]
    fn snr_examples() {
        let planck = NoiseModel::new(NoiseKind::PlanckNyquist, 4.0, FC).unwrap();
        let p_tx = dbm_to_watts(-30.0);
        assert_relative_eq!(snr_db(1.0, p_tx, &planck, 1e9).unwrap(), 73.3, epsilon = 0.1);
        let c4 = NoiseModel::new(NoiseKind::ClassicalKtb, 4.0, FC).unwrap();
        let c300 = NoiseModel::new(NoiseKind::ClassicalKtb, 300.0, FC).unwrap();
        let diff = snr_db(1.0, p_tx, &c4, 1e9).unwrap() - snr_db(1.0, p_tx, &c300, 1e9).unwrap();
        assert_relative_eq!(diff, 10.0 * 75f64.log10(), epsilon = 1e-9);
        assert_relative_eq!(diff, 18.75, epsilon = 0.01);
        assert_eq!(snr_db(0.0, p_tx, &planck, 1e9).unwrap(), f64::NEG_INFINITY);
        assert!(snr_db(1.0, p_tx, &planck, 0.0).is_err());
        assert!(snr_db(1.0, 0.0, &planck, 1e9).is_err());
    }

    #[test]
    fn received_power_examples() {
        assert_eq!(received_power(1.0, 1e-3).unwrap(), 1e-3);
        let lambda = crate::constants::wavelength(FC);
        let e = (lambda / (4.0 * std::f64::consts::PI * 0.1)).powi(2);
        let p = received_power(e, 1e-3).unwrap();
        assert_relative_eq!(watts_to_dbm(p), 0.0 - 41.39, epsilon = 0.01);
        assert!(received_power(1.0, 0.0).is_err());
    }

    #[test]
    fn link_metrics_table() {
        let p = taps(&[(0.0, 1.0), (1e-9, 1.0)]);
        let models = [
            NoiseModel::new(NoiseKind::PlanckNyquist, 4.0, FC).unwrap(),
            NoiseModel::new(NoiseKind::ClassicalKtb, 300.0, FC).unwrap(),
        ];
        let m = link_metrics(&p, 1e-6, &[1e8, 1e9], &models, &DelayOptions::default()).unwrap();
        assert_eq!(m.snr.len(), 4);
        assert_eq!(m.received_energy, 2.0);
        assert_relative_eq!(m.coherence_bandwidth_estimate.unwrap(), 2e9, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn delay_shift_and_scale_invariance(
            list in prop::collection::vec((0.0f64..5e-9, 1e-3f64..1.0), 1..20),
            shift in 0.0f64..3e-9,
            scale in 1e-3f64..1e3,
        ) {
            let all = DelayOptions::unthresholded();
            let base = path_delay_stats(&taps(&list), &all).unwrap();
            let shifted: Vec<_> = list.iter().map(|&(t, p)| (t + shift, p)).collect();
            let s = path_delay_stats(&taps(&shifted), &all).unwrap();
            prop_assert!((s.rms_delay_spread - base.rms_delay_spread).abs() <= 1e-9 * base.rms_delay_spread.max(1e-12));
            prop_assert!((s.mean_delay - base.mean_delay - shift).abs() <= 1e-12 * (base.mean_delay + shift).max(1e-12));
            let scaled: Vec<_> = list.iter().map(|&(t, p)| (t, p * scale)).collect();
            let c = path_delay_stats(&taps(&scaled), &all).unwrap();
            prop_assert!((c.mean_delay - base.mean_delay).abs() <= 1e-12 * base.mean_delay.max(1e-12));
            prop_assert!((c.rms_delay_spread - base.rms_delay_spread).abs() <= 1e-9 * base.rms_delay_spread.max(1e-12));
        }

        #[test]
        fn planck_below_classical(log_t in -2.0f64..3.0, log_f in 8.0f64..12.0) {
            let (t, f) = (10f64.powf(log_t), 10f64.powf(log_f));
            let p = noise_power(&NoiseModel::new(NoiseKind::PlanckNyquist, t, f).unwrap(), 1e9).unwrap();
            let c = noise_power(&NoiseModel::new(NoiseKind::ClassicalKtb, t, f).unwrap(), 1e9).unwrap();
            let x = NoiseModel::new(NoiseKind::PlanckNyquist, t, f).unwrap().quantum_ratio();
            prop_assert!(p < c);
            prop_assert!((p / c - x / x.exp_m1()).abs() <= 1e-12);
        }

        #[test]
        fn snr_monotone(b1 in 1e6f64..1e10, k in 1.01f64..10.0, p in 1e-9f64..1.0) {
            let m = NoiseModel::new(NoiseKind::PlanckNyquist, 4.0, FC).unwrap();
            prop_assert!(snr_db(1e-4, p, &m, b1 * k).unwrap() < snr_db(1e-4, p, &m, b1).unwrap());
            prop_assert!(snr_db(1e-4, p * k, &m, b1).unwrap() > snr_db(1e-4, p, &m, b1).unwrap());
        }
    }
}
