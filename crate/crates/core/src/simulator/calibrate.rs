use serde::{Deserialize, Serialize};

use super::bursts::detect_network_bursts;
use super::config::SimulationConfig;
use super::engine::simulate;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::topology::{assign_weights_and_delays, ConnectionMask, GroundTruthNetwork, TopologyMeta, WeightParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationTarget {
    pub min_bursts_per_minute: f64,
    pub max_bursts_per_minute: f64,
    pub window_ms: u32,
    pub fraction: f64,
}

impl CalibrationTarget {
    pub fn new(min_bursts_per_minute: f64, max_bursts_per_minute: f64) -> Self {
        Self {
            min_bursts_per_minute,
            max_bursts_per_minute,
            window_ms: 50,
            fraction: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    pub scale_min: f64,
    pub scale_max: f64,
    pub probe_ms: u32,
    pub max_iterations: usize,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            scale_min: 0.05,
            scale_max: 10.0,
            probe_ms: 60_000,
            max_iterations: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Calibration {
    pub scale: f64,
    pub bursts_per_minute: f64,
    pub iterations: usize,
    pub network: GroundTruthNetwork,
}

/// Bisect the weight scale (geometrically) until a probe run of the network
/// produces a burst rate inside the target. The same weight and delay draws
/// (`weight_seed`) are reused at every probe, so only the scale changes.
pub fn calibrate_weight_scale(
    mask: &ConnectionMask,
    base: &WeightParams,
    meta: &TopologyMeta,
    weight_seed: u64,
    simulation: &SimulationConfig,
    target: &CalibrationTarget,
    settings: &CalibrationSettings,
) -> Result<Calibration> {
    if !(target.min_bursts_per_minute <= target.max_bursts_per_minute) || target.max_bursts_per_minute <= 0.0 {
        return Err(Error::param("target", "empty burst-rate range"));
    }
    if mask.edge_count() == 0 {
        return Err(Error::Calibration {
            reason: "network has no synapses, the weight scale has no effect".into(),
        });
    }
    if !(settings.scale_min > 0.0 && settings.scale_min < settings.scale_max) {
        return Err(Error::param("scale_min", "need 0 < scale_min < scale_max"));
    }
    let mut probe = simulation.clone();
    probe.duration_ms = settings.probe_ms;
    let run = |scale: f64| -> Result<(GroundTruthNetwork, f64)> {
        let params = WeightParams { scale, ..*base };
        let net = assign_weights_and_delays(mask, &params, meta.clone(), &mut rng_from_seed(weight_seed))?;
        let spikes = simulate(&net, &probe)?;
        let rate = detect_network_bursts(&spikes, target.window_ms, target.fraction)?.bursts_per_minute;
        log::debug!("calibration probe scale={scale:.4} bursts/min={rate:.2}");
        Ok((net, rate))
    };

    let (mut lo, mut hi) = (settings.scale_min, settings.scale_max);
    let mut last = None;
    for iteration in 1..=settings.max_iterations {
        let mid = (lo * hi).sqrt();
        let (net, rate) = run(mid)?;
        if rate < target.min_bursts_per_minute {
            lo = mid;
        } else if rate > target.max_bursts_per_minute {
            hi = mid;
        } else {
            return Ok(Calibration {
                scale: mid,
                bursts_per_minute: rate,
                iterations: iteration,
                network: net,
            });
        }
        last = Some((mid, rate));
    }
    let (scale, rate) = last.unwrap_or((lo, 0.0));
    Err(Error::Calibration {
        reason: format!(
            "no scale in [{lo:.4}, {hi:.4}] reached {}..{} bursts/min after {} probes (last {scale:.4} → {rate:.2})",
            target.min_bursts_per_minute, target.max_bursts_per_minute, settings.max_iterations
        ),
    })
}
