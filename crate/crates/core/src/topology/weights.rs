use ndarray::Array2;
use rand::Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use super::generate::neuron_types;
use super::mask::ConnectionMask;
use super::network::{
    GroundTruthNetwork, NeuronType, TopologyMeta, MAX_DELAY_MS, MAX_EXCITATORY_WEIGHT, MIN_DELAY_MS,
    MIN_INHIBITORY_WEIGHT,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InhibitoryWeights {
    /// Every inhibitory synapse at the lower bound.
    Constant,
    /// Negated log-normal draw with the excitatory parameters, clipped at the bound.
    LogNormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WeightParams {
    /// Multiplier applied to log-normal excitatory draws.
    pub scale: f64,
    pub mu_log: f64,
    pub sigma_log: f64,
    pub inhibitory: InhibitoryWeights,
}

impl Default for WeightParams {
    fn default() -> Self {
        Self {
            scale: 1.0,
            mu_log: 0.0,
            sigma_log: 1.0,
            inhibitory: InhibitoryWeights::Constant,
        }
    }
}

impl WeightParams {
    pub fn with_scale(scale: f64) -> Self {
        Self {
            scale,
            ..Self::default()
        }
    }
}

/// Attach weights and delays to a mask. Neuron types follow index blocks,
/// the first 4N/5 neurons excitatory.
pub fn assign_weights_and_delays<R: Rng + ?Sized>(
    mask: &ConnectionMask,
    params: &WeightParams,
    meta: TopologyMeta,
    rng: &mut R,
) -> Result<GroundTruthNetwork> {
    if !(params.scale > 0.0 && params.scale.is_finite()) {
        return Err(Error::param("scale", format!("must be positive, got {}", params.scale)));
    }
    if mask.has_self_loops() {
        return Err(Error::param("mask", "self-connections are not allowed"));
    }
    let lognormal = LogNormal::new(params.mu_log, params.sigma_log)
        .map_err(|e| Error::param("sigma_log", e.to_string()))?;
    let n = mask.len();
    let types = neuron_types(n);
    let mut weights = Array2::zeros((n, n));
    let mut delays = Array2::zeros((n, n));
    for (i, j) in mask.edges() {
        let w = match types[i] {
            NeuronType::Excitatory => {
                let w: f64 = lognormal.sample(rng) * params.scale;
                w.min(MAX_EXCITATORY_WEIGHT).max(f64::MIN_POSITIVE)
            }
            NeuronType::Inhibitory => match params.inhibitory {
                InhibitoryWeights::Constant => MIN_INHIBITORY_WEIGHT,
                InhibitoryWeights::LogNormal => {
                    let w: f64 = lognormal.sample(rng) * params.scale;
                    -w.min(-MIN_INHIBITORY_WEIGHT).max(f64::MIN_POSITIVE)
                }
            },
        };
        weights[[i, j]] = w;
        delays[[i, j]] = rng.random_range(MIN_DELAY_MS..=MAX_DELAY_MS);
    }
    GroundTruthNetwork::new(weights, delays, types, meta)
}
