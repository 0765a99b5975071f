use serde::{Deserialize, Serialize};

use super::coba::CobaParams;
use super::izhikevich::Preset;
use crate::error::{Error, Result};

/// Spontaneous drive: each tick, `neurons_per_tick` uniformly chosen neurons
/// (with replacement) receive `amplitude` of extra input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub neurons_per_tick: u32,
    pub amplitude: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            neurons_per_tick: 1,
            amplitude: 20.0,
        }
    }
}

impl NoiseParams {
    pub fn off() -> Self {
        Self {
            neurons_per_tick: 0,
            amplitude: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NeuronModel {
    Izhikevich { excitatory: Preset, inhibitory: Preset },
    CobaIf(CobaParams),
}

impl Default for NeuronModel {
    fn default() -> Self {
        NeuronModel::Izhikevich {
            excitatory: Preset::Rs,
            inhibitory: Preset::Fs,
        }
    }
}

/// Extra input injected into one neuron at one tick (1-based, like spike times).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stimulus {
    pub tick: u32,
    pub neuron: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub duration_ms: u32,
    #[serde(default)]
    pub noise: NoiseParams,
    #[serde(default)]
    pub model: NeuronModel,
    #[serde(default = "default_subset")]
    pub subset_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub stimuli: Vec<Stimulus>,
}

fn default_subset() -> usize {
    100
}

impl SimulationConfig {
    pub fn new(duration_ms: u32, seed: u64) -> Self {
        Self {
            duration_ms,
            noise: NoiseParams::default(),
            model: NeuronModel::default(),
            subset_size: default_subset(),
            seed,
            stimuli: Vec::new(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.duration_ms == 0 {
            return Err(Error::param("duration_ms", "must be positive"));
        }
        if !self.noise.amplitude.is_finite() {
            return Err(Error::param("noise.amplitude", "must be finite"));
        }
        if self.subset_size > n {
            return Err(Error::param("subset_size", format!("exceeds network size {n}")));
        }
        for s in &self.stimuli {
            if s.neuron >= n || s.tick == 0 || s.tick > self.duration_ms || !s.amplitude.is_finite() {
                return Err(Error::param("stimuli", format!("stimulus {s:?} outside the run")));
            }
        }
        if let NeuronModel::CobaIf(p) = &self.model {
            p.validate()?;
        }
        Ok(())
    }
}
