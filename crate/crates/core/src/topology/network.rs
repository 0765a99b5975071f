use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_EXCITATORY_WEIGHT: f64 = 10.0;
pub const MIN_INHIBITORY_WEIGHT: f64 = -5.0;
pub const MIN_DELAY_MS: u32 = 1;
pub const MAX_DELAY_MS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NeuronType {
    #[serde(rename = "E")]
    Excitatory,
    #[serde(rename = "I")]
    Inhibitory,
}

impl NeuronType {
    pub fn is_excitatory(self) -> bool {
        self == NeuronType::Excitatory
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologyMeta {
    pub family: String,
    pub params: serde_json::Value,
    pub seed: u64,
}

/// Ground-truth network: weights (row = source, column = target), integer
/// delays in ms on the weight support, and per-neuron types.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruthNetwork {
    weights: Array2<f64>,
    delays: Array2<u32>,
    neuron_types: Vec<NeuronType>,
    pub meta: TopologyMeta,
}

impl GroundTruthNetwork {
    pub fn new(
        weights: Array2<f64>,
        delays: Array2<u32>,
        neuron_types: Vec<NeuronType>,
        meta: TopologyMeta,
    ) -> Result<Self> {
        let net = Self {
            weights,
            delays,
            neuron_types,
            meta,
        };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<()> {
        let n = self.neuron_types.len();
        if self.weights.dim() != (n, n) || self.delays.dim() != (n, n) {
            return Err(Error::format("weights", "matrix shape does not match neuron count"));
        }
        for ((i, j), &w) in self.weights.indexed_iter() {
            let d = self.delays[[i, j]];
            if !w.is_finite() {
                return Err(Error::format("weight", format!("non-finite weight at ({i}, {j})")));
            }
            if w == 0.0 {
                if d != 0 {
                    return Err(Error::format("delay_ms", format!("delay without synapse at ({i}, {j})")));
                }
                continue;
            }
            if i == j {
                return Err(Error::format("edges", format!("self-connection on neuron {}", i + 1)));
            }
            let exc = self.neuron_types[i].is_excitatory();
            if exc && !(w > 0.0 && w <= MAX_EXCITATORY_WEIGHT) {
                return Err(Error::format(
                    "weight",
                    format!("excitatory weight {w} at ({i}, {j}) outside (0, {MAX_EXCITATORY_WEIGHT}]"),
                ));
            }
            if !exc && !(w < 0.0 && w >= MIN_INHIBITORY_WEIGHT) {
                return Err(Error::format(
                    "weight",
                    format!("inhibitory weight {w} at ({i}, {j}) outside [{MIN_INHIBITORY_WEIGHT}, 0)"),
                ));
            }
            if !(MIN_DELAY_MS..=MAX_DELAY_MS).contains(&d) {
                return Err(Error::format("delay_ms", format!("delay {d} at ({i}, {j}) outside [1, 20]")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.neuron_types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neuron_types.is_empty()
    }

    pub fn weights(&self) -> &Array2<f64> {
        &self.weights
    }

    pub fn delays(&self) -> &Array2<u32> {
        &self.delays
    }

    pub fn neuron_types(&self) -> &[NeuronType] {
        &self.neuron_types
    }

    pub fn weight(&self, source: usize, target: usize) -> f64 {
        self.weights[[source, target]]
    }

    pub fn delay(&self, source: usize, target: usize) -> u32 {
        self.delays[[source, target]]
    }

    pub fn edge_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    /// `(source, target, weight, delay)` for every synapse, row-major.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64, u32)> + '_ {
        self.weights
            .indexed_iter()
            .filter(|(_, &w)| w != 0.0)
            .map(|((i, j), &w)| (i, j, w, self.delays[[i, j]]))
    }

    /// Ternary label matrix restricted to `channels`: +1 excitatory, −1 inhibitory, 0 none.
    pub fn sign_matrix(&self, channels: &[usize]) -> Array2<i8> {
        let k = channels.len();
        Array2::from_shape_fn((k, k), |(a, b)| {
            let w = self.weights[[channels[a], channels[b]]];
            if a == b || w == 0.0 {
                0
            } else if w > 0.0 {
                1
            } else {
                -1
            }
        })
    }

    /// Network with every weight multiplied by `factor`, clipped to the weight bounds.
    pub fn rescaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(Error::param("scale", format!("must be positive, got {factor}")));
        }
        let weights = self.weights.mapv(|w| {
            (w * factor).clamp(MIN_INHIBITORY_WEIGHT, MAX_EXCITATORY_WEIGHT)
        });
        Ok(Self {
            weights,
            delays: self.delays.clone(),
            neuron_types: self.neuron_types.clone(),
            meta: self.meta.clone(),
        })
    }

    pub fn to_json(&self) -> NetworkJson {
        NetworkJson {
            neuron_types: self.neuron_types.clone(),
            edges: self
                .edges()
                .map(|(i, j, w, d)| EdgeJson {
                    source: i + 1,
                    target: j + 1,
                    weight: w,
                    delay_ms: d,
                })
                .collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_json(json: NetworkJson) -> Result<Self> {
        let n = json.neuron_types.len();
        let mut weights = Array2::zeros((n, n));
        let mut delays = Array2::zeros((n, n));
        for (idx, e) in json.edges.iter().enumerate() {
            if e.source == 0 || e.source > n || e.target == 0 || e.target > n {
                return Err(Error::format(
                    format!("edges[{idx}]"),
                    format!("index outside 1..={n}"),
                ));
            }
            if e.weight == 0.0 {
                return Err(Error::format(format!("edges[{idx}].weight"), "zero weight"));
            }
            let (i, j) = (e.source - 1, e.target - 1);
            if weights[[i, j]] != 0.0 {
                return Err(Error::format(format!("edges[{idx}]"), "parallel synapse"));
            }
            weights[[i, j]] = e.weight;
            delays[[i, j]] = e.delay_ms;
        }
        Self::new(weights, delays, json.neuron_types, json.meta)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(&self.to_json())?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(serde_json::from_str(&text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub delay_ms: u32,
}

/// On-disk network layout. Indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkJson {
    pub neuron_types: Vec<NeuronType>,
    pub edges: Vec<EdgeJson>,
    pub meta: TopologyMeta,
}
