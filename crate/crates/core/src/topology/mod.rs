//! Ground-truth network construction and degree analysis.

mod degree;
mod generate;
mod mask;
mod network;
mod weights;

pub use degree::{
    degree_statistics, poisson_chi_square, tail_slope, ChiSquareTest, DegreeHistogram, DegreeKind, DegreeStatistics,
    Summary,
};
pub use generate::{excitatory_count, generate_topology, neuron_types, Family, TopologySpec};
pub use mask::{ring_lattice, watts_strogatz, ConnectionMask};
pub use network::{
    EdgeJson, GroundTruthNetwork, NetworkJson, NeuronType, TopologyMeta, MAX_DELAY_MS, MAX_EXCITATORY_WEIGHT,
    MIN_DELAY_MS, MIN_INHIBITORY_WEIGHT,
};
pub use weights::{assign_weights_and_delays, InhibitoryWeights, WeightParams};

use rand::Rng;

use crate::error::Result;

/// Generate a mask for `spec` and attach weights and delays.
pub fn build_network<R: Rng + ?Sized>(
    spec: &TopologySpec,
    weights: &WeightParams,
    seed: u64,
    rng: &mut R,
) -> Result<GroundTruthNetwork> {
    let mask = generate_topology(spec, rng)?;
    let meta = TopologyMeta {
        family: spec.family.name().to_string(),
        params: serde_json::to_value(spec)?,
        seed,
    };
    assign_weights_and_delays(&mask, weights, meta, rng)
}
