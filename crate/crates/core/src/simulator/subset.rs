use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::topology::{GroundTruthNetwork, NeuronType};

/// Choose `k` recorded channels: `4k/5` excitatory and `k/5` inhibitory,
/// uniformly within each type. Returned indices are sorted ascending.
pub fn select_recording_subset<R: Rng + ?Sized>(
    network: &GroundTruthNetwork,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    select_by_type(network.neuron_types(), k, rng)
}

pub fn select_by_type<R: Rng + ?Sized>(types: &[NeuronType], k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k == 0 || k % 5 != 0 {
        return Err(Error::param("subset_size", format!("{k} is not a positive multiple of 5")));
    }
    let exc: Vec<usize> = (0..types.len()).filter(|&i| types[i].is_excitatory()).collect();
    let inh: Vec<usize> = (0..types.len()).filter(|&i| !types[i].is_excitatory()).collect();
    let (k_exc, k_inh) = (k * 4 / 5, k / 5);
    if k_exc > exc.len() || k_inh > inh.len() {
        return Err(Error::param(
            "subset_size",
            format!("need {k_exc} excitatory and {k_inh} inhibitory neurons, network has {} and {}", exc.len(), inh.len()),
        ));
    }
    let mut chosen: Vec<usize> = sample(rng, exc.len(), k_exc).into_iter().map(|i| exc[i]).collect();
    chosen.extend(sample(rng, inh.len(), k_inh).into_iter().map(|i| inh[i]));
    chosen.sort_unstable();
    Ok(chosen)
}
