//! Pairwise connectivity estimators: correlograms, coincidence index,
//! delayed mutual information and transfer entropy.

mod cdhote;
mod ci;
mod correlogram;
mod delay;
mod estimate;
mod information;
pub(crate) mod matrix;

pub use cdhote::{cdhote, CdhotePoint};
pub use ci::{coincidence_index, CoincidenceIndex};
pub use correlogram::{correlogram_stack, cross_correlogram, CoincidenceCounts, Normalization};
pub use delay::{DelayFunction, DelayStack};
pub use estimate::{estimate_cm, estimate_cms, EstimatorSpec, PairEstimator};
pub use information::{delayed_mutual_information, delayed_transfer_entropy, mutual_information_stack, transfer_entropy_stack, TeParams};
pub use matrix::{ConnectivityMatrix, Method};
