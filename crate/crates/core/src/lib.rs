//! Ground-truth spiking network simulation and connectivity estimation from
//! spike trains.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix them to `f64`.

pub mod analysis;
pub mod error;
pub mod estimators;
pub mod inference;
pub mod rng;
pub mod scalar;
pub mod spikedata;
pub mod simulator;
pub mod topology;
pub mod tspe;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Connectivity matrix with `f64` values.
pub type ConnectivityMatrix = estimators::ConnectivityMatrix<f64>;
pub type DelayFunction = estimators::DelayFunction<f64>;
pub type DelayStack = estimators::DelayStack<f64>;
pub type PairEstimator = estimators::PairEstimator<f64>;
pub type TspeKernel = tspe::TspeKernel<f64>;
pub type TspeResult = tspe::TspeResult<f64>;
