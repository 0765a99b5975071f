//! Spiking network simulation with axonal delays.
//!
//! Each 1 ms tick: collect delayed synaptic input and spontaneous drive,
//! integrate, record threshold crossings at the current tick, reset, and
//! schedule the spikes' arrivals.

mod bursts;
mod calibrate;
mod coba;
mod config;
mod delivery;
mod engine;
mod izhikevich;
mod subset;

pub use bursts::{detect_network_bursts, BurstReport};
pub use calibrate::{calibrate_weight_scale, Calibration, CalibrationSettings, CalibrationTarget};
pub use coba::{CobaNeuron, CobaParams};
pub use config::{NeuronModel, NoiseParams, SimulationConfig, Stimulus};
pub use engine::{simulate, simulate_with, NoObserver, Observer};
pub use izhikevich::{IzhikevichParams, Preset, SPIKE_THRESHOLD_MV};
pub use subset::{select_by_type, select_recording_subset};
