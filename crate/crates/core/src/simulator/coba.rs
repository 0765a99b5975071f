use serde::{Deserialize, Serialize};

use super::config::SimulationConfig;
use super::delivery::{DelayLine, OutEdges};
use super::engine::{Drive, Observer};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::topology::GroundTruthNetwork;

/// Conductance-based integrate-and-fire constants (times in ms, potentials in mV).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CobaParams {
    pub tau: f64,
    pub tau_ex: f64,
    pub tau_inh: f64,
    pub e_ex: f64,
    pub e_inh: f64,
    pub v_rest: f64,
    pub v_threshold: f64,
    pub v_reset: f64,
    /// Conductance added per unit of absolute synaptic weight.
    pub unit_conductance: f64,
}

impl Default for CobaParams {
    fn default() -> Self {
        Self {
            tau: 20.0,
            tau_ex: 5.0,
            tau_inh: 10.0,
            e_ex: 0.0,
            e_inh: -80.0,
            v_rest: -60.0,
            v_threshold: -50.0,
            v_reset: -60.0,
            unit_conductance: 0.02,
        }
    }
}

impl CobaParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("tau", self.tau), ("tau_ex", self.tau_ex), ("tau_inh", self.tau_inh)] {
            if !(value > 0.0) {
                return Err(Error::param(name, "time constants must be positive"));
            }
        }
        if !(self.v_threshold > self.v_rest) {
            return Err(Error::param("v_threshold", "must lie above v_rest"));
        }
        if !(self.unit_conductance >= 0.0) {
            return Err(Error::param("unit_conductance", "must be non-negative"));
        }
        Ok(())
    }
}

/// Single neuron state. Conductances are dimensionless multipliers of the
/// reversal-potential offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CobaNeuron<S> {
    pub v: S,
    pub g_ex: S,
    pub g_inh: S,
}

pub(crate) struct CobaCoeffs<S> {
    dt_over_tau: S,
    decay_ex: S,
    decay_inh: S,
    drive_ex: S,
    drive_inh: S,
    v_rest: S,
    v_threshold: S,
    v_reset: S,
}

impl<S: Scalar> CobaCoeffs<S> {
    pub fn new(p: &CobaParams) -> Self {
        Self {
            dt_over_tau: S::of(1.0 / p.tau),
            decay_ex: S::of((-1.0 / p.tau_ex).exp()),
            decay_inh: S::of((-1.0 / p.tau_inh).exp()),
            drive_ex: S::of(p.e_ex - p.v_rest),
            drive_inh: S::of(p.e_inh - p.v_rest),
            v_rest: S::of(p.v_rest),
            v_threshold: S::of(p.v_threshold),
            v_reset: S::of(p.v_reset),
        }
    }
}

impl<S: Scalar> CobaNeuron<S> {
    pub fn at_rest(p: &CobaParams) -> Self {
        Self {
            v: S::of(p.v_rest),
            g_ex: S::zero(),
            g_inh: S::zero(),
        }
    }

    /// Advance 1 ms with the conductances present at the start of the tick,
    /// then decay them exactly. Returns true on a threshold crossing (already reset).
    pub(crate) fn tick(&mut self, k: &CobaCoeffs<S>) -> bool {
        let dv = (k.v_rest - self.v) + self.g_ex * k.drive_ex + self.g_inh * k.drive_inh;
        self.v += k.dt_over_tau * dv;
        self.g_ex *= k.decay_ex;
        self.g_inh *= k.decay_inh;
        if self.v >= k.v_threshold {
            self.v = k.v_reset;
            true
        } else {
            false
        }
    }
}

pub(crate) fn run_coba<S: Scalar, O: Observer<S>>(
    network: &GroundTruthNetwork,
    config: &SimulationConfig,
    params: &CobaParams,
    observer: &mut O,
) -> Result<Vec<Vec<u32>>> {
    let n = network.len();
    let k = CobaCoeffs::<S>::new(params);
    let unit = S::of(params.unit_conductance);
    let edges = OutEdges::<S>::new(network);
    let mut excitatory = DelayLine::<S>::new(n);
    let mut inhibitory = DelayLine::<S>::new(n);
    let mut drive = Drive::new(config);
    let noise = S::of(config.noise.amplitude);

    let mut neurons = vec![CobaNeuron::<S>::at_rest(params); n];
    let mut ex_in = vec![S::zero(); n];
    let mut inh_in = vec![S::zero(); n];
    let mut fired = Vec::new();
    let mut times: Vec<Vec<u32>> = vec![Vec::new(); n];

    for tick in 1..=config.duration_ms {
        excitatory.drain_into(tick, &mut ex_in);
        inhibitory.drain_into(tick, &mut inh_in);
        drive.apply(tick, noise, &mut ex_in);
        observer.on_input(tick, &ex_in);
        fired.clear();
        for i in 0..n {
            let cell = &mut neurons[i];
            cell.g_ex += ex_in[i] * unit;
            cell.g_inh += inh_in[i] * unit;
            let spiked = cell.tick(&k);
            if !cell.v.is_finite() {
                return Err(Error::Simulation {
                    tick: tick as u64,
                    reason: format!("non-finite state in neuron {}", i + 1),
                });
            }
            if spiked {
                fired.push(i);
            }
        }
        for &i in &fired {
            observer.on_spike(tick, i, neurons[i].v, S::zero(), S::zero());
            times[i].push(tick);
            for (j, delay, w) in edges.of(i) {
                if w > S::zero() {
                    excitatory.schedule(tick + delay, j, w);
                } else {
                    inhibitory.schedule(tick + delay, j, -w);
                }
                observer.on_schedule(tick, i, j, tick + delay, w);
            }
        }
    }
    Ok(times)
}
