use rand::Rng;

use super::coba::run_coba;
use super::config::{NeuronModel, SimulationConfig};
use super::delivery::{DelayLine, OutEdges};
use super::izhikevich::{step, Coeffs};
use crate::error::{Error, Result};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::spikedata::{SpikeTrainSet, DEFAULT_SAMPLING_RATE_HZ};
use crate::topology::{GroundTruthNetwork, NeuronType};

/// Hooks into the integration loop, used by tests and diagnostics.
pub trait Observer<S> {
    /// Total input of every neuron for `tick`, after noise and synaptic delivery.
    fn on_input(&mut self, _tick: u32, _input: &[S]) {}
    /// A spike of `source` at `tick` scheduled into `target` at `arrival`.
    fn on_schedule(&mut self, _tick: u32, _source: usize, _target: usize, _arrival: u32, _weight: S) {}
    /// State of a neuron right after its reset; `u_before` is the recovery variable before reset.
    fn on_spike(&mut self, _tick: u32, _neuron: usize, _v: S, _u_before: S, _u_after: S) {}
}

pub struct NoObserver;

impl<S> Observer<S> for NoObserver {}

/// Simulate every neuron of `network` and return all N spike trains at 1 kHz.
pub fn simulate(network: &GroundTruthNetwork, config: &SimulationConfig) -> Result<SpikeTrainSet> {
    simulate_with::<f64, _>(network, config, &mut NoObserver)
}

pub fn simulate_with<S: Scalar, O: Observer<S>>(
    network: &GroundTruthNetwork,
    config: &SimulationConfig,
    observer: &mut O,
) -> Result<SpikeTrainSet> {
    config.validate(network.len())?;
    let times = match config.model {
        NeuronModel::Izhikevich {
            excitatory,
            inhibitory,
        } => {
            let coeffs: Vec<Coeffs<S>> = network
                .neuron_types()
                .iter()
                .map(|t| match t {
                    NeuronType::Excitatory => excitatory.params().into(),
                    NeuronType::Inhibitory => inhibitory.params().into(),
                })
                .collect();
            run_izhikevich(network, config, &coeffs, observer)?
        }
        NeuronModel::CobaIf(params) => run_coba::<S, O>(network, config, &params, observer)?,
    };
    SpikeTrainSet::from_times(times, DEFAULT_SAMPLING_RATE_HZ, config.duration_ms)
}

/// Per-tick external input: noise plus scheduled stimuli, added into `input`.
pub(crate) struct Drive {
    rng: crate::rng::SimRng,
    per_tick: u32,
    stimuli: Vec<super::config::Stimulus>,
    next_stimulus: usize,
}

impl Drive {
    pub fn new(config: &SimulationConfig) -> Self {
        let mut stimuli = config.stimuli.clone();
        stimuli.sort_by_key(|s| (s.tick, s.neuron));
        Self {
            rng: stream(config.seed, "simulation-noise", 0),
            per_tick: config.noise.neurons_per_tick,
            stimuli,
            next_stimulus: 0,
        }
    }

    pub fn apply<S: Scalar>(&mut self, tick: u32, noise_amplitude: S, input: &mut [S]) {
        let n = input.len();
        for _ in 0..self.per_tick {
            let j = self.rng.random_range(0..n);
            input[j] += noise_amplitude;
        }
        while let Some(s) = self.stimuli.get(self.next_stimulus) {
            if s.tick != tick {
                break;
            }
            input[s.neuron] += S::of(s.amplitude);
            self.next_stimulus += 1;
        }
    }
}

fn run_izhikevich<S: Scalar, O: Observer<S>>(
    network: &GroundTruthNetwork,
    config: &SimulationConfig,
    coeffs: &[Coeffs<S>],
    observer: &mut O,
) -> Result<Vec<Vec<u32>>> {
    let n = network.len();
    let edges = OutEdges::<S>::new(network);
    let mut line = DelayLine::<S>::new(n);
    let mut drive = Drive::new(config);
    let noise = S::of(config.noise.amplitude);

    let mut v: Vec<S> = coeffs.iter().map(|k| k.c).collect();
    let mut u: Vec<S> = coeffs.iter().map(|k| k.b * k.c).collect();
    let mut input = vec![S::zero(); n];
    let mut fired: Vec<usize> = Vec::new();
    let mut times: Vec<Vec<u32>> = vec![Vec::new(); n];

    for tick in 1..=config.duration_ms {
        line.drain_into(tick, &mut input);
        drive.apply(tick, noise, &mut input);
        observer.on_input(tick, &input);

        fired.clear();
        for i in 0..n {
            let spiked = step(&mut v[i], &mut u[i], input[i], &coeffs[i]);
            if !v[i].is_finite() || !u[i].is_finite() {
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
            let u_before = u[i];
            v[i] = coeffs[i].c;
            u[i] += coeffs[i].d;
            observer.on_spike(tick, i, v[i], u_before, u[i]);
            times[i].push(tick);
            for (j, delay, w) in edges.of(i) {
                line.schedule(tick + delay, j, w);
                observer.on_schedule(tick, i, j, tick + delay, w);
            }
        }
    }
    Ok(times)
}
