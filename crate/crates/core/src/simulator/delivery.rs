use crate::scalar::Scalar;
use crate::topology::{GroundTruthNetwork, MAX_DELAY_MS};

/// Outgoing synapses in compressed-row form.
pub(crate) struct OutEdges<S> {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    delays: Vec<u32>,
    weights: Vec<S>,
}

impl<S: Scalar> OutEdges<S> {
    pub fn new(network: &GroundTruthNetwork) -> Self {
        let n = network.len();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        let mut delays = Vec::new();
        let mut weights = Vec::new();
        offsets.push(0);
        let w = network.weights();
        for i in 0..n {
            for j in 0..n {
                let wij = w[[i, j]];
                if wij != 0.0 {
                    targets.push(j as u32);
                    delays.push(network.delay(i, j));
                    weights.push(S::of(wij));
                }
            }
            offsets.push(targets.len());
        }
        Self {
            offsets,
            targets,
            delays,
            weights,
        }
    }

    pub fn of(&self, source: usize) -> impl Iterator<Item = (usize, u32, S)> + '_ {
        let r = self.offsets[source]..self.offsets[source + 1];
        r.map(move |e| (self.targets[e] as usize, self.delays[e], self.weights[e]))
    }
}

/// Ring buffer of pending synaptic input indexed by arrival tick.
pub(crate) struct DelayLine<S> {
    slots: Vec<Vec<S>>,
}

impl<S: Scalar> DelayLine<S> {
    pub fn new(n: usize) -> Self {
        Self {
            slots: vec![vec![S::zero(); n]; MAX_DELAY_MS as usize + 1],
        }
    }

    #[inline]
    pub fn schedule(&mut self, arrival_tick: u32, target: usize, value: S) {
        let len = self.slots.len() as u32;
        self.slots[(arrival_tick % len) as usize][target] += value;
    }

    /// Move the input arriving at `tick` into `out` and clear the slot.
    pub fn drain_into(&mut self, tick: u32, out: &mut [S]) {
        let len = self.slots.len() as u32;
        let slot = &mut self.slots[(tick % len) as usize];
        for (o, s) in out.iter_mut().zip(slot.iter_mut()) {
            *o = *s;
            *s = S::zero();
        }
    }
}
