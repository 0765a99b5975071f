use rand::Rng;

use super::train::{SpikeTrain, SpikeTrainSet};
use crate::error::Result;

const MAX_REDRAWS: usize = 100;

/// Surrogate train: each spike moved by an independent uniform integer offset
/// in `[-window/2, window/2]`, clipped to `[1, duration]`.
///
/// Spike count is conserved. A spike landing on an occupied sample is
/// re-drawn up to 100 times, then moved to the nearest free sample.
pub fn dither_spike_train<R: Rng + ?Sized>(
    train: &SpikeTrain,
    window: u32,
    duration: u32,
    rng: &mut R,
) -> SpikeTrain {
    let half = (window / 2) as i64;
    if half == 0 || train.is_empty() {
        return train.clone();
    }
    let input = train.times();
    let mut output: Vec<u32> = Vec::with_capacity(input.len());
    let lo = 1i64;
    let hi = duration as i64;

    // Two outputs can only collide if their inputs are within 2*half samples.
    let collides = |output: &[u32], i: usize, candidate: u32, reach: i64| {
        let mut j = i;
        while j > 0 {
            j -= 1;
            if input[i] as i64 - input[j] as i64 > reach {
                break;
            }
            if output[j] == candidate {
                return true;
            }
        }
        false
    };

    for (i, &t) in input.iter().enumerate() {
        let mut placed = None;
        for _ in 0..MAX_REDRAWS {
            let offset = rng.random_range(-half..=half);
            let candidate = (t as i64 + offset).clamp(lo, hi) as u32;
            if !collides(&output, i, candidate, 2 * half) {
                placed = Some(candidate);
                break;
            }
        }
        let candidate = placed.unwrap_or_else(|| {
            // Nearest free sample; at least one exists because count <= duration.
            let mut dist = 0i64;
            loop {
                for c in [t as i64 - dist, t as i64 + dist] {
                    if c >= lo && c <= hi && !collides(&output, i, c as u32, 2 * half + dist + 1) {
                        return c as u32;
                    }
                }
                dist += 1;
            }
        });
        output.push(candidate);
    }
    output.sort_unstable();
    SpikeTrain::new(train.channel_id, output).expect("dithered spikes are distinct and in range")
}

/// Dithers every train of a set with one generator, in channel order.
pub fn dither_set<R: Rng + ?Sized>(
    set: &SpikeTrainSet,
    window: u32,
    rng: &mut R,
) -> Result<SpikeTrainSet> {
    let duration = set.duration_samples();
    let trains = set
        .trains()
        .iter()
        .map(|t| dither_spike_train(t, window, duration, rng))
        .collect();
    set.with_trains(trains)
}
