use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default time base: one sample per millisecond.
pub const DEFAULT_SAMPLING_RATE_HZ: f64 = 1000.0;

/// Spike times of one recorded unit, in integer samples starting at 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpikeTrain {
    pub channel_id: u32,
    times: Vec<u32>,
}

impl SpikeTrain {
    /// Builds a train, rejecting unsorted or duplicated samples and sample 0.
    pub fn new(channel_id: u32, times: Vec<u32>) -> Result<Self> {
        if let Some(&first) = times.first() {
            if first == 0 {
                return Err(Error::format(
                    format!("trains[{channel_id}]"),
                    "spike times start at sample 1",
                ));
            }
        }
        if let Some(pos) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::format(
                format!("trains[{channel_id}]"),
                format!(
                    "times must be strictly increasing (sample {} follows {})",
                    times[pos + 1],
                    times[pos]
                ),
            ));
        }
        Ok(Self { channel_id, times })
    }

    /// Sorts and deduplicates before validating.
    pub fn from_unsorted(channel_id: u32, mut times: Vec<u32>) -> Result<Self> {
        times.sort_unstable();
        times.dedup();
        Self::new(channel_id, times)
    }

    pub fn empty(channel_id: u32) -> Self {
        Self {
            channel_id,
            times: Vec::new(),
        }
    }

    pub fn times(&self) -> &[u32] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> Option<u32> {
        self.times.last().copied()
    }

    /// Number of spikes with `start <= t <= end`.
    pub fn count_between(&self, start: u32, end: u32) -> usize {
        if end < start {
            return 0;
        }
        let lo = self.times.partition_point(|&t| t < start);
        let hi = self.times.partition_point(|&t| t <= end);
        hi - lo
    }
}

/// All recorded channels of one experiment or simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeTrainSet {
    trains: Vec<SpikeTrain>,
    sampling_rate_hz: f64,
    duration_samples: u32,
}

impl SpikeTrainSet {
    pub fn new(trains: Vec<SpikeTrain>, sampling_rate_hz: f64, duration_samples: u32) -> Result<Self> {
        if !(sampling_rate_hz.is_finite() && sampling_rate_hz > 0.0) {
            return Err(Error::format(
                "sampling_rate_hz",
                format!("must be positive, got {sampling_rate_hz}"),
            ));
        }
        if duration_samples == 0 {
            return Err(Error::format("duration_samples", "must be positive"));
        }
        for (i, train) in trains.iter().enumerate() {
            if train.channel_id as usize != i + 1 {
                return Err(Error::format(
                    format!("trains[{}].channel_id", i + 1),
                    format!("expected channel id {}, found {}", i + 1, train.channel_id),
                ));
            }
            if let Some(last) = train.last() {
                if last > duration_samples {
                    return Err(Error::format(
                        format!("trains[{}]", i + 1),
                        format!("spike at sample {last} exceeds duration {duration_samples}"),
                    ));
                }
            }
        }
        Ok(Self {
            trains,
            sampling_rate_hz,
            duration_samples,
        })
    }

    /// Builds a set from raw per-channel sample lists (channel ids assigned 1..K).
    pub fn from_times(
        times: Vec<Vec<u32>>,
        sampling_rate_hz: f64,
        duration_samples: u32,
    ) -> Result<Self> {
        let trains = times
            .into_iter()
            .enumerate()
            .map(|(i, t)| SpikeTrain::new(i as u32 + 1, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(trains, sampling_rate_hz, duration_samples)
    }

    pub fn trains(&self) -> &[SpikeTrain] {
        &self.trains
    }

    pub fn train(&self, index: usize) -> &SpikeTrain {
        &self.trains[index]
    }

    pub fn channel_count(&self) -> usize {
        self.trains.len()
    }

    pub fn sampling_rate_hz(&self) -> f64 {
        self.sampling_rate_hz
    }

    pub fn duration_samples(&self) -> u32 {
        self.duration_samples
    }

    pub fn duration_seconds(&self) -> f64 {
        self.duration_samples as f64 / self.sampling_rate_hz
    }

    pub fn total_spikes(&self) -> usize {
        self.trains.iter().map(SpikeTrain::len).sum()
    }

    /// Keeps the channels at `indices` (0-based), relabelled 1..k in that order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut trains = Vec::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            let src = self.trains.get(i).ok_or_else(|| {
                Error::param("indices", format!("channel index {i} out of range"))
            })?;
            trains.push(SpikeTrain {
                channel_id: k as u32 + 1,
                times: src.times.clone(),
            });
        }
        Self::new(trains, self.sampling_rate_hz, self.duration_samples)
    }

    /// First `duration_samples` samples of the recording.
    pub fn truncate(&self, duration_samples: u32) -> Result<Self> {
        if duration_samples == 0 || duration_samples > self.duration_samples {
            return Err(Error::param(
                "duration_samples",
                format!(
                    "must lie in [1, {}], got {duration_samples}",
                    self.duration_samples
                ),
            ));
        }
        let trains = self
            .trains
            .iter()
            .map(|t| SpikeTrain {
                channel_id: t.channel_id,
                times: t
                    .times
                    .iter()
                    .copied()
                    .take_while(|&s| s <= duration_samples)
                    .collect(),
            })
            .collect();
        Self::new(trains, self.sampling_rate_hz, duration_samples)
    }

    /// Replaces every train, keeping rate and duration.
    pub fn with_trains(&self, trains: Vec<SpikeTrain>) -> Result<Self> {
        Self::new(trains, self.sampling_rate_hz, self.duration_samples)
    }
}

/// Mean firing rate in Hz of the spikes with `t_start <= t <= t_end`.
pub fn mean_firing_rate(
    train: &SpikeTrain,
    t_start: u32,
    t_end: u32,
    sampling_rate_hz: f64,
) -> Result<f64> {
    if t_end <= t_start {
        return Err(Error::param(
            "t_end",
            format!("interval [{t_start}, {t_end}] is empty"),
        ));
    }
    if !(sampling_rate_hz > 0.0) {
        return Err(Error::param("sampling_rate_hz", "must be positive"));
    }
    let seconds = (t_end - t_start) as f64 / sampling_rate_hz;
    Ok(train.count_between(t_start, t_end) as f64 / seconds)
}
