use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::delay::{DelayFunction, DelayStack};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spikedata::BinaryRaster;

/// Normalizer applied to lagged coincidence counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Plain coincidence count.
    Raw,
    /// Count divided by the geometric mean of the spike counts (NCCH).
    Geometric,
    /// Mean-subtracted product divided by `σx·σy·N` (NCC).
    #[default]
    Zscore,
    /// Like `Zscore` without subtracting the means.
    ZscoreNoMean,
}

/// `#{t : x_source(t) = 1 and x_target(t + lag) = 1}` for every ordered
/// channel pair and `lag ∈ [0, max_lag]`.
#[derive(Debug, Clone)]
pub struct CoincidenceCounts {
    k: usize,
    max_lag: usize,
    counts: Vec<u32>,
}

impl CoincidenceCounts {
    /// One sweep over the raster: every source event is matched against the
    /// channels firing in the following `max_lag` bins.
    pub fn compute(raster: &BinaryRaster, max_lag: usize) -> Self {
        let k = raster.channel_count();
        let len = raster.len();
        let lags = max_lag + 1;

        // channels firing in each bin, CSR layout
        let mut offsets = vec![0u32; len + 1];
        for ch in 0..k {
            for &t in raster.events(ch) {
                offsets[t as usize + 1] += 1;
            }
        }
        for t in 0..len {
            offsets[t + 1] += offsets[t];
        }
        let mut fill = offsets.clone();
        let mut fired = vec![0u32; offsets[len] as usize];
        for ch in 0..k {
            for &t in raster.events(ch) {
                fired[fill[t as usize] as usize] = ch as u32;
                fill[t as usize] += 1;
            }
        }

        let mut counts = vec![0u32; k * k * lags];
        counts.par_chunks_mut((k * lags).max(1)).enumerate().for_each(|(src, row)| {
            for &t in raster.events(src) {
                let t = t as usize;
                for lag in 0..lags.min(len - t) {
                    let tt = t + lag;
                    for &ch in &fired[offsets[tt] as usize..offsets[tt + 1] as usize] {
                        row[ch as usize * lags + lag] += 1;
                    }
                }
            }
        });
        Self { k, max_lag, counts }
    }

    pub fn channel_count(&self) -> usize {
        self.k
    }

    pub fn max_lag(&self) -> usize {
        self.max_lag
    }

    #[inline]
    pub fn get(&self, source: usize, target: usize, lag: usize) -> u32 {
        self.counts[(source * self.k + target) * (self.max_lag + 1) + lag]
    }

    /// Count at a signed delay; negative delays read the reverse pair.
    #[inline]
    pub fn at(&self, source: usize, target: usize, delay: i32) -> u32 {
        if delay >= 0 {
            self.get(source, target, delay as usize)
        } else {
            self.get(target, source, delay.unsigned_abs() as usize)
        }
    }
}

/// Normalized correlogram value for `lead → lagging` at a non-negative lag.
/// Every signed-delay value is routed through here so that
/// `NCC_XY(d)` and `NCC_YX(-d)` are the same floating-point computation.
fn canonical_value(raster: &BinaryRaster, lead: usize, lagging: usize, lag: usize, count: u32, norm: Normalization) -> (f64, bool) {
    let n_total = raster.len() as f64;
    let c = count as f64;
    let nx = raster.spike_count(lead) as f64;
    let ny = raster.spike_count(lagging) as f64;
    match norm {
        Normalization::Raw => (c, false),
        Normalization::Geometric => {
            let g = (nx * ny).sqrt();
            if g > 0.0 {
                (c / g, false)
            } else {
                (0.0, true)
            }
        }
        Normalization::Zscore | Normalization::ZscoreNoMean => {
            let sd = |n: f64| {
                let p = n / n_total;
                (p * (1.0 - p)).sqrt()
            };
            let den = (sd(nx) * sd(ny)) * n_total;
            if den <= 0.0 {
                return (0.0, true);
            }
            if norm == Normalization::ZscoreNoMean {
                return (c / den, false);
            }
            let len = raster.len();
            let xbar = nx / n_total;
            let ybar = ny / n_total;
            let sx = raster.count_in(lead, 0, len - lag) as f64;
            let sy = raster.count_in(lagging, lag, len) as f64;
            let overlap = (len - lag) as f64;
            let num = c - (ybar * sx + xbar * sy) + overlap * (xbar * ybar);
            (num / den, false)
        }
    }
}

fn signed_value(raster: &BinaryRaster, source: usize, target: usize, delay: i32, count: u32, norm: Normalization) -> (f64, bool) {
    if delay >= 0 {
        canonical_value(raster, source, target, delay as usize, count, norm)
    } else {
        canonical_value(raster, target, source, delay.unsigned_abs() as usize, count, norm)
    }
}

pub(crate) fn check_range(raster: &BinaryRaster, d_lo: i32, d_hi: i32) -> Result<()> {
    if d_lo > d_hi {
        return Err(Error::param("delay range", format!("d_min {d_lo} exceeds d_max {d_hi}")));
    }
    let widest = d_lo.unsigned_abs().max(d_hi.unsigned_abs()) as usize;
    if widest >= raster.len() {
        return Err(Error::param(
            "delay range",
            format!("|delay| {widest} leaves no overlap in {} bins", raster.len()),
        ));
    }
    Ok(())
}

/// Direct lagged coincidence count of one pair.
pub(crate) fn pair_count(raster: &BinaryRaster, source: usize, target: usize, delay: i32) -> u32 {
    let (lead, lagging, lag) = if delay >= 0 {
        (source, target, delay as usize)
    } else {
        (target, source, delay.unsigned_abs() as usize)
    };
    let len = raster.len();
    raster
        .events(lead)
        .iter()
        .map(|&t| t as usize + lag)
        .take_while(|&t| t < len)
        .filter(|&t| raster.bit(lagging, t))
        .count() as u32
}

/// Correlogram of `source → target` over `[d_lo, d_hi]` (positive delay: target lags).
pub fn cross_correlogram<S: Scalar>(
    raster: &BinaryRaster,
    source: usize,
    target: usize,
    d_lo: i32,
    d_hi: i32,
    norm: Normalization,
) -> Result<DelayFunction<S>> {
    check_range(raster, d_lo, d_hi)?;
    let mut degenerate = false;
    let values = (d_lo..=d_hi)
        .map(|d| {
            let (v, flag) = signed_value(raster, source, target, d, pair_count(raster, source, target, d), norm);
            degenerate |= flag;
            S::of(v)
        })
        .collect();
    let mut f = DelayFunction::new(source, target, d_lo, values)?;
    f.degenerate = degenerate;
    Ok(f)
}

/// Correlograms of every ordered pair on one delay grid.
pub fn correlogram_stack<S: Scalar>(raster: &BinaryRaster, d_lo: i32, d_hi: i32, norm: Normalization) -> Result<DelayStack<S>> {
    check_range(raster, d_lo, d_hi)?;
    let max_lag = d_lo.unsigned_abs().max(d_hi.unsigned_abs()) as usize;
    let counts = CoincidenceCounts::compute(raster, max_lag);
    Ok(stack_from_counts(raster, &counts, d_lo, d_hi, norm))
}

pub(crate) fn stack_from_counts<S: Scalar>(
    raster: &BinaryRaster,
    counts: &CoincidenceCounts,
    d_lo: i32,
    d_hi: i32,
    norm: Normalization,
) -> DelayStack<S> {
    let k = raster.channel_count();
    let mut stack = DelayStack::zeros(k, d_lo, d_hi, silent_channels(raster));
    stack.fill_pairs(|src, tgt, out| {
        for (slot, d) in out.iter_mut().zip(d_lo..=d_hi) {
            *slot = S::of(signed_value(raster, src, tgt, d, counts.at(src, tgt, d), norm).0);
        }
    });
    stack
}

/// Channels with zero variance: no spikes, or a spike in every bin.
pub(crate) fn silent_channels(raster: &BinaryRaster) -> Vec<bool> {
    (0..raster.channel_count())
        .map(|ch| raster.spike_count(ch) == 0 || raster.spike_count(ch) == raster.len())
        .collect()
}
