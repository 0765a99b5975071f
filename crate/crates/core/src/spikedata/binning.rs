use serde::{Deserialize, Serialize};

use super::train::SpikeTrainSet;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinMode {
    /// Presence or absence of at least one spike per bin.
    Binary,
    /// Spike count per bin.
    Multistage,
}

/// Channel × bin count matrix, stored sparsely as `(bin, count)` runs per channel.
///
/// Bin `b` (0-based here) covers samples `[b*bin_size + 1, (b+1)*bin_size]`;
/// a trailing partial bin is kept.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedMatrix {
    rows: Vec<Vec<(u32, u32)>>,
    bin_count: usize,
    bin_size: u32,
    mode: BinMode,
}

impl BinnedMatrix {
    pub fn channel_count(&self) -> usize {
        self.rows.len()
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn bin_size(&self) -> u32 {
        self.bin_size
    }

    pub fn mode(&self) -> BinMode {
        self.mode
    }

    /// Non-zero `(bin, count)` entries of one channel, ascending by bin.
    pub fn sparse_row(&self, channel: usize) -> &[(u32, u32)] {
        &self.rows[channel]
    }

    pub fn dense_row(&self, channel: usize) -> Vec<u32> {
        let mut row = vec![0; self.bin_count];
        for &(b, c) in &self.rows[channel] {
            row[b as usize] = c;
        }
        row
    }

    pub fn get(&self, channel: usize, bin: usize) -> u32 {
        let row = &self.rows[channel];
        match row.binary_search_by_key(&(bin as u32), |&(b, _)| b) {
            Ok(i) => row[i].1,
            Err(_) => 0,
        }
    }

    pub fn row_sum(&self, channel: usize) -> u64 {
        self.rows[channel].iter().map(|&(_, c)| c as u64).sum()
    }

    /// Element-wise clamp of counts to {0, 1}.
    pub fn to_binary(&self) -> BinnedMatrix {
        BinnedMatrix {
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(b, _)| (b, 1)).collect())
                .collect(),
            bin_count: self.bin_count,
            bin_size: self.bin_size,
            mode: BinMode::Binary,
        }
    }
}

pub fn bin_spike_trains(set: &SpikeTrainSet, bin_size: u32, mode: BinMode) -> Result<BinnedMatrix> {
    let duration = set.duration_samples();
    if bin_size == 0 || bin_size > duration {
        return Err(Error::param(
            "bin_size",
            format!("must lie in [1, {duration}], got {bin_size}"),
        ));
    }
    let bin_count = duration.div_ceil(bin_size) as usize;
    let rows = set
        .trains()
        .iter()
        .map(|train| {
            let mut row: Vec<(u32, u32)> = Vec::with_capacity(train.len());
            for &t in train.times() {
                let b = (t - 1) / bin_size;
                match row.last_mut() {
                    Some((last, count)) if *last == b => {
                        if mode == BinMode::Multistage {
                            *count += 1;
                        }
                    }
                    _ => row.push((b, 1)),
                }
            }
            row
        })
        .collect();
    Ok(BinnedMatrix {
        rows,
        bin_count,
        bin_size,
        mode,
    })
}

/// Binary bins as packed bitsets plus event lists, for the pairwise kernels.
#[derive(Debug, Clone)]
pub struct BinaryRaster {
    len: usize,
    bits: Vec<Vec<u64>>,
    events: Vec<Vec<u32>>,
}

impl BinaryRaster {
    pub fn from_binned(binned: &BinnedMatrix) -> Self {
        let len = binned.bin_count();
        let words = len.div_ceil(64);
        let mut bits = Vec::with_capacity(binned.channel_count());
        let mut events = Vec::with_capacity(binned.channel_count());
        for ch in 0..binned.channel_count() {
            let mut w = vec![0u64; words];
            let ev: Vec<u32> = binned.sparse_row(ch).iter().map(|&(b, _)| b).collect();
            for &b in &ev {
                w[b as usize / 64] |= 1u64 << (b % 64);
            }
            bits.push(w);
            events.push(ev);
        }
        Self { len, bits, events }
    }

    /// Binary raster of a spike set with the given bin size.
    pub fn from_set(set: &SpikeTrainSet, bin_size: u32) -> Result<Self> {
        Ok(Self::from_binned(&bin_spike_trains(set, bin_size, BinMode::Binary)?))
    }

    /// Raster from explicit 0/1 rows (test fixtures and small examples).
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let len = rows.first().map_or(0, Vec::len);
        let words = len.div_ceil(64);
        let mut bits = Vec::with_capacity(rows.len());
        let mut events = Vec::with_capacity(rows.len());
        for row in rows {
            assert_eq!(row.len(), len, "rows must share one length");
            let mut w = vec![0u64; words];
            let mut ev = Vec::new();
            for (i, &v) in row.iter().enumerate() {
                if v != 0 {
                    w[i / 64] |= 1u64 << (i % 64);
                    ev.push(i as u32);
                }
            }
            bits.push(w);
            events.push(ev);
        }
        Self { len, bits, events }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn channel_count(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self, channel: usize) -> &[u32] {
        &self.events[channel]
    }

    pub fn spike_count(&self, channel: usize) -> usize {
        self.events[channel].len()
    }

    #[inline]
    pub fn bit(&self, channel: usize, index: usize) -> bool {
        (self.bits[channel][index >> 6] >> (index & 63)) & 1 == 1
    }

    /// Bits `[start, start + width)` of one channel packed little-endian
    /// (`start` maps to bit 0). `width <= 57`.
    #[inline]
    pub fn window(&self, channel: usize, start: usize, width: usize) -> u64 {
        debug_assert!(width <= 57 && start + width <= self.len);
        let words = &self.bits[channel];
        let w = start >> 6;
        let off = start & 63;
        let mut v = words[w] >> off;
        if off + width > 64 {
            v |= words[w + 1] << (64 - off);
        }
        v & ((1u64 << width) - 1)
    }

    pub fn dense_row(&self, channel: usize) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(channel, i) as u8).collect()
    }

    /// Number of events of `channel` with index in `[lo, hi)`.
    pub fn count_in(&self, channel: usize, lo: usize, hi: usize) -> usize {
        if hi <= lo {
            return 0;
        }
        let ev = &self.events[channel];
        ev.partition_point(|&b| (b as usize) < hi) - ev.partition_point(|&b| (b as usize) < lo)
    }
}
