use serde::{Deserialize, Serialize};

use super::correlogram::{check_range, pair_count, CoincidenceCounts};
use super::delay::{DelayFunction, DelayStack};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spikedata::BinaryRaster;

/// Orders and delay range of the delayed higher-order transfer entropy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TeParams {
    /// Target history length in bins.
    pub k: usize,
    /// Source history length in bins.
    pub l: usize,
    /// Largest source delay; delays run over `1..=d_max`.
    pub d_max: usize,
}

impl Default for TeParams {
    fn default() -> Self {
        Self::dhote(25)
    }
}

impl TeParams {
    /// First-order transfer entropy at delay 1.
    pub fn d1te() -> Self {
        Self { k: 1, l: 1, d_max: 1 }
    }

    pub fn dte(d_max: usize) -> Self {
        Self { k: 1, l: 1, d_max }
    }

    pub fn dhote(d_max: usize) -> Self {
        Self { k: 2, l: 2, d_max }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=5).contains(&self.k) {
            return Err(Error::param("k", format!("target order {} outside [1, 5]", self.k)));
        }
        if !(1..=5).contains(&self.l) {
            return Err(Error::param("l", format!("source order {} outside [1, 5]", self.l)));
        }
        if self.d_max == 0 || self.d_max + self.l > 58 {
            return Err(Error::param("d_max", format!("{} must be in [1, {}]", self.d_max, 58 - self.l)));
        }
        Ok(())
    }

    /// First valid target index at delay `d` (0-based bins).
    fn first_index(&self, d: usize) -> usize {
        (self.k - 1).max(d + self.l - 2)
    }

    fn target_patterns(&self) -> usize {
        1 << (self.k + 1)
    }

    fn source_patterns(&self) -> usize {
        1 << self.l
    }
}

// ----- mutual information -----

fn mi_term(c: u64, a: u64, b: u64, n: u64) -> f64 {
    if c == 0 {
        return 0.0;
    }
    let c = c as f64;
    let n = n as f64;
    c / n * (c * n / (a as f64 * b as f64)).log2()
}

/// Plug-in MI in bits of a 2×2 table given the total, the joint ones and both marginals.
/// Transposing the table leaves the result bitwise unchanged.
fn mi_bits(n: u64, n11: u64, nx: u64, ny: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n10 = nx - n11;
    let n01 = ny - n11;
    let n00 = n - n11 - n10 - n01;
    let t00 = mi_term(n00, n - nx, n - ny, n);
    let t11 = mi_term(n11, nx, ny, n);
    let t10 = mi_term(n10, nx, n - ny, n);
    let t01 = mi_term(n01, n - nx, ny, n);
    (t00 + t11 + (t10 + t01)).max(0.0)
}

fn mi_at(raster: &BinaryRaster, source: usize, target: usize, delay: i32, count: u32) -> f64 {
    let (lead, lagging, lag) = if delay >= 0 {
        (source, target, delay as usize)
    } else {
        (target, source, delay.unsigned_abs() as usize)
    };
    let len = raster.len();
    let nx = raster.count_in(lead, 0, len - lag) as u64;
    let ny = raster.count_in(lagging, lag, len) as u64;
    mi_bits((len - lag) as u64, count as u64, nx, ny)
}

/// MI between `x(t)` and `y(t + d)` for every `d ∈ [d_lo, d_hi]`, in bits.
pub fn delayed_mutual_information<S: Scalar>(
    raster: &BinaryRaster,
    x: usize,
    y: usize,
    d_lo: i32,
    d_hi: i32,
) -> Result<DelayFunction<S>> {
    check_range(raster, d_lo, d_hi)?;
    let values = (d_lo..=d_hi)
        .map(|d| S::of(mi_at(raster, x, y, d, pair_count(raster, x, y, d))))
        .collect();
    DelayFunction::new(x, y, d_lo, values)
}

/// Delayed MI of every ordered pair.
pub fn mutual_information_stack<S: Scalar>(raster: &BinaryRaster, d_lo: i32, d_hi: i32) -> Result<DelayStack<S>> {
    check_range(raster, d_lo, d_hi)?;
    let max_lag = d_lo.unsigned_abs().max(d_hi.unsigned_abs()) as usize;
    let counts = CoincidenceCounts::compute(raster, max_lag);
    let mut stack = DelayStack::zeros(raster.channel_count(), d_lo, d_hi, vec![false; raster.channel_count()]);
    stack.fill_pairs(|src, tgt, out| {
        for (slot, d) in out.iter_mut().zip(d_lo..=d_hi) {
            *slot = S::of(mi_at(raster, src, tgt, d, counts.at(src, tgt, d)));
        }
    });
    Ok(stack)
}

// ----- transfer entropy -----
//
// Pattern at target index i for delay d:
//   target word T = y[i+1-k ..= i+1] (bit k is the future bin y[i+1]),
//   source word X = x[s ..= s+l-1] with s = i+2-d-l.
// Only indices where T != 0 are enumerated per pair; the rest of the joint
// table follows from the per-channel marginals.

/// Nonzero target words and their per-delay marginal counts.
struct TargetSide {
    active: Vec<(u32, u16)>,
    /// `[d-1][T]` counts over `i ∈ [first_index(d), len-2]`, zero word included.
    marginals: Vec<u32>,
    /// Sample count per delay.
    samples: Vec<u32>,
}

impl TargetSide {
    fn new(raster: &BinaryRaster, y: usize, p: &TeParams) -> Self {
        let len = raster.len();
        let (k, d_max) = (p.k, p.d_max);
        let npat = p.target_patterns();
        let mut active = Vec::new();
        if len >= 2 && len - 2 >= k - 1 {
            let (lo, hi) = (k - 1, len - 2);
            let mut next = lo;
            for &s in raster.events(y) {
                let s = s as usize;
                let from = s.saturating_sub(1).max(next);
                let to = (s + k - 1).min(hi);
                for i in from..=to {
                    active.push((i as u32, raster.window(y, i + 1 - k, k + 1) as u16));
                }
                next = next.max(to + 1);
            }
        }
        let mut all = vec![0u32; npat];
        for &(_, t) in &active {
            all[t as usize] += 1;
        }
        let mut marginals = vec![0u32; d_max * npat];
        let mut samples = vec![0u32; d_max];
        for d in 1..=d_max {
            let lo = p.first_index(d);
            let n = (len as i64 - 1 - lo as i64).max(0) as u32;
            let m = &mut marginals[(d - 1) * npat..d * npat];
            m.copy_from_slice(&all);
            for &(i, t) in active.iter().take_while(|&&(i, _)| (i as usize) < lo) {
                let _ = i;
                m[t as usize] -= 1;
            }
            let nonzero: u32 = m[1..].iter().sum();
            m[0] = n - nonzero;
            samples[d - 1] = n;
        }
        Self {
            active,
            marginals,
            samples,
        }
    }
}

/// Per-delay marginal counts of the source words.
struct SourceSide {
    marginals: Vec<u32>,
}

impl SourceSide {
    fn new(raster: &BinaryRaster, x: usize, p: &TeParams) -> Self {
        let len = raster.len();
        let (l, d_max) = (p.l, p.d_max);
        let npat = p.source_patterns();
        let mut active: Vec<(u32, u16)> = Vec::new();
        if len >= l {
            let hi = len - l;
            let mut next = 0usize;
            for &e in raster.events(x) {
                let e = e as usize;
                let from = (e + 1).saturating_sub(l).max(next);
                let to = e.min(hi);
                for s in from..=to {
                    active.push((s as u32, raster.window(x, s, l) as u16));
                }
                next = next.max(to + 1);
            }
        }
        let mut marginals = vec![0u32; d_max * npat];
        for d in 1..=d_max {
            let m = &mut marginals[(d - 1) * npat..d * npat];
            let lo_i = p.first_index(d);
            if lo_i + 1 >= len {
                continue;
            }
            let n = (len - 1 - lo_i) as u32;
            let s_lo = lo_i + 2 - d - l;
            let s_hi = len - d - l;
            let a = active.partition_point(|&(s, _)| (s as usize) < s_lo);
            let b = active.partition_point(|&(s, _)| (s as usize) <= s_hi);
            for &(_, w) in &active[a..b] {
                m[w as usize] += 1;
            }
            let nonzero: u32 = m[1..].iter().sum();
            m[0] = n - nonzero;
        }
        Self { marginals }
    }
}

/// Counts of (target word ≠ 0, source word ≠ 0) per delay.
fn joint_active(raster: &BinaryRaster, x: usize, target: &TargetSide, p: &TeParams) -> Vec<u32> {
    let (l, d_max) = (p.l, p.d_max);
    let (nt, nx) = (p.target_patterns(), p.source_patterns());
    let xmask = (1u64 << l) - 1;
    let width = d_max + l - 1;
    let mut joint = vec![0u32; d_max * nt * nx];
    for &(i, t) in &target.active {
        let i = i as usize;
        // bit q of w is x[i + 2 - d_max - l + q]
        let base = i as i64 + 2 - (d_max + l) as i64;
        let w = if base >= 0 {
            raster.window(x, base as usize, width)
        } else {
            raster.window(x, 0, i + 1) << (-base)
        };
        if w == 0 {
            continue;
        }
        let mut delays = 0u64;
        let mut bits = w;
        while bits != 0 {
            let q = bits.trailing_zeros() as i64;
            let lo = (d_max as i64 - q).max(1);
            let hi = (d_max as i64 - q + l as i64 - 1).min(d_max as i64);
            for d in lo..=hi {
                delays |= 1 << d;
            }
            bits &= bits - 1;
        }
        while delays != 0 {
            let d = delays.trailing_zeros() as usize;
            delays &= delays - 1;
            if i < p.first_index(d) {
                continue;
            }
            let xw = ((w >> (d_max - d)) & xmask) as usize;
            joint[((d - 1) * nt + t as usize) * nx + xw] += 1;
        }
    }
    joint
}

/// TE in bits from a full joint table `[T][X]`.
fn te_from_joint(joint: &[u32], marg_t: &[u32], n: u32, p: &TeParams) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (nt, nx) = (p.target_patterns(), p.source_patterns());
    let hist = 1usize << p.k;
    let mut yh = vec![0u64; hist];
    let mut yhx = vec![0u64; hist * nx];
    for t in 0..nt {
        yh[t & (hist - 1)] += marg_t[t] as u64;
        for xw in 0..nx {
            yhx[(t & (hist - 1)) * nx + xw] += joint[t * nx + xw] as u64;
        }
    }
    let nf = n as f64;
    let mut te = 0.0;
    for t in 0..nt {
        let h = t & (hist - 1);
        for xw in 0..nx {
            let c = joint[t * nx + xw];
            if c == 0 {
                continue;
            }
            let c = c as f64;
            let ratio = c * yh[h] as f64 / (yhx[h * nx + xw] as f64 * marg_t[t] as f64);
            te += c / nf * ratio.log2();
        }
    }
    te.max(0.0)
}

fn te_pair(raster: &BinaryRaster, x: usize, target: &TargetSide, source: &SourceSide, p: &TeParams) -> Vec<f64> {
    let (nt, nx) = (p.target_patterns(), p.source_patterns());
    let active = joint_active(raster, x, target, p);
    let mut full = vec![0u32; nt * nx];
    (1..=p.d_max)
        .map(|d| {
            let n = target.samples[d - 1];
            let mt = &target.marginals[(d - 1) * nt..d * nt];
            let mx = &source.marginals[(d - 1) * nx..d * nx];
            full.copy_from_slice(&active[(d - 1) * nt * nx..d * nt * nx]);
            for t in 1..nt {
                let seen: u32 = full[t * nx + 1..(t + 1) * nx].iter().sum();
                full[t * nx] = mt[t] - seen;
            }
            for xw in 1..nx {
                let seen: u32 = (1..nt).map(|t| full[t * nx + xw]).sum();
                full[xw] = mx[xw] - seen;
            }
            let rest: u32 = full[1..].iter().sum();
            full[0] = n - rest;
            te_from_joint(&full, mt, n, p)
        })
        .collect()
}

fn warn_if_undersampled(raster: &BinaryRaster, p: &TeParams) {
    let patterns = 1usize << (1 + p.k + p.l);
    let samples = raster.len().saturating_sub(1 + p.first_index(p.d_max));
    if samples < 50 * patterns {
        log::warn!("transfer entropy: {samples} samples for {patterns} patterns, estimates will be biased");
    }
}

/// TE from `x` to `y` at source delays `1..=d_max`, in bits.
pub fn delayed_transfer_entropy<S: Scalar>(raster: &BinaryRaster, x: usize, y: usize, params: &TeParams) -> Result<DelayFunction<S>> {
    params.validate()?;
    warn_if_undersampled(raster, params);
    let target = TargetSide::new(raster, y, params);
    let source = SourceSide::new(raster, x, params);
    let values = te_pair(raster, x, &target, &source, params).into_iter().map(S::of).collect();
    DelayFunction::new(x, y, 1, values)
}

/// Delayed TE of every ordered pair.
pub fn transfer_entropy_stack<S: Scalar>(raster: &BinaryRaster, params: &TeParams) -> Result<DelayStack<S>> {
    params.validate()?;
    warn_if_undersampled(raster, params);
    let k = raster.channel_count();
    let targets: Vec<TargetSide> = (0..k).map(|y| TargetSide::new(raster, y, params)).collect();
    let sources: Vec<SourceSide> = (0..k).map(|x| SourceSide::new(raster, x, params)).collect();
    let mut stack = DelayStack::zeros(k, 1, params.d_max as i32, vec![false; k]);
    stack.fill_pairs(|src, tgt, out| {
        for (slot, v) in out.iter_mut().zip(te_pair(raster, src, &targets[tgt], &sources[src], params)) {
            *slot = S::of(v);
        }
    });
    Ok(stack)
}
