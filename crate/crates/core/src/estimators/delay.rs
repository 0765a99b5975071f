use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A value per integer delay over `[d_min, d_min + len - 1]` for the pair
/// `source → target`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayFunction<S = f64> {
    pub source: usize,
    pub target: usize,
    pub d_min: i32,
    pub values: Vec<S>,
    /// Set when a normalizer vanished (silent channel) or the total mass was zero.
    pub degenerate: bool,
}

impl<S: Scalar> DelayFunction<S> {
    pub fn new(source: usize, target: usize, d_min: i32, values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("values", "empty delay range"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite value"));
        }
        Ok(Self {
            source,
            target,
            d_min,
            values,
            degenerate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn d_max(&self) -> i32 {
        self.d_min + self.values.len() as i32 - 1
    }

    pub fn delays(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len() as i32).map(move |i| self.d_min + i)
    }

    pub fn at(&self, delay: i32) -> Option<S> {
        let idx = delay - self.d_min;
        (idx >= 0).then(|| self.values.get(idx as usize).copied()).flatten()
    }

    /// Restrict to `[lo, hi]`.
    pub fn window(&self, lo: i32, hi: i32) -> Result<Self> {
        if lo < self.d_min || hi > self.d_max() || lo > hi {
            return Err(Error::param("delay range", format!("[{lo}, {hi}] outside [{}, {}]", self.d_min, self.d_max())));
        }
        let a = (lo - self.d_min) as usize;
        let b = (hi - self.d_min) as usize;
        Ok(Self {
            values: self.values[a..=b].to_vec(),
            d_min: lo,
            ..self.clone()
        })
    }

    /// First delay attaining the largest value (`|value|` when `absolute`) and that value, signed.
    pub fn peak(&self, absolute: bool) -> (i32, S) {
        let key = |v: S| if absolute { v.abs() } else { v };
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if key(v) > key(self.values[best]) {
                best = i;
            }
        }
        (self.d_min + best as i32, self.values[best])
    }
}

/// Delay functions of every ordered channel pair on one shared grid.
/// Diagonal entries are zero.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayStack<S = f64> {
    k: usize,
    d_lo: i32,
    width: usize,
    values: Vec<S>,
    silent: Vec<bool>,
}

impl<S: Scalar> DelayStack<S> {
    pub(crate) fn zeros(k: usize, d_lo: i32, d_hi: i32, silent: Vec<bool>) -> Self {
        let width = (d_hi - d_lo + 1) as usize;
        Self {
            k,
            d_lo,
            width,
            values: vec![S::zero(); k * k * width],
            silent,
        }
    }

    /// Fill every off-diagonal pair in parallel; `f(source, target, out)`.
    pub(crate) fn fill_pairs(&mut self, f: impl Fn(usize, usize, &mut [S]) + Sync) {
        let (k, width) = (self.k, self.width);
        self.values.par_chunks_mut((k * width).max(1)).enumerate().for_each(|(src, row)| {
            for tgt in (0..k).filter(|&t| t != src) {
                f(src, tgt, &mut row[tgt * width..(tgt + 1) * width]);
            }
        });
    }

    pub fn channel_count(&self) -> usize {
        self.k
    }

    pub fn d_min(&self) -> i32 {
        self.d_lo
    }

    pub fn d_max(&self) -> i32 {
        self.d_lo + self.width as i32 - 1
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// Channels whose normalizer vanished.
    pub fn silent(&self) -> &[bool] {
        &self.silent
    }

    pub fn pair(&self, source: usize, target: usize) -> &[S] {
        let start = (source * self.k + target) * self.width;
        &self.values[start..start + self.width]
    }

    pub fn pair_mut(&mut self, source: usize, target: usize) -> &mut [S] {
        let start = (source * self.k + target) * self.width;
        &mut self.values[start..start + self.width]
    }

    pub fn get(&self, source: usize, target: usize, delay: i32) -> S {
        self.pair(source, target)[(delay - self.d_lo) as usize]
    }

    pub fn function(&self, source: usize, target: usize) -> DelayFunction<S> {
        DelayFunction {
            source,
            target,
            d_min: self.d_lo,
            values: self.pair(source, target).to_vec(),
            degenerate: self.silent[source] || self.silent[target],
        }
    }
}
