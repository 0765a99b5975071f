use crate::error::{Error, Result};
use crate::estimators::DelayFunction;
use crate::scalar::Scalar;

/// Zero-sum edge detector: `a` negative surround taps, a gap of `c`, `b`
/// positive centre taps, a gap of `c`, `a` negative surround taps.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFilter {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    taps: Vec<f64>,
}

impl EdgeFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

pub fn build_edge_filter(a: usize, b: usize, c: usize) -> Result<EdgeFilter> {
    if a == 0 {
        return Err(Error::param("a", "surround window must be at least 1"));
    }
    if b == 0 {
        return Err(Error::param("b", "observed window must be at least 1"));
    }
    let side = -1.0 / a as f64;
    let centre = 2.0 / b as f64;
    let mut taps = Vec::with_capacity(2 * a + b + 2 * c);
    taps.extend(std::iter::repeat_n(side, a));
    taps.extend(std::iter::repeat_n(0.0, c));
    taps.extend(std::iter::repeat_n(centre, b));
    taps.extend(std::iter::repeat_n(0.0, c));
    taps.extend(std::iter::repeat_n(side, a));
    Ok(EdgeFilter { a, b, c, taps })
}

/// `b` unit taps that add up the edge responses overlapping one delay.
#[derive(Debug, Clone, PartialEq)]
pub struct RunningTotalFilter {
    pub b: usize,
    taps: Vec<f64>,
}

impl RunningTotalFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn len(&self) -> usize {
        self.taps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taps.is_empty()
    }
}

pub fn build_running_total_filter(b: usize) -> Result<RunningTotalFilter> {
    if b == 0 {
        return Err(Error::param("b", "running total width must be at least 1"));
    }
    Ok(RunningTotalFilter { b, taps: vec![1.0; b] })
}

/// Valid-mode convolution of a correlogram with an edge filter.
///
/// The input must start at or before delay `1 - a - c`. Output delay `d`
/// is the response whose positive window covers delays `d ..= d + b - 1`.
pub fn spe<S: Scalar>(ncc: &DelayFunction<S>, filter: &EdgeFilter) -> Result<DelayFunction<S>> {
    let first = 1 - (filter.a + filter.c) as i32;
    if ncc.d_min > first {
        return Err(Error::param(
            "ncc",
            format!("delay range must start at {first} or earlier (margin a + c = {}), starts at {}", filter.a + filter.c, ncc.d_min),
        ));
    }
    let signal = &ncc.values[(first - ncc.d_min) as usize..];
    if signal.len() < filter.len() {
        return Err(Error::param(
            "ncc",
            format!("delay range ends at {}, shorter than the filter support of {} taps", ncc.d_max(), filter.len()),
        ));
    }
    let taps: Vec<S> = filter.taps.iter().rev().map(|&t| S::of(t)).collect();
    let values = signal
        .windows(taps.len())
        .map(|w| w.iter().zip(&taps).fold(S::zero(), |acc, (&x, &g)| acc + x * g))
        .collect();
    let mut out = DelayFunction::new(ncc.source, ncc.target, 1, values)?;
    out.degenerate = ncc.degenerate;
    Ok(out)
}

/// Full-mode convolution with the running-total filter; output delay `m`
/// sums the responses whose positive window contains `m`.
pub fn running_total<S: Scalar>(spe: &DelayFunction<S>, filter: &RunningTotalFilter) -> DelayFunction<S> {
    let n = spe.len();
    let b = filter.len();
    let values = (0..n + b - 1)
        .map(|m| {
            (0..b)
                .filter(|&q| q <= m && m - q < n)
                .fold(S::zero(), |acc, q| acc + spe.values[m - q] * S::of(filter.taps[q]))
        })
        .collect();
    DelayFunction {
        source: spe.source,
        target: spe.target,
        d_min: spe.d_min,
        values,
        degenerate: spe.degenerate,
    }
}
