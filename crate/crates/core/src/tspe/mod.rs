//! Total spiking probability edges: an edge-filter bank over
//! cross-correlograms whose signed extremum gives strength, effect type
//! and delay of each connection.

mod filters;

pub use filters::{build_edge_filter, build_running_total_filter, running_total, spe, EdgeFilter, RunningTotalFilter};

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{correlogram_stack, cross_correlogram, ConnectivityMatrix, DelayFunction, DelayStack, Method, Normalization};
use crate::scalar::Scalar;
use crate::spikedata::BinaryRaster;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TspeParams {
    /// Largest delay in bins.
    pub d_max: usize,
    /// Surround window sizes.
    pub a_list: Vec<usize>,
    /// Observed window sizes.
    pub b_list: Vec<usize>,
    /// Crossover gaps.
    pub c_list: Vec<usize>,
    /// Divide every correlogram value by the sum over all pairs at that delay.
    pub flag_norm: bool,
    /// Subtract the train means before correlating (off by default).
    pub mean_subtraction: bool,
}

impl Default for TspeParams {
    fn default() -> Self {
        Self {
            d_max: 25,
            a_list: (3..=8).collect(),
            b_list: (2..=6).collect(),
            c_list: vec![0],
            flag_norm: false,
            mean_subtraction: false,
        }
    }
}

impl TspeParams {
    /// Bank with a single filter.
    pub fn single(a: usize, b: usize, c: usize, d_max: usize) -> Self {
        Self {
            d_max,
            a_list: vec![a],
            b_list: vec![b],
            c_list: vec![c],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_max == 0 {
            return Err(Error::param("d_max", "must be at least 1"));
        }
        for (name, list) in [("a_list", &self.a_list), ("b_list", &self.b_list), ("c_list", &self.c_list)] {
            if list.is_empty() {
                return Err(Error::param(name, "empty window list"));
            }
        }
        if self.a_list.contains(&0) {
            return Err(Error::param("a_list", "surround windows must be at least 1"));
        }
        if self.b_list.contains(&0) {
            return Err(Error::param("b_list", "observed windows must be at least 1"));
        }
        if self.output_len() == 0 {
            return Err(Error::param("d_max", "no delay survives truncation for this filter bank"));
        }
        Ok(())
    }

    fn max_a(&self) -> usize {
        self.a_list.iter().copied().max().unwrap_or(0)
    }

    fn max_c(&self) -> usize {
        self.c_list.iter().copied().max().unwrap_or(0)
    }

    /// Correlogram delay range the bank needs: `[1 - max a - max c, d_max + max a]`.
    pub fn ncc_range(&self) -> (i32, i32) {
        (1 - (self.max_a() + self.max_c()) as i32, (self.d_max + self.max_a()) as i32)
    }

    /// Number of delays kept after truncation (the shortest bank member).
    pub fn output_len(&self) -> usize {
        let end = self.d_max + self.max_a();
        self.a_list
            .iter()
            .flat_map(|&a| self.c_list.iter().map(move |&c| a + c))
            .map(|ac| end.saturating_sub(ac))
            .min()
            .unwrap_or(0)
    }

    fn normalization(&self) -> Normalization {
        if self.mean_subtraction {
            Normalization::Zscore
        } else {
            Normalization::ZscoreNoMean
        }
    }

    fn filters(&self) -> Result<Vec<(EdgeFilter, RunningTotalFilter)>> {
        let mut bank = Vec::new();
        for &a in &self.a_list {
            for &b in &self.b_list {
                for &c in &self.c_list {
                    bank.push((build_edge_filter(a, b, c)?, build_running_total_filter(b)?));
                }
            }
        }
        Ok(bank)
    }
}

/// Straight-line TSPE of one correlogram spanning at least [`TspeParams::ncc_range`]:
/// every bank member is applied, each response running-totalled, truncated to
/// the common length and summed. Output delays run from 1.
pub fn tspe_function<S: Scalar>(ncc: &DelayFunction<S>, params: &TspeParams) -> Result<DelayFunction<S>> {
    params.validate()?;
    let (lo, hi) = params.ncc_range();
    let ncc = ncc.window(lo, hi)?;
    let m = params.output_len();
    let mut total = vec![S::zero(); m];
    for (edge, rt) in params.filters()? {
        let response = running_total(&spe(&ncc, &edge)?, &rt);
        for (acc, &v) in total.iter_mut().zip(&response.values) {
            *acc += v;
        }
    }
    let mut out = DelayFunction::new(ncc.source, ncc.target, 1, total)?;
    out.degenerate = ncc.degenerate;
    Ok(out)
}

/// The whole bank folded into one `m × width` matrix acting on a correlogram
/// over [`TspeParams::ncc_range`].
#[derive(Debug, Clone)]
pub struct TspeKernel<S = f64> {
    rows: usize,
    width: usize,
    weights: Vec<S>,
}

impl<S: Scalar> TspeKernel<S> {
    pub fn new(params: &TspeParams) -> Result<Self> {
        params.validate()?;
        let (lo, hi) = params.ncc_range();
        let width = (hi - lo + 1) as usize;
        let rows = params.output_len();
        let mut weights = vec![S::zero(); rows * width];
        for j in 0..width {
            let mut unit = vec![0.0f64; width];
            unit[j] = 1.0;
            let column = tspe_function(&DelayFunction::new(0, 0, lo, unit)?, params)?;
            for (r, &v) in column.values.iter().enumerate() {
                weights[r * width + j] = S::of(v);
            }
        }
        Ok(Self { rows, width, weights })
    }

    /// Number of output delays (`1..=rows`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn apply(&self, ncc: &[S]) -> Vec<S> {
        assert_eq!(ncc.len(), self.width, "correlogram width mismatch");
        self.weights
            .chunks(self.width)
            .map(|row| row.iter().zip(ncc).fold(S::zero(), |acc, (&w, &x)| acc + w * x))
            .collect()
    }
}

/// Signed value at the first largest `|value|` and its delay (`values[0]` is
/// delay 1). An all-zero function gives `(0, 0)`.
pub fn signed_extremum<S: Scalar>(values: &[S]) -> (S, i32) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if v.abs() > values[best].abs() {
            best = i;
        }
    }
    match values.get(best) {
        Some(&v) if v != S::zero() => (v, best as i32 + 1),
        _ => (S::zero(), 0),
    }
}

/// Divide each value at delay `d` by the sum over all off-diagonal pairs at
/// `d`. Delays whose sum is below `1e-12` in magnitude are left untouched
/// and returned.
pub fn normalize_pairs<S: Scalar>(stack: &mut DelayStack<S>, flag_norm: bool) -> Vec<i32> {
    if !flag_norm {
        return Vec::new();
    }
    let k = stack.channel_count();
    let width = stack.width();
    let mut sums = vec![S::zero(); width];
    for src in 0..k {
        for tgt in (0..k).filter(|&t| t != src) {
            for (s, &v) in sums.iter_mut().zip(stack.pair(src, tgt)) {
                *s += v;
            }
        }
    }
    let mut skipped = Vec::new();
    for (i, s) in sums.iter_mut().enumerate() {
        if s.abs() < S::of(1e-12) {
            skipped.push(stack.d_min() + i as i32);
            *s = S::one();
        }
    }
    for src in 0..k {
        for tgt in (0..k).filter(|&t| t != src) {
            for (v, &s) in stack.pair_mut(src, tgt).iter_mut().zip(&sums) {
                *v /= s;
            }
        }
    }
    skipped
}

#[derive(Debug, Clone)]
pub struct TspeResult<S = f64> {
    /// Signed strength, row = source, column = target.
    pub cm: Array2<S>,
    /// Delay of the extremum in bins, 0 where no extremum exists.
    pub dm: Array2<i32>,
    pub params: TspeParams,
    /// Channels without variance; their rows and columns are 0.
    pub silent: Vec<usize>,
}

impl<S: Scalar> TspeResult<S> {
    pub fn to_matrix(&self) -> Result<ConnectivityMatrix<S>> {
        ConnectivityMatrix::new(
            self.cm.clone(),
            Some(self.dm.clone()),
            Method::Tspe,
            serde_json::to_value(&self.params)?,
        )
    }
}

/// TSPE of every ordered pair of a 1-bin binary raster.
pub fn tspe<S: Scalar>(raster: &BinaryRaster, params: &TspeParams) -> Result<TspeResult<S>> {
    params.validate()?;
    let k = raster.channel_count();
    if k < 2 {
        return Err(Error::param("raster", format!("need at least 2 trains, got {k}")));
    }
    let (lo, hi) = params.ncc_range();
    let mut stack = correlogram_stack::<S>(raster, lo, hi, params.normalization())?;
    let skipped = normalize_pairs(&mut stack, params.flag_norm);
    if !skipped.is_empty() {
        log::warn!("tspe: pair sum vanished at delays {skipped:?}, left unnormalized");
    }
    let silent: Vec<usize> = (0..k).filter(|&c| stack.silent()[c]).collect();
    if !silent.is_empty() {
        log::warn!("tspe: channels {silent:?} have no variance");
    }
    let kernel = TspeKernel::<S>::new(params)?;
    let rows: Vec<(Vec<S>, Vec<i32>)> = (0..k)
        .into_par_iter()
        .map(|src| {
            let mut values = vec![S::zero(); k];
            let mut delays = vec![0i32; k];
            for tgt in (0..k).filter(|&t| t != src) {
                let (v, d) = signed_extremum(&kernel.apply(stack.pair(src, tgt)));
                values[tgt] = v;
                delays[tgt] = d;
            }
            (values, delays)
        })
        .collect();
    let mut cm = Array2::zeros((k, k));
    let mut dm = Array2::zeros((k, k));
    for (src, (values, delays)) in rows.into_iter().enumerate() {
        for tgt in 0..k {
            cm[[src, tgt]] = values[tgt];
            dm[[src, tgt]] = delays[tgt];
        }
    }
    Ok(TspeResult {
        cm,
        dm,
        params: params.clone(),
        silent,
    })
}

/// Single-pair TSPE value and delay; the across-pair normalization is not
/// available here.
pub fn tspe_pair<S: Scalar>(raster: &BinaryRaster, source: usize, target: usize, kernel: &TspeKernel<S>, params: &TspeParams) -> Result<(S, i32)> {
    if params.flag_norm {
        return Err(Error::param("flag_norm", "normalization across pairs needs the whole set"));
    }
    let (lo, hi) = params.ncc_range();
    let ncc = cross_correlogram::<S>(raster, source, target, lo, hi, params.normalization())?;
    Ok(signed_extremum(&kernel.apply(&ncc.values)))
}
