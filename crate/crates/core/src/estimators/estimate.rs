use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::cdhote::cdhote;
use super::ci::coincidence_index;
use super::correlogram::{correlogram_stack, cross_correlogram, Normalization};
use super::delay::{DelayFunction, DelayStack};
use super::information::{delayed_mutual_information, delayed_transfer_entropy, mutual_information_stack, transfer_entropy_stack, TeParams};
use super::matrix::{ConnectivityMatrix, Method};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spikedata::BinaryRaster;
use crate::tspe::{tspe, tspe_pair, TspeKernel, TspeParams};

/// Method plus every tunable the estimators read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorSpec {
    pub method: Method,
    /// Delays `1..=d_max` bins for NCC, MI and TE.
    pub d_max: usize,
    /// Coincidence-index window in bins.
    pub tau: usize,
    /// Target history order of DHOTE.
    pub k: usize,
    /// Source history order of DHOTE.
    pub l: usize,
    pub normalization: Normalization,
    pub tspe: TspeParams,
}

impl Default for EstimatorSpec {
    fn default() -> Self {
        Self {
            method: Method::Tspe,
            d_max: 25,
            tau: 4,
            k: 2,
            l: 2,
            normalization: Normalization::Zscore,
            tspe: TspeParams::default(),
        }
    }
}

impl EstimatorSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    fn te_params(&self) -> TeParams {
        match self.method {
            Method::D1te => TeParams::d1te(),
            Method::Dte | Method::Dteci => TeParams::dte(self.d_max),
            _ => TeParams {
                k: self.k,
                l: self.l,
                d_max: self.d_max,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d_max == 0 {
            return Err(Error::param("d_max", "must be at least 1"));
        }
        match self.method {
            Method::Tspe => self.tspe.validate(),
            Method::Nccci | Method::Dteci | Method::Dhoteci | Method::Cdhote if self.tau > self.d_max => {
                Err(Error::param("tau", format!("{} exceeds the delay range width {}", self.tau, self.d_max)))
            }
            Method::D1te | Method::Dte | Method::Dteci | Method::Dhote | Method::Dhoteci | Method::Cdhote => self.te_params().validate(),
            _ => Ok(()),
        }
    }
}

/// Scalar and delay of one delay function under the method's reduction.
fn reduce<S: Scalar>(f: &DelayFunction<S>, method: Method, tau: usize) -> Result<(S, i32)> {
    match method {
        Method::Nccci | Method::Dteci | Method::Dhoteci => {
            let ci = coincidence_index(f, tau, true)?;
            Ok((ci.value, ci.peak_delay))
        }
        _ => {
            let (d, v) = f.peak(true);
            Ok((v.abs(), d))
        }
    }
}

fn reduce_stack<S: Scalar>(stack: &DelayStack<S>, method: Method, tau: usize) -> Result<(Array2<S>, Array2<i32>)> {
    let k = stack.channel_count();
    let mut values = Array2::zeros((k, k));
    let mut delays = Array2::zeros((k, k));
    for src in 0..k {
        for tgt in (0..k).filter(|&t| t != src) {
            let (v, d) = reduce(&stack.function(src, tgt), method, tau)?;
            values[[src, tgt]] = v;
            delays[[src, tgt]] = d;
        }
    }
    Ok((values, delays))
}

/// Delay functions a method reduces; methods with equal keys share a stack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StackKey {
    Ncc(usize, Normalization),
    Mi(usize),
    Te(TeParams),
}

impl EstimatorSpec {
    fn stack_key(&self) -> Option<StackKey> {
        match self.method {
            Method::Tspe => None,
            Method::Ncc | Method::Nccci => Some(StackKey::Ncc(self.d_max, self.normalization)),
            Method::Mi => Some(StackKey::Mi(self.d_max)),
            _ => Some(StackKey::Te(self.te_params())),
        }
    }
}

fn compute_stack<S: Scalar>(raster: &BinaryRaster, key: StackKey) -> Result<DelayStack<S>> {
    match key {
        StackKey::Ncc(d_max, norm) => correlogram_stack::<S>(raster, 1, d_max as i32, norm),
        StackKey::Mi(d_max) => mutual_information_stack::<S>(raster, 1, d_max as i32),
        StackKey::Te(params) => transfer_entropy_stack::<S>(raster, &params),
    }
}

fn from_stack<S: Scalar>(stack: &DelayStack<S>, spec: &EstimatorSpec, params: serde_json::Value) -> Result<ConnectivityMatrix<S>> {
    if spec.method == Method::Cdhote {
        let (te, delays) = reduce_stack(stack, Method::Dhote, spec.tau)?;
        let (ci, _) = reduce_stack(stack, Method::Dhoteci, spec.tau)?;
        let te = ConnectivityMatrix::new(te, Some(delays), Method::Dhote, params.clone())?;
        let ci = ConnectivityMatrix::new(ci, None, Method::Dhoteci, params)?;
        return cdhote(&te, &ci);
    }
    let (values, delays) = reduce_stack(stack, spec.method, spec.tau)?;
    ConnectivityMatrix::new(values, Some(delays), spec.method, params)
}

/// Connectivity matrix of every ordered pair of a binary raster.
pub fn estimate_cm<S: Scalar>(raster: &BinaryRaster, spec: &EstimatorSpec) -> Result<ConnectivityMatrix<S>> {
    Ok(estimate_cms(raster, std::slice::from_ref(spec))?.remove(0))
}

/// Matrices for several specs on one raster. Methods reducing the same
/// delay functions (NCC and NCCCI, DTE and DTECI, DHOTE, DHOTECI and CDHOTE
/// with equal parameters) share one computed stack.
pub fn estimate_cms<S: Scalar>(raster: &BinaryRaster, specs: &[EstimatorSpec]) -> Result<Vec<ConnectivityMatrix<S>>> {
    if raster.channel_count() < 2 {
        return Err(Error::param("raster", format!("need at least 2 trains, got {}", raster.channel_count())));
    }
    for spec in specs {
        spec.validate()?;
    }
    let mut out = Vec::with_capacity(specs.len());
    let mut cache: Vec<(StackKey, DelayStack<S>)> = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let params = serde_json::to_value(spec)?;
        let Some(key) = spec.stack_key() else {
            let mut cm = tspe::<S>(raster, &spec.tspe)?.to_matrix()?;
            cm.params = params;
            out.push(cm);
            continue;
        };
        if !cache.iter().any(|c| c.0 == key) {
            cache.push((key, compute_stack::<S>(raster, key)?));
        }
        let stack = &cache.iter().find(|c| c.0 == key).expect("stack cached above").1;
        out.push(from_stack(stack, spec, params)?);
        // drop stacks no later spec reads
        cache.retain(|c| specs[i + 1..].iter().any(|s| s.stack_key() == Some(c.0)));
    }
    Ok(out)
}

/// Scalar of a single pair, for surrogate testing. CDHOTE is not defined
/// per pair (its reference point is a maximum over all pairs).
pub struct PairEstimator<S = f64> {
    spec: EstimatorSpec,
    kernel: Option<TspeKernel<S>>,
}

impl<S: Scalar> PairEstimator<S> {
    pub fn new(spec: &EstimatorSpec) -> Result<Self> {
        spec.validate()?;
        if spec.method == Method::Cdhote {
            return Err(Error::param("method", "CDHOTE has no single-pair value"));
        }
        let kernel = match spec.method {
            Method::Tspe => Some(TspeKernel::new(&spec.tspe)?),
            _ => None,
        };
        Ok(Self { spec: spec.clone(), kernel })
    }

    pub fn spec(&self) -> &EstimatorSpec {
        &self.spec
    }

    /// Value for `source → target` of `raster`; signed for TSPE.
    pub fn value(&self, raster: &BinaryRaster, source: usize, target: usize) -> Result<S> {
        let spec = &self.spec;
        let d_max = spec.d_max as i32;
        let f = match spec.method {
            Method::Tspe => {
                let kernel = self.kernel.as_ref().expect("kernel built for TSPE");
                return Ok(tspe_pair(raster, source, target, kernel, &spec.tspe)?.0);
            }
            Method::Ncc | Method::Nccci => cross_correlogram(raster, source, target, 1, d_max, spec.normalization)?,
            Method::Mi => delayed_mutual_information(raster, source, target, 1, d_max)?,
            _ => delayed_transfer_entropy(raster, source, target, &spec.te_params())?,
        };
        Ok(reduce(&f, spec.method, spec.tau)?.0)
    }
}
