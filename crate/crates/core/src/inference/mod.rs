//! Thresholding of connectivity matrices into ternary connection classes.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::matrix::{matrix_csv, parse_matrix_csv};
use crate::estimators::{estimate_cm, ConnectivityMatrix, EstimatorSpec, PairEstimator};
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::spikedata::{dither_set, BinaryRaster, SpikeTrainSet};

/// How a surrogate distribution becomes bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateCriterion {
    /// Mean ± 4 SD.
    Mean4sd,
    /// Smallest and largest surrogate value.
    Minmax,
    /// Minimum − SD and maximum + SD.
    MinmaxSd,
    /// Mean + SD of the positive values, mean − SD of the negative values.
    SignSplit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ThresholdKind {
    /// Global `mean + k·SD` of all off-diagonal values.
    Easy { k: f64 },
    /// Per-pair bounds from `n` dithered surrogates with a `window`-sample jitter.
    Surrogate { n: usize, window: u32, criterion: SurrogateCriterion },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    #[serde(flatten)]
    pub kind: ThresholdKind,
    /// Separate bounds for positive (excitatory) and negative (inhibitory) values.
    #[serde(default)]
    pub signed: bool,
    /// Master seed of the surrogate streams.
    #[serde(default)]
    pub seed: u64,
}

impl ThresholdPolicy {
    pub fn easy(k: f64) -> Self {
        Self {
            kind: ThresholdKind::Easy { k },
            signed: false,
            seed: 0,
        }
    }

    pub fn surrogate(n: usize, window: u32, criterion: SurrogateCriterion, seed: u64) -> Self {
        Self {
            kind: ThresholdKind::Surrogate { n, window, criterion },
            signed: false,
            seed,
        }
    }

    pub fn signed(mut self) -> Self {
        self.signed = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ThresholdKind::Easy { k } if !(k > 0.0 && k.is_finite()) => Err(Error::param("k", format!("SD multiplier {k} must be positive"))),
            ThresholdKind::Surrogate { n, .. } if !(100..=1000).contains(&n) => {
                Err(Error::param("n", format!("{n} surrogates outside [100, 1000]")))
            }
            _ => Ok(()),
        }
    }
}

/// Bounds a value has to exceed: `> upper` is a (positive) connection and,
/// for signed matrices, `< lower` a negative one.
#[derive(Debug, Clone, PartialEq)]
pub enum Thresholds {
    Global { upper: f64, lower: f64, degenerate: bool },
    PerPair { upper: Array2<f64>, lower: Array2<f64> },
}

impl Thresholds {
    fn at(&self, i: usize, j: usize) -> (f64, f64) {
        match self {
            Thresholds::Global { upper, lower, .. } => (*upper, *lower),
            Thresholds::PerPair { upper, lower } => (upper[[i, j]], lower[[i, j]]),
        }
    }
}

/// Population mean and SD.
fn moments(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// SD at rounding level relative to the mean (or NaN for an empty population).
fn negligible(sd: f64, mean: f64) -> bool {
    !(sd > 1e-12 * mean.abs().max(1e-300))
}

/// Global `mean + k·SD`. Unsigned: over the scores (`|value|`, or the negated
/// distance for distance methods). Signed: over the positive values for the
/// upper bound and `mean − k·SD` over the negative values for the lower one;
/// a missing population gives an unreachable bound.
pub fn easy_threshold<S: Scalar>(cm: &ConnectivityMatrix<S>, k: f64, signed: bool) -> Result<Thresholds> {
    ThresholdPolicy::easy(k).validate()?;
    let n = cm.len();
    if n < 2 {
        return Err(Error::param("cm", "needs at least two channels"));
    }
    if signed {
        if !cm.method.is_signed() {
            return Err(Error::param("signed", format!("{} values carry no sign", cm.method)));
        }
        let values: Vec<f64> = cm.off_diagonal().into_iter().map(Scalar::as_f64).collect();
        let pos: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
        let neg: Vec<f64> = values.iter().copied().filter(|&v| v < 0.0).collect();
        let (mp, sp) = moments(&pos);
        let (mn, sn) = moments(&neg);
        return Ok(Thresholds::Global {
            upper: if pos.is_empty() { f64::INFINITY } else { mp + k * sp },
            lower: if neg.is_empty() { f64::NEG_INFINITY } else { mn - k * sn },
            degenerate: negligible(sp, mp) || negligible(sn, mn),
        });
    }
    let scores: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| cm.score(i, j).as_f64())
        .collect();
    let (mean, sd) = moments(&scores);
    Ok(Thresholds::Global {
        upper: mean + k * sd,
        lower: f64::NEG_INFINITY,
        degenerate: negligible(sd, mean),
    })
}

/// Running summary of one pair's surrogate values.
#[derive(Debug, Clone, Default)]
struct SurrogateStats {
    values: Vec<f64>,
}

impl SurrogateStats {
    fn bounds(&self, criterion: SurrogateCriterion) -> (f64, f64) {
        let (mean, sd) = moments(&self.values);
        let min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        match criterion {
            SurrogateCriterion::Mean4sd => (mean + 4.0 * sd, mean - 4.0 * sd),
            SurrogateCriterion::Minmax => (max, min),
            SurrogateCriterion::MinmaxSd => (max + sd, min - sd),
            SurrogateCriterion::SignSplit => {
                let pos: Vec<f64> = self.values.iter().copied().filter(|&v| v > 0.0).collect();
                let neg: Vec<f64> = self.values.iter().copied().filter(|&v| v < 0.0).collect();
                let (mp, sp) = moments(&pos);
                let (mn, sn) = moments(&neg);
                (
                    if pos.is_empty() { 0.0 } else { mp + sp },
                    if neg.is_empty() { 0.0 } else { mn - sn },
                )
            }
        }
    }
}

fn surrogate_params(policy: &ThresholdPolicy) -> Result<(usize, u32, SurrogateCriterion)> {
    policy.validate()?;
    match policy.kind {
        ThresholdKind::Surrogate { n, window, criterion } => Ok((n, window, criterion)),
        ThresholdKind::Easy { .. } => Err(Error::param("policy", "not a surrogate policy")),
    }
}

/// Per-pair surrogate bounds for `x → y`: both trains are dithered `n` times
/// from a stream derived from the policy seed and the pair, and the
/// estimator is evaluated on each surrogate pair. Unsigned policies bound
/// `|value|`.
pub fn surrogate_threshold<S: Scalar>(
    set: &SpikeTrainSet,
    x: usize,
    y: usize,
    estimator: &PairEstimator<S>,
    policy: &ThresholdPolicy,
    bin_size: u32,
) -> Result<(f64, f64)> {
    let (n, window, criterion) = surrogate_params(policy)?;
    let pair = set.select(&[x, y])?;
    let mut rng = stream(policy.seed, "surrogate-pair", (x * set.channel_count() + y) as u64);
    let mut stats = SurrogateStats::default();
    for _ in 0..n {
        let surrogate = dither_set(&pair, window, &mut rng)?;
        let raster = BinaryRaster::from_set(&surrogate, bin_size)?;
        let v = estimator.value(&raster, 0, 1)?.as_f64();
        stats.values.push(if policy.signed { v } else { v.abs() });
    }
    Ok(stats.bounds(criterion))
}

/// Per-pair surrogate bounds for every pair at once: the whole set is
/// dithered `n` times (iteration `i` draws from its own stream) and the full
/// matrix is recomputed on each surrogate set, so each pair sees `n`
/// surrogates of its own two trains.
pub fn surrogate_thresholds<S: Scalar>(set: &SpikeTrainSet, spec: &EstimatorSpec, policy: &ThresholdPolicy, bin_size: u32) -> Result<Thresholds> {
    let (n, window, criterion) = surrogate_params(policy)?;
    if policy.signed && !spec.method.is_signed() {
        return Err(Error::param("signed", format!("{} values carry no sign", spec.method)));
    }
    let k = set.channel_count();
    let mut stats = vec![SurrogateStats::default(); k * k];
    for iteration in 0..n {
        let mut rng = stream(policy.seed, "surrogate", iteration as u64);
        let surrogate = dither_set(set, window, &mut rng)?;
        let cm = estimate_cm::<S>(&BinaryRaster::from_set(&surrogate, bin_size)?, spec)?;
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                let v = if policy.signed { cm.get(i, j) } else { cm.score(i, j) };
                stats[i * k + j].values.push(v.as_f64());
            }
        }
        log::debug!("surrogate iteration {}/{n}", iteration + 1);
    }
    let mut upper = Array2::zeros((k, k));
    let mut lower = Array2::zeros((k, k));
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let (u, l) = stats[i * k + j].bounds(criterion);
            upper[[i, j]] = u;
            lower[[i, j]] = l;
        }
    }
    Ok(Thresholds::PerPair { upper, lower })
}

/// Ternary classification of a connectivity matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedConnectivityMatrix {
    /// −1 inhibitory, 0 none, +1 connection (excitatory when signed).
    pub classes: Array2<i8>,
    /// Estimator value where a class is set, 0 elsewhere.
    pub strengths: Array2<f64>,
    pub policy: serde_json::Value,
    /// Bounds were degenerate (zero SD or an empty sign population).
    pub degenerate: bool,
}

impl ThresholdedConnectivityMatrix {
    pub fn connection_count(&self) -> usize {
        self.classes.iter().filter(|&&c| c != 0).count()
    }

    /// Write `<stem>.csv` (classes), `<stem>_strengths.csv` and `<stem>.json`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<()> {
        let sidecar = serde_json::json!({ "policy": self.policy, "degenerate": self.degenerate });
        for (name, body) in [
            (format!("{stem}.csv"), matrix_csv(&self.classes, |v| v.to_string())),
            (format!("{stem}_strengths.csv"), matrix_csv(&self.strengths, |v| format!("{v:e}"))),
            (format!("{stem}.json"), serde_json::to_string_pretty(&sidecar)?),
        ] {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(path, e))?;
        }
        Ok(())
    }

    pub fn read(dir: &Path, stem: &str) -> Result<Self> {
        let read = |name: String| {
            let path = dir.join(name);
            std::fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        let classes: Array2<i8> = parse_matrix_csv(&read(format!("{stem}.csv"))?, "classes")?;
        let strengths: Array2<f64> = parse_matrix_csv(&read(format!("{stem}_strengths.csv"))?, "strengths")?;
        if classes.dim() != strengths.dim() {
            return Err(Error::format("strengths", "shape differs from the classes"));
        }
        if classes.iter().any(|c| !(-1..=1).contains(c)) {
            return Err(Error::format("classes", "values must be -1, 0 or 1"));
        }
        let sidecar: serde_json::Value = serde_json::from_str(&read(format!("{stem}.json"))?)?;
        Ok(Self {
            classes,
            strengths,
            policy: sidecar["policy"].clone(),
            degenerate: sidecar["degenerate"].as_bool().unwrap_or(false),
        })
    }
}

/// Classify every off-diagonal cell with strict comparisons.
pub fn apply_threshold<S: Scalar>(cm: &ConnectivityMatrix<S>, thresholds: &Thresholds, signed: bool, policy: serde_json::Value) -> Result<ThresholdedConnectivityMatrix> {
    if signed && !cm.method.is_signed() {
        return Err(Error::param("signed", format!("{} values carry no sign", cm.method)));
    }
    let k = cm.len();
    if let Thresholds::PerPair { upper, .. } = thresholds {
        if upper.dim() != (k, k) {
            return Err(Error::param("thresholds", "shape differs from the matrix"));
        }
    }
    let mut classes = Array2::zeros((k, k));
    let mut strengths = Array2::zeros((k, k));
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let (upper, lower) = thresholds.at(i, j);
            let value = cm.get(i, j).as_f64();
            let class = if signed {
                if value > upper {
                    1
                } else if value < lower {
                    -1
                } else {
                    0
                }
            } else {
                (cm.score(i, j).as_f64() > upper) as i8
            };
            if class != 0 {
                classes[[i, j]] = class;
                strengths[[i, j]] = value;
            }
        }
    }
    let degenerate = matches!(thresholds, Thresholds::Global { degenerate: true, .. });
    Ok(ThresholdedConnectivityMatrix {
        classes,
        strengths,
        policy,
        degenerate,
    })
}

/// Thresholds from `policy` applied to `cm`. Surrogate policies need the
/// spike set and estimator the matrix came from.
pub fn infer_connections<S: Scalar>(
    cm: &ConnectivityMatrix<S>,
    policy: &ThresholdPolicy,
    source: Option<(&SpikeTrainSet, &EstimatorSpec, u32)>,
) -> Result<ThresholdedConnectivityMatrix> {
    policy.validate()?;
    let thresholds = match policy.kind {
        ThresholdKind::Easy { k } => easy_threshold(cm, k, policy.signed)?,
        ThresholdKind::Surrogate { .. } => {
            let (set, spec, bin) = source.ok_or_else(|| Error::param("policy", "surrogate thresholds need the spike trains"))?;
            if spec.method != cm.method {
                return Err(Error::param("spec", format!("estimator {} does not match the {} matrix", spec.method, cm.method)));
            }
            surrogate_thresholds::<S>(set, spec, policy, bin)?
        }
    };
    apply_threshold(cm, &thresholds, policy.signed, serde_json::to_value(policy)?)
}
