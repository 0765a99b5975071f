use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::ConnectivityMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Cells with score `>= threshold` are predicted positive; the first
    /// point's infinite threshold is stored as JSON `null`.
    #[serde(with = "infinite_as_null")]
    pub threshold: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

pub(crate) mod infinite_as_null {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// From (0, 0) at an infinite threshold down to (1, 1).
    pub points: Vec<RocPoint>,
    pub positives: usize,
    pub negatives: usize,
    /// No positives or no negatives: the undefined rate is reported as 0.
    pub degenerate: bool,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl RocCurve {
    /// Sweep over every distinct score, highest first. `NaN` scores are rejected.
    pub fn from_scores(scores: &[(f64, bool)]) -> Result<Self> {
        if scores.iter().any(|(s, _)| s.is_nan()) {
            return Err(Error::param("scores", "NaN score"));
        }
        let mut sorted = scores.to_vec();
        sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        let positives = sorted.iter().filter(|s| s.1).count();
        let negatives = sorted.len() - positives;
        let point = |tp: usize, fp: usize, threshold: f64| RocPoint {
            fpr: rate(fp, negatives),
            tpr: rate(tp, positives),
            threshold,
            tp,
            fp,
            tn: negatives - fp,
            fn_: positives - tp,
        };
        let mut points = vec![point(0, 0, f64::INFINITY)];
        let (mut tp, mut fp) = (0, 0);
        let mut i = 0;
        while i < sorted.len() {
            let value = sorted[i].0;
            while i < sorted.len() && sorted[i].0 == value {
                if sorted[i].1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            points.push(point(tp, fp, value));
        }
        if positives == 0 || negatives == 0 {
            log::warn!("roc: {positives} positives and {negatives} negatives, one rate is undefined");
        }
        Ok(Self {
            points,
            positives,
            negatives,
            degenerate: positives == 0 || negatives == 0,
        })
    }

    /// Trapezoidal area under the curve.
    pub fn auc(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0).sum()
    }

    /// The point with the highest TPR among those with `fpr <= target`.
    pub fn operating_point(&self, target_fpr: f64) -> &RocPoint {
        self.points
            .iter()
            .rev()
            .find(|p| p.fpr <= target_fpr)
            .unwrap_or(&self.points[0])
    }
}

/// Scores of the off-diagonal cells of `cm` against nonzero `truth` labels.
/// The score is `|value|`, or the negated value for distance methods.
pub fn labelled_scores<S: Scalar>(cm: &ConnectivityMatrix<S>, truth: &Array2<i8>) -> Result<Vec<(f64, bool)>> {
    let k = cm.len();
    if truth.dim() != (k, k) {
        return Err(Error::param("truth", format!("{:?} labels for a {k}×{k} matrix", truth.dim())));
    }
    Ok((0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| (cm.score(i, j).as_f64(), truth[[i, j]] != 0))
        .collect())
}

/// ROC of `cm` against the ternary ground-truth labels (diagonal excluded).
pub fn roc_curve<S: Scalar>(cm: &ConnectivityMatrix<S>, truth: &Array2<i8>) -> Result<RocCurve> {
    RocCurve::from_scores(&labelled_scores(cm, truth)?)
}

/// TPR at `target_fpr`, linearly interpolated between the bracketing points.
pub fn tpr_at_fpr(roc: &RocCurve, target_fpr: f64) -> f64 {
    let pts = &roc.points;
    let lo = pts.iter().rposition(|p| p.fpr <= target_fpr).unwrap_or(0);
    match pts[lo..].iter().position(|p| p.fpr > target_fpr) {
        None => pts[lo].tpr,
        Some(offset) => {
            let (a, b) = (pts[lo], pts[lo + offset]);
            a.tpr + (b.tpr - a.tpr) * (target_fpr - a.fpr) / (b.fpr - a.fpr)
        }
    }
}

/// Ternary prediction with every cell scoring `>= threshold` classified by
/// the sign of its value (always +1 for unsigned methods).
pub fn classify_at<S: Scalar>(cm: &ConnectivityMatrix<S>, threshold: f64) -> Array2<i8> {
    let k = cm.len();
    Array2::from_shape_fn((k, k), |(i, j)| {
        if i == j || cm.score(i, j).as_f64() < threshold {
            0
        } else if cm.method.is_signed() && cm.get(i, j) < S::zero() {
            -1
        } else {
            1
        }
    })
}
