//! Evaluation against ground truth, graph metrics, change classification
//! between snapshots and timing.

mod bench;
mod confusion;
mod dynamics;
mod graph;
mod ks;
mod report;
mod roc;

pub use bench::{benchmark_estimators, BenchCase, TimingRow};
pub use confusion::{confusion_matrix3, ConfusionMatrix3, CLASSES};
pub use dynamics::{classify_effect_changes, quantile, Change, ChangeCounts, DynamicsReport};
pub use graph::{clustering_coefficient, local_clustering, mean_path_length, small_world_ness, Graph, GraphMetrics, PathLength};
pub use ks::{ks_grouped, ks_two_sample, KsResult, Pooling};
pub use report::{emit_plots, line_chart_svg, DurationPoint, EvaluationReport, MethodEvaluation};
pub use roc::{classify_at, labelled_scores, roc_curve, tpr_at_fpr, RocCurve, RocPoint};

use ndarray::Array2;

use crate::error::Result;
use crate::estimators::ConnectivityMatrix;
use crate::scalar::Scalar;

/// ROC, TPR at `target_fpr` and, for signed methods, the 3-class confusion
/// matrix at that operating point.
pub fn evaluate_method<S: Scalar>(cm: &ConnectivityMatrix<S>, truth: &Array2<i8>, target_fpr: f64) -> Result<MethodEvaluation> {
    let roc = roc_curve(cm, truth)?;
    let op = *roc.operating_point(target_fpr);
    let confusion = if cm.method.is_signed() {
        Some(confusion_matrix3(&classify_at(cm, op.threshold), truth)?)
    } else {
        None
    };
    Ok(MethodEvaluation {
        method: cm.method,
        auc: roc.auc(),
        tpr_at_target: tpr_at_fpr(&roc, target_fpr),
        target_fpr,
        operating_threshold: op.threshold,
        roc,
        confusion,
    })
}
