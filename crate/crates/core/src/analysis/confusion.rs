use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class order of the rows and columns.
pub const CLASSES: [&str; 3] = ["inhibitory", "excitatory", "none"];

fn index(class: i8) -> usize {
    match class {
        -1 => 0,
        1 => 1,
        _ => 2,
    }
}

/// 3×3 counts, rows = predicted class, columns = actual class, both in
/// [`CLASSES`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix3 {
    pub counts: [[usize; 3]; 3],
    /// Per predicted class: diagonal / row sum (0 for an empty row).
    pub precision: [f64; 3],
    /// Per actual class: diagonal / column sum (0 for an empty column).
    pub recall: [f64; 3],
    pub accuracy: f64,
}

impl ConfusionMatrix3 {
    pub fn from_counts(counts: [[usize; 3]; 3]) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let row = |r: usize| counts[r].iter().sum::<usize>();
        let col = |c: usize| counts.iter().map(|r| r[c]).sum::<usize>();
        let diag: usize = (0..3).map(|i| counts[i][i]).sum();
        let total: usize = (0..3).map(row).sum();
        Self {
            counts,
            precision: [0, 1, 2].map(|i| ratio(counts[i][i], row(i))),
            recall: [0, 1, 2].map(|i| ratio(counts[i][i], col(i))),
            accuracy: ratio(diag, total),
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }
}

/// Off-diagonal comparison of predicted and actual ternary classes.
pub fn confusion_matrix3(predicted: &Array2<i8>, actual: &Array2<i8>) -> Result<ConfusionMatrix3> {
    if predicted.dim() != actual.dim() || predicted.nrows() != predicted.ncols() {
        return Err(Error::param("tcm", format!("shape {:?} against truth {:?}", predicted.dim(), actual.dim())));
    }
    let mut counts = [[0usize; 3]; 3];
    for ((i, j), &p) in predicted.indexed_iter() {
        if i != j {
            counts[index(p)][index(actual[[i, j]])] += 1;
        }
    }
    Ok(ConfusionMatrix3::from_counts(counts))
}
