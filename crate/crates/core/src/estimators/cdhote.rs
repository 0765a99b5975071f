use ndarray::Array2;

use super::matrix::{ConnectivityMatrix, Method};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One pair's position in the (DHOTE, DHOTECI) plane relative to the
/// reference point `M` of both maxima.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CdhotePoint<S = f64> {
    pub dhote: S,
    pub dhote_ci: S,
    pub reference: (S, S),
}

impl<S: Scalar> CdhotePoint<S> {
    pub fn distance(&self) -> S {
        let dx = self.reference.0 - self.dhote;
        let dy = self.reference.1 - self.dhote_ci;
        (dx * dx + dy * dy).sqrt()
    }
}

fn off_diagonal_max<S: Scalar>(m: &Array2<S>) -> S {
    m.indexed_iter()
        .filter(|((i, j), _)| i != j)
        .map(|(_, &v)| v)
        .fold(S::neg_infinity(), S::max)
}

/// Euclidean distance of every pair to `(max DHOTE, max DHOTECI)`; smaller
/// means a more likely connection. Maxima exclude the diagonal.
pub fn cdhote<S: Scalar>(dhote: &ConnectivityMatrix<S>, dhoteci: &ConnectivityMatrix<S>) -> Result<ConnectivityMatrix<S>> {
    if dhote.values.dim() != dhoteci.values.dim() {
        return Err(Error::param("dhoteci", "shape differs from the DHOTE matrix"));
    }
    let k = dhote.len();
    if k < 2 {
        return Err(Error::param("dhote", "need at least two channels"));
    }
    let reference = (off_diagonal_max(&dhote.values), off_diagonal_max(&dhoteci.values));
    let values = Array2::from_shape_fn((k, k), |(i, j)| {
        CdhotePoint {
            dhote: dhote.values[[i, j]],
            dhote_ci: dhoteci.values[[i, j]],
            reference,
        }
        .distance()
    });
    ConnectivityMatrix::new(values, dhote.delays.clone(), Method::Cdhote, dhote.params.clone())
}
