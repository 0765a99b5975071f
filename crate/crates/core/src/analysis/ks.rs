use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    /// `sup |ECDF_a − ECDF_b|`.
    pub d: f64,
    pub p_value: f64,
    pub reject: bool,
    /// The p value came from the exact null distribution rather than the
    /// asymptotic one.
    pub exact: bool,
}

/// Largest `n_a · n_b` for which the exact null distribution is used.
const EXACT_LIMIT: usize = 10_000;

/// Kolmogorov survival function `Q(λ) = 2 Σ (−1)^(j−1) exp(−2 j² λ²)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// `P(D >= h / (na·nb))` under the null with continuous data, by counting
/// the lattice paths that keep `|i·nb − j·na| < h`.
fn exact_p(na: usize, nb: usize, h: usize) -> f64 {
    if h == 0 {
        return 1.0;
    }
    let inside = |i: usize, j: usize| (i * nb).abs_diff(j * na) < h;
    let mut row = vec![0.0f64; nb + 1];
    for i in 0..=na {
        for j in 0..=nb {
            row[j] = if !inside(i, j) {
                0.0
            } else if i == 0 && j == 0 {
                1.0
            } else {
                let up = if i > 0 { row[j] } else { 0.0 };
                let left = if j > 0 { row[j - 1] } else { 0.0 };
                up + left
            };
        }
    }
    // C(na + nb, na) in floating point
    let total = (1..=na).fold(1.0f64, |acc, i| acc * (nb + i) as f64 / i as f64);
    (1.0 - row[nb] / total).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov–Smirnov test. Small tie-free samples
/// (`n_a · n_b <= 10 000`) use the exact null distribution; otherwise the
/// asymptotic Kolmogorov distribution at `sqrt(n_a n_b / (n_a + n_b)) · D`.
pub fn ks_two_sample(sample_a: &[f64], sample_b: &[f64], alpha: f64) -> Result<KsResult> {
    if sample_a.is_empty() || sample_b.is_empty() {
        return Err(Error::param("sample", "both samples must be non-empty"));
    }
    if sample_a.iter().chain(sample_b).any(|v| v.is_nan()) {
        return Err(Error::param("sample", "NaN value"));
    }
    // the smaller sample first, so that the statistic is symmetric bit for bit
    let (a, b) = if (sample_a.len(), sample_a) <= (sample_b.len(), sample_b) {
        (sample_a, sample_b)
    } else {
        (sample_b, sample_a)
    };
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j, mut h) = (0, 0, 0usize);
    while i < na || j < nb {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        while i < na && a[i] == v {
            i += 1;
        }
        while j < nb && b[j] == v {
            j += 1;
        }
        h = h.max((i * nb).abs_diff(j * na));
    }
    let d = h as f64 / (na * nb) as f64;
    let mut pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let ties = pooled.windows(2).any(|w| w[0] == w[1]);
    let exact = na * nb <= EXACT_LIMIT && !ties;
    let p_value = if exact {
        exact_p(na, nb, h)
    } else {
        let ne = (na * nb) as f64 / (na + nb) as f64;
        kolmogorov_q(ne.sqrt() * d)
    };
    Ok(KsResult {
        d,
        p_value,
        reject: p_value < alpha,
        exact,
    })
}

/// How samples from several recordings (e.g. chambers) are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// Concatenate all groups per side and run one test.
    Pooled,
    /// Test group `i` of side a against group `i` of side b.
    Pairwise,
}

pub fn ks_grouped(groups_a: &[Vec<f64>], groups_b: &[Vec<f64>], pooling: Pooling, alpha: f64) -> Result<Vec<KsResult>> {
    match pooling {
        Pooling::Pooled => {
            let a: Vec<f64> = groups_a.concat();
            let b: Vec<f64> = groups_b.concat();
            Ok(vec![ks_two_sample(&a, &b, alpha)?])
        }
        Pooling::Pairwise => {
            if groups_a.len() != groups_b.len() {
                return Err(Error::param("groups", format!("{} groups against {}", groups_a.len(), groups_b.len())));
            }
            groups_a.iter().zip(groups_b).map(|(a, b)| ks_two_sample(a, b, alpha)).collect()
        }
    }
}
