use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Poisson};

use super::mask::ConnectionMask;
use super::network::{GroundTruthNetwork, NeuronType};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    In,
    Out,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation.
    pub sd: f64,
    pub min: usize,
    pub max: usize,
}

impl Summary {
    pub fn of(values: &[usize]) -> Self {
        if values.is_empty() {
            return Self {
                mean: 0.0,
                sd: 0.0,
                min: 0,
                max: 0,
            };
        }
        let n = values.len() as f64;
        let mean = values.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = values.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            sd: var.sqrt(),
            min: *values.iter().min().unwrap(),
            max: *values.iter().max().unwrap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStatistics {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    pub total_degree: Vec<usize>,
    pub neuron_types: Vec<NeuronType>,
}

impl DegreeStatistics {
    pub fn from_mask(mask: &ConnectionMask, neuron_types: Vec<NeuronType>) -> Self {
        let n = mask.len();
        let in_degree: Vec<usize> = (0..n).map(|i| mask.in_degree(i)).collect();
        let out_degree: Vec<usize> = (0..n).map(|i| mask.out_degree(i)).collect();
        let total_degree = in_degree.iter().zip(&out_degree).map(|(a, b)| a + b).collect();
        Self {
            in_degree,
            out_degree,
            total_degree,
            neuron_types,
        }
    }

    pub fn degrees(&self, kind: DegreeKind) -> &[usize] {
        match kind {
            DegreeKind::In => &self.in_degree,
            DegreeKind::Out => &self.out_degree,
            DegreeKind::Total => &self.total_degree,
        }
    }

    /// Degrees of the neurons of one type.
    pub fn degrees_of(&self, kind: DegreeKind, neuron_type: NeuronType) -> Vec<usize> {
        self.degrees(kind)
            .iter()
            .zip(&self.neuron_types)
            .filter(|(_, &t)| t == neuron_type)
            .map(|(&d, _)| d)
            .collect()
    }

    pub fn summary(&self, kind: DegreeKind) -> Summary {
        Summary::of(self.degrees(kind))
    }

    pub fn summary_of(&self, kind: DegreeKind, neuron_type: NeuronType) -> Summary {
        Summary::of(&self.degrees_of(kind, neuron_type))
    }

    /// Counts per degree value `0..=max`, one row each for excitatory and inhibitory neurons.
    pub fn histogram(&self, kind: DegreeKind) -> DegreeHistogram {
        let values = self.degrees(kind);
        let max = values.iter().copied().max().unwrap_or(0);
        let mut excitatory = vec![0usize; max + 1];
        let mut inhibitory = vec![0usize; max + 1];
        for (&d, &t) in values.iter().zip(&self.neuron_types) {
            match t {
                NeuronType::Excitatory => excitatory[d] += 1,
                NeuronType::Inhibitory => inhibitory[d] += 1,
            }
        }
        DegreeHistogram {
            kind,
            excitatory,
            inhibitory,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeHistogram {
    pub kind: DegreeKind,
    pub excitatory: Vec<usize>,
    pub inhibitory: Vec<usize>,
}

pub fn degree_statistics(network: &GroundTruthNetwork) -> DegreeStatistics {
    let n = network.len();
    let mask = ConnectionMask::from_edges(n, network.edges().map(|(i, j, _, _)| (i, j)));
    DegreeStatistics::from_mask(&mask, network.neuron_types().to_vec())
}

/// Least-squares slope of log density against log degree, using
/// logarithmically spaced bins (`bins_per_decade`) over `[k_min, max]`.
pub fn tail_slope(degrees: &[usize], k_min: usize, bins_per_decade: usize) -> Result<f64> {
    if k_min == 0 || bins_per_decade == 0 {
        return Err(Error::param("k_min", "k_min and bins_per_decade must be positive"));
    }
    let tail: Vec<f64> = degrees.iter().filter(|&&d| d >= k_min).map(|&d| d as f64).collect();
    let k_max = tail.iter().copied().fold(0.0, f64::max);
    if tail.len() < 2 || k_max <= k_min as f64 {
        return Err(Error::param("degrees", "not enough spread above k_min to fit a slope"));
    }
    let ratio = 10f64.powf(1.0 / bins_per_decade as f64);
    let mut edges = vec![k_min as f64];
    while *edges.last().unwrap() <= k_max {
        edges.push(edges.last().unwrap() * ratio);
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for w in edges.windows(2) {
        let count = tail.iter().filter(|&&d| d >= w[0] && d < w[1]).count();
        if count > 0 {
            let density = count as f64 / ((w[1] - w[0]) * tail.len() as f64);
            xs.push((w[0] * w[1]).sqrt().ln());
            ys.push(density.ln());
        }
    }
    if xs.len() < 2 {
        return Err(Error::param("degrees", "fewer than two occupied bins"));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of `samples` against Poisson(`mean`). Adjacent
/// degree classes are merged until each expects at least five observations;
/// the two outer classes absorb the tails.
pub fn poisson_chi_square(samples: &[usize], mean: f64) -> Result<ChiSquareTest> {
    if samples.is_empty() || !(mean > 0.0) {
        return Err(Error::param("mean", "need samples and a positive mean"));
    }
    let poisson = Poisson::new(mean).map_err(|e| Error::param("mean", e.to_string()))?;
    let n = samples.len() as f64;
    let max = *samples.iter().max().unwrap();
    let upper = max.max((mean + 10.0 * mean.sqrt()) as usize) + 1;
    let mut observed = vec![0f64; upper + 1];
    for &s in samples {
        observed[s] += 1.0;
    }
    // Class k holds P(X = k); the last class holds P(X ≥ upper), the first P(X ≤ 0).
    let mut expected: Vec<f64> = (0..=upper).map(|k| n * poisson.pmf(k as u64)).collect();
    expected[upper] = n * (1.0 - poisson.cdf(upper as u64 - 1));

    let mut classes: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..=upper {
        o += observed[k];
        e += expected[k];
        if e >= 5.0 {
            classes.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = classes.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    if classes.len() < 2 {
        return Err(Error::param("samples", "too few samples for a chi-square test"));
    }
    let statistic: f64 = classes.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = classes.len() - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(statistic);
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}
