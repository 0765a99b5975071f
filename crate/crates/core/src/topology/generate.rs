use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mask::{random_permutation, ConnectionMask};
use super::network::NeuronType;
use crate::error::{Error, Result};

/// Topology family and its construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "UPPERCASE")]
pub enum Family {
    /// Fixed out-degree random network without inhibitory → inhibitory edges.
    Sii { out_degree: usize },
    /// Directed Erdős–Rényi: every ordered pair connected with probability `p`.
    Er { p: f64 },
    /// Uncorrelated configuration model with a truncated power-law degree
    /// sequence. Degrees are drawn from `[min_degree, cutoff_factor * sqrt(N)]`.
    Ic {
        min_degree: usize,
        gamma: f64,
        #[serde(default = "default_ic_cutoff")]
        cutoff_factor: f64,
    },
    /// Directed preferential attachment grown from a fully connected core.
    Ba {
        m_in: usize,
        m_out: usize,
        #[serde(default = "default_ba_core")]
        core_size: usize,
    },
}

fn default_ic_cutoff() -> f64 {
    12.0
}

fn default_ba_core() -> usize {
    25
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Sii { .. } => "SII",
            Family::Er { .. } => "ER",
            Family::Ic { .. } => "IC",
            Family::Ba { .. } => "BA",
        }
    }

    pub fn sii() -> Self {
        Family::Sii { out_degree: 100 }
    }

    pub fn er(p: f64) -> Self {
        Family::Er { p }
    }

    pub fn ic() -> Self {
        Family::Ic {
            min_degree: 10,
            gamma: 2.0,
            cutoff_factor: default_ic_cutoff(),
        }
    }

    pub fn ba() -> Self {
        Family::Ba {
            m_in: 12,
            m_out: 12,
            core_size: default_ba_core(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySpec {
    pub n: usize,
    #[serde(flatten)]
    pub family: Family,
}

impl TopologySpec {
    pub fn new(n: usize, family: Family) -> Self {
        Self { n, family }
    }

    pub fn excitatory_count(&self) -> usize {
        excitatory_count(self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        if n < 10 {
            return Err(Error::param("n", format!("need at least 10 neurons, got {n}")));
        }
        match self.family {
            Family::Sii { out_degree } => {
                let n_exc = self.excitatory_count();
                if out_degree == 0 || out_degree >= n {
                    return Err(Error::param("out_degree", format!("must lie in [1, {}]", n - 1)));
                }
                if out_degree > n_exc {
                    return Err(Error::param(
                        "out_degree",
                        format!("inhibitory neurons may only target the {n_exc} excitatory neurons"),
                    ));
                }
            }
            Family::Er { p } => {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::param("p", format!("must lie in (0, 1), got {p}")));
                }
            }
            Family::Ic {
                min_degree,
                gamma,
                cutoff_factor,
            } => {
                if min_degree == 0 || min_degree >= n {
                    return Err(Error::param("min_degree", format!("must lie in [1, {}]", n - 1)));
                }
                if !(gamma > 1.0) {
                    return Err(Error::param("gamma", "must exceed 1"));
                }
                if ic_cutoff(n, cutoff_factor) < min_degree {
                    return Err(Error::param("cutoff_factor", "degree cutoff falls below min_degree"));
                }
            }
            Family::Ba {
                m_in,
                m_out,
                core_size,
            } => {
                if m_in == 0 || m_out == 0 {
                    return Err(Error::param("m_in", "attachment counts must be positive"));
                }
                if core_size <= m_in.max(m_out) || core_size > n {
                    return Err(Error::param(
                        "core_size",
                        format!("must exceed max(m_in, m_out) and not exceed n = {n}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Neurons `0..4N/5` are excitatory, the rest inhibitory.
pub fn excitatory_count(n: usize) -> usize {
    n * 4 / 5
}

pub fn neuron_types(n: usize) -> Vec<NeuronType> {
    let n_exc = excitatory_count(n);
    (0..n)
        .map(|i| {
            if i < n_exc {
                NeuronType::Excitatory
            } else {
                NeuronType::Inhibitory
            }
        })
        .collect()
}

fn ic_cutoff(n: usize, factor: f64) -> usize {
    ((factor * (n as f64).sqrt()).floor() as usize).min(n - 1)
}

pub fn generate_topology<R: Rng + ?Sized>(spec: &TopologySpec, rng: &mut R) -> Result<ConnectionMask> {
    spec.validate()?;
    let n = spec.n;
    let mask = match spec.family {
        Family::Sii { out_degree } => sii(n, out_degree, rng),
        Family::Er { p } => erdos_renyi(n, p, rng),
        Family::Ic {
            min_degree,
            gamma,
            cutoff_factor,
        } => uncorrelated_configuration(n, min_degree, gamma, ic_cutoff(n, cutoff_factor), rng)?,
        Family::Ba {
            m_in,
            m_out,
            core_size,
        } => {
            let grown = barabasi_albert(n, m_in, m_out, core_size, rng);
            // Decouple hub position (oldest nodes) from the index-block neuron types.
            let perm = random_permutation(n, rng);
            grown.permuted(&perm)
        }
    };
    Ok(mask)
}

fn sii<R: Rng + ?Sized>(n: usize, out_degree: usize, rng: &mut R) -> ConnectionMask {
    let n_exc = excitatory_count(n);
    let mut m = ConnectionMask::empty(n);
    for i in 0..n {
        if i < n_exc {
            // Any neuron but itself.
            for j in sample(rng, n - 1, out_degree) {
                let j = if j >= i { j + 1 } else { j };
                m.set(i, j, true);
            }
        } else {
            for j in sample(rng, n_exc, out_degree) {
                m.set(i, j, true);
            }
        }
    }
    m
}

fn erdos_renyi<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> ConnectionMask {
    let mut m = ConnectionMask::empty(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                m.set(i, j, true);
            }
        }
    }
    m
}

/// Degree draw from P(k) ∝ k^-gamma on `[k_min, k_max]`.
fn power_law_degrees<R: Rng + ?Sized>(
    n: usize,
    k_min: usize,
    k_max: usize,
    gamma: f64,
    rng: &mut R,
) -> Vec<usize> {
    let weights: Vec<f64> = (k_min..=k_max).map(|k| (k as f64).powf(-gamma)).collect();
    let total: f64 = weights.iter().sum();
    let mut cdf = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cdf.push(acc);
    }
    let draw = |rng: &mut R| {
        let u: f64 = rng.random();
        k_min + cdf.partition_point(|&c| c < u).min(cdf.len() - 1)
    };
    let mut degrees: Vec<usize> = (0..n).map(|_| draw(rng)).collect();
    while degrees.iter().sum::<usize>() % 2 == 1 {
        let i = rng.random_range(0..n);
        degrees[i] = draw(rng);
    }
    degrees
}

/// Undirected stub matching with double-edge-swap repair of rejected pairs,
/// then a random orientation per edge. Total degree (in + out) equals the
/// drawn undirected degree exactly.
fn uncorrelated_configuration<R: Rng + ?Sized>(
    n: usize,
    k_min: usize,
    gamma: f64,
    k_max: usize,
    rng: &mut R,
) -> Result<ConnectionMask> {
    use rand::seq::SliceRandom;
    use std::collections::HashSet;

    let degrees = power_law_degrees(n, k_min, k_max, gamma, rng);
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d))
        .collect();
    stubs.shuffle(rng);

    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(stubs.len() / 2);
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(stubs.len());
    let mut rejected: Vec<(usize, usize)> = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (a, b) = (pair[0], pair[1]);
        if a == b || present.contains(&key(a, b)) {
            rejected.push((a, b));
        } else {
            present.insert(key(a, b));
            edges.push((a, b));
        }
    }

    // Swap each rejected pair (u, v) with a random edge (x, y) into (u, x), (v, y).
    let mut attempts = 0usize;
    while let Some((u, v)) = rejected.pop() {
        attempts += 1;
        if attempts > 1_000_000 {
            return Err(Error::param(
                "min_degree",
                "could not realise the drawn degree sequence without self or parallel edges",
            ));
        }
        let e = rng.random_range(0..edges.len());
        let (mut x, mut y) = edges[e];
        if rng.random::<bool>() {
            std::mem::swap(&mut x, &mut y);
        }
        let ok = u != x
            && v != y
            && key(u, x) != key(v, y)
            && !present.contains(&key(u, x))
            && !present.contains(&key(v, y));
        if ok {
            present.remove(&key(edges[e].0, edges[e].1));
            present.insert(key(u, x));
            present.insert(key(v, y));
            edges[e] = (u, x);
            edges.push((v, y));
        } else {
            rejected.push((u, v));
        }
    }

    let mut m = ConnectionMask::empty(n);
    for (a, b) in edges {
        if rng.random::<bool>() {
            m.set(a, b, true);
        } else {
            m.set(b, a, true);
        }
    }
    Ok(m)
}

/// Directed growth: each new node sends `m_out` edges to and receives `m_in`
/// edges from distinct existing nodes, chosen proportionally to total degree.
fn barabasi_albert<R: Rng + ?Sized>(
    n: usize,
    m_in: usize,
    m_out: usize,
    core: usize,
    rng: &mut R,
) -> ConnectionMask {
    let mut m = ConnectionMask::empty(n);
    // Each node appears in `pool` once per unit of total degree.
    let mut pool: Vec<usize> = Vec::with_capacity(2 * n * (m_in + m_out) + core * core * 2);
    for i in 0..core {
        for j in 0..core {
            if i != j {
                m.set(i, j, true);
                pool.push(i);
                pool.push(j);
            }
        }
    }
    let mut chosen = Vec::with_capacity(m_in.max(m_out));
    for new in core..n {
        for (count, outgoing) in [(m_out, true), (m_in, false)] {
            chosen.clear();
            while chosen.len() < count {
                let candidate = pool[rng.random_range(0..pool.len())];
                if !chosen.contains(&candidate) {
                    chosen.push(candidate);
                }
            }
            for &old in &chosen {
                if outgoing {
                    m.set(new, old, true);
                } else {
                    m.set(old, new, true);
                }
            }
        }
        for (i, j) in (0..new).flat_map(|old| [(new, old), (old, new)]) {
            if m.get(i, j) {
                pool.push(i);
                pool.push(j);
            }
        }
    }
    m
}
