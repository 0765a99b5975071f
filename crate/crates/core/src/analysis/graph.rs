use std::collections::VecDeque;

use ndarray::Array2;
use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::ConnectionMask;

/// Undirected simple graph as sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Edge `{i, j}` wherever `directed(i, j)` or `directed(j, i)` holds; loops are dropped.
    pub fn symmetrized(n: usize, directed: impl Fn(usize, usize) -> bool) -> Self {
        let adj = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && (directed(i, j) || directed(j, i))).collect())
            .collect();
        Self { adj }
    }

    pub fn from_classes(classes: &Array2<i8>) -> Self {
        Self::symmetrized(classes.nrows(), |i, j| classes[[i, j]] != 0)
    }

    pub fn from_mask(mask: &ConnectionMask) -> Self {
        Self::symmetrized(mask.len(), |i, j| mask.get(i, j))
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Array2::from_elem((n, n), false);
        for (a, b) in edges {
            m[[a, b]] = true;
        }
        Self::symmetrized(n, |i, j| m[[i, j]])
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Uniform random graph with exactly `edges` undirected edges.
    pub fn random_with_edges<R: Rng + ?Sized>(n: usize, edges: usize, rng: &mut R) -> Result<Self> {
        let pairs = n * n.saturating_sub(1) / 2;
        if edges > pairs {
            return Err(Error::param("edges", format!("{edges} exceeds the {pairs} possible pairs")));
        }
        let chosen = sample(rng, pairs, edges).into_vec();
        let mut list = Vec::with_capacity(edges);
        for idx in chosen {
            // unrank idx into the pair (a, b), a < b, row-major over the upper triangle
            let mut a = 0;
            let mut rest = idx;
            while rest >= n - 1 - a {
                rest -= n - 1 - a;
                a += 1;
            }
            list.push((a, a + 1 + rest));
        }
        Ok(Self::from_edges(n, list))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLength {
    /// Mean shortest-path length over reachable unordered pairs (0 if none).
    pub mpl: f64,
    /// Fraction of unordered pairs that are connected by a path.
    pub reachable_fraction: f64,
}

fn bfs(graph: &Graph, source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; graph.len()];
    let mut queue = VecDeque::from([source]);
    dist[source] = 0;
    while let Some(u) = queue.pop_front() {
        for &v in graph.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Average distance over connected unordered pairs; unreachable pairs are
/// left out and reported through `reachable_fraction`.
pub fn mean_path_length(graph: &Graph) -> Result<PathLength> {
    let n = graph.len();
    if n < 2 {
        return Err(Error::param("graph", format!("needs at least 2 nodes, got {n}")));
    }
    let (sum, reachable) = (0..n)
        .into_par_iter()
        .map(|s| {
            let d = bfs(graph, s);
            d[s + 1..].iter().filter(|&&x| x != usize::MAX).fold((0usize, 0usize), |(a, c), &x| (a + x, c + 1))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let pairs = n * (n - 1) / 2;
    Ok(PathLength {
        mpl: if reachable == 0 { 0.0 } else { sum as f64 / reachable as f64 },
        reachable_fraction: reachable as f64 / pairs as f64,
    })
}

/// Local clustering `2E / (k(k−1))` per node, 0 below degree 2.
pub fn local_clustering(graph: &Graph) -> Vec<f64> {
    (0..graph.len())
        .map(|i| {
            let nb = graph.neighbors(i);
            let k = nb.len();
            if k < 2 {
                return 0.0;
            }
            let links: usize = nb
                .iter()
                .enumerate()
                .map(|(x, &a)| nb[x + 1..].iter().filter(|&&b| graph.has_edge(a, b)).count())
                .sum();
            2.0 * links as f64 / (k * (k - 1)) as f64
        })
        .collect()
}

/// Mean local clustering over all nodes.
pub fn clustering_coefficient(graph: &Graph) -> f64 {
    let local = local_clustering(graph);
    if local.is_empty() {
        0.0
    } else {
        local.iter().sum::<f64>() / local.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    pub nodes: usize,
    pub edges: usize,
    pub mpl: f64,
    pub reachable_fraction: f64,
    pub clustering: f64,
    pub mpl_rand: f64,
    pub clustering_rand: f64,
    /// `(C / C_rand) / (MPL / MPL_rand)`, 0 when degenerate.
    pub small_world_ness: f64,
    /// A zero denominator made the ratio undefined.
    pub degenerate: bool,
}

/// Clustering, path length and small-world-ness against the average of
/// `reference_realizations` uniform random graphs with the same node and
/// edge counts.
pub fn small_world_ness<R: Rng + ?Sized>(graph: &Graph, rng: &mut R, reference_realizations: usize) -> Result<GraphMetrics> {
    let edges = graph.edge_count();
    if edges == 0 {
        return Err(Error::param("graph", "has no edges"));
    }
    if reference_realizations == 0 {
        return Err(Error::param("reference_realizations", "must be at least 1"));
    }
    let path = mean_path_length(graph)?;
    let clustering = clustering_coefficient(graph);
    let (mut mpl_rand, mut clustering_rand) = (0.0, 0.0);
    for _ in 0..reference_realizations {
        let reference = Graph::random_with_edges(graph.len(), edges, rng)?;
        mpl_rand += mean_path_length(&reference)?.mpl;
        clustering_rand += clustering_coefficient(&reference);
    }
    mpl_rand /= reference_realizations as f64;
    clustering_rand /= reference_realizations as f64;
    let degenerate = clustering_rand == 0.0 || path.mpl == 0.0 || mpl_rand == 0.0;
    Ok(GraphMetrics {
        nodes: graph.len(),
        edges,
        mpl: path.mpl,
        reachable_fraction: path.reachable_fraction,
        clustering,
        mpl_rand,
        clustering_rand,
        small_world_ness: if degenerate { 0.0 } else { (clustering / clustering_rand) / (path.mpl / mpl_rand) },
        degenerate,
    })
}
