use ndarray::Array2;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

/// Directed binary adjacency: `get(i, j)` is the connection i → j.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectionMask {
    adj: Array2<bool>,
}

impl ConnectionMask {
    pub fn empty(n: usize) -> Self {
        Self {
            adj: Array2::from_elem((n, n), false),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut m = Self::empty(n);
        for (i, j) in edges {
            m.set(i, j, true);
        }
        m
    }

    pub fn len(&self) -> usize {
        self.adj.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.nrows() == 0
    }

    #[inline]
    pub fn get(&self, source: usize, target: usize) -> bool {
        self.adj[[source, target]]
    }

    #[inline]
    pub fn set(&mut self, source: usize, target: usize, value: bool) {
        self.adj[[source, target]] = value;
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&b| b).count()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .indexed_iter()
            .filter(|(_, &b)| b)
            .map(|((i, j), _)| (i, j))
    }

    pub fn out_degree(&self, node: usize) -> usize {
        self.adj.row(node).iter().filter(|&&b| b).count()
    }

    pub fn in_degree(&self, node: usize) -> usize {
        self.adj.column(node).iter().filter(|&&b| b).count()
    }

    pub fn has_self_loops(&self) -> bool {
        (0..self.len()).any(|i| self.adj[[i, i]])
    }

    /// Applies a node relabelling: node `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut m = Self::empty(self.len());
        for (i, j) in self.edges() {
            m.set(perm[i], perm[j], true);
        }
        m
    }

    pub fn as_array(&self) -> &Array2<bool> {
        &self.adj
    }
}

/// Undirected ring lattice: every node linked to its `k/2` nearest neighbours
/// on each side, stored as a symmetric mask.
pub fn ring_lattice(n: usize, k: usize) -> ConnectionMask {
    let mut m = ConnectionMask::empty(n);
    for i in 0..n {
        for s in 1..=k / 2 {
            let j = (i + s) % n;
            if j != i {
                m.set(i, j, true);
                m.set(j, i, true);
            }
        }
    }
    m
}

/// Watts–Strogatz rewiring of a ring lattice, symmetric mask.
pub fn watts_strogatz<R: Rng + ?Sized>(n: usize, k: usize, beta: f64, rng: &mut R) -> ConnectionMask {
    let mut m = ring_lattice(n, k);
    for s in 1..=k / 2 {
        for i in 0..n {
            let j = (i + s) % n;
            if !m.get(i, j) || rng.random::<f64>() >= beta {
                continue;
            }
            let candidates: Vec<usize> = (0..n).filter(|&c| c != i && !m.get(i, c)).collect();
            if let Some(&c) = candidates.choose(rng) {
                m.set(i, j, false);
                m.set(j, i, false);
                m.set(i, c, true);
                m.set(c, i, true);
            }
        }
    }
    m
}

pub(crate) fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
