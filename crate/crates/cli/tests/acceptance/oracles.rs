//! Brute-force oracles for the estimator and graph primitives on small
//! instances (at most 7 nodes, at most 1000 samples).

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use spikeconn::analysis::{clustering_coefficient, ks_two_sample, local_clustering, mean_path_length, Graph};
use spikeconn::estimators::{
    cdhote, coincidence_index, correlogram_stack, cross_correlogram, delayed_mutual_information, delayed_transfer_entropy,
    mutual_information_stack, transfer_entropy_stack, ConnectivityMatrix, DelayFunction, Method, Normalization, TeParams,
};
use spikeconn::rng::rng_from_seed;
use spikeconn::spikedata::BinaryRaster;
use spikeconn::tspe::{build_edge_filter, build_running_total_filter, running_total, spe};

const REL: f64 = 1e-9;
const ABS_FLOOR: f64 = 1e-14;

/// Largest relative deviation seen by one family of checks.
struct Check {
    name: &'static str,
    worst: f64,
    cases: usize,
    failures: usize,
}

impl Check {
    fn new(name: &'static str) -> Self {
        Self { name, worst: 0.0, cases: 0, failures: 0 }
    }

    fn close(&mut self, got: f64, want: f64) {
        self.cases += 1;
        let diff = (got - want).abs();
        let scale = got.abs().max(want.abs());
        let rel = if scale > 0.0 { diff / scale } else { 0.0 };
        if diff > ABS_FLOOR {
            self.worst = self.worst.max(rel);
        }
        if !(diff <= REL * scale || diff <= ABS_FLOOR) {
            self.failures += 1;
        }
    }

    fn holds(&mut self, ok: bool) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
        }
    }
}

fn random_raster<R: Rng>(rng: &mut R, channels: usize, len: usize) -> (BinaryRaster, Vec<Vec<u8>>) {
    let mut rows: Vec<Vec<u8>> = (0..channels)
        .map(|_| {
            let rate = rng.random_range(0.03..0.2);
            (0..len).map(|_| rng.random_bool(rate) as u8).collect()
        })
        .collect();
    // Couple channel 1 to channel 0 at a lag of 3 so the statistics are not all near zero.
    for t in 0..len - 3 {
        if rows[0][t] == 1 && rng.random_bool(0.6) {
            rows[1][t + 3] = 1;
        }
    }
    (BinaryRaster::from_dense(&rows), rows)
}

fn plugin_mi(pairs: &[(u8, u8)]) -> f64 {
    let n = pairs.len() as f64;
    let mut joint = [[0f64; 2]; 2];
    for &(a, b) in pairs {
        joint[a as usize][b as usize] += 1.0;
    }
    let pa = [joint[0][0] + joint[0][1], joint[1][0] + joint[1][1]];
    let pb = [joint[0][0] + joint[1][0], joint[0][1] + joint[1][1]];
    let mut mi = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let c = joint[a][b];
            if c > 0.0 {
                mi += c / n * (c * n / (pa[a] * pb[b])).log2();
            }
        }
    }
    mi
}

/// `x(t)` against `y(t + d)`.
fn mi_oracle(x: &[u8], y: &[u8], d: i32) -> f64 {
    let len = x.len() as i32;
    let pairs: Vec<(u8, u8)> = (0..len)
        .filter(|&t| t + d >= 0 && t + d < len)
        .map(|t| (x[t as usize], y[(t + d) as usize]))
        .collect();
    plugin_mi(&pairs)
}

/// Target future `y[i+1]`, target history `y[i+1-k..=i]`, source word of `l`
/// bins whose last bin sits `d` bins before the target future.
fn te_oracle(x: &[u8], y: &[u8], p: &TeParams, d: usize) -> f64 {
    let (k, l) = (p.k, p.l);
    let len = x.len();
    let lo = (k - 1).max(d + l - 2);
    let word = |s: &[u8]| s.iter().fold(0u32, |acc, &b| acc * 2 + b as u32);
    let mut joint: HashMap<(u8, u32, u32), f64> = HashMap::new();
    let mut n = 0.0;
    for i in lo..=len - 2 {
        let future = y[i + 1];
        let hist = word(&y[i + 1 - k..=i]);
        let s = i + 2 - d - l;
        let src = word(&x[s..s + l]);
        *joint.entry((future, hist, src)).or_default() += 1.0;
        n += 1.0;
    }
    let mut hist_src: HashMap<(u32, u32), f64> = HashMap::new();
    let mut fut_hist: HashMap<(u8, u32), f64> = HashMap::new();
    let mut hist_only: HashMap<u32, f64> = HashMap::new();
    for (&(f, h, s), &c) in &joint {
        *hist_src.entry((h, s)).or_default() += c;
        *fut_hist.entry((f, h)).or_default() += c;
        *hist_only.entry(h).or_default() += c;
    }
    joint
        .iter()
        .map(|(&(f, h, s), &c)| c / n * (c * hist_only[&h] / (hist_src[&(h, s)] * fut_hist[&(f, h)])).log2())
        .sum()
}

fn ncc_oracle(x: &[u8], y: &[u8], d: i32) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().map(|&v| v as f64).sum::<f64>() / n;
    let my = y.iter().map(|&v| v as f64).sum::<f64>() / n;
    let sx = (x.iter().map(|&v| (v as f64 - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (y.iter().map(|&v| (v as f64 - my).powi(2)).sum::<f64>() / n).sqrt();
    let len = x.len() as i32;
    let num: f64 = (0..len)
        .filter(|&t| t + d >= 0 && t + d < len)
        .map(|t| (x[t as usize] as f64 - mx) * (y[(t + d) as usize] as f64 - my))
        .sum();
    num / (n * sx * sy)
}

fn estimators(seed: u64) -> Vec<Check> {
    let mut rng = rng_from_seed(seed);
    let mut te = Check::new("TE plug-in");
    let mut mi = Check::new("MI plug-in");
    let mut ncc = Check::new("NCC z-score");
    let mut symmetry = Check::new("NCC bitwise symmetry");
    for trial in 0..4 {
        let channels = 3 + trial;
        let (raster, rows) = random_raster(&mut rng, channels, 1000);
        for params in [
            TeParams::d1te(),
            TeParams::dte(8),
            TeParams::dhote(8),
            TeParams { k: 3, l: 1, d_max: 6 },
            TeParams { k: 1, l: 3, d_max: 5 },
        ] {
            let stack = transfer_entropy_stack::<f64>(&raster, &params).unwrap();
            for x in 0..channels {
                for y in (0..channels).filter(|&y| y != x) {
                    let f = delayed_transfer_entropy::<f64>(&raster, x, y, &params).unwrap();
                    for d in 1..=params.d_max {
                        let want = te_oracle(&rows[x], &rows[y], &params, d);
                        te.close(f.at(d as i32).unwrap(), want);
                        te.close(stack.get(x, y, d as i32), want);
                    }
                }
            }
        }
        let stack = mutual_information_stack::<f64>(&raster, -5, 5).unwrap();
        let zstack = correlogram_stack::<f64>(&raster, -25, 25, Normalization::Zscore).unwrap();
        for x in 0..channels {
            for y in (0..channels).filter(|&y| y != x) {
                let f = delayed_mutual_information::<f64>(&raster, x, y, -5, 5).unwrap();
                for d in -5..=5 {
                    let want = mi_oracle(&rows[x], &rows[y], d);
                    mi.close(f.at(d).unwrap(), want);
                    mi.close(stack.get(x, y, d), want);
                }
                let c = cross_correlogram::<f64>(&raster, x, y, -25, 25, Normalization::Zscore).unwrap();
                for d in -25..=25 {
                    let want = ncc_oracle(&rows[x], &rows[y], d);
                    ncc.close(c.at(d).unwrap(), want);
                    ncc.close(zstack.get(x, y, d), want);
                }
                for norm in [Normalization::Raw, Normalization::Geometric, Normalization::Zscore, Normalization::ZscoreNoMean] {
                    let xy = cross_correlogram::<f64>(&raster, x, y, -25, 25, norm).unwrap();
                    let yx = cross_correlogram::<f64>(&raster, y, x, -25, 25, norm).unwrap();
                    for d in -25..=25 {
                        symmetry.holds(xy.at(d).unwrap().to_bits() == yx.at(-d).unwrap().to_bits());
                    }
                }
                for d in -25..=25 {
                    symmetry.holds(zstack.get(x, y, d).to_bits() == zstack.get(y, x, -d).to_bits());
                }
            }
        }
    }
    vec![te, mi, ncc, symmetry]
}

fn ci_oracle(values: &[f64], tau: usize, rectify: bool) -> f64 {
    let g: Vec<f64> = values.iter().map(|&v| if rectify { v.abs() } else { v }).collect();
    let total: f64 = g.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let mut peak = 0;
    for (i, &v) in g.iter().enumerate() {
        if v > g[peak] {
            peak = i;
        }
    }
    let half = tau / 2;
    let width = (2 * half + 1).min(g.len());
    // Every window of this width that contains the peak, ordered by how far
    // its centre is from the peak; the nearest (leftmost on ties) wins.
    let best = (0..=g.len() - width)
        .filter(|&s| s <= peak && peak < s + width)
        .min_by_key(|&s| ((s + half) as i64 - peak as i64).abs())
        .unwrap();
    g[best..best + width].iter().sum::<f64>() / total
}

fn coincidence(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    let mut check = Check::new("coincidence index");
    for _ in 0..300 {
        let len = rng.random_range(5..30);
        let rectify = rng.random_bool(0.5);
        let values: Vec<f64> = (0..len)
            .map(|_| if rectify { rng.random_range(-1.0..1.0) } else { rng.random_range(0.0..1.0) })
            .collect();
        let tau = rng.random_range(1..=len.min(9));
        let f = DelayFunction::new(0, 1, 1, values.clone()).unwrap();
        let ci = coincidence_index(&f, tau, rectify).unwrap();
        check.close(ci.value, ci_oracle(&values, tau, rectify));
    }
    check
}

fn cdhote_distances(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed);
    let mut check = Check::new("CDHOTE distances");
    for _ in 0..50 {
        let k = rng.random_range(2..=7);
        let a = ndarray::Array2::from_shape_fn((k, k), |_| rng.random_range(0.0..0.5));
        let b = ndarray::Array2::from_shape_fn((k, k), |_| rng.random_range(0.0..1.0));
        let te = ConnectivityMatrix::new(a.clone(), None, Method::Dhote, serde_json::Value::Null).unwrap();
        let ci = ConnectivityMatrix::new(b.clone(), None, Method::Dhoteci, serde_json::Value::Null).unwrap();
        let out = cdhote(&te, &ci).unwrap();
        let mut ma = f64::MIN;
        let mut mb = f64::MIN;
        for i in 0..k {
            for j in 0..k {
                if i != j {
                    ma = ma.max(a[[i, j]]);
                    mb = mb.max(b[[i, j]]);
                }
            }
        }
        for i in 0..k {
            for j in (0..k).filter(|&j| j != i) {
                check.close(out.get(i, j), ((ma - a[[i, j]]).powi(2) + (mb - b[[i, j]]).powi(2)).sqrt());
            }
        }
    }
    check
}

fn convolutions(seed: u64) -> Vec<Check> {
    let mut rng = rng_from_seed(seed);
    let mut conv = Check::new("edge and running-total convolutions");
    let mut zero_sum = Check::new("edge filters sum to zero");
    for a in 1..=10 {
        for b in 1..=10 {
            for c in 0..=5 {
                let f = build_edge_filter(a, b, c).unwrap();
                let sum: f64 = f.taps().iter().sum();
                zero_sum.holds(sum.abs() <= 1e-12);
            }
        }
    }
    for a in 3..=8 {
        for b in 2..=6 {
            for c in 0..=2 {
                let filter = build_edge_filter(a, b, c).unwrap();
                let g = filter.taps();
                let first = 1 - (a + c) as i32;
                let d_max = 25;
                let values: Vec<f64> = (first..=d_max + (a + b + c) as i32).map(|_| rng.random_range(-1.0..1.0)).collect();
                let ncc = DelayFunction::new(0, 1, first, values.clone()).unwrap();
                let out = spe(&ncc, &filter).unwrap();
                let at = |d: i32| values[(d - first) as usize];
                for (m, &got) in out.values.iter().enumerate() {
                    // Output delay 1 + m; a full convolution (g ∗ ncc)(n) taken at
                    // n = d + len(g) − 1 − (a + c) lines the filter centre up with d.
                    let d = 1 + m as i32;
                    let n = d + g.len() as i32 - 1 - (a + c) as i32;
                    let direct: f64 = (0..g.len()).map(|q| g[q] * at(n - q as i32)).sum();
                    conv.close(got, direct);
                }
                let h = build_running_total_filter(b).unwrap();
                let total = running_total(&out, &h);
                let n = out.values.len() as i64;
                for (m, &got) in total.values.iter().enumerate() {
                    let want: f64 = (0..b as i64)
                        .filter(|&q| (m as i64 - q) >= 0 && (m as i64 - q) < n)
                        .map(|q| out.values[(m as i64 - q) as usize])
                        .sum();
                    conv.close(got, want);
                }
            }
        }
    }
    vec![conv, zero_sum]
}

fn bfs_all(adj: &[Vec<bool>]) -> Vec<Vec<Option<usize>>> {
    let n = adj.len();
    (0..n)
        .map(|s| {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if adj[u][v] && dist[v].is_none() {
                        dist[v] = Some(dist[u].unwrap() + 1);
                        queue.push_back(v);
                    }
                }
            }
            dist
        })
        .collect()
}

fn graphs(seed: u64) -> Vec<Check> {
    let mut rng = rng_from_seed(seed);
    let mut mpl = Check::new("mean path length (Floyd-Warshall)");
    let mut clustering = Check::new("clustering (triangle enumeration)");
    for _ in 0..400 {
        let n = rng.random_range(2..=7);
        let p = rng.random_range(0.2..0.9);
        let mut edges = Vec::new();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.random_bool(p) {
                    edges.push((i, j));
                    adj[i][j] = true;
                    adj[j][i] = true;
                }
            }
        }
        let graph = Graph::from_edges(n, edges);
        // Floyd–Warshall
        let inf = usize::MAX / 4;
        let mut dist = vec![vec![inf; n]; n];
        for i in 0..n {
            dist[i][i] = 0;
            for j in 0..n {
                if adj[i][j] {
                    dist[i][j] = 1;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if dist[i][k] + dist[k][j] < dist[i][j] {
                        dist[i][j] = dist[i][k] + dist[k][j];
                    }
                }
            }
        }
        let (mut sum, mut reachable) = (0usize, 0usize);
        for i in 0..n {
            for j in i + 1..n {
                if dist[i][j] < inf {
                    sum += dist[i][j];
                    reachable += 1;
                }
            }
        }
        let got = mean_path_length(&graph).unwrap();
        let want = if reachable > 0 { sum as f64 / reachable as f64 } else { 0.0 };
        mpl.close(got.mpl, want);
        mpl.close(got.reachable_fraction, reachable as f64 / (n * (n - 1) / 2) as f64);
        let bfs = bfs_all(&adj);
        mpl.holds((0..n).all(|i| (0..n).all(|j| bfs[i][j].map_or(dist[i][j] == inf, |d| d == dist[i][j]))));

        let locals = local_clustering(&graph);
        let mut total = 0.0;
        for v in 0..n {
            let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
            let k = nb.len();
            let local = if k < 2 {
                0.0
            } else {
                let mut e = 0;
                for a in 0..k {
                    for b in a + 1..k {
                        if adj[nb[a]][nb[b]] {
                            e += 1;
                        }
                    }
                }
                2.0 * e as f64 / (k * (k - 1)) as f64
            };
            clustering.close(locals[v], local);
            total += local;
        }
        clustering.close(clustering_coefficient(&graph), total / n as f64);
    }
    vec![mpl, clustering]
}

fn ecdf_distance(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.iter().filter(|&&v| v <= x).count() as f64 / s.len() as f64;
    a.iter().chain(b).map(|&x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

/// Fraction of all relabelings of the pooled sample whose statistic is at
/// least the observed one.
fn permutation_p(a: &[f64], b: &[f64], observed: f64) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let na = a.len();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        let (x, y): (Vec<(usize, f64)>, Vec<(usize, f64)>) = pooled.iter().copied().enumerate().partition(|(i, _)| mask >> i & 1 == 1);
        let x: Vec<f64> = x.into_iter().map(|p| p.1).collect();
        let y: Vec<f64> = y.into_iter().map(|p| p.1).collect();
        total += 1;
        if ecdf_distance(&x, &y) >= observed - 1e-12 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

fn kolmogorov_smirnov(seed: u64) -> Vec<Check> {
    let mut rng = rng_from_seed(seed);
    let mut stat = Check::new("K-S statistic");
    let mut exact = Check::new("K-S exact p (permutation enumeration)");
    for _ in 0..40 {
        let na = rng.random_range(1..=7);
        let nb = rng.random_range(1..=7);
        let shift = rng.random_range(0.0..1.5);
        let a: Vec<f64> = (0..na).map(|_| rng.random::<f64>()).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random::<f64>() + shift).collect();
        let r = ks_two_sample(&a, &b, 0.05).unwrap();
        let d = ecdf_distance(&a, &b);
        stat.close(r.d, d);
        let swapped = ks_two_sample(&b, &a, 0.05).unwrap();
        stat.holds(swapped.d == r.d && swapped.p_value == r.p_value);
        exact.holds(r.exact);
        exact.close(r.p_value, permutation_p(&a, &b, d));
    }
    for _ in 0..20 {
        let na = rng.random_range(5..=200);
        let nb = rng.random_range(5..=200);
        let a: Vec<f64> = (0..na).map(|_| (rng.random::<f64>() * 20.0).round()).collect();
        let b: Vec<f64> = (0..nb).map(|_| (rng.random::<f64>() * 25.0).round()).collect();
        stat.close(ks_two_sample(&a, &b, 0.05).unwrap().d, ecdf_distance(&a, &b));
    }
    vec![stat, exact]
}

/// Every oracle family; returns (pass, one line per family).
pub fn run() -> (bool, Vec<String>) {
    let mut checks = estimators(101);
    checks.push(coincidence(102));
    checks.push(cdhote_distances(103));
    checks.extend(convolutions(104));
    checks.extend(graphs(105));
    checks.extend(kolmogorov_smirnov(106));
    let pass = checks.iter().all(|c| c.failures == 0 && c.cases > 0);
    let lines = checks
        .iter()
        .map(|c| format!("{}: {}/{} ok, worst relative deviation {:.1e}", c.name, c.cases - c.failures, c.cases, c.worst))
        .collect();
    (pass, lines)
}
