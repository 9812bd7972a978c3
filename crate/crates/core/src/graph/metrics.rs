//! Degree, betweenness and path/cycle statistics.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{domain, Result};
use crate::spectral::symmetric_eigen;

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Sample variance (denominator `n - 1`); zero for fewer than two values.
pub(crate) fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeStats {
    pub degrees: Vec<usize>,
    pub mean: f64,
    pub variance: f64,
    /// Sample variance rescaled into `[0, 1]` by the density-dependent bound.
    pub normalized_variance: f64,
    /// `(d_i - mean) / (n_v - 1)`.
    pub normalized_deviation: Vec<f64>,
}

pub fn degree_stats(g: &Graph) -> DegreeStats {
    let n = g.n_v();
    let degrees = g.degrees();
    let d: Vec<f64> = degrees.iter().map(|&x| x as f64).collect();
    let mean = mean(&d);
    let variance = sample_variance(&d);
    let s = g.density();
    let normalized_variance = if s > 0.0 && s < 1.0 {
        (n - 1) as f64 / (n as f64 * g.n_e() as f64 * (1.0 - s)) * variance
    } else {
        0.0
    };
    let normalized_deviation = if n > 1 {
        d.iter().map(|x| (x - mean) / (n - 1) as f64).collect()
    } else {
        vec![0.0; n]
    };
    DegreeStats {
        degrees,
        mean,
        variance,
        normalized_variance,
        normalized_deviation,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetweennessStats {
    /// Per-vertex betweenness over unordered endpoint pairs.
    pub values: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    /// `4 var(b) / ((n_v - 1)(n_v - 2)^2)`; not clamped, may exceed 1.
    pub normalized_variance: f64,
    pub normalized_deviation: Vec<f64>,
}

/// Betweenness centrality via Brandes' dependency accumulation.
///
/// Each unordered pair `{j, k}` with `j, k != i` contributes the fraction of
/// its shortest paths that pass through `i`.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let n = g.n_v();
    let mut centrality = vec![0.0; n];
    let mut sigma = vec![0.0f64; n];
    let mut dist = vec![usize::MAX; n];
    let mut delta = vec![0.0; n];
    let mut stack = Vec::with_capacity(n);
    let mut queue = VecDeque::with_capacity(n);
    for s in 0..n {
        sigma.fill(0.0);
        dist.fill(usize::MAX);
        delta.fill(0.0);
        stack.clear();
        sigma[s] = 1.0;
        dist[s] = 0;
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in g.neighbors(v) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                }
            }
        }
        while let Some(w) = stack.pop() {
            for &v in g.neighbors(w) {
                if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
            }
            if w != s {
                centrality[w] += delta[w];
            }
        }
    }
    // Every unordered pair was visited from both endpoints.
    centrality.iter_mut().for_each(|c| *c /= 2.0);
    centrality
}

/// Betweenness statistics; defined for connected graphs only.
pub fn betweenness_stats(g: &Graph) -> Result<BetweennessStats> {
    if !g.is_connected() {
        return Err(domain("betweenness statistics need a connected graph"));
    }
    let n = g.n_v();
    let values = betweenness(g);
    let mean = mean(&values);
    let variance = sample_variance(&values);
    let (normalized_variance, normalized_deviation) = if n >= 3 {
        let nf = n as f64;
        let pairs = (nf - 1.0) * (nf - 2.0) / 2.0;
        (
            4.0 * variance / ((nf - 1.0) * (nf - 2.0) * (nf - 2.0)),
            values.iter().map(|b| (b - mean) / pairs).collect(),
        )
    } else {
        (0.0, vec![0.0; n])
    };
    Ok(BetweennessStats {
        values,
        mean,
        variance,
        normalized_variance,
        normalized_deviation,
    })
}

/// Summary of all-pairs hop distances of a connected graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSummary {
    pub mean: f64,
    /// Sample variance over the `n_v (n_v - 1) / 2` pair distances.
    pub variance: f64,
    pub diameter: usize,
}

pub fn distance_summary(g: &Graph) -> Result<DistanceSummary> {
    let n = g.n_v();
    let mut lengths = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for s in 0..n {
        let dist = g.bfs_distances(s);
        for d in &dist[s + 1..] {
            match d {
                Some(d) => lengths.push(*d as f64),
                None => return Err(domain("shortest paths need a connected graph")),
            }
        }
    }
    Ok(DistanceSummary {
        mean: mean(&lengths),
        variance: sample_variance(&lengths),
        diameter: lengths.iter().fold(0.0f64, |a, &b| a.max(b)) as usize,
    })
}

/// Length of the shortest cycle through `v`, if any.
///
/// For each incident edge `{v, u}` the cycle closes along a shortest `u → v`
/// path that avoids that edge.
pub fn shortest_cycle_through(g: &Graph, v: usize) -> Option<usize> {
    let n = g.n_v();
    let mut best: Option<usize> = None;
    let mut dist = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for &u in g.neighbors(v) {
        dist.fill(usize::MAX);
        dist[u] = 0;
        queue.clear();
        queue.push_back(u);
        'bfs: while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if x == u && y == v {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    if y == v {
                        break 'bfs;
                    }
                    queue.push_back(y);
                }
            }
        }
        if dist[v] != usize::MAX {
            let len = dist[v] + 1;
            best = Some(best.map_or(len, |b| b.min(len)));
        }
    }
    best
}

/// Local clustering coefficients and the global clustering coefficient
/// (transitivity: closed triplets over connected triplets).
pub fn clustering(g: &Graph) -> (f64, Vec<f64>) {
    let n = g.n_v();
    let mut local = vec![0.0; n];
    let mut closed = 0usize;
    let mut triplets = 0usize;
    for v in 0..n {
        let nb = g.neighbors(v);
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &x) in nb.iter().enumerate() {
            for &y in &nb[a + 1..] {
                if g.has_edge(x, y) {
                    links += 1;
                }
            }
        }
        let possible = d * (d - 1) / 2;
        local[v] = links as f64 / possible as f64;
        closed += links;
        triplets += possible;
    }
    let global = if triplets == 0 {
        0.0
    } else {
        closed as f64 / triplets as f64
    };
    (global, local)
}

/// Principal adjacency eigenvector, unit Euclidean norm, oriented so that the
/// entry of largest magnitude is positive.
pub fn eigenvector_centrality(g: &Graph) -> Result<Vec<f64>> {
    let n = g.n_v();
    let eig = symmetric_eigen(&g.adjacency_matrix(), n, true)?;
    let mut v = eig.vector(n - 1).to_vec();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
    let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
    v.iter_mut().for_each(|x| *x *= sign / norm);
    Ok(v)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructuralStats {
    pub avg_shortest_path: f64,
    pub var_shortest_path: f64,
    pub diameter: usize,
    /// `None` for forests.
    pub girth: Option<usize>,
    /// Mean of the shortest cycle through each vertex, over vertices lying on
    /// at least one cycle; `None` for forests.
    pub mean_shortest_return_cycle: Option<f64>,
    pub global_clustering: f64,
    pub local_clustering: Vec<f64>,
    pub eigenvector_centrality: Vec<f64>,
}

pub fn structural_stats(g: &Graph) -> Result<StructuralStats> {
    let distances = distance_summary(g)?;
    let cycles: Vec<usize> = (0..g.n_v())
        .filter_map(|v| shortest_cycle_through(g, v))
        .collect();
    let girth = cycles.iter().copied().min();
    let mean_shortest_return_cycle = (!cycles.is_empty())
        .then(|| cycles.iter().sum::<usize>() as f64 / cycles.len() as f64);
    let (global_clustering, local_clustering) = clustering(g);
    Ok(StructuralStats {
        avg_shortest_path: distances.mean,
        var_shortest_path: distances.variance,
        diameter: distances.diameter,
        girth,
        mean_shortest_return_cycle,
        global_clustering,
        local_clustering,
        eigenvector_centrality: eigenvector_centrality(g)?,
    })
}
