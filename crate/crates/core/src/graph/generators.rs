//! Classic deterministic and random graph families.

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{all_pairs, max_edges, Graph};
use crate::error::{param, Result};

/// Graph families understood by [`generate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorKind {
    Complete,
    Path,
    Ring,
    Star { center: usize },
    /// Ring lattice, each vertex joined to its `k` nearest vertices on each side.
    KNearestNeighbors { k: usize },
    /// G(n, p).
    ErdosRenyi { p: f64 },
    /// Watts–Strogatz: a `KNearestNeighbors { k: neighbors_per_side }` lattice
    /// whose edges are rewired with probability `rewire`.
    SmallWorld { neighbors_per_side: usize, rewire: f64 },
    /// Barabási–Albert preferential attachment with `m` edges per new vertex.
    ScaleFree { m: usize },
    /// Uniformly random set of exactly `edges` edges.
    RandomEdges { edges: usize },
}

impl GeneratorKind {
    /// Default small-world parameters (ring degree 4, rewiring 0.2).
    pub fn small_world() -> Self {
        Self::SmallWorld {
            neighbors_per_side: 2,
            rewire: 0.2,
        }
    }

    pub fn scale_free() -> Self {
        Self::ScaleFree { m: 2 }
    }

    /// Short family label used in dataset files.
    pub fn family(&self) -> &'static str {
        match self {
            Self::Complete => "complete",
            Self::Path => "path",
            Self::Ring => "ring",
            Self::Star { .. } => "star",
            Self::KNearestNeighbors { .. } => "k_nearest_neighbors",
            Self::ErdosRenyi { .. } => "erdos_renyi",
            Self::SmallWorld { .. } => "small_world",
            Self::ScaleFree { .. } => "scale_free",
            Self::RandomEdges { .. } => "random_edges",
        }
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(param(format!("{name} = {p} is not a probability")))
    }
}

/// Generates a graph of the requested family on `n_v` vertices.
///
/// Deterministic families ignore `rng`; random ones are reproducible for a
/// fixed generator state.
pub fn generate<R: Rng + ?Sized>(kind: GeneratorKind, n_v: usize, rng: &mut R) -> Result<Graph> {
    if n_v == 0 {
        return Err(param("n_v must be positive"));
    }
    match kind {
        GeneratorKind::Complete => Graph::new(n_v, all_pairs(n_v)),
        GeneratorKind::Path => Graph::new(n_v, (1..n_v).map(|i| (i - 1, i))),
        GeneratorKind::Ring => {
            if n_v < 3 {
                return Err(param("a ring needs at least 3 vertices"));
            }
            Graph::new(n_v, (0..n_v).map(|i| (i, (i + 1) % n_v)))
        }
        GeneratorKind::Star { center } => {
            if center >= n_v {
                return Err(param(format!("star center {center} out of range")));
            }
            Graph::new(n_v, (0..n_v).filter(|&v| v != center).map(|v| (center, v)))
        }
        GeneratorKind::KNearestNeighbors { k } => Graph::new(n_v, ring_lattice(n_v, k)?),
        GeneratorKind::ErdosRenyi { p } => {
            check_probability("p", p)?;
            let edges: Vec<_> = all_pairs(n_v).filter(|_| rng.random_bool(p)).collect();
            Graph::new(n_v, edges)
        }
        GeneratorKind::SmallWorld {
            neighbors_per_side,
            rewire,
        } => {
            check_probability("rewire", rewire)?;
            watts_strogatz(n_v, neighbors_per_side, rewire, rng)
        }
        GeneratorKind::ScaleFree { m } => barabasi_albert(n_v, m, rng),
        GeneratorKind::RandomEdges { edges } => {
            let total = max_edges(n_v);
            if edges > total {
                return Err(param(format!(
                    "{edges} edges requested but at most {total} fit on {n_v} vertices"
                )));
            }
            let mut chosen = index::sample(rng, total, edges).into_vec();
            chosen.sort_unstable();
            let mut mask = vec![false; total];
            for c in chosen {
                mask[c] = true;
            }
            Ok(Graph::from_pair_mask(n_v, &mask))
        }
    }
}

fn ring_lattice(n_v: usize, k: usize) -> Result<Vec<(usize, usize)>> {
    if k == 0 || 2 * k >= n_v {
        return Err(param(format!(
            "ring lattice with {k} neighbors per side needs more than {} vertices",
            2 * k
        )));
    }
    Ok((0..n_v)
        .flat_map(|i| (1..=k).map(move |s| (i, (i + s) % n_v)))
        .collect())
}

fn watts_strogatz<R: Rng + ?Sized>(
    n_v: usize,
    per_side: usize,
    rewire: f64,
    rng: &mut R,
) -> Result<Graph> {
    let lattice = ring_lattice(n_v, per_side)?;
    let mut adjacency = vec![vec![false; n_v]; n_v];
    for &(i, j) in &lattice {
        adjacency[i][j] = true;
        adjacency[j][i] = true;
    }
    // Visit lattice edges by offset, then by source vertex.
    for s in 1..=per_side {
        for u in 0..n_v {
            let v = (u + s) % n_v;
            if !adjacency[u][v] || !rng.random_bool(rewire) {
                continue;
            }
            let degree = adjacency[u].iter().filter(|&&b| b).count();
            if degree >= n_v - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..n_v);
                if w != u && !adjacency[u][w] {
                    break w;
                }
            };
            adjacency[u][v] = false;
            adjacency[v][u] = false;
            adjacency[u][w] = true;
            adjacency[w][u] = true;
        }
    }
    Graph::new(
        n_v,
        all_pairs(n_v).filter(|&(i, j)| adjacency[i][j]).collect::<Vec<_>>(),
    )
}

fn barabasi_albert<R: Rng + ?Sized>(n_v: usize, m: usize, rng: &mut R) -> Result<Graph> {
    if m == 0 || m >= n_v {
        return Err(param(format!("scale-free m = {m} must lie in 1..{n_v}")));
    }
    // Seed with a star on m + 1 vertices.
    let mut edges: Vec<(usize, usize)> = (1..=m).map(|v| (0, v)).collect();
    let mut repeated: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    for source in (m + 1)..n_v {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = repeated[rng.random_range(0..repeated.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, source));
            repeated.push(t);
            repeated.push(source);
        }
    }
    Graph::new(n_v, edges)
}
