//! Undirected, unweighted simple graphs and their structural metrics.
//!
//! Vertices are 0-based everywhere inside the library and in the JSON
//! serialization. Human-oriented tables (CSV) shift to 1-based indices.

pub mod degree_sequence;
pub mod generators;
pub mod metrics;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{param, Result};

pub use degree_sequence::{is_graphical, realize_degree_sequence};
pub use generators::{generate, GeneratorKind};
pub use metrics::{
    betweenness_stats, degree_stats, structural_stats, BetweennessStats, DegreeStats,
    StructuralStats,
};

/// Number of unordered vertex pairs, i.e. the edge count of the complete graph.
pub fn max_edges(n_v: usize) -> usize {
    n_v * n_v.saturating_sub(1) / 2
}

/// Minimum edge count of a connected graph on `n_v` vertices.
pub fn min_edges(n_v: usize) -> usize {
    n_v.saturating_sub(1)
}

/// Position of the pair `{i, j}` in the lexicographic list of all pairs.
pub fn pair_index(n_v: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n_v && i != j);
    i * n_v - i * (i + 1) / 2 + (j - i - 1)
}

/// All unordered pairs `(i, j)`, `i < j`, in lexicographic order.
pub fn all_pairs(n_v: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n_v).flat_map(move |i| ((i + 1)..n_v).map(move |j| (i, j)))
}

/// An immutable simple undirected graph.
///
/// Edges are kept in canonical form: each pair stored once as `(i, j)` with
/// `i < j`, and the list sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n_v: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicates and out-of-range vertices.
    pub fn new(n_v: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n_v == 0 {
            return Err(param("a graph needs at least one vertex"));
        }
        let mut canonical = Vec::new();
        for (a, b) in edges {
            if a == b {
                return Err(param(format!("self-loop at vertex {a}")));
            }
            if a >= n_v || b >= n_v {
                return Err(param(format!("edge ({a}, {b}) out of range for n_v = {n_v}")));
            }
            canonical.push(if a < b { (a, b) } else { (b, a) });
        }
        canonical.sort_unstable();
        if let Some(w) = canonical.windows(2).find(|w| w[0] == w[1]) {
            return Err(param(format!("duplicate edge ({}, {})", w[0].0, w[0].1)));
        }
        Ok(Self::from_sorted(n_v, canonical))
    }

    /// Builds a graph from a membership vector over the lexicographic pair list.
    pub fn from_pair_mask(n_v: usize, mask: &[bool]) -> Self {
        assert_eq!(mask.len(), max_edges(n_v), "pair mask has the wrong length");
        let edges = all_pairs(n_v)
            .zip(mask)
            .filter_map(|(p, &on)| on.then_some(p))
            .collect();
        Self::from_sorted(n_v, edges)
    }

    fn from_sorted(n_v: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adjacency = vec![Vec::new(); n_v];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Self {
            n_v,
            edges,
            adjacency,
        }
    }

    pub fn n_v(&self) -> usize {
        self.n_v
    }

    pub fn n_e(&self) -> usize {
        self.edges.len()
    }

    /// Canonical (sorted, `i < j`) edge list.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.n_v && self.adjacency[i].binary_search(&j).is_ok()
    }

    /// Edge density `2 n_e / (n_v (n_v - 1))`; zero for a single vertex.
    pub fn density(&self) -> f64 {
        let max = max_edges(self.n_v);
        if max == 0 {
            0.0
        } else {
            self.n_e() as f64 / max as f64
        }
    }

    /// The same graph with vertex `v` renamed `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.n_v];
        if perm.len() != self.n_v || perm.iter().any(|&p| p >= self.n_v || std::mem::replace(&mut seen[p], true)) {
            return Err(param("relabeling is not a permutation of the vertices"));
        }
        Self::new(self.n_v, self.edges.iter().map(|&(i, j)| (perm[i], perm[j])))
    }

    /// Membership vector over the lexicographic pair list.
    pub fn pair_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; max_edges(self.n_v)];
        for &(i, j) in &self.edges {
            mask[pair_index(self.n_v, i, j)] = true;
        }
        mask
    }

    /// Dense Laplacian `L = D - A`, row-major.
    pub fn laplacian(&self) -> Vec<f64> {
        let n = self.n_v;
        let mut l = vec![0.0; n * n];
        for &(i, j) in &self.edges {
            l[i * n + j] = -1.0;
            l[j * n + i] = -1.0;
            l[i * n + i] += 1.0;
            l[j * n + j] += 1.0;
        }
        l
    }

    /// Dense adjacency matrix, row-major.
    pub fn adjacency_matrix(&self) -> Vec<f64> {
        let n = self.n_v;
        let mut a = vec![0.0; n * n];
        for &(i, j) in &self.edges {
            a[i * n + j] = 1.0;
            a[j * n + i] = 1.0;
        }
        a
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n_v];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap();
            for &w in &self.adjacency[v] {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// True iff every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        self.bfs_distances(0).iter().all(Option::is_some)
    }

    /// Component label for every vertex, labels numbered in order of their
    /// smallest vertex.
    pub fn components(&self) -> Vec<usize> {
        component_labels(self.n_v, |v| self.adjacency[v].iter().copied())
    }

    /// Edges whose removal does not increase the number of components.
    pub fn non_bridge_edges(&self) -> Vec<(usize, usize)> {
        let mask = self.pair_mask();
        non_bridges(self.n_v, &mask)
    }
}

pub(crate) fn component_labels<I, F>(n_v: usize, neighbors: F) -> Vec<usize>
where
    F: Fn(usize) -> I,
    I: Iterator<Item = usize>,
{
    let mut label = vec![usize::MAX; n_v];
    let mut next = 0;
    let mut stack = Vec::new();
    for start in 0..n_v {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = next;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for w in neighbors(v) {
                if label[w] == usize::MAX {
                    label[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    label
}

/// Component labels of the graph described by a pair mask.
pub fn mask_components(n_v: usize, mask: &[bool]) -> Vec<usize> {
    let adjacency = mask_adjacency(n_v, mask);
    component_labels(n_v, |v| adjacency[v].iter().copied())
}

fn mask_adjacency(n_v: usize, mask: &[bool]) -> Vec<Vec<usize>> {
    let mut adjacency = vec![Vec::new(); n_v];
    for ((i, j), &on) in all_pairs(n_v).zip(mask) {
        if on {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
    }
    adjacency
}

/// Non-bridge edges (edges lying on a cycle) of a mask graph, found with a
/// lowpoint DFS.
pub fn non_bridges(n_v: usize, mask: &[bool]) -> Vec<(usize, usize)> {
    let adjacency = mask_adjacency(n_v, mask);
    let mut order = vec![usize::MAX; n_v];
    let mut low = vec![0; n_v];
    let mut bridges = Vec::new();
    let mut counter = 0;
    for root in 0..n_v {
        if order[root] != usize::MAX {
            continue;
        }
        // (vertex, parent, next neighbor position)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        order[root] = counter;
        low[root] = counter;
        counter += 1;
        while let Some(top) = stack.last_mut() {
            let (v, parent) = (top.0, top.1);
            if top.2 < adjacency[v].len() {
                let w = adjacency[v][top.2];
                top.2 += 1;
                if w == parent {
                    continue;
                }
                if order[w] == usize::MAX {
                    order[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push((w, v, 0));
                } else {
                    low[v] = low[v].min(order[w]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[v]);
                    if low[v] > order[parent] {
                        bridges.push(if parent < v { (parent, v) } else { (v, parent) });
                    }
                }
            }
        }
    }
    all_pairs(n_v)
        .zip(mask)
        .filter(|(p, &on)| on && !bridges.contains(p))
        .map(|(p, _)| p)
        .collect()
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n_v: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GraphRepr {
            n_v: self.n_v,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(deserializer)?;
        Graph::new(repr.n_v, repr.edges.into_iter().map(|[i, j]| (i, j)))
            .map_err(serde::de::Error::custom)
    }
}
