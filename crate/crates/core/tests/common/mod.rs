//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;

use syncnet::graph::all_pairs;
use syncnet::Graph;

/// Random tree plus independent extra edges with probability `p`, under a
/// random labeling.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.random_range(0..i), i)).collect();
    for (i, j) in all_pairs(n) {
        if rng.random_bool(p) && !edges.contains(&(i, j)) {
            edges.push((i, j));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Graph::new(n, edges).unwrap().relabel(&perm).unwrap()
}

/// Betweenness by listing every shortest path between every pair.
pub fn enumerated_betweenness(g: &Graph) -> Vec<f64> {
    fn walk(g: &Graph, dist: &[Option<usize>], v: usize, t: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if v == t {
            out.push(path.clone());
            return;
        }
        for &w in g.neighbors(v) {
            if dist[w] == dist[v].map(|d| d + 1) && dist[w] <= dist[t] {
                path.push(w);
                walk(g, dist, w, t, path, out);
                path.pop();
            }
        }
    }
    let n = g.n_v();
    let mut b = vec![0.0; n];
    for (s, t) in all_pairs(n) {
        let dist = g.bfs_distances(s);
        let mut paths = Vec::new();
        walk(g, &dist, s, t, &mut vec![s], &mut paths);
        for (v, bv) in b.iter_mut().enumerate() {
            if v != s && v != t {
                let through = paths.iter().filter(|p| p.contains(&v)).count();
                *bv += through as f64 / paths.len() as f64;
            }
        }
    }
    b
}
