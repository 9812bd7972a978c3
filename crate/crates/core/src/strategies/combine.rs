//! Weighted combination of graphs and score-guided connectivity repair.

use crate::error::{param, Result};
use crate::graph::{all_pairs, mask_components, max_edges, non_bridges, pair_index, Graph};

/// `z_{jk} = Σ_i w_i 1{{j,k} ∈ g_i}`, indexed like [`Graph::pair_mask`].
pub fn pair_scores(graphs: &[&Graph], weights: &[f64]) -> Result<Vec<f64>> {
    let first = graphs.first().ok_or_else(|| param("nothing to combine"))?;
    if graphs.len() != weights.len() {
        return Err(param(format!(
            "{} graphs but {} weights",
            graphs.len(),
            weights.len()
        )));
    }
    let n = first.n_v();
    let mut z = vec![0.0; max_edges(n)];
    for (g, &w) in graphs.iter().zip(weights) {
        if g.n_v() != n {
            return Err(param("graphs of different sizes"));
        }
        for &(i, j) in g.edges() {
            z[pair_index(n, i, j)] += w;
        }
    }
    Ok(z)
}

/// The `n_e_out` pairs of largest score; ties go to the lexicographically
/// smaller pair.
pub fn top_pairs(n_v: usize, z: &[f64], n_e_out: usize) -> Result<Graph> {
    if n_e_out > max_edges(n_v) || z.len() != max_edges(n_v) {
        return Err(param(format!(
            "cannot select {n_e_out} of {} pairs",
            max_edges(n_v)
        )));
    }
    let mut order: Vec<usize> = (0..z.len()).collect();
    order.sort_by(|&a, &b| z[b].total_cmp(&z[a]).then(a.cmp(&b)));
    let mut mask = vec![false; z.len()];
    for &i in &order[..n_e_out] {
        mask[i] = true;
    }
    Ok(Graph::from_pair_mask(n_v, &mask))
}

/// Combines graphs by weighted edge votes and keeps the `n_e_out` best pairs.
/// The result may be disconnected; see [`connect`].
pub fn combine_graphs(graphs: &[&Graph], weights: &[f64], n_e_out: usize) -> Result<Graph> {
    let z = pair_scores(graphs, weights)?;
    top_pairs(graphs[0].n_v(), &z, n_e_out)
}

/// Joins the components of `g` without exceeding `cap` edges. While
/// disconnected, the unselected cross-component pair with the largest score
/// is added; at the budget, the cycle edge with the smallest score is dropped
/// first. Returns the repaired graph and the number of swaps made.
pub fn connect(g: &Graph, z: &[f64], cap: usize) -> Result<(Graph, usize)> {
    let n = g.n_v();
    if z.len() != max_edges(n) {
        return Err(param("score vector does not match the graph"));
    }
    if cap + 1 < n {
        return Err(param(format!("{cap} edges cannot connect {n} vertices")));
    }
    let mut mask = g.pair_mask();
    let mut swaps = 0;
    loop {
        let labels = mask_components(n, &mask);
        if labels.iter().all(|&l| l == 0) {
            break;
        }
        if mask.iter().filter(|&&b| b).count() >= cap {
            let drop = non_bridges(n, &mask)
                .into_iter()
                .map(|(i, j)| pair_index(n, i, j))
                .min_by(|&a, &b| z[a].total_cmp(&z[b]).then(b.cmp(&a)))
                .expect("a disconnected graph at the budget has a cycle");
            mask[drop] = false;
            swaps += 1;
        }
        let add = all_pairs(n)
            .filter(|&(i, j)| labels[i] != labels[j])
            .map(|(i, j)| pair_index(n, i, j))
            .max_by(|&a, &b| z[a].total_cmp(&z[b]).then(b.cmp(&a)))
            .unwrap();
        mask[add] = true;
    }
    if swaps > 0 {
        log::debug!("connectivity repair made {swaps} swaps");
    }
    Ok((Graph::from_pair_mask(n, &mask), swaps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_evaluated_scores() {
        let a = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let b = Graph::new(3, [(0, 2), (1, 2)]).unwrap();
        let z = pair_scores(&[&a, &b], &[1.0, 1.0]).unwrap();
        assert_eq!(z, vec![1.0, 1.0, 2.0]);
        let g = combine_graphs(&[&a, &b], &[1.0, 1.0], 2).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn identity_and_zero_weights() {
        let g = Graph::new(5, [(0, 3), (1, 4), (3, 4), (2, 3)]).unwrap();
        assert_eq!(combine_graphs(&[&g], &[1.0], 4).unwrap(), g);
        let h = combine_graphs(&[&g], &[0.0], 3).unwrap();
        assert_eq!(h.edges(), &[(0, 1), (0, 2), (0, 3)]);
        assert!(combine_graphs(&[&g], &[1.0], 11).is_err());
        assert!(combine_graphs(&[&g], &[1.0, 2.0], 4).is_err());
    }

    #[test]
    fn connect_swaps_weakest_cycle_edge() {
        // triangle {0,1,2} plus the isolated edge {3,4}
        let g = Graph::new(5, [(0, 1), (0, 2), (1, 2), (3, 4)]).unwrap();
        let mut z = vec![0.0; 10];
        z[pair_index(5, 0, 1)] = 3.0;
        z[pair_index(5, 0, 2)] = 1.0;
        z[pair_index(5, 1, 2)] = 2.0;
        z[pair_index(5, 2, 3)] = 0.5;
        let (h, swaps) = connect(&g, &z, 4).unwrap();
        assert_eq!(swaps, 1);
        assert_eq!(h.edges(), &[(0, 1), (1, 2), (2, 3), (3, 4)]);

        let (h, swaps) = connect(&g, &z, 5).unwrap();
        assert_eq!(swaps, 0);
        assert_eq!(h.n_e(), 5);
        assert!(h.is_connected());
    }
}
