//! Degree sequences shaped after a per-vertex preference vector, and graphs
//! realizing them.

use super::combine::{connect, top_pairs};
use crate::error::{param, Result};
use crate::graph::{all_pairs, is_graphical, max_edges, min_edges, non_bridges, pair_index, realize_degree_sequence, Graph};

/// Allocates `2 n_e − n_v` degree units on top of an all-ones sequence, one at
/// a time to the vertex of largest remaining preference, lowering that
/// preference by `Σρ / units` after each unit. Ties go to the smaller current
/// degree, then to the lower index. Saturated vertices leave the race. The
/// largest degree is then lowered until the sequence is graphical.
pub fn degrees_from_vector(rho: &[f64], n_e: usize) -> Result<Vec<usize>> {
    let n = rho.len();
    if n < 2 {
        return Err(param("need at least two vertices"));
    }
    if !(min_edges(n)..=max_edges(n)).contains(&n_e) {
        return Err(param(format!(
            "n_e = {n_e} outside [{}, {}]",
            min_edges(n),
            max_edges(n)
        )));
    }
    if rho.iter().any(|x| !x.is_finite()) {
        return Err(param("preference vector must be finite"));
    }
    let lo = rho.iter().copied().fold(f64::INFINITY, f64::min);
    let mut r: Vec<f64> = rho.iter().map(|x| x - lo).collect();
    let mut d = vec![1usize; n];
    let mut units = 2 * n_e - n;
    let step = r.iter().sum::<f64>() / units.max(1) as f64;
    while units > 0 {
        let i = (0..n)
            .filter(|&j| r[j] > f64::NEG_INFINITY)
            .max_by(|&a, &b| {
                r[a].total_cmp(&r[b])
                    .then(d[b].cmp(&d[a]))
                    .then(b.cmp(&a))
            })
            .expect("units exceed the capacity of the complete graph");
        d[i] += 1;
        units -= 1;
        if d[i] < n - 1 {
            r[i] -= step;
        } else {
            r[i] = f64::NEG_INFINITY;
        }
    }
    loop {
        let signed: Vec<i64> = d.iter().map(|&x| x as i64).collect();
        if is_graphical(&signed)? {
            return Ok(d);
        }
        let i = (0..n).max_by(|&a, &b| d[a].cmp(&d[b]).then(b.cmp(&a))).unwrap();
        d[i] -= 1;
    }
}

/// Merges components by double-edge swaps, which keep every degree: a cycle
/// edge `{a, b}` of one component and an edge `{c, d}` of another become
/// `{a, c}` and `{b, d}`. Stops when connected or no cycle edge is left.
pub fn degree_preserving_connect(g: &Graph) -> Graph {
    let n = g.n_v();
    let mut mask = g.pair_mask();
    loop {
        let gm = Graph::from_pair_mask(n, &mask);
        let labels = gm.components();
        if labels.iter().all(|&l| l == 0) {
            return gm;
        }
        let Some((a, b)) = non_bridges(n, &mask).into_iter().next() else {
            return gm;
        };
        let Some(&(c, d)) = gm.edges().iter().find(|&&(c, _)| labels[c] != labels[a]) else {
            return gm;
        };
        mask[pair_index(n, a, b)] = false;
        mask[pair_index(n, c, d)] = false;
        mask[pair_index(n, a.min(c), a.max(c))] = true;
        mask[pair_index(n, b.min(d), b.max(d))] = true;
    }
}

/// Connected graph with exactly `n_e_out` edges whose degrees follow `rho`.
pub fn graph_from_vector(rho: &[f64], n_e_out: usize) -> Result<Graph> {
    let n = rho.len();
    let d = degrees_from_vector(rho, n_e_out)?;
    let realized = realize_degree_sequence(&d)?;
    let mut g = degree_preserving_connect(&realized);
    // pairs between preferred vertices score highest
    let z: Vec<f64> = all_pairs(n).map(|(i, j)| rho[i] + rho[j]).collect();
    if !g.is_connected() {
        log::info!("degree sequence {d:?} has no connected realization by swaps; relaxing degrees");
        g = connect(&g, &z, n_e_out)?.0;
    }
    if g.n_e() < n_e_out {
        let mut boosted = z;
        for (k, on) in g.pair_mask().into_iter().enumerate() {
            if on {
                boosted[k] = f64::INFINITY;
            }
        }
        g = top_pairs(n, &boosted, n_e_out)?;
    }
    Ok(g)
}
