//! Graphicality testing and deterministic realization of degree sequences.

use super::Graph;
use crate::error::{domain, param, Result};

/// Erdős–Gallai test on an unsigned sequence.
fn erdos_gallai(degrees: &[usize]) -> bool {
    let n = degrees.len();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let mut lhs = 0usize;
    for k in 1..=n {
        lhs += d[k - 1];
        let rhs = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
        if lhs > rhs {
            return false;
        }
    }
    true
}

/// True iff `degrees` is the degree sequence of some simple graph.
pub fn is_graphical(degrees: &[i64]) -> Result<bool> {
    if let Some(&x) = degrees.iter().find(|&&x| x < 0) {
        return Err(param(format!("negative degree {x}")));
    }
    let d: Vec<usize> = degrees.iter().map(|&x| x as usize).collect();
    Ok(erdos_gallai(&d))
}

/// Builds a graph with exactly the given degrees.
///
/// Edges are placed one at a time: the working vertex is the lowest-index
/// vertex with the smallest positive residual degree, and its partner is the
/// admissible vertex with the largest residual degree (lowest index on ties),
/// where admissible means not yet adjacent and leaving a graphical residual.
pub fn realize_degree_sequence(degrees: &[usize]) -> Result<Graph> {
    let n = degrees.len();
    if n == 0 {
        return Err(param("empty degree sequence"));
    }
    if !erdos_gallai(degrees) {
        return Err(domain(format!("{degrees:?} is not graphical")));
    }
    let mut residual = degrees.to_vec();
    let mut adjacent = vec![vec![false; n]; n];
    let mut edges = Vec::with_capacity(degrees.iter().sum::<usize>() / 2);

    while let Some(i) = (0..n)
        .filter(|&v| residual[v] > 0)
        .min_by_key(|&v| (residual[v], v))
    {
        while residual[i] > 0 {
            let mut partner: Option<usize> = None;
            for j in 0..n {
                if j == i || adjacent[i][j] || residual[j] == 0 {
                    continue;
                }
                if partner.is_some_and(|p| residual[p] >= residual[j]) {
                    continue;
                }
                residual[i] -= 1;
                residual[j] -= 1;
                let ok = erdos_gallai(&residual);
                residual[i] += 1;
                residual[j] += 1;
                if ok {
                    partner = Some(j);
                }
            }
            let j = partner.ok_or_else(|| {
                domain(format!("realization stalled at vertex {i} of {degrees:?}"))
            })?;
            residual[i] -= 1;
            residual[j] -= 1;
            adjacent[i][j] = true;
            adjacent[j][i] = true;
            edges.push((i, j));
        }
    }
    Graph::new(n, edges)
}
