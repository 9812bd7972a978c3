//! Labeled graph features fed to the surrogate network.

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Result};
use crate::graph::metrics::{clustering, distance_summary, eigenvector_centrality};
use crate::graph::{degree_stats, max_edges, Graph};
use crate::spectral::spectrum;

/// Bumped whenever the feature order changes.
pub const FEATURE_VERSION: u32 = 1;

/// `n(n-1)/2` adjacency indicators, then `λ2, λmax, n_e`, `n` degree
/// deviations, `var̂(d)`, global clustering, `n` local clustering values,
/// mean and variance of shortest paths, diameter, `n` eigenvector
/// centralities.
pub fn feature_len(n_v: usize) -> usize {
    max_edges(n_v) + 3 * n_v + 8
}

pub fn extract_features(g: &Graph) -> Result<Vec<f64>> {
    if !g.is_connected() {
        return Err(domain("features need a connected graph"));
    }
    let n = g.n_v();
    let mut f = Vec::with_capacity(feature_len(n));
    f.extend(g.pair_mask().iter().map(|&b| if b { 1.0 } else { 0.0 }));
    let s = spectrum(g)?;
    f.push(s.algebraic_connectivity());
    f.push(s.largest());
    f.push(g.n_e() as f64);
    let deg = degree_stats(g);
    f.extend(&deg.normalized_deviation);
    f.push(deg.normalized_variance);
    let (global, local) = clustering(g);
    f.push(global);
    f.extend(&local);
    let dist = distance_summary(g)?;
    f.push(dist.mean);
    f.push(dist.variance);
    f.push(dist.diameter as f64);
    f.extend(eigenvector_centrality(g)?);
    debug_assert_eq!(f.len(), feature_len(n));
    Ok(f)
}

/// Per-feature affine standardization fitted on a training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    /// Population standard deviation; constant features get 1.
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| param("no rows to standardize"))?;
        let dim = first.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(param("rows of different lengths"));
        }
        let m = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for r in rows {
            mean.iter_mut().zip(r).for_each(|(a, x)| *a += x / m);
        }
        let mut std = vec![0.0; dim];
        for r in rows {
            for ((s, x), mu) in std.iter_mut().zip(r).zip(&mean) {
                *s += (x - mu) * (x - mu) / m;
            }
        }
        for s in &mut std {
            *s = s.sqrt();
            if *s < 1e-12 {
                *s = 1.0;
            }
        }
        Ok(Self { mean, std })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &mut [f64]) {
        for ((v, m), s) in x.iter_mut().zip(&self.mean).zip(&self.std) {
            *v = (*v - m) / s;
        }
    }
}
