//! Dataset analytics: how homogeneity metrics and per-node structure
//! correlate with the objective, and the Pareto fronts of `(n_e, J)`.

mod pareto;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use pareto::{compute_fronts, delta, EdgeBaseline, Fronts, Orientation, ParetoFront};

use crate::dataset::{DataSample, Dataset, SampleMetrics};
use crate::error::{domain, Result};
use crate::graph::{betweenness_stats, degree_stats};

/// Pearson correlation coefficient.
///
/// `None` when the lengths differ, fewer than two points are given, or
/// either side has zero variance.
pub fn correlation(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let flat = |ss: f64, m: f64| ss <= 1e-24 * n * m.abs().max(1.0).powi(2);
    if flat(sxx, mx) || flat(syy, my) {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Mean of the defined entries; `None` if there are none.
fn mean_defined(xs: impl IntoIterator<Item = Option<f64>>) -> Option<f64> {
    let (sum, count) = xs
        .into_iter()
        .flatten()
        .fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Correlations between structure and objective. Each value is `None` when
/// undefined in every iteration it was averaged over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub corr_var_d_j: Option<f64>,
    pub corr_var_b_j: Option<f64>,
    pub corr_var_d_neg_q: Option<f64>,
    pub corr_var_b_neg_q: Option<f64>,
    /// `corr(d̂_i, J)` per vertex.
    pub rho_degree: Vec<Option<f64>>,
    /// `corr(b̂_i, J)` per vertex.
    pub rho_betweenness: Vec<Option<f64>>,
    /// `corr(i, ρ_i)` over vertices with a defined `ρ_i`.
    pub index_corr_degree: Option<f64>,
    pub index_corr_betweenness: Option<f64>,
    pub iterations: usize,
}

struct SampleStructure {
    metrics: SampleMetrics,
    degree_dev: Vec<f64>,
    betweenness_dev: Vec<f64>,
}

fn structure(s: &DataSample) -> Result<SampleStructure> {
    let metrics = match s.metrics {
        Some(m) => m,
        None => SampleMetrics::compute(&s.graph)?,
    };
    Ok(SampleStructure {
        metrics,
        degree_dev: degree_stats(&s.graph).normalized_deviation,
        betweenness_dev: betweenness_stats(&s.graph)?.normalized_deviation,
    })
}

fn index_correlation(rho: &[Option<f64>]) -> Option<f64> {
    let (idx, vals): (Vec<f64>, Vec<f64>) = rho
        .iter()
        .enumerate()
        .filter_map(|(i, r)| r.map(|r| (i as f64, r)))
        .unzip();
    correlation(&idx, &vals)
}

/// Report over one set of samples, e.g. a single iteration.
pub fn sample_report(samples: &[DataSample]) -> Result<CorrelationReport> {
    if samples.len() < 3 {
        return Err(domain(format!(
            "correlations need at least 3 samples, got {}",
            samples.len()
        )));
    }
    let n_v = samples[0].graph.n_v();
    if samples.iter().any(|s| s.graph.n_v() != n_v) {
        return Err(domain("samples of different sizes"));
    }
    let st = samples
        .par_iter()
        .map(structure)
        .collect::<Result<Vec<_>>>()?;
    let j: Vec<f64> = samples.iter().map(|s| s.j).collect();
    let var_d: Vec<f64> = st.iter().map(|s| s.metrics.var_d).collect();
    let var_b: Vec<f64> = st.iter().map(|s| s.metrics.var_b).collect();
    let neg_q: Vec<f64> = st.iter().map(|s| -s.metrics.q).collect();
    let per_node = |pick: fn(&SampleStructure) -> &Vec<f64>| -> Vec<Option<f64>> {
        (0..n_v)
            .map(|i| {
                let x: Vec<f64> = st.iter().map(|s| pick(s)[i]).collect();
                correlation(&x, &j)
            })
            .collect()
    };
    let rho_degree = per_node(|s| &s.degree_dev);
    let rho_betweenness = per_node(|s| &s.betweenness_dev);
    Ok(CorrelationReport {
        corr_var_d_j: correlation(&var_d, &j),
        corr_var_b_j: correlation(&var_b, &j),
        corr_var_d_neg_q: correlation(&var_d, &neg_q),
        corr_var_b_neg_q: correlation(&var_b, &neg_q),
        index_corr_degree: index_correlation(&rho_degree),
        index_corr_betweenness: index_correlation(&rho_betweenness),
        rho_degree,
        rho_betweenness,
        iterations: 1,
    })
}

/// Averages per-iteration reports. The index correlations are recomputed
/// from the averaged `ρ`.
pub fn average_reports(reports: &[CorrelationReport]) -> Option<CorrelationReport> {
    let first = reports.first()?;
    let n_v = first.rho_degree.len();
    let avg = |f: fn(&CorrelationReport) -> Option<f64>| mean_defined(reports.iter().map(f));
    let avg_node = |f: fn(&CorrelationReport) -> &Vec<Option<f64>>| -> Vec<Option<f64>> {
        (0..n_v)
            .map(|i| mean_defined(reports.iter().map(|r| f(r).get(i).copied().flatten())))
            .collect()
    };
    let rho_degree = avg_node(|r| &r.rho_degree);
    let rho_betweenness = avg_node(|r| &r.rho_betweenness);
    Some(CorrelationReport {
        corr_var_d_j: avg(|r| r.corr_var_d_j),
        corr_var_b_j: avg(|r| r.corr_var_b_j),
        corr_var_d_neg_q: avg(|r| r.corr_var_d_neg_q),
        corr_var_b_neg_q: avg(|r| r.corr_var_b_neg_q),
        index_corr_degree: index_correlation(&rho_degree),
        index_corr_betweenness: index_correlation(&rho_betweenness),
        rho_degree,
        rho_betweenness,
        iterations: reports.iter().map(|r| r.iterations).sum(),
    })
}

/// Per-iteration reports of `dataset` averaged over its iterations.
pub fn entangled_report(dataset: &Dataset) -> Result<CorrelationReport> {
    let reports = (0..dataset.iteration_count())
        .map(|k| dataset.iteration(k))
        .filter(|s| !s.is_empty())
        .map(sample_report)
        .collect::<Result<Vec<_>>>()?;
    for (k, r) in reports.iter().enumerate() {
        if r.corr_var_d_j.is_none() || r.corr_var_b_j.is_none() {
            log::info!("iteration {k}: undefined correlation excluded from the average");
        }
    }
    average_reports(&reports).ok_or_else(|| domain("dataset has no samples"))
}
