//! Scoring designed graphs against the hidden dynamics, and the
//! known-dynamics reference optimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{DataSample, Dataset, Secrets};
use crate::error::{param, Error, Result};
use crate::graph::Graph;
use crate::learn::{ga_optimize, GaConfig, NetConfig};
use crate::strategies::{design, StrategyConfig, StrategyName};

/// Index and objective of the best sample with at most `n_e_star` edges.
pub fn best_data_sample(samples: &[DataSample], n_e_star: usize) -> Option<(usize, f64)> {
    samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.n_e() <= n_e_star)
        .fold(None, |best: Option<(usize, f64)>, (i, s)| match best {
            Some((_, j)) if j >= s.j => best,
            _ => Some((i, s.j)),
        })
}

/// Reference optimum for one iteration, found with the true objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub iteration: usize,
    pub graph: Graph,
    pub j: f64,
    pub generations: usize,
}

pub fn oracle(secrets: &Secrets, iteration: usize, ga: &GaConfig) -> Result<OracleResult> {
    let dynamics = secrets
        .iteration(iteration)
        .ok_or_else(|| param(format!("no dynamics for iteration {iteration}")))?;
    let r = ga_optimize(
        |g| dynamics.objective(g).map_or(f64::NEG_INFINITY, |r| r.j),
        secrets.n_v,
        secrets.n_e_star,
        ga,
    )?;
    Ok(OracleResult {
        iteration,
        graph: r.graph,
        j: r.value,
        generations: r.generations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRow {
    pub iteration: usize,
    pub strategy: StrategyName,
    /// `None` when the strategy failed; see `error`.
    pub n_e: Option<usize>,
    pub j: Option<f64>,
    pub best_data_j: Option<f64>,
    pub j_star: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationOptions {
    pub seed: u64,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub net: Option<NetConfig>,
    pub ga: Option<GaConfig>,
    /// Iterations to run; all when `None`.
    pub iterations: Option<Vec<usize>>,
}

impl ValidationOptions {
    /// Configuration of `name` for one iteration. Seeds differ per
    /// iteration so that stochastic strategies are independent.
    pub fn strategy_config(&self, name: StrategyName, n_e_out: usize, iteration: usize) -> StrategyConfig {
        let seed = self.seed.wrapping_add(iteration as u64);
        let mut cfg = StrategyConfig::new(name, n_e_out, seed);
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(p) = self.p {
            cfg.p = p;
        }
        cfg.net = self.net.map(|n| NetConfig { seed, ..n });
        if let Some(ga) = self.ga {
            cfg.ga = GaConfig { seed, ..ga };
        }
        cfg
    }
}

/// Designs a graph with every strategy in every selected iteration and
/// scores it with that iteration's hidden dynamics.
pub fn validate(
    dataset: &Dataset,
    secrets: &Secrets,
    strategies: &[StrategyName],
    oracle_results: Option<&[OracleResult]>,
    opts: &ValidationOptions,
) -> Result<Vec<ValidationRow>> {
    if secrets.n_v != dataset.meta.n_v || secrets.dynamics.len() < dataset.meta.iterations {
        return Err(Error::Validation("secrets do not belong to this dataset".into()));
    }
    let iterations: Vec<usize> = opts
        .iterations
        .clone()
        .unwrap_or_else(|| (0..dataset.iteration_count()).collect());
    let n_e_star = dataset.meta.n_e_star;
    let jobs: Vec<(usize, StrategyName)> = iterations
        .iter()
        .flat_map(|&k| strategies.iter().map(move |&s| (k, s)))
        .collect();
    jobs.par_iter()
        .map(|&(k, name)| {
            let samples = dataset.iteration(k);
            let dynamics = secrets
                .iteration(k)
                .ok_or_else(|| param(format!("no dynamics for iteration {k}")))?;
            let j_star = oracle_results
                .and_then(|o| o.iter().find(|r| r.iteration == k))
                .map(|r| r.j);
            let best_data_j = best_data_sample(samples, n_e_star).map(|(_, j)| j);
            let cfg = opts.strategy_config(name, n_e_star, k);
            let designed = design(samples, dataset.meta.case, &cfg)
                .and_then(|out| Ok((out.graph.n_e(), dynamics.objective(&out.graph)?.j)));
            let (n_e, j, error) = match designed {
                Ok((n_e, j)) => (Some(n_e), Some(j), None),
                Err(e @ (Error::Strategy { .. } | Error::Domain(_))) => {
                    log::warn!("iteration {k}, {name}: {e}");
                    (None, None, Some(e.to_string()))
                }
                Err(e) => return Err(e),
            };
            Ok(ValidationRow {
                iteration: k,
                strategy: name,
                n_e,
                j,
                best_data_j,
                j_star,
                error,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{default_spec, generate_dataset, FamilyCounts};

    #[test]
    fn best_sample_respects_budget() {
        let g = |e: usize| {
            let mut edges: Vec<_> = (0..5).map(|i| (i, i + 1)).collect();
            edges.extend([(0, 2), (0, 3), (0, 4), (1, 3)].into_iter().take(e - 5));
            Graph::new(6, edges).unwrap()
        };
        let s = |e, j| DataSample {
            iteration: 0,
            family: "t".into(),
            graph: g(e),
            j,
            metrics: None,
        };
        let samples = vec![s(5, 0.1), s(9, 0.9), s(7, 0.4), s(6, 0.4)];
        assert_eq!(best_data_sample(&samples, 7), Some((2, 0.4)));
        assert_eq!(best_data_sample(&samples, 9), Some((1, 0.9)));
        assert_eq!(best_data_sample(&samples, 4), None);
    }

    #[test]
    fn rows_for_every_iteration_and_strategy() {
        let mut spec = default_spec("D_small_l", 2).unwrap();
        spec.iterations = 2;
        spec.family_counts = FamilyCounts {
            erdos_renyi: 3,
            small_world: 3,
            scale_free: 3,
        };
        let g = generate_dataset(&spec).unwrap();
        let ga = GaConfig {
            population_size: 30,
            elite_count: 20,
            max_generations: 20,
            ..GaConfig::default()
        };
        let o: Vec<_> = (0..2).map(|k| oracle(&g.secrets, k, &ga).unwrap()).collect();
        let rows = validate(
            &g.dataset,
            &g.secrets,
            &[StrategyName::Pf, StrategyName::A],
            Some(&o),
            &ValidationOptions::default(),
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        for r in &rows {
            assert_eq!(r.n_e, Some(20));
            assert!(r.j.unwrap() <= r.j_star.unwrap() + 0.2);
            assert!(r.best_data_j.is_some());
        }
        assert_eq!((rows[0].iteration, rows[0].strategy), (0, StrategyName::Pf));
        assert_eq!((rows[3].iteration, rows[3].strategy), (1, StrategyName::A));
    }
}
