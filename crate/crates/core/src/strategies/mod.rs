//! Data-driven design strategies. Each one reads only `(graph, J)` samples of
//! a single dataset iteration and returns a connected graph with at most
//! `n_e_out` edges.

pub mod combine;
pub mod degrees;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use combine::{combine_graphs, connect, pair_scores, top_pairs};
pub use degrees::{degree_preserving_connect, degrees_from_vector, graph_from_vector};

use crate::analysis::{compute_fronts, delta, sample_report, EdgeBaseline, Fronts};
use crate::dataset::{CaseTag, DataSample};
use crate::error::{domain, param, Error, Result};
use crate::graph::{max_edges, min_edges, Graph};
use crate::learn::{ga_optimize, train_surrogate, GaConfig, NetConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StrategyName {
    #[serde(rename = "DDD")]
    Ddd,
    #[serde(rename = "NNGA")]
    Nnga,
    A,
    #[serde(rename = "AN")]
    An,
    #[serde(rename = "BWNE")]
    Bwne,
    #[serde(rename = "PF")]
    Pf,
    #[serde(rename = "DPF")]
    Dpf,
}

impl StrategyName {
    pub const ALL: [StrategyName; 7] = [
        Self::Ddd,
        Self::Nnga,
        Self::A,
        Self::An,
        Self::Bwne,
        Self::Pf,
        Self::Dpf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Ddd => "DDD",
            Self::Nnga => "NNGA",
            Self::A => "A",
            Self::An => "AN",
            Self::Bwne => "BWNE",
            Self::Pf => "PF",
            Self::Dpf => "DPF",
        }
    }

    /// Default selection fraction `p`.
    pub fn default_p(&self) -> f64 {
        match self {
            Self::Pf | Self::Dpf => 0.04,
            _ => 0.1,
        }
    }
}

impl fmt::Display for StrategyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| param(format!("unknown strategy {s:?}")))
    }
}

pub const DEFAULT_ALPHA: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub name: StrategyName,
    pub alpha: f64,
    pub p: f64,
    pub n_e_out: usize,
    /// Surrogate settings for NNGA; chosen from the dataset case when absent.
    pub net: Option<NetConfig>,
    pub ga: GaConfig,
    pub seed: u64,
}

impl StrategyConfig {
    pub fn new(name: StrategyName, n_e_out: usize, seed: u64) -> Self {
        Self {
            name,
            alpha: DEFAULT_ALPHA,
            p: name.default_p(),
            n_e_out,
            net: None,
            ga: GaConfig::with_seed(seed),
            seed,
        }
    }

    fn validate(&self, n_v: usize) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(param(format!("alpha = {} must be positive", self.alpha)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(param(format!("p = {} outside (0, 1]", self.p)));
        }
        if !(min_edges(n_v)..=max_edges(n_v)).contains(&self.n_e_out) {
            return Err(param(format!(
                "n_e_out = {} outside [{}, {}]",
                self.n_e_out,
                min_edges(n_v),
                max_edges(n_v)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyOutcome {
    pub strategy: StrategyName,
    pub graph: Graph,
    /// Indices of the combined samples within the iteration.
    pub selected: Vec<usize>,
    /// Weight of each selected sample, in the order of `selected`.
    pub weights: Vec<f64>,
    pub repair_swaps: usize,
    /// Training loss of the NNGA surrogate.
    pub surrogate_loss: Option<f64>,
    /// Surrogate value of the NNGA design.
    pub surrogate_value: Option<f64>,
}

impl StrategyOutcome {
    pub fn selected_count(&self) -> usize {
        self.selected.len()
    }
}

fn strategy_error(name: StrategyName, message: impl Into<String>) -> Error {
    Error::Strategy {
        strategy: name.to_string(),
        message: message.into(),
    }
}

fn signed_pow(x: f64, alpha: f64) -> f64 {
    x.signum() * x.abs().powf(alpha)
}

/// `p_e` best (+1) and `p_e` worst (−1) samples of every edge count, with
/// `p_e = max{1, round(p |L_e|)}`.
fn bwne_selection(samples: &[DataSample], baseline: &EdgeBaseline, p: f64) -> (Vec<usize>, Vec<f64>) {
    let mut best = Vec::new();
    let mut worst = Vec::new();
    for (_, members) in baseline.by_edges.values() {
        let p_e = ((p * members.len() as f64).round() as usize).clamp(1, members.len());
        let mut ranked = members.clone();
        ranked.sort_by(|&a, &b| samples[b].j.total_cmp(&samples[a].j));
        best.extend_from_slice(&ranked[..p_e]);
        ranked.sort_by(|&a, &b| samples[a].j.total_cmp(&samples[b].j));
        worst.extend_from_slice(&ranked[..p_e]);
    }
    let (nb, nw) = (best.len(), worst.len());
    merge(&[(best, vec![1.0; nb]), (worst, vec![-1.0; nw])], samples.len())
}

/// Indices of the `k` smallest distances, ties by sample order.
fn k_closest(dist: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dist.len()).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    order.truncate(k);
    order
}

/// Samples nearest to a front and their weights `sign · e^{−δ}`.
fn front_selection(
    samples: &[DataSample],
    fronts: &Fronts,
    bad: bool,
    p: f64,
) -> (Vec<usize>, Vec<f64>) {
    let front = if bad { &fronts.bad } else { &fronts.good };
    let dist: Vec<f64> = samples
        .iter()
        .map(|s| delta(front, &fronts.baseline, s.n_e(), s.j))
        .collect();
    let k = front
        .support
        .len()
        .max((p * samples.len() as f64).ceil() as usize)
        .min(samples.len());
    let sign = if bad { -1.0 } else { 1.0 };
    let chosen = k_closest(&dist, k);
    let weights = chosen.iter().map(|&i| sign * (-dist[i]).exp()).collect();
    (chosen, weights)
}

/// Sums weights of samples selected more than once.
fn merge(selections: &[(Vec<usize>, Vec<f64>)], len: usize) -> (Vec<usize>, Vec<f64>) {
    let mut w = vec![0.0; len];
    let mut seen = vec![false; len];
    for (idx, ws) in selections {
        for (&i, &x) in idx.iter().zip(ws) {
            w[i] += x;
            seen[i] = true;
        }
    }
    let idx: Vec<usize> = (0..len).filter(|&i| seen[i]).collect();
    let ws = idx.iter().map(|&i| w[i]).collect();
    (idx, ws)
}

fn direct(samples: &[DataSample], cfg: &StrategyConfig) -> Result<StrategyOutcome> {
    let name = cfg.name;
    let all: Vec<usize> = (0..samples.len()).collect();
    let (selected, weights) = match name {
        StrategyName::A => {
            let w = samples.iter().map(|s| s.j.powf(cfg.alpha)).collect();
            (all, w)
        }
        StrategyName::An => {
            let baseline = EdgeBaseline::new(samples);
            let w = samples
                .iter()
                .map(|s| signed_pow(s.j - baseline.mean(s.n_e()).unwrap(), cfg.alpha))
                .collect();
            (all, w)
        }
        StrategyName::Bwne => bwne_selection(samples, &EdgeBaseline::new(samples), cfg.p),
        StrategyName::Pf | StrategyName::Dpf => {
            let fronts = compute_fronts(samples);
            if fronts.good.is_empty() {
                return Err(strategy_error(name, "no sample with J above 0.01; good front is empty"));
            }
            let mut parts = vec![front_selection(samples, &fronts, false, cfg.p)];
            if name == StrategyName::Dpf {
                if fronts.bad.is_empty() {
                    return Err(strategy_error(name, "bad front is empty"));
                }
                parts.push(front_selection(samples, &fronts, true, cfg.p));
            }
            merge(&parts, samples.len())
        }
        StrategyName::Ddd | StrategyName::Nnga => unreachable!(),
    };
    let n = samples[0].graph.n_v();
    let (graph, repair_swaps) = if selected.is_empty() {
        // no votes at all: every score ties at zero
        let z = vec![0.0; max_edges(n)];
        let g = top_pairs(n, &z, cfg.n_e_out)?;
        connect(&g, &z, cfg.n_e_out)?
    } else {
        let graphs: Vec<&Graph> = selected.iter().map(|&i| &samples[i].graph).collect();
        let z = pair_scores(&graphs, &weights)?;
        let g = top_pairs(n, &z, cfg.n_e_out)?;
        connect(&g, &z, cfg.n_e_out)?
    };
    Ok(StrategyOutcome {
        strategy: name,
        graph,
        selected,
        weights,
        repair_swaps,
        surrogate_loss: None,
        surrogate_value: None,
    })
}

fn ddd(samples: &[DataSample], cfg: &StrategyConfig) -> Result<StrategyOutcome> {
    let report = sample_report(samples)?;
    if report.rho_degree.iter().all(Option::is_none) {
        return Err(domain("degree correlations undefined for every vertex"));
    }
    let rho: Vec<f64> = report.rho_degree.iter().map(|r| r.unwrap_or(0.0)).collect();
    let graph = graph_from_vector(&rho, cfg.n_e_out)?;
    Ok(StrategyOutcome {
        strategy: StrategyName::Ddd,
        graph,
        selected: (0..samples.len()).collect(),
        weights: rho,
        repair_swaps: 0,
        surrogate_loss: None,
        surrogate_value: None,
    })
}

fn nnga(samples: &[DataSample], case: CaseTag, cfg: &StrategyConfig) -> Result<StrategyOutcome> {
    let net_cfg = cfg.net.unwrap_or(match case {
        CaseTag::Linear => NetConfig::linear(cfg.seed),
        CaseTag::Nonlinear => NetConfig::nonlinear(cfg.seed),
    });
    let graphs: Vec<&Graph> = samples.iter().map(|s| &s.graph).collect();
    let targets: Vec<f64> = samples.iter().map(|s| s.j).collect();
    let net = train_surrogate(&graphs, &targets, &net_cfg).map_err(|e| match e {
        Error::Training { epoch, loss } => strategy_error(
            StrategyName::Nnga,
            format!("surrogate training diverged at epoch {epoch} (loss {loss})"),
        ),
        other => other,
    })?;
    let n = samples[0].graph.n_v();
    let result = ga_optimize(
        |g| net.predict(g).unwrap_or(f64::NEG_INFINITY),
        n,
        cfg.n_e_out,
        &cfg.ga,
    )?;
    Ok(StrategyOutcome {
        strategy: StrategyName::Nnga,
        graph: result.graph,
        selected: (0..samples.len()).collect(),
        weights: Vec::new(),
        repair_swaps: 0,
        surrogate_loss: Some(net.final_loss),
        surrogate_value: Some(result.value),
    })
}

/// Runs one strategy on the samples of a single iteration.
pub fn design(samples: &[DataSample], case: CaseTag, cfg: &StrategyConfig) -> Result<StrategyOutcome> {
    let first = samples.first().ok_or_else(|| strategy_error(cfg.name, "empty dataset"))?;
    let n = first.graph.n_v();
    cfg.validate(n)?;
    if samples.iter().any(|s| s.graph.n_v() != n) {
        return Err(param("samples of different sizes"));
    }
    let out = match cfg.name {
        StrategyName::Ddd => ddd(samples, cfg),
        StrategyName::Nnga => nnga(samples, case, cfg),
        _ => direct(samples, cfg),
    }?;
    debug_assert!(out.graph.is_connected() && out.graph.n_e() <= cfg.n_e_out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorKind};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(g: Graph, j: f64) -> DataSample {
        DataSample {
            iteration: 0,
            family: "test".into(),
            graph: g,
            j,
            metrics: None,
        }
    }

    fn random_samples(n: usize, count: usize, seed: u64) -> Vec<DataSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|k| {
                let e = n - 1 + k % (max_edges(n) - n + 2);
                let g = loop {
                    let g = generate(GeneratorKind::RandomEdges { edges: e }, n, &mut rng).unwrap();
                    if g.is_connected() {
                        break g;
                    }
                };
                let j = g.n_e() as f64 / max_edges(n) as f64 * (0.5 + 0.5 * ((k * 7 % 11) as f64 / 11.0));
                sample(g, j)
            })
            .collect()
    }

    #[test]
    fn names_round_trip() {
        for n in StrategyName::ALL {
            assert_eq!(n.as_str().parse::<StrategyName>().unwrap(), n);
            let json = serde_json::to_string(&n).unwrap();
            assert_eq!(json, format!("\"{}\"", n.as_str()));
        }
        assert_eq!("pf".parse::<StrategyName>().unwrap(), StrategyName::Pf);
        assert!("XYZ".parse::<StrategyName>().is_err());
    }

    #[test]
    fn bwne_selection_sizes() {
        // ten samples at one edge count: one best and one worst
        let g = generate(GeneratorKind::Path, 5, &mut rand::rng()).unwrap();
        let samples: Vec<_> = (0..10).map(|k| sample(g.clone(), k as f64 / 10.0)).collect();
        let (idx, w) = bwne_selection(&samples, &EdgeBaseline::new(&samples), 0.1);
        assert_eq!(idx, vec![0, 9]);
        assert_eq!(w, vec![-1.0, 1.0]);
        // singleton edge count: best and worst at once
        let (idx, w) = bwne_selection(&samples[..1], &EdgeBaseline::new(&samples[..1]), 0.1);
        assert_eq!(idx, vec![0]);
        assert_eq!(w, vec![0.0]);
    }

    #[test]
    fn single_graph_is_reproduced() {
        let g = Graph::new(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let samples = vec![sample(g.clone(), 0.5)];
        let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(StrategyName::A, 5, 0)).unwrap();
        assert_eq!(out.graph, g);
        // the lone sample is both front and baseline, so its distance is
        // infinite and it carries no weight
        let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(StrategyName::Pf, 5, 0)).unwrap();
        assert_eq!(out.weights, vec![0.0]);
        assert!(out.graph.is_connected());
        // AN: every deviation from the edge-count mean is zero
        let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(StrategyName::An, 5, 0)).unwrap();
        assert_eq!(out.weights, vec![0.0]);
    }

    #[test]
    fn equal_objectives_vote_by_frequency() {
        let a = Graph::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = Graph::new(4, [(0, 1), (1, 2), (1, 3)]).unwrap();
        let c = Graph::new(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        let samples = vec![sample(a, 0.4), sample(b, 0.4), sample(c, 0.4)];
        let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(StrategyName::A, 3, 0)).unwrap();
        // (0,1): 3 votes, (1,2): 2 votes, (0,2) wins the tie at 1 but leaves
        // vertex 3 isolated, so it is swapped for the first pair reaching 3
        assert_eq!(out.graph.edges(), &[(0, 1), (0, 3), (1, 2)]);
        let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(StrategyName::A, 3, 0));
        assert!(out.unwrap().graph.is_connected());
    }

    #[test]
    fn every_direct_strategy_meets_the_budget() {
        let samples = random_samples(8, 120, 1);
        for name in [
            StrategyName::Ddd,
            StrategyName::A,
            StrategyName::An,
            StrategyName::Bwne,
            StrategyName::Pf,
            StrategyName::Dpf,
        ] {
            let out = design(&samples, CaseTag::Linear, &StrategyConfig::new(name, 12, 0)).unwrap();
            assert_eq!(out.graph.n_e(), 12, "{name}");
            assert!(out.graph.is_connected(), "{name}");
            assert_eq!(out.selected.len(), out.weights.len().max(out.selected.len()));
        }
    }

    #[test]
    fn pf_weights_and_errors() {
        let samples = random_samples(7, 60, 2);
        let cfg = StrategyConfig::new(StrategyName::Pf, 10, 0);
        let out = design(&samples, CaseTag::Linear, &cfg).unwrap();
        let fronts = compute_fronts(&samples);
        for i in &fronts.good.sample_indices {
            let pos = out.selected.iter().position(|s| s == i).unwrap();
            assert!((out.weights[pos] - 1.0).abs() < 1e-12 || fronts.baseline.samples(samples[*i].n_e()).len() == 1);
        }
        assert!(out.selected.len() >= fronts.good.support.len());

        let flat: Vec<_> = samples.iter().map(|s| sample(s.graph.clone(), 0.0)).collect();
        assert!(matches!(
            design(&flat, CaseTag::Linear, &cfg),
            Err(Error::Strategy { .. })
        ));
        let bad = StrategyConfig { p: 0.0, ..cfg.clone() };
        assert!(design(&samples, CaseTag::Linear, &bad).is_err());
        let bad = StrategyConfig { n_e_out: 3, ..cfg };
        assert!(design(&samples, CaseTag::Linear, &bad).is_err());
    }

    #[test]
    fn a_with_large_alpha_follows_the_best_graph() {
        let samples = random_samples(8, 80, 3);
        let best = samples
            .iter()
            .max_by(|a, b| a.j.total_cmp(&b.j))
            .unwrap();
        let n_e_out = 10.min(best.n_e());
        let cfg = StrategyConfig {
            alpha: 50.0,
            ..StrategyConfig::new(StrategyName::A, n_e_out, 0)
        };
        let out = design(&samples, CaseTag::Linear, &cfg).unwrap();
        assert!(out.graph.edges().iter().all(|&(i, j)| best.graph.has_edge(i, j)));
    }

    #[test]
    fn nnga_learns_edge_count() {
        let n = 6;
        let samples: Vec<_> = random_samples(n, 50, 4)
            .into_iter()
            .map(|s| {
                let j = s.n_e() as f64 / max_edges(n) as f64;
                sample(s.graph, j)
            })
            .collect();
        let cfg = StrategyConfig {
            net: Some(NetConfig::linear(1)),
            ga: GaConfig {
                max_generations: 100,
                stall_generations: 30,
                ..GaConfig::with_seed(1)
            },
            ..StrategyConfig::new(StrategyName::Nnga, 9, 1)
        };
        let out = design(&samples, CaseTag::Linear, &cfg).unwrap();
        assert!(out.surrogate_loss.unwrap() < 1e-3, "{:?}", out.surrogate_loss);
        assert_eq!(out.graph.n_e(), 9);
    }
}
