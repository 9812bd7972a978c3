//! Genetic search over connected graphs with an edge budget.
//!
//! A genome is a bit mask over the lexicographic vertex pairs. Every genome in
//! the population is kept feasible (connected, at most `n_e*` edges) by
//! [`repair`], so selection only ever compares objective values.

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{all_pairs, mask_components, max_edges, min_edges, non_bridges, pair_index, Graph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub elite_count: usize,
    /// Share of the non-elite offspring produced by crossover; the rest are
    /// mutants.
    pub crossover_fraction: f64,
    pub stall_generations: usize,
    pub objective_tol: f64,
    /// Only meaningful for penalty formulations; unused here.
    pub constraint_tol: f64,
    pub max_generations: usize,
    pub tournament_size: usize,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            elite_count: 140,
            crossover_fraction: 0.5,
            stall_generations: 200,
            objective_tol: 1e-8,
            constraint_tol: 1e-4,
            max_generations: 2000,
            tournament_size: 2,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.population_size == 0 || self.tournament_size == 0 {
            return Err(Error::Optimizer("empty population or tournament".into()));
        }
        if self.elite_count >= self.population_size && self.population_size > 1 {
            return Err(Error::Optimizer(format!(
                "{} elites leave no offspring in a population of {}",
                self.elite_count, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.crossover_fraction) {
            return Err(Error::Optimizer("crossover fraction outside [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaResult {
    pub graph: Graph,
    pub value: f64,
    pub generations: usize,
    pub evaluations: usize,
    /// Best objective value after each generation.
    pub history: Vec<f64>,
}

fn count(mask: &[bool]) -> usize {
    mask.iter().filter(|&&b| b).count()
}

fn random_set_bit<R: Rng>(mask: &[bool], rng: &mut R) -> usize {
    let on: Vec<usize> = (0..mask.len()).filter(|&i| mask[i]).collect();
    *on.choose(rng).unwrap()
}

/// Makes `mask` feasible: random edges are dropped down to `cap`, then
/// components are joined by random cross-component pairs, each preceded by
/// the removal of a random cycle edge whenever the budget is exhausted.
pub fn repair<R: Rng>(mask: &mut [bool], n_v: usize, cap: usize, rng: &mut R) {
    while count(mask) > cap {
        let i = random_set_bit(mask, rng);
        mask[i] = false;
    }
    loop {
        let labels = mask_components(n_v, mask);
        if labels.iter().all(|&l| l == 0) {
            return;
        }
        if count(mask) >= cap {
            let cyc = non_bridges(n_v, mask);
            let &(i, j) = cyc.choose(rng).expect("a forest below n_v - 1 edges has spare budget");
            mask[pair_index(n_v, i, j)] = false;
        }
        let cross: Vec<(usize, usize)> = all_pairs(n_v).filter(|&(i, j)| labels[i] != labels[j]).collect();
        let &(i, j) = cross.choose(rng).unwrap();
        mask[pair_index(n_v, i, j)] = true;
    }
}

fn random_genome<R: Rng>(n_v: usize, cap: usize, rng: &mut R) -> Vec<bool> {
    let pairs = max_edges(n_v);
    let target = rng.random_range(min_edges(n_v)..=cap);
    let mut mask = vec![false; pairs];
    for i in rand::seq::index::sample(rng, pairs, target) {
        mask[i] = true;
    }
    repair(&mut mask, n_v, cap, rng);
    mask
}

fn tournament<R: Rng>(ranked_fitness: &[f64], size: usize, rng: &mut R) -> usize {
    // ranked_fitness is sorted best first, so the smallest rank wins
    (0..size)
        .map(|_| rng.random_range(0..ranked_fitness.len()))
        .min()
        .unwrap()
}

fn key(f: f64) -> f64 {
    if f.is_nan() {
        f64::NEG_INFINITY
    } else {
        f
    }
}

/// Maximizes `objective` over connected graphs on `n_v` vertices with at
/// most `n_e_star` edges.
pub fn ga_optimize<F>(objective: F, n_v: usize, n_e_star: usize, cfg: &GaConfig) -> Result<GaResult>
where
    F: Fn(&Graph) -> f64 + Sync,
{
    cfg.validate()?;
    if n_v < 2 || n_e_star < min_edges(n_v) {
        return Err(Error::Optimizer(format!(
            "no connected graph on {n_v} vertices has at most {n_e_star} edges"
        )));
    }
    let cap = n_e_star.min(max_edges(n_v));
    let pairs = max_edges(n_v);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut population: Vec<Vec<bool>> = (0..cfg.population_size)
        .map(|_| random_genome(n_v, cap, &mut rng))
        .collect();
    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut best: Option<(Vec<bool>, f64)> = None;
    let mut history = Vec::new();
    let mut stall = 0;
    let mut generation = 0;
    let offspring = cfg.population_size - cfg.elite_count.min(cfg.population_size);
    let n_cross = (cfg.crossover_fraction * offspring as f64).round() as usize;
    loop {
        let mut fresh: Vec<Vec<bool>> = population
            .iter()
            .filter(|g| !cache.contains_key(*g))
            .cloned()
            .collect();
        fresh.sort();
        fresh.dedup();
        let values: Vec<f64> = fresh
            .par_iter()
            .map(|m| key(objective(&Graph::from_pair_mask(n_v, m))))
            .collect();
        cache.extend(fresh.into_iter().zip(values));

        let fitness: Vec<f64> = population.iter().map(|g| cache[g]).collect();
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
        let top = order[0];
        let improved = match &best {
            None => true,
            Some((_, v)) => fitness[top] > *v,
        };
        let significant = match &best {
            None => true,
            Some((_, v)) => fitness[top] > *v + cfg.objective_tol,
        };
        if improved {
            best = Some((population[top].clone(), fitness[top]));
        }
        stall = if significant { 0 } else { stall + 1 };
        history.push(best.as_ref().unwrap().1);
        if generation >= cfg.max_generations || stall >= cfg.stall_generations {
            break;
        }

        let ranked: Vec<Vec<bool>> = order.iter().map(|&i| population[i].clone()).collect();
        let ranked_fitness: Vec<f64> = order.iter().map(|&i| fitness[i]).collect();
        let mut next: Vec<Vec<bool>> = ranked[..cfg.elite_count.min(ranked.len())].to_vec();
        for _ in 0..n_cross {
            let a = &ranked[tournament(&ranked_fitness, cfg.tournament_size, &mut rng)];
            let b = &ranked[tournament(&ranked_fitness, cfg.tournament_size, &mut rng)];
            let mut child: Vec<bool> = a
                .iter()
                .zip(b)
                .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
                .collect();
            repair(&mut child, n_v, cap, &mut rng);
            next.push(child);
        }
        while next.len() < cfg.population_size {
            let mut child = ranked[tournament(&ranked_fitness, cfg.tournament_size, &mut rng)].clone();
            let rate = 1.0 / pairs as f64;
            let mut flipped = false;
            for bit in child.iter_mut() {
                if rng.random_bool(rate) {
                    *bit = !*bit;
                    flipped = true;
                }
            }
            if !flipped {
                let i = rng.random_range(0..pairs);
                child[i] = !child[i];
            }
            repair(&mut child, n_v, cap, &mut rng);
            next.push(child);
        }
        population = next;
        generation += 1;
    }
    let (mask, value) = best.unwrap();
    Ok(GaResult {
        graph: Graph::from_pair_mask(n_v, &mask),
        value,
        generations: generation,
        evaluations: cache.len(),
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repair_yields_feasible_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let n = rng.random_range(2..9);
            let cap = rng.random_range(n - 1..=max_edges(n));
            let mut mask: Vec<bool> = (0..max_edges(n)).map(|_| rng.random_bool(0.5)).collect();
            repair(&mut mask, n, cap, &mut rng);
            let g = Graph::from_pair_mask(n, &mask);
            assert!(g.is_connected());
            assert!(g.n_e() <= cap);
        }
    }

    #[test]
    fn edge_count_objective_saturates_budget() {
        let cfg = GaConfig {
            max_generations: 50,
            ..GaConfig::with_seed(1)
        };
        let r = ga_optimize(|g| g.n_e() as f64, 8, 12, &cfg).unwrap();
        assert_eq!(r.graph.n_e(), 12);
        assert!(r.graph.is_connected());
        assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn reproducible_and_degenerate() {
        let cfg = GaConfig {
            max_generations: 10,
            ..GaConfig::with_seed(3)
        };
        let f = |g: &Graph| -(g.degrees().iter().map(|&d| (d as f64 - 3.0).powi(2)).sum::<f64>());
        assert_eq!(ga_optimize(f, 8, 12, &cfg).unwrap(), ga_optimize(f, 8, 12, &cfg).unwrap());

        let tiny = GaConfig {
            population_size: 1,
            elite_count: 0,
            max_generations: 0,
            ..GaConfig::with_seed(0)
        };
        let r = ga_optimize(f, 6, 7, &tiny).unwrap();
        assert_eq!(r.generations, 0);
        assert_eq!(r.evaluations, 1);
        assert!(r.graph.is_connected() && r.graph.n_e() <= 7);

        assert!(ga_optimize(f, 6, 4, &cfg).is_err());
        let bad = GaConfig {
            elite_count: 200,
            ..cfg
        };
        assert!(ga_optimize(f, 6, 7, &bad).is_err());
    }
}
