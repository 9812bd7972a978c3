use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dataset::DataSample;

/// Samples with `J` at or below this value never enter the good front.
pub const GOOD_FRONT_MIN_J: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Few edges, large `J`.
    Good,
    /// Many edges, small `J`.
    Bad,
}

/// Non-dominated `(n_e, J)` samples joined by straight segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoFront {
    pub orientation: Orientation,
    /// Support points sorted by edge count.
    pub support: Vec<(usize, f64)>,
    /// Index of each support point in the sample slice it was built from.
    pub sample_indices: Vec<usize>,
}

impl ParetoFront {
    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Piecewise-linear interpolant, defined on the support range only.
    pub fn eval(&self, n_e: usize) -> Option<f64> {
        let pos = self.support.partition_point(|&(e, _)| e < n_e);
        let &(e1, j1) = self.support.get(pos)?;
        if e1 == n_e {
            return Some(j1);
        }
        let &(e0, j0) = self.support.get(pos.checked_sub(1)?)?;
        let t = (n_e - e0) as f64 / (e1 - e0) as f64;
        Some(j0 + t * (j1 - j0))
    }
}

/// Samples grouped by edge count.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EdgeBaseline {
    /// Edge count to (mean `J`, indices of the samples with that count).
    pub by_edges: BTreeMap<usize, (f64, Vec<usize>)>,
}

impl EdgeBaseline {
    pub fn new(samples: &[DataSample]) -> Self {
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in samples.iter().enumerate() {
            groups.entry(s.n_e()).or_default().push(i);
        }
        let by_edges = groups
            .into_iter()
            .map(|(e, idx)| {
                let mean = idx.iter().map(|&i| samples[i].j).sum::<f64>() / idx.len() as f64;
                (e, (mean, idx))
            })
            .collect();
        Self { by_edges }
    }

    pub fn mean(&self, n_e: usize) -> Option<f64> {
        self.by_edges.get(&n_e).map(|(m, _)| *m)
    }

    pub fn samples(&self, n_e: usize) -> &[usize] {
        self.by_edges.get(&n_e).map_or(&[], |(_, v)| v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fronts {
    pub good: ParetoFront,
    pub bad: ParetoFront,
    pub baseline: EdgeBaseline,
}

/// Sweeps candidates in edge order and keeps strict improvements in `J`.
/// `better(a, b)` says `J = a` beats `J = b`.
fn sweep(
    samples: &[DataSample],
    candidates: impl Iterator<Item = usize>,
    ascending: bool,
    better: fn(f64, f64) -> bool,
    orientation: Orientation,
) -> ParetoFront {
    // best sample per edge count, first occurrence on ties
    let mut best: BTreeMap<usize, usize> = BTreeMap::new();
    for i in candidates {
        let e = samples[i].n_e();
        match best.get(&e) {
            Some(&k) if !better(samples[i].j, samples[k].j) => {}
            _ => {
                best.insert(e, i);
            }
        }
    }
    let ordered: Vec<usize> = if ascending {
        best.values().copied().collect()
    } else {
        best.values().rev().copied().collect()
    };
    let mut kept = Vec::new();
    let mut record: Option<f64> = None;
    for i in ordered {
        if record.is_none_or(|r| better(samples[i].j, r)) {
            record = Some(samples[i].j);
            kept.push(i);
        }
    }
    kept.sort_by_key(|&i| samples[i].n_e());
    ParetoFront {
        orientation,
        support: kept.iter().map(|&i| (samples[i].n_e(), samples[i].j)).collect(),
        sample_indices: kept,
    }
}

/// Good and bad fronts plus the per-edge-count baseline of `samples`.
pub fn compute_fronts(samples: &[DataSample]) -> Fronts {
    let good = sweep(
        samples,
        (0..samples.len()).filter(|&i| samples[i].j > GOOD_FRONT_MIN_J),
        true,
        |a, b| a > b,
        Orientation::Good,
    );
    let bad = sweep(samples, 0..samples.len(), false, |a, b| a < b, Orientation::Bad);
    Fronts {
        good,
        bad,
        baseline: EdgeBaseline::new(samples),
    }
}

/// Normalized distance of `(n_e, j)` from `front`: 0 on the front, 1 at the
/// edge-count mean. Infinite where the front or the baseline is undefined or
/// the two coincide. Negative distances are clamped to 0.
pub fn delta(front: &ParetoFront, baseline: &EdgeBaseline, n_e: usize, j: f64) -> f64 {
    let (Some(p), Some(b)) = (front.eval(n_e), baseline.mean(n_e)) else {
        return f64::INFINITY;
    };
    if p == b {
        return f64::INFINITY;
    }
    let d = (p - j) / (p - b);
    if d < 0.0 {
        log::debug!("negative front distance {d} at n_e = {n_e} clamped to 0");
        0.0
    } else {
        d
    }
}
