//! Datasets of `(graph, J)` samples generated from hidden node dynamics.
//!
//! A generated dataset is split in two: the [`Dataset`] (graphs, objective
//! values, cached metrics, generation metadata) that design strategies may
//! read, and the [`Secrets`] (the node dynamics of each iteration) that only
//! the oracle and the validation step may read.

mod coverage;
mod io;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use coverage::{coverage, Coverage, CONNECTED_LABELED_GRAPHS};
pub use io::{load_dataset, load_secrets, save_dataset, save_secrets, write_dataset, SCHEMA_VERSION};

use crate::dynamics::{LinearNodeDynamics, NodeDynamics, NonlinearNodeDynamics, DEFAULT_DT};
use crate::error::{param, Result};
use crate::graph::{
    betweenness_stats, degree_stats, generate, max_edges, min_edges, Graph, GeneratorKind,
};
use crate::spectral::spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseTag {
    Linear,
    Nonlinear,
}

/// How the hidden node dynamics of each iteration are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum DynamicsSpec {
    /// The same linear dynamics in every iteration.
    Linear { a: Vec<f64> },
    /// Linear dynamics with `a_i` drawn uniformly from `[low, high]` anew in
    /// every iteration.
    LinearUniform { low: f64, high: f64 },
    Nonlinear(NonlinearNodeDynamics),
}

impl DynamicsSpec {
    pub fn case(&self) -> CaseTag {
        match self {
            Self::Linear { .. } | Self::LinearUniform { .. } => CaseTag::Linear,
            Self::Nonlinear(_) => CaseTag::Nonlinear,
        }
    }

    fn resolve<R: Rng>(&self, n_v: usize, rng: &mut R) -> NodeDynamics {
        match self {
            Self::Linear { a } => NodeDynamics::Linear(LinearNodeDynamics { a: a.clone() }),
            Self::LinearUniform { low, high } => NodeDynamics::Linear(LinearNodeDynamics {
                a: (0..n_v).map(|_| rng.random_range(*low..=*high)).collect(),
            }),
            Self::Nonlinear(d) => NodeDynamics::Nonlinear(d.clone()),
        }
    }

    fn validate(&self, n_v: usize) -> Result<()> {
        match self {
            Self::Linear { a } if a.len() != n_v => {
                Err(param(format!("{} node parameters for n_v = {n_v}", a.len())))
            }
            Self::Linear { a } if a.iter().any(|&x| !(x < 0.0)) => {
                Err(param("linear node parameters must be negative"))
            }
            Self::LinearUniform { low, high } if !(low <= high && *high < 0.0) => {
                Err(param(format!("invalid uniform range [{low}, {high}]")))
            }
            Self::Nonlinear(d) if d.a.len() != n_v || d.x0.len() != n_v => {
                Err(param(format!("nonlinear dynamics do not describe {n_v} nodes")))
            }
            _ => Ok(()),
        }
    }
}

/// Number of graphs requested from each random family per iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCounts {
    pub erdos_renyi: usize,
    pub small_world: usize,
    pub scale_free: usize,
}

/// Parameters of the random families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Each Erdős–Rényi graph draws its edge probability uniformly from
    /// this range.
    pub erdos_renyi_p: (f64, f64),
    pub small_world_neighbors_per_side: usize,
    pub small_world_rewire: f64,
    pub scale_free_m: usize,
    /// Lattice half-width of the single k-nearest-neighbour ring.
    pub nearest_neighbors: usize,
    /// Apply a uniform random vertex permutation to every small-world and
    /// scale-free graph, whose generators otherwise tie structure to labels.
    /// Off in the reference configurations.
    #[serde(default)]
    pub relabel_random_families: bool,
}

impl GeneratorParams {
    pub fn for_size(n_v: usize) -> Self {
        let n = n_v as f64;
        Self {
            erdos_renyi_p: ((n.ln() / n).min(0.5), 0.5),
            small_world_neighbors_per_side: 2,
            small_world_rewire: 0.2,
            scale_free_m: 2,
            nearest_neighbors: 2,
            relabel_random_families: false,
        }
    }
}

pub const DEFAULT_RETRY_CAP: usize = 50;

/// Everything needed to regenerate a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSpec {
    pub name: String,
    pub n_v: usize,
    pub n_e_star: usize,
    pub iterations: usize,
    pub family_counts: FamilyCounts,
    pub generators: GeneratorParams,
    pub retry_cap: usize,
    pub seed: u64,
    pub dynamics: DynamicsSpec,
}

impl DatasetSpec {
    pub fn case(&self) -> CaseTag {
        self.dynamics.case()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_v < 4 {
            return Err(param("datasets need at least 4 vertices"));
        }
        if !(min_edges(self.n_v)..=max_edges(self.n_v)).contains(&self.n_e_star) {
            return Err(param(format!(
                "n_e* = {} outside [{}, {}]",
                self.n_e_star,
                min_edges(self.n_v),
                max_edges(self.n_v)
            )));
        }
        if self.iterations == 0 || self.retry_cap == 0 {
            return Err(param("iterations and retry cap must be positive"));
        }
        let (lo, hi) = self.generators.erdos_renyi_p;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return Err(param(format!("bad Erdős–Rényi range ({lo}, {hi})")));
        }
        self.dynamics.validate(self.n_v)
    }

    /// Graph requests of one iteration, in generation order.
    fn requests<R: Rng>(&self, rng: &mut R) -> Vec<GeneratorKind> {
        let n = self.n_v;
        let p = &self.generators;
        let mut out = vec![GeneratorKind::Complete, GeneratorKind::Path, GeneratorKind::Ring];
        out.extend((0..n).map(|center| GeneratorKind::Star { center }));
        out.push(GeneratorKind::KNearestNeighbors {
            k: p.nearest_neighbors,
        });
        for _ in 0..self.family_counts.erdos_renyi {
            let (lo, hi) = p.erdos_renyi_p;
            out.push(GeneratorKind::ErdosRenyi {
                p: rng.random_range(lo..=hi),
            });
        }
        out.extend((0..self.family_counts.small_world).map(|_| GeneratorKind::SmallWorld {
            neighbors_per_side: p.small_world_neighbors_per_side,
            rewire: p.small_world_rewire,
        }));
        out.extend(
            (0..self.family_counts.scale_free).map(|_| GeneratorKind::ScaleFree {
                m: p.scale_free_m,
            }),
        );
        out.extend(
            (min_edges(n)..max_edges(n))
                .filter(|&e| e != self.n_e_star)
                .map(|edges| GeneratorKind::RandomEdges { edges }),
        );
        out
    }

    /// The metadata recorded with a generated dataset.
    fn meta(&self, warnings: Vec<String>, sample_count: usize) -> DatasetMeta {
        DatasetMeta {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            case: self.case(),
            n_v: self.n_v,
            n_e_star: self.n_e_star,
            iterations: self.iterations,
            seed: self.seed,
            family_counts: self.family_counts,
            generators: self.generators,
            retry_cap: self.retry_cap,
            warnings,
            sample_count,
        }
    }
}

/// Cached per-sample metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub n_e: usize,
    pub var_d: f64,
    pub var_b: f64,
    pub lambda2: f64,
    pub q: f64,
}

impl SampleMetrics {
    pub fn compute(g: &Graph) -> Result<Self> {
        let s = spectrum(g)?;
        Ok(Self {
            n_e: g.n_e(),
            var_d: degree_stats(g).normalized_variance,
            var_b: betweenness_stats(g)?.normalized_variance,
            lambda2: s.algebraic_connectivity(),
            q: s.eigenratio(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSample {
    pub iteration: usize,
    pub family: String,
    pub graph: Graph,
    #[serde(rename = "J")]
    pub j: f64,
    pub metrics: Option<SampleMetrics>,
}

impl DataSample {
    pub fn n_e(&self) -> usize {
        self.graph.n_e()
    }
}

/// Generation metadata: the `DatasetSpec` without its dynamics, plus bookkeeping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub schema_version: u32,
    pub name: String,
    pub case: CaseTag,
    pub n_v: usize,
    pub n_e_star: usize,
    pub iterations: usize,
    pub seed: u64,
    pub family_counts: FamilyCounts,
    pub generators: GeneratorParams,
    pub retry_cap: usize,
    pub warnings: Vec<String>,
    pub sample_count: usize,
}

/// Samples of every iteration, stored iteration by iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub meta: DatasetMeta,
    pub samples: Vec<DataSample>,
}

impl Dataset {
    /// Samples of iteration `k` (empty if there are none).
    pub fn iteration(&self, k: usize) -> &[DataSample] {
        let start = self.samples.partition_point(|s| s.iteration < k);
        let end = self.samples.partition_point(|s| s.iteration <= k);
        &self.samples[start..end]
    }

    pub fn iteration_count(&self) -> usize {
        self.meta.iterations
    }

    pub fn coverage(&self) -> Coverage {
        let per_iteration = self.samples.len() as f64 / self.meta.iterations.max(1) as f64;
        coverage(self.meta.n_v, per_iteration.round() as usize)
    }
}

/// Hidden dynamics of every iteration. Never handed to design strategies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Secrets {
    pub name: String,
    pub n_v: usize,
    pub n_e_star: usize,
    pub seed: u64,
    pub dynamics: Vec<NodeDynamics>,
}

impl Secrets {
    pub fn iteration(&self, k: usize) -> Option<&NodeDynamics> {
        self.dynamics.get(k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub dataset: Dataset,
    pub secrets: Secrets,
}

/// Independent random stream for iteration `k` of a run seeded with `seed`.
pub fn iteration_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

struct IterationOutput {
    dynamics: NodeDynamics,
    samples: Vec<DataSample>,
    warnings: Vec<String>,
}

fn generate_iteration(spec: &DatasetSpec, k: usize) -> Result<IterationOutput> {
    let mut rng = iteration_rng(spec.seed, k);
    let dynamics = spec.dynamics.resolve(spec.n_v, &mut rng);
    let mut warnings = Vec::new();
    let mut graphs = Vec::new();
    for request in spec.requests(&mut rng) {
        let mut accepted = None;
        for _ in 0..spec.retry_cap {
            let g = generate(request, spec.n_v, &mut rng)?;
            if g.is_connected() {
                accepted = Some(match request {
                    GeneratorKind::SmallWorld { .. } | GeneratorKind::ScaleFree { .. }
                        if spec.generators.relabel_random_families =>
                    {
                        let mut perm: Vec<usize> = (0..spec.n_v).collect();
                        perm.shuffle(&mut rng);
                        g.relabel(&perm)?
                    }
                    _ => g,
                });
                break;
            }
        }
        match accepted {
            Some(g) => graphs.push((request.family(), g)),
            None => warnings.push(format!(
                "iteration {k}: no connected {request:?} graph after {} attempts",
                spec.retry_cap
            )),
        }
    }
    let samples = graphs
        .into_iter()
        .map(|(family, graph)| {
            let j = dynamics.objective(&graph)?.j;
            let metrics = Some(SampleMetrics::compute(&graph)?);
            Ok(DataSample {
                iteration: k,
                family: family.to_string(),
                graph,
                j,
                metrics,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IterationOutput {
        dynamics,
        samples,
        warnings,
    })
}

/// Generates every iteration of `spec`. Output is a pure function of `spec`.
pub fn generate_dataset(spec: &DatasetSpec) -> Result<GeneratedDataset> {
    spec.validate()?;
    let outputs = (0..spec.iterations)
        .into_par_iter()
        .map(|k| generate_iteration(spec, k))
        .collect::<Result<Vec<_>>>()?;
    let mut samples = Vec::new();
    let mut warnings = Vec::new();
    let mut dynamics = Vec::new();
    for out in outputs {
        samples.extend(out.samples);
        warnings.extend(out.warnings);
        dynamics.push(out.dynamics);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let meta = spec.meta(warnings, samples.len());
    Ok(GeneratedDataset {
        dataset: Dataset { meta, samples },
        secrets: Secrets {
            name: spec.name.clone(),
            n_v: spec.n_v,
            n_e_star: spec.n_e_star,
            seed: spec.seed,
            dynamics,
        },
    })
}

/// Names accepted by [`default_spec`].
pub const DEFAULT_SPEC_NAMES: [&str; 5] = [
    "D_middle_l",
    "D_small_l",
    "D_large_l",
    "D_middle_nl",
    "D_large_nl",
];

/// Time horizon of the bistable datasets.
pub const NONLINEAR_T_MAX: f64 = 5.0;

/// `a_i = −n_v + (i − 1)` for 1-based `i`.
pub fn ramp_linear_a(n_v: usize) -> Vec<f64> {
    (1..=n_v).map(|i| -(n_v as f64) + (i as f64 - 1.0)).collect()
}

/// The ten bistable nodes used by the nonlinear datasets.
pub fn default_nonlinear_dynamics() -> NonlinearNodeDynamics {
    NonlinearNodeDynamics {
        a: (1..=10).map(|i| 1.0 + 0.2 * i as f64).collect(),
        x0: vec![-1.0, -2.0, -3.0, -4.0, -5.0, 2.0, 4.0, 6.0, 8.0, 10.0],
        e_thres: 0.01,
        t_max: NONLINEAR_T_MAX,
        dt: DEFAULT_DT,
    }
}

/// One of the five reference dataset configurations.
pub fn default_spec(name: &str, seed: u64) -> Option<DatasetSpec> {
    let (n_v, n_e_star, per_family, dynamics) = match name {
        "D_middle_l" => (20, 45, 150, DynamicsSpec::Linear { a: ramp_linear_a(20) }),
        "D_large_l" => (20, 45, 1499, DynamicsSpec::Linear { a: ramp_linear_a(20) }),
        "D_small_l" => (
            10,
            20,
            70,
            DynamicsSpec::LinearUniform {
                low: -20.0,
                high: -1.0,
            },
        ),
        "D_middle_nl" => (10, 20, 58, DynamicsSpec::Nonlinear(default_nonlinear_dynamics())),
        "D_large_nl" => (10, 20, 1547, DynamicsSpec::Nonlinear(default_nonlinear_dynamics())),
        _ => return None,
    };
    Some(DatasetSpec {
        name: name.to_string(),
        n_v,
        n_e_star,
        iterations: 20,
        family_counts: FamilyCounts {
            erdos_renyi: per_family,
            small_world: per_family,
            scale_free: per_family,
        },
        generators: GeneratorParams::for_size(n_v),
        retry_cap: DEFAULT_RETRY_CAP,
        seed,
        dynamics,
    })
}

/// All five reference specs, in the order of [`DEFAULT_SPEC_NAMES`].
pub fn default_specs(seed: u64) -> Vec<DatasetSpec> {
    DEFAULT_SPEC_NAMES
        .iter()
        .map(|n| default_spec(n, seed).unwrap())
        .collect()
}
