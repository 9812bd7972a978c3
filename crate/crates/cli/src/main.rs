//! `syncnet`: dataset generation, analysis, network design and validation
//! from the command line.
//!
//! Vertex and iteration numbers are 1-based in CSV files and on the command
//! line, 0-based in JSON files.

use std::fmt::Display;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use syncnet::analysis::{compute_fronts, entangled_report};
use syncnet::dataset::{
    default_spec, load_dataset, load_secrets, save_dataset, save_secrets, generate_dataset,
    DatasetSpec, SampleMetrics, DEFAULT_SPEC_NAMES, SCHEMA_VERSION,
};
use syncnet::graph::{betweenness_stats, degree_stats, structural_stats};
use syncnet::learn::{GaConfig, NetConfig, FEATURE_VERSION};
use syncnet::spectral::spectrum;
use syncnet::strategies::{design, StrategyConfig, StrategyName};
use syncnet::validation::{oracle, validate, OracleResult, ValidationOptions};
use syncnet::Graph;

/// Default output directory when `--out` is not given.
const OUT_DIR_ENV: &str = "SYNCNET_OUT_DIR";

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

#[derive(Parser, Debug)]
#[command(name = "syncnet", version, about = "Data-driven design of synchronizing networks")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Repeat for more log output.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a dataset and its secrets file.
    GenDataset(GenArgs),
    /// Correlations, per-vertex correlations and Pareto fronts of a dataset.
    Analyze(AnalyzeArgs),
    /// Design one graph from one iteration of a dataset.
    Design(DesignArgs),
    /// Score every strategy on every iteration against the hidden dynamics.
    Validate(ValidateArgs),
    /// Optimize the true objective directly with the genetic algorithm.
    Oracle(OracleArgs),
    /// Metric dump of a single graph.
    Metrics(MetricsArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Reference dataset name or path to a JSON `DatasetSpec` file.
    #[arg(long)]
    spec: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Override the number of iterations.
    #[arg(long)]
    iterations: Option<usize>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct StrategyKnobs {
    /// Tolerance multiple for A/AN.
    #[arg(long)]
    alpha: Option<f64>,
    /// Selection fraction for BWNE, PF and DPF.
    #[arg(long)]
    p: Option<f64>,
    /// JSON network configuration for NNGA.
    #[arg(long)]
    net: Option<PathBuf>,
    /// JSON genetic algorithm configuration; missing fields take defaults.
    #[arg(long)]
    ga: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct DesignArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    strategy: StrategyName,
    /// Iteration to design from, 1-based.
    #[arg(long, default_value_t = 1)]
    iteration: usize,
    /// Edge budget (default: the dataset's n_e*).
    #[arg(long)]
    n_e_out: Option<usize>,
    #[command(flatten)]
    knobs: StrategyKnobs,
    /// Output graph file (default: design-<strategy>.json in the output directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    secrets: PathBuf,
    /// Comma-separated strategy names (default: all).
    #[arg(long, alias = "strategy", value_delimiter = ',')]
    strategies: Vec<StrategyName>,
    /// Oracle output supplying the J* column.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Comma-separated 1-based iterations (default: all).
    #[arg(long, value_delimiter = ',')]
    iterations: Vec<usize>,
    #[command(flatten)]
    knobs: StrategyKnobs,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    dataset_secrets: PathBuf,
    /// JSON genetic algorithm configuration; missing fields take defaults.
    #[arg(long)]
    ga: Option<PathBuf>,
    /// Comma-separated 1-based iterations (default: all).
    #[arg(long, value_delimiter = ',')]
    iterations: Vec<usize>,
    /// Base seed; iteration k runs with seed + k.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    /// Graph JSON, or any JSON object with a `graph` field.
    #[arg(long)]
    graph: PathBuf,
    /// Also write the dump to this file (stdout otherwise).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest {
    subcommand: &'static str,
    config: Value,
    seeds: Vec<u64>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    wall_clock_seconds: f64,
    versions: Value,
}

struct Run {
    subcommand: &'static str,
    started: Instant,
}

impl Run {
    fn finish(
        self,
        manifest_path: &Path,
        config: Value,
        seeds: Vec<u64>,
        inputs: Vec<PathBuf>,
        outputs: Vec<PathBuf>,
    ) -> CliResult<()> {
        let m = RunManifest {
            subcommand: self.subcommand,
            config,
            seeds,
            inputs,
            outputs,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            versions: json!({
                "syncnet": env!("CARGO_PKG_VERSION"),
                "dataset_schema": SCHEMA_VERSION,
                "features": FEATURE_VERSION,
            }),
        };
        write_json(manifest_path, &m)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> CliResult<()> {
    match cmd {
        Command::GenDataset(a) => gen_dataset(a),
        Command::Analyze(a) => analyze(a),
        Command::Design(a) => design_cmd(a),
        Command::Validate(a) => validate_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Metrics(a) => metrics(a),
    }
}

fn start(subcommand: &'static str) -> Run {
    Run {
        subcommand,
        started: Instant::now(),
    }
}

fn out_dir(out: Option<PathBuf>) -> CliResult<PathBuf> {
    let dir = out.unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut w = BufWriter::new(fs::File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()).into())
}

/// Empty for undefined values.
fn cell<T: Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for r in rows {
        writeln!(w, "{}", r.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// 1-based iteration list to 0-based indices, checked against `count`.
fn iteration_indices(list: &[usize], count: usize) -> CliResult<Option<Vec<usize>>> {
    if list.is_empty() {
        return Ok(None);
    }
    list.iter()
        .map(|&k| {
            if (1..=count).contains(&k) {
                Ok(k - 1)
            } else {
                Err(format!("iteration {k} outside 1..={count}").into())
            }
        })
        .collect::<CliResult<Vec<_>>>()
        .map(Some)
}

fn gen_dataset(a: GenArgs) -> CliResult<()> {
    let run = start("gen-dataset");
    let mut spec: DatasetSpec = match default_spec(&a.spec, a.seed.unwrap_or(0)) {
        Some(s) => s,
        None if Path::new(&a.spec).is_file() => read_json(Path::new(&a.spec))?,
        None => {
            return Err(format!(
                "unknown dataset '{}'; expected one of {} or a DatasetSpec JSON file",
                a.spec,
                DEFAULT_SPEC_NAMES.join(", ")
            )
            .into())
        }
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if let Some(k) = a.iterations {
        spec.iterations = k;
    }
    let dir = out_dir(a.out)?;
    let generated = generate_dataset(&spec)?;
    for w in &generated.dataset.meta.warnings {
        log::warn!("{w}");
    }
    let data_path = dir.join(format!("{}.jsonl", spec.name));
    let secrets_path = dir.join(format!("{}.secrets.json", spec.name));
    save_dataset(&generated.dataset, &data_path)?;
    save_secrets(&generated.secrets, &secrets_path)?;
    let mut inputs = vec![];
    if Path::new(&a.spec).is_file() {
        inputs.push(PathBuf::from(&a.spec));
    }
    let seeds = vec![spec.seed];
    run.finish(
        &dir.join(format!("{}.manifest.json", spec.name)),
        serde_json::to_value(&spec)?,
        seeds,
        inputs,
        vec![data_path, secrets_path],
    )
}

fn analyze(a: AnalyzeArgs) -> CliResult<()> {
    let run = start("analyze");
    let dataset = load_dataset(&a.dataset)?;
    let dir = out_dir(a.out)?;
    let report = entangled_report(&dataset)?;
    let meta = &dataset.meta;

    let corr_path = dir.join("correlations.csv");
    write_csv(
        &corr_path,
        &[
            "dataset",
            "n_v",
            "iterations",
            "corr_varD_J",
            "corr_varB_J",
            "corr_varD_negQ",
            "corr_varB_negQ",
            "index_corr_degree",
            "index_corr_betweenness",
        ],
        &[vec![
            meta.name.clone(),
            meta.n_v.to_string(),
            report.iterations.to_string(),
            cell(report.corr_var_d_j),
            cell(report.corr_var_b_j),
            cell(report.corr_var_d_neg_q),
            cell(report.corr_var_b_neg_q),
            cell(report.index_corr_degree),
            cell(report.index_corr_betweenness),
        ]],
    )?;

    let rho_path = dir.join("rho.csv");
    let rho_rows: Vec<Vec<String>> = (0..meta.n_v)
        .map(|i| {
            vec![
                (i + 1).to_string(),
                cell(report.rho_degree[i]),
                cell(report.rho_betweenness[i]),
            ]
        })
        .collect();
    write_csv(&rho_path, &["vertex", "rho_degree", "rho_betweenness"], &rho_rows)?;

    let fronts_path = dir.join("fronts.csv");
    let mut front_rows = vec![];
    for k in 0..dataset.iteration_count() {
        let samples = dataset.iteration(k);
        let fronts = compute_fronts(samples);
        for (i, s) in samples.iter().enumerate() {
            let good = fronts.good.sample_indices.contains(&i);
            let bad = fronts.bad.sample_indices.contains(&i);
            front_rows.push(vec![
                (k + 1).to_string(),
                (i + 1).to_string(),
                s.family.clone(),
                s.n_e().to_string(),
                s.j.to_string(),
                u8::from(good).to_string(),
                u8::from(bad).to_string(),
            ]);
        }
    }
    write_csv(
        &fronts_path,
        &["iteration", "sample", "family", "n_e", "J", "good_front", "bad_front"],
        &front_rows,
    )?;

    let summary_path = dir.join("analysis.json");
    write_json(
        &summary_path,
        &json!({ "dataset": meta.name, "report": report, "coverage": dataset.coverage() }),
    )?;
    run.finish(
        &dir.join("analyze.manifest.json"),
        json!({ "dataset": meta.name }),
        vec![meta.seed],
        vec![a.dataset],
        vec![corr_path, rho_path, fronts_path, summary_path],
    )
}

fn load_configs(k: &StrategyKnobs) -> CliResult<(Option<NetConfig>, Option<GaConfig>)> {
    let net = k.net.as_deref().map(read_json).transpose()?;
    let ga = k.ga.as_deref().map(read_json).transpose()?;
    Ok((net, ga))
}

fn config_inputs(k: &StrategyKnobs) -> Vec<PathBuf> {
    k.net.iter().chain(k.ga.iter()).cloned().collect()
}

fn design_cmd(a: DesignArgs) -> CliResult<()> {
    let run = start("design");
    let dataset = load_dataset(&a.dataset)?;
    let count = dataset.iteration_count();
    let k = iteration_indices(&[a.iteration], count)?.unwrap()[0];
    let (net, ga) = load_configs(&a.knobs)?;
    let mut cfg = StrategyConfig::new(
        a.strategy,
        a.n_e_out.unwrap_or(dataset.meta.n_e_star),
        a.knobs.seed,
    );
    if let Some(alpha) = a.knobs.alpha {
        cfg.alpha = alpha;
    }
    if let Some(p) = a.knobs.p {
        cfg.p = p;
    }
    if net.is_some() {
        cfg.net = net;
    }
    if let Some(ga) = ga {
        cfg.ga = ga;
    }
    let outcome = design(dataset.iteration(k), dataset.meta.case, &cfg)?;
    let out = match a.out {
        Some(p) => p,
        None => out_dir(std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))?
            .join(format!("design-{}.json", a.strategy.as_str().to_lowercase())),
    };
    write_json(
        &out,
        &json!({
            "dataset": dataset.meta.name,
            "iteration": k,
            "graph": outcome.graph,
            "config": cfg,
            "outcome": outcome,
        }),
    )?;
    let mut inputs = vec![a.dataset];
    inputs.extend(config_inputs(&a.knobs));
    run.finish(
        &out.with_extension("manifest.json"),
        serde_json::to_value(&cfg)?,
        vec![cfg.seed],
        inputs,
        vec![out],
    )
}

fn validate_cmd(a: ValidateArgs) -> CliResult<()> {
    let run = start("validate");
    let dataset = load_dataset(&a.dataset)?;
    let secrets = load_secrets(&a.secrets)?;
    let oracle_results: Option<Vec<OracleResult>> = a.oracle.as_deref().map(read_json).transpose()?;
    let strategies = if a.strategies.is_empty() {
        StrategyName::ALL.to_vec()
    } else {
        a.strategies.clone()
    };
    let (net, ga) = load_configs(&a.knobs)?;
    let opts = ValidationOptions {
        seed: a.knobs.seed,
        alpha: a.knobs.alpha,
        p: a.knobs.p,
        net,
        ga,
        iterations: iteration_indices(&a.iterations, dataset.iteration_count())?,
    };
    let rows = validate(&dataset, &secrets, &strategies, oracle_results.as_deref(), &opts)?;
    let dir = out_dir(a.out)?;
    let csv_path = dir.join("validation.csv");
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                (r.iteration + 1).to_string(),
                r.strategy.to_string(),
                cell(r.n_e),
                cell(r.j),
                cell(r.best_data_j),
                cell(r.j_star),
                r.error.as_deref().unwrap_or("").replace([',', '\n'], ";"),
            ]
        })
        .collect();
    write_csv(
        &csv_path,
        &["iteration", "strategy", "n_e", "J", "best_data_J", "J_star", "error"],
        &csv_rows,
    )?;
    let mut inputs = vec![a.dataset, a.secrets];
    inputs.extend(a.oracle);
    inputs.extend(config_inputs(&a.knobs));
    run.finish(
        &dir.join("validate.manifest.json"),
        json!({ "strategies": strategies, "options": opts }),
        vec![opts.seed],
        inputs,
        vec![csv_path],
    )
}

fn oracle_cmd(a: OracleArgs) -> CliResult<()> {
    let run = start("oracle");
    let secrets = load_secrets(&a.dataset_secrets)?;
    let mut ga: GaConfig = match &a.ga {
        Some(p) => read_json(p)?,
        None => GaConfig::default(),
    };
    if let Some(seed) = a.seed {
        ga.seed = seed;
    }
    let iterations = iteration_indices(&a.iterations, secrets.dynamics.len())?
        .unwrap_or_else(|| (0..secrets.dynamics.len()).collect());
    let mut results = vec![];
    let mut seeds = vec![];
    for &k in &iterations {
        let cfg = GaConfig {
            seed: ga.seed.wrapping_add(k as u64),
            ..ga
        };
        seeds.push(cfg.seed);
        let r = oracle(&secrets, k, &cfg)?;
        log::info!("iteration {}: J* = {:.4} with {} edges", k + 1, r.j, r.graph.n_e());
        results.push(r);
    }
    let dir = out_dir(a.out)?;
    let path = dir.join("oracle.json");
    write_json(&path, &results)?;
    let mut inputs = vec![a.dataset_secrets];
    inputs.extend(a.ga);
    run.finish(
        &dir.join("oracle.manifest.json"),
        json!({ "dataset": secrets.name, "ga": ga, "iterations": iterations }),
        seeds,
        inputs,
        vec![path],
    )
}

fn load_graph(path: &Path) -> CliResult<Graph> {
    let v: Value = read_json(path)?;
    let v = match v.get("graph") {
        Some(inner) => inner.clone(),
        None => v,
    };
    Ok(serde_json::from_value(v).map_err(|e| format!("{}: not a graph: {e}", path.display()))?)
}

fn metrics(a: MetricsArgs) -> CliResult<()> {
    let run = start("metrics");
    let g = load_graph(&a.graph)?;
    let connected = g.is_connected();
    let s = spectrum(&g)?;
    let sample = connected.then(|| SampleMetrics::compute(&g)).transpose()?;
    let dump = json!({
        "n_v": g.n_v(),
        "n_e": g.n_e(),
        "density": g.density(),
        "connected": connected,
        "laplacian_eigenvalues": s.values,
        "lambda2": s.algebraic_connectivity(),
        "lambda_max": s.largest(),
        "Q": s.eigenratio(),
        "degree": degree_stats(&g),
        "betweenness": connected.then(|| betweenness_stats(&g)).transpose()?,
        "structure": connected.then(|| structural_stats(&g)).transpose()?,
        "sample_metrics": sample,
    });
    let text = serde_json::to_string_pretty(&dump)?;
    if let Err(e) = writeln!(std::io::stdout().lock(), "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(out) = a.out {
        write_json(&out, &dump)?;
        run.finish(
            &out.with_extension("manifest.json"),
            json!({ "graph": a.graph }),
            vec![],
            vec![a.graph.clone()],
            vec![out.clone()],
        )?;
    }
    Ok(())
}
