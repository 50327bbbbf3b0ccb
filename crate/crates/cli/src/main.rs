use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fjopt_core::experiment::{bench_sampler, bench_table, run_compare, CompareConfig, OpinionDistribution};
use fjopt_core::fast::estimate_centrality_with;
use fjopt_core::{
    load_edge_list, structure_centrality_exact, CentralityMode, CentralityVector, EdgeListOptions,
    FastConfig, LoadedGraph, Method, SamplingPlan,
};

/// Opinion minimization in the Friedkin-Johnsen model.
#[derive(Parser)]
#[command(name = "fjopt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare selection methods over a k sweep and write a JSON + CSV report.
    Compare(CompareArgs),
    /// Time forest sampling on synthetic constant-degree graphs.
    BenchSampler(BenchArgs),
    /// Write per-node structure centrality as CSV `node,rho`.
    Centrality(CentralityArgs),
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list: one `src dst` pair per line, `#`/`%` comments.
    #[arg(long)]
    graph: PathBuf,
    /// Map arbitrary node ids onto 0..n in order of first appearance.
    #[arg(long)]
    relabel: bool,
}

#[derive(Args)]
struct PlanArgs {
    /// Number of sampled forests.
    #[arg(long, default_value_t = 500, conflicts_with_all = ["epsilon", "delta"])]
    l: usize,
    /// Derive l from an (epsilon, delta) guarantee instead of --l.
    #[arg(long, requires = "delta")]
    epsilon: Option<f64>,
    #[arg(long, requires = "epsilon")]
    delta: Option<f64>,
    /// Base seed of the forest streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sampling (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

impl PlanArgs {
    fn plan(&self) -> Result<SamplingPlan> {
        let plan = match (self.epsilon, self.delta) {
            (Some(eps), Some(delta)) => SamplingPlan::from_guarantee(eps, delta, self.seed)?,
            _ => SamplingPlan::new(self.l, self.seed)?,
        };
        if self.threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        Ok(plan)
    }
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Internal opinion distribution: uniform, normal, powerlaw or exp.
    #[arg(long, default_value = "uniform")]
    dist: OpinionDistribution,
    /// Budgets to sweep.
    #[arg(long, value_delimiter = ',', default_value = "10,20,30,40,50")]
    k: Vec<usize>,
    /// Methods: exact, fast, rand, id, io, eo, brute.
    #[arg(long, value_delimiter = ',', default_value = "exact,fast,rand,id,io,eo")]
    methods: Vec<Method>,
    #[command(flatten)]
    plan: PlanArgs,
    /// Opinion seeds, one run per seed.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    opinion_seed: Vec<u64>,
    /// Largest n for the dense exact solver.
    #[arg(long, default_value_t = fjopt_core::dynamics::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// JSON report path; the CSV goes next to it with a `.csv` extension.
    /// Without it the JSON is printed to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Node counts; scientific notation such as 1e5 is accepted.
    #[arg(long, value_delimiter = ',', value_parser = parse_size, default_value = "1e4,1e5,1e6")]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 4.0)]
    avg_degree: f64,
    #[arg(long, default_value_t = 500)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the table to this CSV file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CentralityModeArg {
    Exact,
    Sample,
}

#[derive(Args)]
struct CentralityArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, value_enum, default_value = "exact")]
    mode: CentralityModeArg,
    #[command(flatten)]
    plan: PlanArgs,
    #[arg(long, default_value_t = fjopt_core::dynamics::DEFAULT_DENSE_CAP)]
    dense_cap: usize,
    /// CSV output path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_size(s: &str) -> Result<usize, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64) {
        return Err(format!("size must be a non-negative integer, got {s:?}"));
    }
    Ok(x as usize)
}

fn load(args: &GraphArgs) -> Result<LoadedGraph> {
    let opts = EdgeListOptions {
        relabel: args.relabel,
        ..EdgeListOptions::default()
    };
    let loaded = load_edge_list(&args.graph, &opts)?;
    eprintln!(
        "loaded {}: n={} m={} ({} duplicate arcs merged, {} self-arcs dropped)",
        args.graph.display(),
        loaded.graph.n(),
        loaded.graph.m(),
        loaded.duplicates_merged,
        loaded.self_arcs_dropped
    );
    Ok(loaded)
}

fn graph_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn compare(args: CompareArgs) -> Result<()> {
    if args.k.is_empty() || args.methods.is_empty() || args.opinion_seed.is_empty() {
        bail!("--k, --methods and --opinion-seed need at least one value");
    }
    let loaded = load(&args.graph)?;
    let mut cfg = CompareConfig::new(graph_name(&args.graph.graph));
    cfg.distribution = args.dist;
    cfg.ks = args.k;
    cfg.methods = args.methods;
    cfg.plan = args.plan.plan()?;
    cfg.opinion_seeds = args.opinion_seed;
    cfg.threads = args.plan.threads;
    cfg.dense_cap = args.dense_cap;
    let report = run_compare(&loaded.graph, &cfg)?;
    for run in &report.runs {
        for cell in run.cells.iter().filter(|c| c.error.is_some()) {
            eprintln!(
                "seed {} {} k={}: {}",
                run.opinion_seed,
                cell.method,
                cell.k,
                cell.error.as_deref().unwrap_or_default()
            );
        }
    }
    match args.out {
        Some(path) => {
            write(&path, &report.to_json())?;
            let csv = path.with_extension("csv");
            write(&csv, &report.to_csv())?;
            eprintln!("wrote {} and {}", path.display(), csv.display());
        }
        None => println!("{}", report.to_json()),
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let rows = bench_sampler(&args.sizes, args.avg_degree, args.l, args.seed)?;
    let table = bench_table(&rows);
    print!("{table}");
    if let Some(path) = args.out {
        write(&path, &table)?;
    }
    Ok(())
}

fn centrality(args: CentralityArgs) -> Result<()> {
    let loaded = load(&args.graph)?;
    let g = &loaded.graph;
    let start = Instant::now();
    let rho: CentralityVector = match args.mode {
        CentralityModeArg::Exact => {
            structure_centrality_exact(g, CentralityMode::SingleSolve, args.dense_cap)?
        }
        CentralityModeArg::Sample => {
            let plan = args.plan.plan()?;
            let config = FastConfig {
                threads: args.plan.threads,
                ..FastConfig::default()
            };
            estimate_centrality_with(g, &plan, &config)?.centrality()
        }
    };
    eprintln!("centrality computed in {:.1} ms", start.elapsed().as_secs_f64() * 1e3);
    let csv = match &loaded.original_ids {
        Some(ids) => {
            let mut out = String::from("node,rho\n");
            for (id, r) in ids.iter().zip(&rho.values) {
                out.push_str(&format!("{id},{r}\n"));
            }
            out
        }
        None => rho.to_csv(),
    };
    match args.out {
        Some(path) => write(&path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compare(a) => compare(a),
        Command::BenchSampler(a) => bench(a),
        Command::Centrality(a) => centrality(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
