//! Experiment protocol: opinion generation, method comparison over a sweep
//! of `k`, and sampler timing.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Normal, Pareto, Uniform};
use serde::{Deserialize, Serialize};

use crate::baselines::pick;
use crate::dynamics::{
    structure_centrality_exact, CentralityMode, CentralityVector, OpinionVector, DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::fast::{sample_root_counts, select_with_estimate, SamplingPlan};
use crate::forest::{BatchSampler, WalkGraph, DEFAULT_LANES};
use crate::generators::random_digraph;
use crate::graph::Digraph;
use crate::selection::{check_k, Evaluator, Goal, Method, ObjectiveKind, Selection};

/// JSON Schema that every [`ComparisonReport`] conforms to.
pub const REPORT_SCHEMA: &str = include_str!("../schema/comparison_report.schema.json");

/// Distribution of generated internal opinions.
///
/// All non-uniform kinds are min-max rescaled onto `[0, 1]`: the smallest
/// draw becomes 0 and the largest 1. The power-law and exponential kinds are
/// experimental.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OpinionDistribution {
    Uniform,
    Normal,
    /// Pareto with scale 1 and shape `alpha`.
    PowerLaw { alpha: f64 },
    /// Exponential with the given rate.
    Exponential { rate: f64 },
}

impl OpinionDistribution {
    pub fn name(&self) -> &'static str {
        match self {
            OpinionDistribution::Uniform => "uniform",
            OpinionDistribution::Normal => "normal",
            OpinionDistribution::PowerLaw { .. } => "powerlaw",
            OpinionDistribution::Exponential { .. } => "exp",
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<OpinionVector> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bad = |e: &dyn std::fmt::Display| Error::InvalidParameter(e.to_string());
        let raw: Vec<f64> = match *self {
            OpinionDistribution::Uniform => {
                let u = Uniform::new_inclusive(0.0, 1.0).map_err(|e| bad(&e))?;
                return OpinionVector::new(u.sample_iter(&mut rng).take(n).collect());
            }
            OpinionDistribution::Normal => {
                let d = Normal::new(0.0, 1.0).map_err(|e| bad(&e))?;
                d.sample_iter(&mut rng).take(n).collect()
            }
            OpinionDistribution::PowerLaw { alpha } => {
                let d = Pareto::new(1.0, alpha).map_err(|e| bad(&e))?;
                d.sample_iter(&mut rng).take(n).collect()
            }
            OpinionDistribution::Exponential { rate } => {
                let d = Exp::new(rate).map_err(|e| bad(&e))?;
                d.sample_iter(&mut rng).take(n).collect()
            }
        };
        OpinionVector::new(min_max_rescale(raw))
    }
}

impl FromStr for OpinionDistribution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "normal" => Ok(Self::Normal),
            "powerlaw" => Ok(Self::PowerLaw { alpha: 2.5 }),
            "exp" | "exponential" => Ok(Self::Exponential { rate: 1.0 }),
            other => Err(Error::InvalidParameter(format!(
                "unknown opinion distribution {other:?}"
            ))),
        }
    }
}

/// Affine map sending the minimum to 0 and the maximum to 1. A constant
/// vector maps to all zeros.
pub fn min_max_rescale(values: Vec<f64>) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    values
        .into_iter()
        .map(|v| {
            if span > 0.0 {
                ((v - lo) / span).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
        .collect()
}

/// Parameters of one comparison run.
#[derive(Debug, Clone)]
pub struct CompareConfig {
    pub graph_name: String,
    pub distribution: OpinionDistribution,
    pub ks: Vec<usize>,
    pub methods: Vec<Method>,
    pub plan: SamplingPlan,
    pub opinion_seeds: Vec<u64>,
    pub threads: Option<usize>,
    pub dense_cap: usize,
}

impl CompareConfig {
    pub fn new(graph_name: impl Into<String>) -> Self {
        Self {
            graph_name: graph_name.into(),
            distribution: OpinionDistribution::Uniform,
            ks: vec![10, 20, 30, 40, 50],
            methods: vec![
                Method::Exact,
                Method::Fast,
                Method::Random,
                Method::InDegree,
                Method::InternalOpinion,
                Method::ExpressedOpinion,
            ],
            plan: SamplingPlan::default(),
            opinion_seeds: vec![0],
            threads: None,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphMeta {
    pub name: String,
    pub n: usize,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanMeta {
    pub l: usize,
    pub base_seed: u64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

/// One (method, k) result for one opinion seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub method: Method,
    pub k: usize,
    pub nodes: Option<Vec<usize>>,
    pub objective: Option<f64>,
    pub objective_kind: Option<ObjectiveKind>,
    /// `|g_T - g_T_hat| / g_T` for the fast method when exact also ran.
    pub gamma: Option<f64>,
    /// Time spent choosing nodes: the method's share of centrality
    /// computation plus the top-k pass. Excludes graph loading and the
    /// objective re-solve.
    pub wall_ms: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub opinion_seed: u64,
    pub baseline_objective: f64,
    pub cells: Vec<Cell>,
}

/// `gamma` per opinion seed for one `k`, and their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaSummary {
    pub k: usize,
    pub per_seed: Vec<Option<f64>>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub graph: GraphMeta,
    pub distribution: OpinionDistribution,
    pub goal: Goal,
    pub ks: Vec<usize>,
    pub methods: Vec<Method>,
    pub plan: PlanMeta,
    pub opinion_seeds: Vec<u64>,
    pub threads: Option<usize>,
    pub runs: Vec<SeedRun>,
    pub gamma_summary: Vec<GammaSummary>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV `method,k,objective,gamma,wall_ms`, one row per cell in seed order.
    /// Missing values are empty fields.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut out = String::from("method,k,objective,gamma,wall_ms\n");
        for run in &self.runs {
            for c in &run.cells {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    c.method,
                    c.k,
                    opt(c.objective),
                    opt(c.gamma),
                    opt(c.wall_ms)
                )
                .unwrap();
            }
        }
        out
    }

    pub fn cell(&self, seed_idx: usize, method: Method, k: usize) -> Option<&Cell> {
        self.runs
            .get(seed_idx)?
            .cells
            .iter()
            .find(|c| c.method == method && c.k == k)
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn ok_cell(sel: Selection, wall_ms: f64) -> Cell {
    Cell {
        method: sel.method,
        k: sel.k,
        nodes: Some(sel.nodes),
        objective: Some(sel.objective),
        objective_kind: Some(sel.objective_kind),
        gamma: None,
        wall_ms: Some(wall_ms),
        error: None,
    }
}

fn err_cell(method: Method, k: usize, err: &Error) -> Cell {
    Cell {
        method,
        k,
        nodes: None,
        objective: None,
        objective_kind: None,
        gamma: None,
        wall_ms: None,
        error: Some(err.to_string()),
    }
}

/// Runs every method for every `k` and opinion seed on one graph (OpinionMin).
///
/// Structure centralities do not depend on the opinions, so the exact and
/// sampled centralities are computed once and their cost is charged to every
/// cell of that method. Per-cell failures (for instance the exact method on a
/// graph above the dense cap) are recorded in the cell and the run continues.
pub fn run_compare(g: &Digraph, config: &CompareConfig) -> Result<ComparisonReport> {
    if config.opinion_seeds.is_empty() || config.ks.is_empty() {
        return Err(Error::InvalidParameter(
            "need at least one k and one opinion seed".into(),
        ));
    }
    let n = g.n();
    let eval = Evaluator::new(g, config.dense_cap)?;

    let timed = |f: &dyn Fn() -> Result<CentralityVector>| -> Result<(CentralityVector, f64)> {
        let start = Instant::now();
        let v = f()?;
        Ok((v, millis(start)))
    };
    let exact_rho = config.methods.contains(&Method::Exact).then(|| {
        timed(&|| structure_centrality_exact(g, CentralityMode::SingleSolve, config.dense_cap))
    });
    let fast_rho = config.methods.contains(&Method::Fast).then(|| {
        timed(&|| {
            let streams: Vec<u64> = (0..config.plan.samples as u64).collect();
            if streams.is_empty() {
                return Err(Error::InvalidParameter("sample count l must be >= 1".into()));
            }
            Ok(sample_root_counts(g, config.plan.base_seed, &streams, config.threads)?.centrality())
        })
    });

    let mut runs = Vec::with_capacity(config.opinion_seeds.len());
    for &oseed in &config.opinion_seeds {
        let s = config.distribution.generate(n, oseed)?;
        let baseline_objective = eval.objective(&s)?;
        let mut cells = Vec::new();
        for &k in &config.ks {
            for &method in &config.methods {
                let start = Instant::now();
                let result: Result<(Selection, f64)> = (|| {
                    check_k(k, n)?;
                    match method {
                        Method::Exact | Method::Fast => {
                            let pre = if method == Method::Exact { &exact_rho } else { &fast_rho };
                            let (rho, rho_ms) = match pre.as_ref().expect("requested method") {
                                Ok(v) => v,
                                Err(e) => {
                                    return Err(Error::InvalidParameter(e.to_string()));
                                }
                            };
                            let start = Instant::now();
                            let nodes = select_with_estimate(rho, &s, k, Goal::Min, None)?.nodes;
                            let ms = rho_ms + millis(start);
                            Ok((eval.selection(method, Goal::Min, &s, nodes)?, ms))
                        }
                        Method::BruteForce => {
                            let sel = crate::exact::brute_force_opinion_min(g, &s, k)?;
                            Ok((sel, millis(start)))
                        }
                        Method::Random => {
                            let seed = config.plan.base_seed ^ (k as u64).rotate_left(32);
                            let nodes = pick::random(n, k, seed);
                            let ms = millis(start);
                            Ok((eval.selection(method, Goal::Min, &s, nodes)?, ms))
                        }
                        Method::InDegree => {
                            let nodes = pick::in_degree(g, k);
                            let ms = millis(start);
                            Ok((eval.selection(method, Goal::Min, &s, nodes)?, ms))
                        }
                        Method::InternalOpinion => {
                            let nodes = pick::internal_opinion(&s, k);
                            let ms = millis(start);
                            Ok((eval.selection(method, Goal::Min, &s, nodes)?, ms))
                        }
                        Method::ExpressedOpinion => {
                            let nodes = pick::expressed_opinion(&eval, &s, k)?;
                            let ms = millis(start);
                            Ok((eval.selection(method, Goal::Min, &s, nodes)?, ms))
                        }
                    }
                })();
                cells.push(match result {
                    Ok((sel, ms)) => ok_cell(sel, ms),
                    Err(e) => err_cell(method, k, &e),
                });
            }
        }
        fill_gamma(&mut cells);
        runs.push(SeedRun {
            opinion_seed: oseed,
            baseline_objective,
            cells,
        });
    }

    let gamma_summary = config
        .ks
        .iter()
        .map(|&k| {
            let per_seed: Vec<Option<f64>> = runs
                .iter()
                .map(|r| {
                    r.cells
                        .iter()
                        .find(|c| c.method == Method::Fast && c.k == k)
                        .and_then(|c| c.gamma)
                })
                .collect();
            let defined: Vec<f64> = per_seed.iter().flatten().copied().collect();
            let mean =
                (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
            GammaSummary { k, per_seed, mean }
        })
        .collect();

    Ok(ComparisonReport {
        schema_version: 1,
        graph: GraphMeta {
            name: config.graph_name.clone(),
            n,
            m: g.m(),
        },
        distribution: config.distribution,
        goal: Goal::Min,
        ks: config.ks.clone(),
        methods: config.methods.clone(),
        plan: PlanMeta {
            l: config.plan.samples,
            base_seed: config.plan.base_seed,
            epsilon: config.plan.epsilon,
            delta: config.plan.delta,
        },
        opinion_seeds: config.opinion_seeds.clone(),
        threads: config.threads,
        runs,
        gamma_summary,
    })
}

/// Relative error `|g_T - g_T_hat| / g_T`; undefined when `g_T = 0`.
pub fn relative_error(exact: f64, approx: f64) -> Option<f64> {
    (exact > 0.0).then(|| (exact - approx).abs() / exact)
}

fn fill_gamma(cells: &mut [Cell]) {
    let exact: Vec<(usize, f64)> = cells
        .iter()
        .filter(|c| c.method == Method::Exact)
        .filter_map(|c| c.objective.map(|o| (c.k, o)))
        .collect();
    for c in cells.iter_mut().filter(|c| c.method == Method::Fast) {
        if let (Some(&(_, g_t)), Some(g_hat)) =
            (exact.iter().find(|(k, _)| *k == c.k), c.objective)
        {
            c.gamma = relative_error(g_t, g_hat);
        }
    }
}

/// One row of the sampler timing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub total_ms: f64,
    pub per_sample_ms: f64,
    /// Mean random-walk steps per sample divided by `n`.
    pub steps_per_node: f64,
}

/// Times forest sampling on `G(n, m)` graphs of each size with the given
/// average out-degree. Graph generation is not timed. Samples run on one
/// thread so the numbers reflect per-sample work.
pub fn bench_sampler(sizes: &[usize], avg_degree: f64, l: usize, seed: u64) -> Result<Vec<BenchRow>> {
    if l == 0 {
        return Err(Error::InvalidParameter("sample count l must be >= 1".into()));
    }
    if !(avg_degree >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "average degree must be >= 0, got {avg_degree}"
        )));
    }
    sizes
        .iter()
        .map(|&n| {
            let g = random_digraph(n, avg_degree, seed ^ n as u64);
            let (ms, steps) = time_samples(&g, l, seed)?;
            Ok(BenchRow {
                n,
                m: g.m(),
                l,
                total_ms: ms,
                per_sample_ms: ms / l as f64,
                steps_per_node: steps as f64 / (l as f64 * n.max(1) as f64),
            })
        })
        .collect()
}

/// Wall time in ms and total walk steps for `l` samples on one thread.
pub fn time_samples(g: &Digraph, l: usize, seed: u64) -> Result<(f64, u64)> {
    let mut sampler = BatchSampler::new(DEFAULT_LANES);
    let mut checksum = 0u64;
    let mut steps = 0u64;
    let start = Instant::now();
    let wg = WalkGraph::new(g);
    let mut idx = 0u64;
    while idx < l as u64 {
        let batch = (l as u64 - idx).min(sampler.lanes() as u64);
        let mut rngs: Vec<_> = (idx..idx + batch)
            .map(|i| crate::forest::RngStream::new(seed, i).rng())
            .collect();
        sampler.sample(&wg, &mut rngs)?;
        for j in 0..batch as usize {
            checksum = checksum.wrapping_add(sampler.roots(j).first().copied().unwrap_or(0) as u64);
            steps += sampler.steps(j);
        }
        idx += batch;
    }
    let ms = millis(start);
    std::hint::black_box(checksum);
    Ok((ms, steps))
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,m,l,total_ms,per_sample_ms,steps_per_node\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{:.3},{:.4},{:.4}",
            r.n, r.m, r.l, r.total_ms, r.per_sample_ms, r.steps_per_node
        )
        .unwrap();
    }
    out
}
