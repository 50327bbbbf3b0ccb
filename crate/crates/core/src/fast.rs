//! Monte-Carlo structure centrality and the sampling-based selection.
//!
//! Each sampled forest contributes `|M(phi, i)|`, the size of the tree rooted
//! at `i`, to node `i`. Averaging over `l` forests and dividing by `n` gives
//! an unbiased estimate `rho_hat` of the structure centrality. The top-`k`
//! nodes by `rho_hat_i * s_i` are selected.
//!
//! Samples are independent given their [`RngStream`], so they are generated
//! in parallel and merged as integer counts. The estimate does not depend on
//! the thread count or scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{CentralitySource, CentralityVector, OpinionVector, DEFAULT_DENSE_CAP};
use crate::error::{Error, Result};
use crate::forest::{BatchSampler, RngStream, WalkGraph, DEFAULT_LANES};
use crate::graph::Digraph;
use crate::selection::{
    apply_selection, check_k, top_k, Evaluator, Goal, Method, ObjectiveKind, Selection,
};

pub const DEFAULT_SAMPLES: usize = 500;

/// Number of forests `l = ceil(ln(2 / delta) / (2 epsilon^2))` that makes
/// each `rho_hat_i s_i` an `(epsilon, delta)`-approximation.
pub fn required_samples(epsilon: f64, delta: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be > 0, got {epsilon}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let l = ((2.0 / delta).ln() / (2.0 * epsilon * epsilon)).ceil();
    if l > usize::MAX as f64 {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} requires too many samples"
        )));
    }
    Ok((l as usize).max(1))
}

/// How many forests to draw and from which seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingPlan {
    pub samples: usize,
    pub base_seed: u64,
    pub epsilon: Option<f64>,
    pub delta: Option<f64>,
}

/// JSON form: `{"l": 500, "base_seed": 1}` or
/// `{"epsilon": 0.02, "delta": 0.05, "base_seed": 1}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanSpec {
    l: Option<usize>,
    epsilon: Option<f64>,
    delta: Option<f64>,
    #[serde(default)]
    base_seed: u64,
}

impl SamplingPlan {
    pub fn new(samples: usize, base_seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidParameter("sample count l must be >= 1".into()));
        }
        Ok(Self {
            samples,
            base_seed,
            epsilon: None,
            delta: None,
        })
    }

    /// Plan with `l = required_samples(epsilon, delta)`.
    pub fn from_guarantee(epsilon: f64, delta: f64, base_seed: u64) -> Result<Self> {
        Ok(Self {
            samples: required_samples(epsilon, delta)?,
            base_seed,
            epsilon: Some(epsilon),
            delta: Some(delta),
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: PlanSpec = serde_json::from_str(text)
            .map_err(|e| Error::InvalidParameter(format!("bad sampling plan: {e}")))?;
        match (spec.l, spec.epsilon, spec.delta) {
            (Some(l), None, None) => Self::new(l, spec.base_seed),
            (None, Some(eps), Some(delta)) => Self::from_guarantee(eps, delta, spec.base_seed),
            _ => Err(Error::InvalidParameter(
                "sampling plan needs either `l` or both `epsilon` and `delta`".into(),
            )),
        }
    }

    pub fn stream(&self, index: u64) -> RngStream {
        RngStream::new(self.base_seed, index)
    }
}

impl Default for SamplingPlan {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            base_seed: 0,
            epsilon: None,
            delta: None,
        }
    }
}

/// Execution knobs for the sampling solver.
#[derive(Debug, Clone, Copy)]
pub struct FastConfig {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Graphs with more nodes report the `rho_hat` decomposition instead of
    /// re-solving the equilibrium.
    pub exact_objective_max_n: usize,
}

impl Default for FastConfig {
    fn default() -> Self {
        Self {
            threads: None,
            exact_objective_max_n: DEFAULT_DENSE_CAP,
        }
    }
}

/// Raw root counts from a batch of forests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootCounts {
    /// `sum_t |M(phi_t, i)|` per node.
    pub counts: Vec<u64>,
    pub samples: usize,
    /// Total random-walk steps over all forests.
    pub walk_steps: u64,
}

impl RootCounts {
    pub fn centrality(&self) -> CentralityVector {
        let denom = self.counts.len() as f64 * self.samples as f64;
        CentralityVector {
            values: self.counts.iter().map(|&c| c as f64 / denom).collect(),
            source: CentralitySource::Sampled {
                samples: self.samples,
            },
        }
    }
}

/// Samples the forests for `streams` and accumulates root counts.
pub fn sample_root_counts(
    g: &Digraph,
    base_seed: u64,
    streams: &[u64],
    threads: Option<usize>,
) -> Result<RootCounts> {
    let n = g.n();
    let wg = WalkGraph::new(g);
    let work = || -> Result<(Vec<u64>, u64)> {
        streams
            .par_chunks(DEFAULT_LANES)
            .try_fold(
                || (BatchSampler::new(DEFAULT_LANES), vec![0u64; n], 0u64),
                |(mut sampler, mut counts, mut steps), chunk| {
                    let mut rngs: Vec<_> = chunk
                        .iter()
                        .map(|&idx| RngStream::new(base_seed, idx).rng())
                        .collect();
                    sampler.sample(&wg, &mut rngs)?;
                    for j in 0..chunk.len() {
                        for &r in sampler.roots(j) {
                            counts[r as usize] += 1;
                        }
                        steps += sampler.steps(j);
                    }
                    Ok((sampler, counts, steps))
                },
            )
            .map(|res| res.map(|(_, counts, steps)| (counts, steps)))
            .try_reduce(
                || (vec![0u64; n], 0),
                |(mut a, sa), (b, sb)| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    Ok((a, sa + sb))
                },
            )
    };
    let (counts, walk_steps) = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(RootCounts {
        counts,
        samples: streams.len(),
        walk_steps,
    })
}

/// `rho_hat_i = (1 / (n l)) sum_t |M(phi_t, i)|` over streams `0..l`.
pub fn estimate_centrality(g: &Digraph, plan: &SamplingPlan) -> Result<CentralityVector> {
    estimate_centrality_with(g, plan, &FastConfig::default()).map(|rc| rc.centrality())
}

pub fn estimate_centrality_with(
    g: &Digraph,
    plan: &SamplingPlan,
    config: &FastConfig,
) -> Result<RootCounts> {
    if plan.samples == 0 {
        return Err(Error::InvalidParameter("sample count l must be >= 1".into()));
    }
    let streams: Vec<u64> = (0..plan.samples as u64).collect();
    sample_root_counts(g, plan.base_seed, &streams, config.threads)
}

pub fn solve_opinion_min_fast(
    g: &Digraph,
    s: &OpinionVector,
    k: usize,
    plan: &SamplingPlan,
) -> Result<Selection> {
    solve_fast(g, s, k, Goal::Min, plan, &FastConfig::default())
}

pub fn solve_opinion_max_fast(
    g: &Digraph,
    s: &OpinionVector,
    k: usize,
    plan: &SamplingPlan,
) -> Result<Selection> {
    solve_fast(g, s, k, Goal::Max, plan, &FastConfig::default())
}

pub fn solve_fast(
    g: &Digraph,
    s: &OpinionVector,
    k: usize,
    goal: Goal,
    plan: &SamplingPlan,
    config: &FastConfig,
) -> Result<Selection> {
    s.check_len(g)?;
    check_k(k, g.n())?;
    let rho_hat = estimate_centrality_with(g, plan, config)?.centrality();
    if g.n() <= config.exact_objective_max_n {
        let eval = Evaluator::new(g, config.exact_objective_max_n)?;
        select_with_estimate(&rho_hat, s, k, goal, Some(&eval))
    } else {
        select_with_estimate(&rho_hat, s, k, goal, None)
    }
}

/// Picks the top-`k` nodes for `goal` from an estimate. With an evaluator the
/// objective is re-solved; otherwise it is the decomposition `rho_hat . s'`.
pub fn select_with_estimate(
    rho_hat: &CentralityVector,
    s: &OpinionVector,
    k: usize,
    goal: Goal,
    eval: Option<&Evaluator<'_>>,
) -> Result<Selection> {
    check_k(k, s.len())?;
    let weights = match goal {
        Goal::Min => s.clone(),
        Goal::Max => s.complement(),
    };
    let scores: Vec<f64> = rho_hat
        .values
        .iter()
        .zip(weights.as_slice())
        .map(|(r, v)| r * v)
        .collect();
    let nodes = top_k(&scores, k);
    match eval {
        Some(eval) => eval.selection(Method::Fast, goal, s, nodes),
        None => {
            let dot = |v: &OpinionVector| -> f64 {
                rho_hat.values.iter().zip(v.as_slice()).map(|(r, x)| r * x).sum()
            };
            let modified = apply_selection(s, &nodes, goal.pinned_value())?;
            Ok(Selection {
                method: Method::Fast,
                k,
                objective: dot(&modified),
                baseline_objective: dot(s),
                objective_kind: ObjectiveKind::Estimated,
                nodes,
            })
        }
    }
}
