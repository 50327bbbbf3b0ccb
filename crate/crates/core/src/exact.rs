//! Optimal OpinionMin / OpinionMax selection from exact structure centrality.
//!
//! The average equilibrium opinion decomposes as `g(z) = sum_i rho_i s_i`, so
//! pinning the opinions of `T` to zero lowers it by exactly
//! `sum_{i in T} rho_i s_i`. The optimum is therefore the `k` nodes with the
//! largest `rho_i s_i`.

use crate::dynamics::{
    structure_centrality_exact, CentralityMode, CentralityVector, OpinionVector, DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::selection::{check_k, top_k, Evaluator, Goal, Method, Selection};

/// Largest number of subsets the brute-force oracle will evaluate.
pub const BRUTE_FORCE_BUDGET: u64 = 1_000_000;

/// Objectives closer than this are treated as tied by the brute-force oracle.
const OBJECTIVE_TIE_EPS: f64 = 1e-12;

/// `rho_i * s_i` for every node.
pub fn centrality_products(rho: &CentralityVector, s: &OpinionVector) -> Vec<f64> {
    rho.values
        .iter()
        .zip(s.as_slice())
        .map(|(r, v)| r * v)
        .collect()
}

/// Top-`k` nodes by `rho_i * s_i` (lowest id on ties).
pub fn select_min_by_centrality(rho: &CentralityVector, s: &OpinionVector, k: usize) -> Vec<usize> {
    top_k(&centrality_products(rho, s), k)
}

pub fn solve_opinion_min_exact(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    solve_exact(g, s, k, Goal::Min, &Evaluator::new(g, DEFAULT_DENSE_CAP)?)
}

pub fn solve_opinion_max_exact(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    solve_exact(g, s, k, Goal::Max, &Evaluator::new(g, DEFAULT_DENSE_CAP)?)
}

/// Exact solver reusing a prepared [`Evaluator`].
pub fn solve_exact(
    g: &Digraph,
    s: &OpinionVector,
    k: usize,
    goal: Goal,
    eval: &Evaluator<'_>,
) -> Result<Selection> {
    s.check_len(g)?;
    check_k(k, g.n())?;
    let rho = structure_centrality_exact(g, CentralityMode::SingleSolve, DEFAULT_DENSE_CAP)?;
    let nodes = match goal {
        Goal::Min => select_min_by_centrality(&rho, s, k),
        Goal::Max => select_min_by_centrality(&rho, &s.complement(), k),
    };
    eval.selection(Method::Exact, goal, s, nodes)
}

fn binomial(n: usize, k: usize) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Exhaustive OpinionMin over all `k`-subsets.
///
/// Each subset is scored by a fresh equilibrium solve. Among objectives tied
/// within `1e-12` the lexicographically smallest subset wins. Returned nodes
/// are sorted ascending.
pub fn brute_force_opinion_min(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    s.check_len(g)?;
    let n = g.n();
    check_k(k, n)?;
    let count = binomial(n, k);
    if count > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded(format!(
            "C({n}, {k}) = {count} subsets exceeds {BRUTE_FORCE_BUDGET}"
        )));
    }
    let eval = Evaluator::new(g, DEFAULT_DENSE_CAP)?;

    let mut subset: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let modified = s.with_values_at(&subset, 0.0)?;
        let value = eval.objective(&modified)?;
        // Subsets arrive in lexicographic order, so a tie never replaces the incumbent.
        if best
            .as_ref()
            .is_none_or(|(b, _)| value < b - OBJECTIVE_TIE_EPS)
        {
            best = Some((value, subset.clone()));
        }
        if !next_combination(&mut subset, n) {
            break;
        }
    }
    let (objective, nodes) = best.expect("at least one subset");
    Ok(Selection {
        method: Method::BruteForce,
        k,
        nodes,
        objective,
        baseline_objective: eval.objective(s)?,
        objective_kind: eval.kind(),
    })
}

/// Advances `c` to the next k-combination of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
