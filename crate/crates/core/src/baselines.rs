//! Heuristic selection strategies used for comparison.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{OpinionVector, DEFAULT_DENSE_CAP};
use crate::error::Result;
use crate::graph::Digraph;
use crate::selection::{check_k, top_k, Evaluator, Goal, Method, Selection};

/// Node choices for each heuristic, without scoring.
pub mod pick {
    use super::*;

    /// Uniform `k`-subset, in draw order.
    pub fn random(n: usize, k: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample(&mut rng, n, k).into_vec()
    }

    pub fn in_degree(g: &Digraph, k: usize) -> Vec<usize> {
        let scores: Vec<f64> = (0..g.n()).map(|i| g.in_degree(i) as f64).collect();
        top_k(&scores, k)
    }

    pub fn internal_opinion(s: &OpinionVector, k: usize) -> Vec<usize> {
        top_k(s.as_slice(), k)
    }

    pub fn expressed_opinion(eval: &Evaluator<'_>, s: &OpinionVector, k: usize) -> Result<Vec<usize>> {
        let z = match eval {
            Evaluator::Dense(solver) => solver.solve(s)?,
            Evaluator::Iterative(g) => {
                crate::dynamics::equilibrium(g, s, crate::dynamics::EquilibriumMethod::iterate())?
                    .values
            }
        };
        Ok(top_k(&z, k))
    }
}

fn prepare<'g>(g: &'g Digraph, s: &OpinionVector, k: usize) -> Result<Evaluator<'g>> {
    s.check_len(g)?;
    check_k(k, g.n())?;
    Evaluator::new(g, DEFAULT_DENSE_CAP)
}

pub fn select_random(g: &Digraph, s: &OpinionVector, k: usize, seed: u64) -> Result<Selection> {
    let eval = prepare(g, s, k)?;
    eval.selection(Method::Random, Goal::Min, s, pick::random(g.n(), k, seed))
}

pub fn select_in_degree(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    let eval = prepare(g, s, k)?;
    eval.selection(Method::InDegree, Goal::Min, s, pick::in_degree(g, k))
}

pub fn select_internal_opinion(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    let eval = prepare(g, s, k)?;
    eval.selection(Method::InternalOpinion, Goal::Min, s, pick::internal_opinion(s, k))
}

pub fn select_expressed_opinion(g: &Digraph, s: &OpinionVector, k: usize) -> Result<Selection> {
    let eval = prepare(g, s, k)?;
    let nodes = pick::expressed_opinion(&eval, s, k)?;
    eval.selection(Method::ExpressedOpinion, Goal::Min, s, nodes)
}
