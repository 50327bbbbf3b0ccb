//! Node selections and the objective `g_T(z)` they achieve.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    average_opinion, equilibrium, EquilibriumMethod, EquilibriumSolver, OpinionVector,
    DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::graph::Digraph;

/// The strategy that produced a selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "fast")]
    Fast,
    #[serde(rename = "brute")]
    BruteForce,
    #[serde(rename = "rand")]
    Random,
    #[serde(rename = "id")]
    InDegree,
    #[serde(rename = "io")]
    InternalOpinion,
    #[serde(rename = "eo")]
    ExpressedOpinion,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Exact,
        Method::Fast,
        Method::BruteForce,
        Method::Random,
        Method::InDegree,
        Method::InternalOpinion,
        Method::ExpressedOpinion,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Fast => "fast",
            Method::BruteForce => "brute",
            Method::Random => "rand",
            Method::InDegree => "id",
            Method::InternalOpinion => "io",
            Method::ExpressedOpinion => "eo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown method {s:?}")))
    }
}

/// OpinionMin pins the chosen opinions to 0, OpinionMax to 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Goal {
    #[default]
    Min,
    Max,
}

impl Goal {
    pub fn pinned_value(self) -> f64 {
        match self {
            Goal::Min => 0.0,
            Goal::Max => 1.0,
        }
    }
}

/// How the reported objective was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    /// Direct solve of `(I + L) z = s'`.
    Exact,
    /// FJ iteration to the default tolerance.
    Iterative,
    /// `sum_i rho_hat_i s'_i` from sampled centralities.
    Estimated,
}

/// An ordered set of `k` chosen nodes and the resulting average equilibrium opinion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub method: Method,
    pub k: usize,
    /// In pick order (best score first).
    pub nodes: Vec<usize>,
    pub objective: f64,
    pub baseline_objective: f64,
    pub objective_kind: ObjectiveKind,
}

impl Selection {
    pub fn sorted_nodes(&self) -> Vec<usize> {
        let mut v = self.nodes.clone();
        v.sort_unstable();
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("selection serializes")
    }
}

/// Copy of `s` with every selected node's opinion set to `value`.
pub fn apply_selection(s: &OpinionVector, nodes: &[usize], value: f64) -> Result<OpinionVector> {
    s.with_values_at(nodes, value)
}

pub(crate) fn check_k(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(())
}

/// Indices of the `k` largest scores, best first; equal scores go to the
/// lower node id.
pub fn top_k(scores: &[f64], k: usize) -> Vec<usize> {
    let cmp = |a: &usize, b: &usize| -> Ordering {
        scores[*b].total_cmp(&scores[*a]).then(a.cmp(b))
    };
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    let k = k.min(idx.len());
    if k == 0 {
        return Vec::new();
    }
    if k < idx.len() {
        idx.select_nth_unstable_by(k - 1, cmp);
        idx.truncate(k);
    }
    idx.sort_unstable_by(cmp);
    idx
}

/// Computes `g` for modified opinion vectors on one graph.
///
/// Below the dense cap `I + L` is factorized once and every evaluation is a
/// fresh triangular solve; above it the FJ iteration is used.
pub enum Evaluator<'g> {
    Dense(EquilibriumSolver),
    Iterative(&'g Digraph),
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g Digraph, dense_cap: usize) -> Result<Self> {
        if g.n() <= dense_cap {
            Ok(Evaluator::Dense(EquilibriumSolver::new(g, dense_cap)?))
        } else {
            Ok(Evaluator::Iterative(g))
        }
    }

    pub fn with_default_cap(g: &'g Digraph) -> Result<Self> {
        Self::new(g, DEFAULT_DENSE_CAP)
    }

    pub fn kind(&self) -> ObjectiveKind {
        match self {
            Evaluator::Dense(_) => ObjectiveKind::Exact,
            Evaluator::Iterative(_) => ObjectiveKind::Iterative,
        }
    }

    /// Average equilibrium opinion for internal opinions `s`.
    pub fn objective(&self, s: &OpinionVector) -> Result<f64> {
        match self {
            Evaluator::Dense(solver) => solver.average_opinion(s),
            Evaluator::Iterative(g) => {
                Ok(average_opinion(&equilibrium(g, s, EquilibriumMethod::iterate())?.values))
            }
        }
    }

    /// Builds the [`Selection`] for `nodes`, re-solving the equilibrium on the
    /// modified opinions.
    pub fn selection(
        &self,
        method: Method,
        goal: Goal,
        s: &OpinionVector,
        nodes: Vec<usize>,
    ) -> Result<Selection> {
        let modified = apply_selection(s, &nodes, goal.pinned_value())?;
        Ok(Selection {
            method,
            k: nodes.len(),
            objective: self.objective(&modified)?,
            baseline_objective: self.objective(s)?,
            objective_kind: self.kind(),
            nodes,
        })
    }
}
