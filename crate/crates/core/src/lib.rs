//! Opinion minimization and maximization in the Friedkin-Johnsen model.
//!
//! Choosing `k` nodes whose internal opinions are pinned to 0 (or 1) so that
//! the average equilibrium opinion is as low (or high) as possible reduces to
//! ranking nodes by `rho_i * s_i`, where `rho` is the structure centrality:
//! the column means of the fundamental matrix `(I + L)^{-1}`.
//!
//! Two solvers are provided:
//!
//! * [`exact`] computes `rho` with a dense factorization (`O(n^3)`).
//! * [`fast`] estimates `rho` from uniformly sampled spanning converging
//!   forests ([`forest`]) in expected `O(l n)` time for `l` samples.
//!
//! [`baselines`] holds the heuristic strategies and [`experiment`] the
//! comparison harness used by the `fjopt` CLI.

pub mod baselines;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod fast;
pub mod forest;
pub mod generators;
pub mod graph;
mod mem;
pub mod selection;

pub use dynamics::{
    average_opinion, equilibrium, fundamental_matrix, step_opinions, structure_centrality_exact,
    CentralityMode, CentralitySource, CentralityVector, EquilibriumMethod, EquilibriumSolver,
    ExpressedOpinions, FundamentalMatrix, OpinionVector,
};
pub use error::{Error, Result};
pub use exact::{brute_force_opinion_min, solve_opinion_max_exact, solve_opinion_min_exact};
pub use fast::{
    estimate_centrality, required_samples, solve_opinion_max_fast, solve_opinion_min_fast,
    FastConfig, SamplingPlan,
};
pub use forest::{
    enumerate_forests, random_forest, random_successor, root_multiplicities, ForestEnumeration,
    BatchSampler, ForestSampler, RngStream, RootIndex, WalkGraph,
};
pub use graph::{load_edge_list, parse_edge_list, Digraph, EdgeListOptions, LoadedGraph};
pub use selection::{apply_selection, Goal, Method, ObjectiveKind, Selection};
