//! Synthetic digraphs and a small catalog of named test graphs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Digraph, DuplicatePolicy, SelfArcPolicy};

/// Directed G(n, m) with `m = round(n * avg_out_degree)` arcs drawn uniformly
/// among ordered pairs; repeated pairs are merged, so the realised degree is
/// slightly lower on small graphs.
pub fn random_digraph(n: usize, avg_out_degree: f64, seed: u64) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (n as f64 * avg_out_degree).round() as usize;
    let arcs: Vec<(usize, usize)> = if n < 2 {
        Vec::new()
    } else {
        (0..m)
            .map(|_| {
                let u = rng.random_range(0..n);
                let mut v = rng.random_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                (u, v)
            })
            .collect()
    };
    Digraph::from_arcs_with(n, arcs, DuplicatePolicy::Merge, SelfArcPolicy::Reject)
        .expect("generated arcs are in range and loop-free")
        .0
}

/// Directed preferential attachment with reciprocity.
///
/// Node `t` links to `out_per_node` earlier nodes chosen with probability
/// proportional to `in_degree + 1`; each such arc is reciprocated with
/// probability `reciprocity`. In-degrees are heavy tailed, as in follower
/// and citation networks.
pub fn preferential_attachment(
    n: usize,
    out_per_node: usize,
    reciprocity: f64,
    seed: u64,
) -> Digraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each node appears once, plus once per received arc.
    let mut urn: Vec<usize> = Vec::with_capacity(n * (out_per_node + 1));
    let mut arcs = Vec::with_capacity(n * out_per_node * 2);
    for t in 0..n {
        if t > 0 {
            for _ in 0..out_per_node.min(t) {
                let v = urn[rng.random_range(0..urn.len())];
                arcs.push((t, v));
                urn.push(v);
                if rng.random_bool(reciprocity) {
                    arcs.push((v, t));
                }
            }
        }
        urn.push(t);
    }
    Digraph::from_arcs_with(n, arcs, DuplicatePolicy::Merge, SelfArcPolicy::Reject)
        .expect("generated arcs are in range and loop-free")
        .0
}

/// A named graph for tests and demos.
#[derive(Debug, Clone)]
pub struct CatalogGraph {
    pub name: &'static str,
    pub graph: Digraph,
}

fn named(name: &'static str, n: usize, arcs: &[(usize, usize)]) -> CatalogGraph {
    CatalogGraph {
        name,
        graph: Digraph::from_arcs(n, arcs).expect("catalog graphs are simple"),
    }
}

/// Graphs with at most five nodes, small enough to enumerate every forest.
pub fn tiny_catalog() -> Vec<CatalogGraph> {
    vec![
        named("path4", 4, &[(0, 1), (1, 2), (2, 3)]),
        named("cycle4", 4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
        named("in_star4", 4, &[(1, 0), (2, 0), (3, 0)]),
        named("out_star4", 4, &[(0, 1), (0, 2), (0, 3)]),
        named("dag5", 5, &[(0, 1), (0, 2), (1, 3), (2, 3), (3, 4), (1, 4)]),
        named("disconnected_pair", 4, &[(0, 1), (1, 0), (2, 3)]),
        named("bidirected_triangle", 3, &[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]),
        named("mixed5", 5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 3)]),
    ]
}

/// Medium graphs (n <= 200) where the dense solver is instant: a uniform
/// random digraph, a sparse heavy-tailed one, and a denser heavy-tailed one
/// whose flat centrality profile makes it the hardest case for sampling.
pub fn medium_catalog() -> Vec<CatalogGraph> {
    vec![
        CatalogGraph {
            name: "gnm150",
            graph: random_digraph(150, 3.0, 101),
        },
        CatalogGraph {
            name: "pa120_sparse",
            graph: preferential_attachment(120, 1, 0.5, 303),
        },
        CatalogGraph {
            name: "pa200",
            graph: preferential_attachment(200, 2, 0.3, 202),
        },
    ]
}
