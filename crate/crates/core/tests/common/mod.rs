#![allow(dead_code)]

use fjopt_core::generators::{preferential_attachment, random_digraph};
use fjopt_core::{Digraph, OpinionVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simple digraph with `n` nodes where each ordered pair is an arc
/// with probability `p`.
pub fn bernoulli_digraph(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Digraph {
    let mut arcs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(p) {
                arcs.push((u, v));
            }
        }
    }
    Digraph::from_arcs(n, &arcs).unwrap()
}

/// A mix of sparse, dense and heavy-tailed graphs with up to `max_n` nodes.
pub fn random_graph(max_n: usize, rng: &mut ChaCha8Rng) -> Digraph {
    let n = rng.random_range(1..=max_n);
    match rng.random_range(0..3) {
        0 => bernoulli_digraph(n, rng.random_range(0.0..0.6), rng),
        1 => random_digraph(n, rng.random_range(0.5..4.0), rng.random()),
        _ => preferential_attachment(n, rng.random_range(1..4), rng.random_range(0.0..0.8), rng.random()),
    }
}

pub fn uniform_opinions(n: usize, rng: &mut ChaCha8Rng) -> OpinionVector {
    OpinionVector::new((0..n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Pearson chi-square statistic and its upper-tail p-value.
pub fn chi_square(observed: &[u64], expected_prob: &[f64]) -> (f64, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let total: u64 = observed.iter().sum();
    let stat: f64 = observed
        .iter()
        .zip(expected_prob)
        .map(|(&o, &p)| {
            let e = p * total as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    if df == 0.0 {
        return (stat, 1.0);
    }
    let p = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, p)
}
