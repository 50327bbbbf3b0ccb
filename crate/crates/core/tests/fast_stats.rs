//! Statistical properties of the sampling estimator and selection.

mod common;

use common::{rng, uniform_opinions};
use fjopt_core::fast::{estimate_centrality_with, sample_root_counts, FastConfig};
use fjopt_core::generators::{medium_catalog, tiny_catalog};
use fjopt_core::{
    enumerate_forests, estimate_centrality, required_samples, solve_opinion_max_fast,
    solve_opinion_min_exact, solve_opinion_min_fast, structure_centrality_exact, CentralityMode,
    Digraph, OpinionVector, SamplingPlan,
};

fn arc01() -> Digraph {
    Digraph::from_arcs(2, &[(0, 1)]).unwrap()
}

#[test]
fn required_samples_closed_form() {
    // ceil(50 ln 40) = ceil(184.44) and ceil(1250 ln 40) = ceil(4611.10).
    assert_eq!(required_samples(0.1, 0.05).unwrap(), 185);
    assert_eq!(required_samples(0.02, 0.05).unwrap(), 4612);
}

#[test]
fn estimate_is_normalized_for_every_l() {
    for c in medium_catalog() {
        for l in [1, 2, 17, 100] {
            let rho = estimate_centrality(&c.graph, &SamplingPlan::new(l, 4).unwrap()).unwrap();
            let n = c.graph.n() as f64;
            assert!((rho.sum() - 1.0).abs() <= n * f64::EPSILON, "{} l={l}", c.name);
            assert!(rho.values.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
    }
}

#[test]
fn single_arc_estimate_converges() {
    let l = 100_000;
    let rho = estimate_centrality(&arc01(), &SamplingPlan::new(l, 1).unwrap()).unwrap();
    // |M(phi, 1)| / 2 is 1/2 or 1 with equal chance: sd 1/4.
    let se = 0.25 / (l as f64).sqrt();
    assert!((rho.values[1] - 0.75).abs() < 4.0 * se);
    assert!((rho.values[0] - 0.25).abs() < 4.0 * se);
}

#[test]
fn replay_is_bit_identical_and_order_invariant() {
    let g = &medium_catalog()[1].graph;
    let plan = SamplingPlan::new(64, 1234).unwrap();
    let a = estimate_centrality(g, &plan).unwrap();
    let b = estimate_centrality(g, &plan).unwrap();
    assert_eq!(a, b);

    let forward: Vec<u64> = (0..64).collect();
    let mut shuffled = forward.clone();
    shuffled.reverse();
    shuffled.swap(3, 40);
    let x = sample_root_counts(g, 1234, &forward, Some(1)).unwrap();
    let y = sample_root_counts(g, 1234, &shuffled, Some(3)).unwrap();
    assert_eq!(x.counts, y.counts);
    assert_eq!(x.centrality().values, a.values);
}

#[test]
fn grand_mean_over_plans_is_unbiased() {
    let runs = 200;
    let l = 50;
    for c in tiny_catalog() {
        let n = c.graph.n();
        let rho = enumerate_forests(&c.graph).unwrap().rho();
        let mut sum = vec![0.0; n];
        let mut sum_sq = vec![0.0; n];
        for run in 0..runs {
            let est = estimate_centrality(&c.graph, &SamplingPlan::new(l, 10_000 + run).unwrap())
                .unwrap();
            for i in 0..n {
                sum[i] += est.values[i];
                sum_sq[i] += est.values[i] * est.values[i];
            }
        }
        for i in 0..n {
            let mean = sum[i] / runs as f64;
            let var = (sum_sq[i] / runs as f64 - mean * mean).max(0.0);
            let se = (var / runs as f64).sqrt();
            assert!(
                (mean - rho[i]).abs() <= 4.0 * se + 1e-12,
                "{} node {i}: {mean} vs {}",
                c.name,
                rho[i]
            );
        }
    }
}

#[test]
fn hoeffding_concentration_per_node() {
    let (eps, delta) = (0.05, 0.1);
    let l = required_samples(eps, delta).unwrap();
    let runs = 200u64;
    let mut r = rng(30);
    for c in tiny_catalog().into_iter().take(4) {
        let n = c.graph.n();
        let s = uniform_opinions(n, &mut r);
        let rho = enumerate_forests(&c.graph).unwrap().rho();
        for i in 0..n {
            let mut misses = 0u64;
            for run in 0..runs {
                let est = estimate_centrality(&c.graph, &SamplingPlan::new(l, run * 31 + 7).unwrap())
                    .unwrap();
                if ((est.values[i] - rho[i]) * s.as_slice()[i]).abs() > eps {
                    misses += 1;
                }
            }
            let frac = misses as f64 / runs as f64;
            let slack = 3.0 * (delta * (1.0 - delta) / runs as f64).sqrt();
            assert!(frac <= delta + slack, "{} node {i}: {frac}", c.name);
        }
    }
}

#[test]
fn selection_examples() {
    let zeros = OpinionVector::zeros(5);
    let g = medium_catalog()[0].graph.clone();
    let sub = Digraph::from_arcs(5, &g.arcs().filter(|&(u, v)| u < 5 && v < 5).collect::<Vec<_>>())
        .unwrap();
    let sel = solve_opinion_min_fast(&sub, &zeros, 3, &SamplingPlan::default()).unwrap();
    assert_eq!(sel.nodes, vec![0, 1, 2]);
    assert_eq!(sel.objective, 0.0);

    let s = OpinionVector::new(vec![1.0, 0.4]).unwrap();
    let plan = SamplingPlan::new(100_000, 2).unwrap();
    let fast = solve_opinion_min_fast(&arc01(), &s, 1, &plan).unwrap();
    let exact = solve_opinion_min_exact(&arc01(), &s, 1).unwrap();
    assert_eq!(fast.nodes, exact.nodes);
    assert_eq!(fast.nodes, vec![1]);
    assert_eq!(solve_opinion_max_fast(&arc01(), &s, 1, &plan).unwrap().nodes, vec![1]);

    let ones = OpinionVector::constant(4, 1.0).unwrap();
    let path = Digraph::from_arcs(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    let max = solve_opinion_max_fast(&path, &ones, 2, &SamplingPlan::default()).unwrap();
    assert_eq!(max.nodes, vec![0, 1]);
    assert!((max.objective - 1.0).abs() < 1e-12);
}

#[test]
fn max_fast_mirrors_min_fast_on_complement() {
    let mut r = rng(31);
    for c in medium_catalog() {
        let s = uniform_opinions(c.graph.n(), &mut r);
        let plan = SamplingPlan::new(200, 5).unwrap();
        let max = solve_opinion_max_fast(&c.graph, &s, 7, &plan).unwrap();
        let min = solve_opinion_min_fast(&c.graph, &s.complement(), 7, &plan).unwrap();
        assert_eq!(max.nodes, min.nodes);
    }
}

#[test]
fn union_bound_at_l_2000() {
    let l = 2000;
    let delta = 0.05;
    // Invert l = ceil(ln(2/delta) / (2 eps^2)) for the epsilon this l buys.
    let eps = ((2.0f64 / delta).ln() / (2.0 * l as f64)).sqrt();
    let mut r = rng(32);
    for c in medium_catalog() {
        let s = uniform_opinions(c.graph.n(), &mut r);
        for k in [1, 5, 10] {
            let exact = solve_opinion_min_exact(&c.graph, &s, k).unwrap();
            let fast = solve_opinion_min_fast(&c.graph, &s, k, &SamplingPlan::new(l, 9).unwrap())
                .unwrap();
            assert!(
                (fast.objective - exact.objective).abs() < 2.0 * k as f64 * eps,
                "{} k={k}",
                c.name
            );
        }
    }
}

#[test]
fn estimator_tracks_exact_centrality_on_medium_graphs() {
    for c in medium_catalog() {
        let exact =
            structure_centrality_exact(&c.graph, CentralityMode::SingleSolve, 1000).unwrap();
        let est = estimate_centrality_with(
            &c.graph,
            &SamplingPlan::new(4000, 3).unwrap(),
            &FastConfig::default(),
        )
        .unwrap()
        .centrality();
        let worst = exact
            .values
            .iter()
            .zip(&est.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        // Each rho_hat_i is a mean of values in [0, 1]; Hoeffding at l = 4000
        // puts every node within 0.03 with probability > 1 - 2e-3.
        assert!(worst < 0.03, "{}: {worst}", c.name);
    }
}
