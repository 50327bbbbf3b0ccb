mod common;

use common::{random_graph, rng, uniform_opinions};
use fjopt_core::dynamics::DEFAULT_DENSE_CAP;
use fjopt_core::selection::Evaluator;
use fjopt_core::{
    apply_selection, brute_force_opinion_min, solve_opinion_max_exact, solve_opinion_min_exact,
    structure_centrality_exact, CentralityMode, OpinionVector,
};
use rand::Rng;

#[test]
fn exact_matches_brute_force_objective_and_set() {
    let mut r = rng(10);
    for case in 0..250 {
        let g = random_graph(10, &mut r);
        let s = uniform_opinions(g.n(), &mut r);
        let k = r.random_range(1..=g.n().min(3));
        let exact = solve_opinion_min_exact(&g, &s, k).unwrap();
        let brute = brute_force_opinion_min(&g, &s, k).unwrap();
        assert!(
            (exact.objective - brute.objective).abs() < 1e-9,
            "case {case}: {} vs {}",
            exact.objective,
            brute.objective
        );
        assert_eq!(exact.sorted_nodes(), brute.nodes, "case {case}");
    }
}

#[test]
fn objective_equals_decomposition() {
    let mut r = rng(11);
    for _ in 0..100 {
        let g = random_graph(80, &mut r);
        let s = uniform_opinions(g.n(), &mut r);
        let k = r.random_range(1..=g.n());
        let sel = solve_opinion_min_exact(&g, &s, k).unwrap();
        let rho = structure_centrality_exact(&g, CentralityMode::Dense, DEFAULT_DENSE_CAP).unwrap();
        let removed: f64 = sel.nodes.iter().map(|&i| rho.values[i] * s.as_slice()[i]).sum();
        let kept: f64 = (0..g.n())
            .filter(|i| !sel.nodes.contains(i))
            .map(|i| rho.values[i] * s.as_slice()[i])
            .sum();
        assert!((sel.objective - (sel.baseline_objective - removed)).abs() < 1e-9);
        assert!((sel.objective - kept).abs() < 1e-9);
        assert!((0.0..=1.0).contains(&sel.objective));
    }
}

#[test]
fn adding_nodes_never_raises_objective() {
    let mut r = rng(12);
    for _ in 0..60 {
        let g = random_graph(40, &mut r);
        let s = uniform_opinions(g.n(), &mut r);
        let eval = Evaluator::new(&g, DEFAULT_DENSE_CAP).unwrap();
        let mut order: Vec<usize> = (0..g.n()).collect();
        for i in (1..order.len()).rev() {
            order.swap(i, r.random_range(0..=i));
        }
        let mut prev = eval.objective(&s).unwrap();
        for t in 1..=order.len() {
            let value = eval
                .objective(&apply_selection(&s, &order[..t], 0.0).unwrap())
                .unwrap();
            assert!(value <= prev + 1e-12);
            prev = value;
        }
    }
}

#[test]
fn scaling_opinions_keeps_selection() {
    let mut r = rng(13);
    for _ in 0..60 {
        let g = random_graph(60, &mut r);
        let s = uniform_opinions(g.n(), &mut r);
        let k = r.random_range(1..=g.n());
        let base = solve_opinion_min_exact(&g, &s, k).unwrap();
        for c in [1.0, 0.5, 0.125, 0.0625] {
            let scaled = OpinionVector::new(s.as_slice().iter().map(|v| v * c).collect()).unwrap();
            assert_eq!(solve_opinion_min_exact(&g, &scaled, k).unwrap().nodes, base.nodes);
        }
    }
}

#[test]
fn max_is_min_on_complement() {
    let mut r = rng(14);
    for _ in 0..100 {
        let g = random_graph(50, &mut r);
        let s = uniform_opinions(g.n(), &mut r);
        let k = r.random_range(1..=g.n());
        let max = solve_opinion_max_exact(&g, &s, k).unwrap();
        let min = solve_opinion_min_exact(&g, &s.complement(), k).unwrap();
        assert_eq!(max.nodes, min.nodes);
        assert!((max.objective - (1.0 - min.objective)).abs() < 1e-9);
        assert!(max.objective >= max.baseline_objective - 1e-12);
    }
}
