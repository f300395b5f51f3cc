use super::*;
use crate::model::VariableSpace;
use crate::oracle::brute_force;

fn triangle() -> Instance {
    Instance::euclidean("tri", vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 0, 0.3, 200.0).unwrap()
}

fn square_center(alpha: f64) -> Instance {
    let pts = vec![[0.0, 0.0], [20.0, 0.0], [20.0, 20.0], [0.0, 20.0], [10.0, 10.0]];
    Instance::euclidean("sq", pts, 0, alpha, 30.0).unwrap()
}

fn node(key: f64, depth: usize, id: usize) -> Node {
    Node {
        id,
        bounds: Vec::new(),
        key,
        depth,
    }
}

#[test]
fn queue_pops_smallest_key() {
    let mut q = NodeQueue::new();
    for (k, key) in [10.0, 7.0, 12.0].into_iter().enumerate() {
        q.push(node(key, 0, k));
    }
    assert_eq!(q.pop().unwrap().key, 7.0);
}

#[test]
fn queue_breaks_ties_by_depth_then_order() {
    let mut q = NodeQueue::new();
    q.push(node(7.0, 2, 0));
    q.push(node(7.0, 1, 1));
    q.push(node(7.0, 1, 2));
    assert_eq!(q.pop().unwrap().id, 1);
    assert_eq!(q.pop().unwrap().id, 2);
    assert_eq!(q.pop().unwrap().id, 0);
    assert!(q.pop().is_none());
}

#[test]
fn single_node_queue() {
    let mut q = NodeQueue::new();
    q.push(node(3.0, 4, 9));
    assert_eq!(q.min_key(), Some(3.0));
    assert_eq!(q.pop().unwrap().id, 9);
}

#[test]
fn branching_prefers_assignments() {
    let sp = VariableSpace::new(4);
    let mut p = vec![0.0; sp.len()];
    p[sp.y(2, 3)] = 0.5;
    p[sp.x(1, 2)] = 0.3;
    assert_eq!(branching_variable(&sp, &p, 1e-6), Some(sp.y(2, 3)));
}

#[test]
fn branching_takes_most_fractional_within_a_class() {
    let sp = VariableSpace::new(4);
    let mut p = vec![0.0; sp.len()];
    p[sp.z(0, 1, 2)] = 0.4;
    p[sp.z(3, 1, 2)] = 0.45;
    assert_eq!(branching_variable(&sp, &p, 1e-6), Some(sp.z(3, 1, 2)));
    p[sp.z(0, 1, 2)] = 0.25;
    p[sp.z(3, 1, 2)] = 0.75;
    // equal distance: lowest index wins
    assert_eq!(branching_variable(&sp, &p, 1e-6), Some(sp.z(0, 1, 2)));
}

#[test]
fn integral_point_has_no_branching_variable() {
    let sp = VariableSpace::new(3);
    let mut p = vec![0.0; sp.len()];
    p[sp.y(0, 0)] = 1.0 - 1e-9;
    assert_eq!(branching_variable(&sp, &p, 1e-6), None);
}

#[test]
fn children_fix_the_variable() {
    let parent = node(5.0, 2, 3);
    let (down, up) = branch(&parent, 17, 6.5, (4, 5));
    assert_eq!(down.bounds, vec![(17, 0.0, 0.0)]);
    assert_eq!(up.bounds, vec![(17, 1.0, 1.0)]);
    assert_eq!((down.key, up.key), (6.5, 6.5));
    assert_eq!((down.depth, up.depth), (3, 3));
}

#[test]
fn triangle_is_its_perimeter() {
    let r = solve(&triangle(), &SolveParams::default()).unwrap();
    assert_eq!(r.outcome, SolveOutcome::Optimal);
    let sol = r.solution.unwrap();
    assert!((sol.objective - (20.0 + 200f64.sqrt())).abs() < 1e-6);
    assert!(sol.subtours.is_empty());
    assert!(r.lower_bound >= sol.objective - 1e-6);
}

#[test]
fn square_center_matches_oracle() {
    for alpha in [0.1, 0.2, 0.3, 0.6, 1.0] {
        let inst = square_center(alpha);
        let want = brute_force(&inst).unwrap().objective;
        let r = solve(&inst, &SolveParams::default()).unwrap();
        assert_eq!(r.outcome, SolveOutcome::Optimal);
        let sol = r.solution.unwrap();
        assert!((sol.objective - want).abs() < 1e-6, "alpha {alpha}: {} vs {want}", sol.objective);
        assert!(validate(&inst, &sol).is_empty());
    }
}

#[test]
fn random_small_instances_match_oracle() {
    for n in 4..=7 {
        for seed in 0..4 {
            let inst = Instance::generate_random(n, seed, 0.2, 50.0).unwrap();
            let want = brute_force(&inst).unwrap().objective;
            let r = solve(&inst, &SolveParams::default()).unwrap();
            let got = r.objective().unwrap();
            assert!((got - want).abs() < 1e-6, "n {n} seed {seed}: {got} vs {want}");
        }
    }
}

#[test]
fn statistics_match_the_log_and_repeat() {
    let inst = Instance::generate_random(7, 3, 0.3, 50.0).unwrap();
    let params = SolveParams {
        log_cuts: true,
        ..SolveParams::default()
    };
    let a = solve(&inst, &params).unwrap();
    let b = solve(&inst, &params).unwrap();
    let count = |p: &str| a.cut_log.iter().filter(|l| l.starts_with(p)).count();
    assert_eq!(a.stats.sec_cuts, count("cut sec-"));
    assert_eq!(a.stats.two_matching_cuts, count("cut two-matching"));
    assert_eq!(a.stats.nodes_explored, count("node "));
    assert_eq!(a.stats.counters(), b.stats.counters());
    assert_eq!(a.cut_log, b.cut_log);
    assert_eq!(a.solution.unwrap().tour, b.solution.unwrap().tour);
}

#[test]
fn node_limit_reports_a_gap() {
    let inst = Instance::generate_random(8, 1, 0.3, 50.0).unwrap();
    let params = SolveParams {
        node_limit: Some(1),
        max_cut_rounds: 0,
        ..SolveParams::default()
    };
    let r = solve(&inst, &params).unwrap();
    if r.stats.nodes_explored == 1 && r.outcome != SolveOutcome::Optimal {
        assert!(matches!(r.outcome, SolveOutcome::Timeout { .. }));
    }
}

#[test]
fn warm_start_must_be_feasible() {
    let inst = triangle();
    let oracle = brute_force(&inst).unwrap();
    let params = SolveParams {
        warm_start: Some(oracle.solution.clone()),
        ..SolveParams::default()
    };
    let r = solve(&inst, &params).unwrap();
    assert_eq!(r.outcome, SolveOutcome::Optimal);
    let mut bad = oracle.solution;
    bad.tour.pop();
    let params = SolveParams {
        warm_start: Some(bad),
        ..SolveParams::default()
    };
    assert!(solve(&inst, &params).is_err());
}

#[test]
fn penalty_mode_agrees_with_fixing() {
    let inst = square_center(0.2);
    let fixed = solve(&inst, &SolveParams::default()).unwrap();
    let params = SolveParams {
        penalty_mode: true,
        ..SolveParams::default()
    };
    let priced = solve(&inst, &params).unwrap();
    assert!((fixed.objective().unwrap() - priced.objective().unwrap()).abs() < 1e-6);
}
