use proptest::prelude::*;

use super::*;
use crate::row::{RowTag, Sense};

fn row(terms: &[(usize, f64)], sense: Sense, rhs: f64) -> LinearRow {
    LinearRow::new(terms.iter().copied(), sense, rhs, RowTag::Other)
}

fn boxed(n: usize) -> LpProblem {
    let mut p = LpProblem::new(n);
    p.upper = vec![1.0; n];
    p
}

#[test]
fn single_bounded_variable() {
    let mut p = boxed(1);
    p.objective[0] = -1.0;
    let r = solve(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert_eq!(r.x, vec![1.0]);
    assert_eq!(r.objective, -1.0);
}

#[test]
fn row_outside_bounds_is_infeasible() {
    let mut p = boxed(1);
    p.rows.push(row(&[(0, 1.0)], Sense::Ge, 2.0));
    assert_eq!(solve(&p).status, LpStatus::Infeasible);
    let params = LpParams {
        presolve: false,
        ..LpParams::default()
    };
    assert_eq!(solve_with(&p, &params).status, LpStatus::Infeasible);
}

#[test]
fn degenerate_face_returns_a_vertex() {
    let mut p = boxed(2);
    p.objective = vec![1.0, 1.0];
    p.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 1.0));
    for presolve in [true, false] {
        let r = solve_with(&p, &LpParams { presolve, ..LpParams::default() });
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.objective - 1.0).abs() < 1e-9);
        let vertex = (r.x[0] - 1.0).abs() < 1e-9 && r.x[1].abs() < 1e-9
            || r.x[0].abs() < 1e-9 && (r.x[1] - 1.0).abs() < 1e-9;
        assert!(vertex, "not a vertex: {:?}", r.x);
    }
}

#[test]
fn unbounded_detected() {
    let mut p = LpProblem::new(2);
    p.objective = vec![-1.0, 0.0];
    p.rows.push(row(&[(0, 1.0), (1, -1.0)], Sense::Le, 1.0));
    assert_eq!(solve(&p).status, LpStatus::Unbounded);
}

#[test]
fn resolve_adds_row() {
    let mut p = boxed(1);
    p.objective[0] = -1.0;
    let r = resolve_with(&p, &[row(&[(0, 1.0)], Sense::Le, 0.5)], &[]);
    assert_eq!(r.status, LpStatus::Optimal);
    assert!((r.x[0] - 0.5).abs() < 1e-12);
    assert!((r.objective + 0.5).abs() < 1e-12);
}

#[test]
fn resolve_changes_bound() {
    let mut p = boxed(1);
    p.objective[0] = -1.0;
    let r = resolve_with(&p, &[], &[BoundChange { var: 0, lower: 0.0, upper: 0.0 }]);
    assert_eq!(r.status, LpStatus::Optimal);
    assert_eq!(r.x[0], 0.0);
}

#[test]
fn duplicate_row_keeps_objective() {
    let mut p = boxed(2);
    p.objective = vec![1.0, 2.0];
    let r0 = row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 1.5);
    p.rows.push(r0.clone());
    let base = solve(&p);
    let again = resolve_with(&p, &[r0], &[]);
    assert_eq!(again.status, LpStatus::Optimal);
    assert!((base.objective - again.objective).abs() < 1e-9);
    assert!((base.objective - 2.0).abs() < 1e-9);
}

#[test]
fn free_variables_and_equalities() {
    // min x + y, x - y = 1, x + y >= 3, x, y free
    let mut p = LpProblem::new(2);
    p.lower = vec![f64::NEG_INFINITY; 2];
    p.upper = vec![f64::INFINITY; 2];
    p.objective = vec![1.0, 1.0];
    p.rows.push(row(&[(0, 1.0), (1, -1.0)], Sense::Eq, 1.0));
    p.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 3.0));
    let r = solve(&p);
    assert_eq!(r.status, LpStatus::Optimal);
    assert!((r.x[0] - 2.0).abs() < 1e-9 && (r.x[1] - 1.0).abs() < 1e-9);
}

#[test]
fn warm_session_matches_cold_solve() {
    let mut p = boxed(3);
    p.objective = vec![-1.0, -2.0, -3.0];
    p.rows.push(row(&[(0, 1.0), (1, 1.0), (2, 1.0)], Sense::Le, 2.0));
    let mut s = Simplex::new(&p, LpParams::default());
    assert!((s.solve().objective + 5.0).abs() < 1e-9);
    let cut = row(&[(1, 1.0), (2, 1.0)], Sense::Le, 1.0);
    s.add_rows(std::slice::from_ref(&cut));
    let warm = s.solve();
    p.rows.push(cut);
    let cold = solve(&p);
    assert!((warm.objective - cold.objective).abs() < 1e-9);
    assert!((warm.objective + 4.0).abs() < 1e-9);
    s.set_bounds(2, 0.0, 0.0);
    assert!((s.solve().objective + 3.0).abs() < 1e-9);
    s.set_bounds(2, 0.0, 1.0);
    assert!((s.solve().objective + 4.0).abs() < 1e-9);
}

#[test]
fn removing_slack_rows() {
    let mut p = boxed(2);
    p.objective = vec![-1.0, -1.0];
    p.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Le, 1.5));
    p.rows.push(row(&[(0, 1.0)], Sense::Le, 5.0));
    let mut s = Simplex::new(&p, LpParams::default());
    assert!((s.solve().objective + 1.5).abs() < 1e-9);
    let removed = s.remove_rows(&[1]);
    assert_eq!(removed, vec![1]);
    assert_eq!(s.num_rows(), 1);
    assert!((s.solve().objective + 1.5).abs() < 1e-9);
}

#[test]
fn lp_text_dump_lists_rows_and_bounds() {
    let mut p = boxed(2);
    p.objective = vec![1.0, -2.0];
    p.rows.push(row(&[(0, 1.0), (1, 1.0)], Sense::Ge, 1.0));
    let text = write_lp_text(&p, |j| format!("v{j}"));
    assert!(text.starts_with("Minimize\n obj: 1 v0 - 2 v1\n"));
    assert!(text.contains("other_0: 1 v0 + 1 v1 >= 1"));
    assert!(text.contains("0 <= v1 <= 1"));
    assert!(text.ends_with("End\n"));
}

/// Random boxed LP with mixed-sense rows and small integer data.
fn random_lp() -> impl Strategy<Value = LpProblem> {
    (1usize..6, 0usize..6).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(-5i32..6, n),
            prop::collection::vec((prop::collection::vec(-3i32..4, n), 0u8..3, -4i32..8), m),
        )
            .prop_map(move |(c, rows)| {
                let mut p = LpProblem::new(n);
                p.upper = vec![2.0; n];
                p.objective = c.iter().map(|&v| v as f64).collect();
                for (a, s, b) in rows {
                    let sense = [Sense::Le, Sense::Ge, Sense::Eq][s as usize];
                    let terms = a.iter().enumerate().map(|(j, &v)| (j, v as f64));
                    p.rows.push(LinearRow::new(terms, sense, b as f64, RowTag::Other));
                }
                p
            })
    })
}

proptest! {
    #[test]
    fn deterministic(p in random_lp()) {
        let a = solve(&p);
        let b = solve(&p);
        prop_assert_eq!(a.status, b.status);
        prop_assert_eq!(a.x, b.x);
    }

    #[test]
    fn optimal_points_are_feasible(p in random_lp()) {
        for presolve in [true, false] {
            let r = solve_with(&p, &LpParams { presolve, ..LpParams::default() });
            prop_assert_ne!(r.status, LpStatus::IterationLimit);
            prop_assert_ne!(r.status, LpStatus::Unbounded);
            if r.status == LpStatus::Optimal {
                prop_assert!(p.max_violation(&r.x) <= 1e-7);
            }
        }
    }

    #[test]
    fn adding_a_row_never_lowers_the_optimum(p in random_lp(), a in prop::collection::vec(-3i32..4, 5), b in -2i32..6) {
        let base = solve(&p);
        if base.status != LpStatus::Optimal {
            return Ok(());
        }
        let terms: Vec<_> = a.iter().take(p.num_vars).enumerate().map(|(j, &v)| (j, v as f64)).collect();
        let extra = LinearRow::new(terms, Sense::Le, b as f64, RowTag::Other);
        let r = resolve_with(&p, std::slice::from_ref(&extra), &[]);
        let mut q = p.clone();
        q.rows.push(extra);
        let cold = solve(&q);
        prop_assert_eq!(r.status, cold.status);
        if r.status == LpStatus::Optimal {
            prop_assert!(r.objective >= base.objective - 1e-7);
            prop_assert!((r.objective - cold.objective).abs() <= 1e-7);
        }
    }

    #[test]
    fn weak_duality_against_grid_points(p in random_lp()) {
        let r = solve(&p);
        // every feasible point on the half-integer grid bounds the optimum
        let n = p.num_vars;
        let mut idx = vec![0usize; n];
        loop {
            let x: Vec<f64> = idx.iter().map(|&k| k as f64 * 0.5).collect();
            if p.max_violation(&x) <= 1e-12 {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!(r.objective <= p.objective_value(&x) + 1e-7);
            }
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] <= 4 { break; }
                idx[k] = 0;
                k += 1;
            }
            if k == n { break; }
        }
    }
}

