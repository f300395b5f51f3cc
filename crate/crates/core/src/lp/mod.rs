//! Linear programming relaxations.
//!
//! [`Simplex`] is a bounded-variable revised simplex (dual and primal) with
//! an explicit basis inverse. It keeps its basis between calls so the
//! branch-and-cut driver can add rows and change bounds and re-optimize
//! from the previous vertex. [`solve`] and [`resolve_with`] are the
//! stateless entry points.

mod factor;
mod format;
mod presolve;
mod simplex;

pub use format::write_lp_text;
pub use presolve::{MappedRow, Presolve};
pub use simplex::Simplex;

use crate::row::LinearRow;

/// `minimize c^T x` subject to sparse rows and per-variable bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(num_vars: usize) -> Self {
        LpProblem {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            lower: vec![0.0; num_vars],
            upper: vec![f64::INFINITY; num_vars],
        }
    }

    /// Checks sizes, bound order and row indices.
    pub fn check(&self) -> Result<(), String> {
        let n = self.num_vars;
        if self.objective.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err("objective or bound vector length differs from num_vars".into());
        }
        for j in 0..n {
            if self.lower[j] > self.upper[j] || self.lower[j].is_nan() || self.upper[j].is_nan() {
                return Err(format!(
                    "variable {j} has bounds [{}, {}]",
                    self.lower[j], self.upper[j]
                ));
            }
            if !self.objective[j].is_finite() {
                return Err(format!("objective coefficient {j} is not finite"));
            }
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.max_index().is_some_and(|j| j >= n) {
                return Err(format!("row {i} references a variable out of range"));
            }
            if !r.rhs.is_finite() {
                return Err(format!("row {i} has a non-finite right-hand side"));
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest bound or row violation at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let bounds = (0..self.num_vars)
            .map(|j| (self.lower[j] - x[j]).max(x[j] - self.upper[j]))
            .fold(0.0f64, f64::max);
        let rows = self
            .rows
            .iter()
            .map(|r| r.violation(x))
            .fold(0.0f64, f64::max);
        bounds.max(rows)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpResult {
    pub status: LpStatus,
    /// Primal values; meaningful when `status` is optimal.
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpParams {
    /// Bound and row tolerance guaranteed on an optimal result.
    pub feas_tol: f64,
    pub dual_tol: f64,
    pub pivot_tol: f64,
    pub refactor_interval: usize,
    /// Iteration cap; `None` means `100 * (rows + cols)`.
    pub iteration_limit: Option<usize>,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_trigger: usize,
    pub presolve: bool,
}

impl Default for LpParams {
    fn default() -> Self {
        LpParams {
            feas_tol: 1e-7,
            dual_tol: 1e-7,
            pivot_tol: 1e-9,
            refactor_interval: 100,
            iteration_limit: None,
            bland_trigger: 100,
            presolve: true,
        }
    }
}

/// A bound change for [`resolve_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundChange {
    pub var: usize,
    pub lower: f64,
    pub upper: f64,
}

/// Pluggable LP engine used by the branch-and-cut driver.
pub trait LpBackend {
    fn num_rows(&self) -> usize;
    fn add_rows(&mut self, rows: &[LinearRow]);
    /// Removes rows by index. Implementations may refuse rows that are
    /// currently binding; the return value lists the rows actually removed.
    fn remove_rows(&mut self, rows: &[usize]) -> Vec<usize>;
    fn set_bounds(&mut self, var: usize, lower: f64, upper: f64);
    fn solve(&mut self) -> LpResult;
    /// Value of `a_i^T x` at the last solution.
    fn row_activity(&self, row: usize) -> f64;
    /// Discards any cached factorization.
    fn reset_factorization(&mut self);
}

/// Solves `problem` from scratch.
pub fn solve(problem: &LpProblem) -> LpResult {
    solve_with(problem, &LpParams::default())
}

pub fn solve_with(problem: &LpProblem, params: &LpParams) -> LpResult {
    if let Err(msg) = problem.check() {
        panic!("malformed LP: {msg}");
    }
    if !params.presolve {
        let mut s = Simplex::new(problem, params.clone());
        return s.solve();
    }
    let pre = Presolve::new(problem);
    if pre.infeasible.is_some() {
        return LpResult {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective: f64::NAN,
            iterations: 0,
        };
    }
    let mut s = Simplex::new(&pre.reduced, params.clone());
    let r = s.solve();
    if r.status != LpStatus::Optimal {
        return LpResult {
            x: Vec::new(),
            objective: f64::NAN,
            ..r
        };
    }
    let x = pre.postsolve(&r.x);
    LpResult {
        status: r.status,
        objective: problem.objective_value(&x),
        x,
        iterations: r.iterations,
    }
}

/// Solves `base` with extra rows and bound changes applied.
///
/// The result is the same as solving the modified problem from scratch; the
/// base problem is solved first and its basis is reused as a warm start.
pub fn resolve_with(
    base: &LpProblem,
    added_rows: &[LinearRow],
    changed_bounds: &[BoundChange],
) -> LpResult {
    let params = LpParams::default();
    let mut s = Simplex::new(base, params);
    let first = s.solve();
    if first.status == LpStatus::IterationLimit {
        return first;
    }
    s.add_rows(added_rows);
    for b in changed_bounds {
        s.set_bounds(b.var, b.lower, b.upper);
    }
    let mut r = s.solve();
    r.iterations += first.iterations;
    r
}

#[cfg(test)]
mod tests;
