//! Bounded-variable revised simplex.
//!
//! Every row `i` gets a logical variable `r_i = a_i^T x` whose bounds encode
//! the row sense, so the constraint matrix is `[A | -I]` with a zero
//! right-hand side. The basis is kept as a sparse LU factorization with
//! product-form updates, rebuilt every `refactor_interval` pivots.

use log::{debug, warn};

use super::factor::BasisFactor;
use super::{LpBackend, LpParams, LpProblem, LpResult, LpStatus};
use crate::row::{LinearRow, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable held at zero.
    Zero,
}

#[derive(Debug, PartialEq, Eq)]
enum Phase {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    /// Lost dual feasibility; hand over to the primal method.
    NeedPrimal,
}

const NONE: usize = usize::MAX;

pub struct Simplex {
    params: LpParams,
    ncols: usize,
    cost: Vec<f64>,
    cols: Vec<Vec<(usize, f64)>>,
    rows: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    state: Vec<State>,
    /// Basic variable at each basis position.
    head: Vec<usize>,
    /// Basis position of each variable, `NONE` when nonbasic.
    pos: Vec<usize>,
    factor: BasisFactor,
    x: Vec<f64>,
    d: Vec<f64>,
    since_refactor: usize,
    primal_dirty: bool,
    iterations_total: usize,
    row_buf: Vec<f64>,
    marked: Vec<bool>,
    touched: Vec<usize>,
    col_buf: Vec<f64>,
    rho: Vec<f64>,
    /// Dual steepest-edge weights by basis position.
    weights: Vec<f64>,
}

impl Simplex {
    pub fn new(problem: &LpProblem, params: LpParams) -> Self {
        let n = problem.num_vars;
        let mut s = Simplex {
            params,
            ncols: n,
            cost: problem.objective.clone(),
            cols: vec![Vec::new(); n],
            rows: Vec::new(),
            lo: problem.lower.clone(),
            hi: problem.upper.clone(),
            state: Vec::with_capacity(n),
            head: Vec::new(),
            pos: vec![NONE; n],
            factor: BasisFactor::default(),
            x: vec![0.0; n],
            d: problem.objective.clone(),
            since_refactor: 0,
            primal_dirty: true,
            iterations_total: 0,
            row_buf: vec![0.0; n],
            marked: vec![false; n],
            touched: Vec::new(),
            col_buf: Vec::new(),
            rho: Vec::new(),
            weights: Vec::new(),
        };
        for j in 0..n {
            let st = s.dual_friendly_state(j);
            s.state.push(st);
            s.x[j] = s.nonbasic_value(j, st);
        }
        s.add_rows(&problem.rows);
        s
    }

    #[inline]
    fn m(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    fn nvars(&self) -> usize {
        self.ncols + self.rows.len()
    }

    #[inline]
    fn c(&self, j: usize) -> f64 {
        if j < self.ncols {
            self.cost[j]
        } else {
            0.0
        }
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.hi[j]
    }

    fn nonbasic_value(&self, j: usize, st: State) -> f64 {
        match st {
            State::Lower => self.lo[j],
            State::Upper => self.hi[j],
            State::Zero | State::Basic => 0.0,
        }
    }

    /// Nonbasic position that makes `d_j` sign-feasible when possible.
    fn dual_friendly_state(&self, j: usize) -> State {
        let (l, u) = (self.lo[j], self.hi[j]);
        let c = self.d.get(j).copied().unwrap_or(0.0);
        match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                if c < 0.0 {
                    State::Upper
                } else {
                    State::Lower
                }
            }
            (true, false) => State::Lower,
            (false, true) => State::Upper,
            (false, false) => State::Zero,
        }
    }

    /// Nonbasic state closest to the current value.
    fn nearest_state(&self, j: usize, v: f64) -> State {
        let (l, u) = (self.lo[j], self.hi[j]);
        match (l.is_finite(), u.is_finite()) {
            (true, true) => {
                if (v - l).abs() <= (u - v).abs() {
                    State::Lower
                } else {
                    State::Upper
                }
            }
            (true, false) => State::Lower,
            (false, true) => State::Upper,
            (false, false) => State::Zero,
        }
    }

    #[inline]
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        if j < self.ncols {
            for &(i, a) in &self.cols[j] {
                f(i, a);
            }
        } else {
            f(j - self.ncols, -1.0);
        }
    }

    /// `out = B^{-1} a_j`.
    fn ftran(&mut self, j: usize, out: &mut Vec<f64>) {
        let mut a = self.factor.take_work();
        self.for_col(j, |i, v| a[i] += v);
        self.factor.ftran(&mut a, out);
        self.factor.put_work(a);
    }

    /// Fills `row_buf[j] = (B^{-1} A)_{r j}` for every variable touched by
    /// row `r` of the basis inverse; indices are recorded in `touched`.
    fn pivot_row(&mut self, r: usize) {
        for &j in &self.touched {
            self.row_buf[j] = 0.0;
            self.marked[j] = false;
        }
        self.touched.clear();
        let mut e = self.factor.take_work();
        e[r] = 1.0;
        let mut rho = std::mem::take(&mut self.rho);
        self.factor.btran(&mut e, &mut rho);
        self.factor.put_work(e);
        for (i, &v) in rho.iter().enumerate() {
            if v.abs() <= 1e-14 {
                continue;
            }
            for &(j, a) in &self.rows[i] {
                if !self.marked[j] {
                    self.marked[j] = true;
                    self.touched.push(j);
                }
                self.row_buf[j] += v * a;
            }
            let lj = self.ncols + i;
            self.row_buf[lj] = -v;
            self.marked[lj] = true;
            self.touched.push(lj);
        }
        self.rho = rho;
    }

    /// Dual steepest-edge update for a pivot on row `r` with entering
    /// column `alpha`; `rho` holds row `r` of the basis inverse.
    fn update_weights(&mut self, r: usize, alpha: &[f64]) {
        let mut t = self.factor.take_work();
        t.copy_from_slice(&self.rho);
        let mut tau = Vec::new();
        self.factor.ftran(&mut t, &mut tau);
        self.factor.put_work(t);
        let ar = alpha[r];
        let wr: f64 = self.rho.iter().map(|v| v * v).sum();
        for (p, &ap) in alpha.iter().enumerate() {
            if p == r || ap == 0.0 {
                continue;
            }
            let k = ap / ar;
            let w = self.weights[p] - 2.0 * k * tau[p] + k * k * wr;
            self.weights[p] = w.max(k * k).max(1e-12);
        }
        self.weights[r] = (wr / (ar * ar)).max(1e-12);
    }

    fn set_basic(&mut self, p: usize, j: usize) {
        let old = self.head[p];
        if old != NONE && old < self.pos.len() {
            self.pos[old] = NONE;
        }
        self.head[p] = j;
        self.pos[j] = p;
        self.state[j] = State::Basic;
    }

    /// Refactors the current basis. Dependent structural columns are
    /// replaced by logicals and moved to their nearest bound.
    fn refactor(&mut self) {
        let mut head = std::mem::take(&mut self.head);
        let dropped = self.factor.build(self.ncols, &mut head, &self.cols, &self.rows);
        self.head = head;
        if !dropped.is_empty() {
            self.weights.fill(1.0);
        }
        for &j in &dropped {
            let st = self.nearest_state(j, self.x[j]);
            self.state[j] = st;
            self.x[j] = self.nonbasic_value(j, st);
            self.pos[j] = NONE;
        }
        for p in 0..self.head.len() {
            let j = self.head[p];
            self.pos[j] = p;
            self.state[j] = State::Basic;
        }
        if !dropped.is_empty() {
            debug!("refactor replaced {} dependent columns", dropped.len());
        }
        self.since_refactor = 0;
        self.primal_dirty = true;
    }

    fn recompute_primal(&mut self) {
        let m = self.m();
        let nv = self.nvars();
        let mut t = vec![0.0; m];
        for j in 0..nv {
            if self.state[j] == State::Basic {
                continue;
            }
            let v = self.nonbasic_value(j, self.state[j]);
            self.x[j] = v;
            if v != 0.0 {
                self.for_col(j, |i, a| t[i] += a * v);
            }
        }
        let mut xb = std::mem::take(&mut self.col_buf);
        self.factor.ftran(&mut t, &mut xb);
        for p in 0..m {
            self.x[self.head[p]] = -xb[p];
        }
        self.col_buf = xb;
        self.primal_dirty = false;
    }

    /// `d = c - A^T B^{-T} c_B` for the given cost function.
    fn recompute_duals_with(&mut self, cost: impl Fn(&Self, usize) -> f64) {
        let m = self.m();
        let nv = self.nvars();
        let mut cb: Vec<f64> = (0..m).map(|p| cost(self, self.head[p])).collect();
        let mut pi = Vec::new();
        self.factor.btran(&mut cb, &mut pi);
        for j in 0..nv {
            if self.state[j] == State::Basic {
                self.d[j] = 0.0;
                continue;
            }
            let mut dj = cost(self, j);
            self.for_col(j, |i, a| dj -= pi[i] * a);
            self.d[j] = dj;
        }
    }

    fn recompute_duals(&mut self) {
        self.recompute_duals_with(|s, j| s.c(j));
    }

    fn primal_infeasibility(&self, j: usize) -> f64 {
        let v = self.x[j];
        if v < self.lo[j] {
            self.lo[j] - v
        } else if v > self.hi[j] {
            v - self.hi[j]
        } else {
            0.0
        }
    }

    /// Internal primal tolerance; tighter than the reported one so that
    /// accumulated error stays inside `feas_tol`.
    fn ptol(&self) -> f64 {
        self.params.feas_tol * 1e-2
    }

    fn is_primal_feasible(&self) -> bool {
        let tol = self.ptol();
        self.head.iter().all(|&j| self.primal_infeasibility(j) <= tol)
    }

    fn dual_infeasible(&self, j: usize) -> bool {
        let tol = self.params.dual_tol;
        match self.state[j] {
            State::Basic => false,
            _ if self.is_fixed(j) => false,
            State::Lower => self.d[j] < -tol,
            State::Upper => self.d[j] > tol,
            State::Zero => self.d[j].abs() > tol,
        }
    }

    /// Moves boxed nonbasic variables with wrong-signed reduced costs to
    /// the opposite bound. Returns false if some variable cannot be fixed
    /// this way.
    fn restore_dual_feasibility(&mut self) -> bool {
        let mut ok = true;
        let mut flipped = false;
        for j in 0..self.nvars() {
            if !self.dual_infeasible(j) {
                continue;
            }
            let target = if self.d[j] < 0.0 { State::Upper } else { State::Lower };
            let bound = if target == State::Upper { self.hi[j] } else { self.lo[j] };
            if bound.is_finite() {
                self.state[j] = target;
                flipped = true;
            } else {
                ok = false;
            }
        }
        if flipped {
            self.recompute_primal();
        }
        ok
    }

    fn iteration_cap(&self) -> usize {
        self.params
            .iteration_limit
            .unwrap_or(100 * (self.m() + self.ncols).max(1))
    }

    pub fn solve(&mut self) -> LpResult {
        let cap = self.iteration_cap();
        let mut iters = 0usize;
        let mut fresh = false;
        if !self.factor.is_valid() {
            self.refactor();
            fresh = true;
        }
        let mut rounds = 0;
        let status = loop {
            rounds += 1;
            if rounds > 50 {
                warn!("simplex failed to settle after {rounds} rounds");
                break LpStatus::IterationLimit;
            }
            self.recompute_primal();
            self.recompute_duals();
            let dual_ok = self.restore_dual_feasibility();
            let primal_ok = self.is_primal_feasible();
            if primal_ok && dual_ok {
                if self.verify() {
                    break LpStatus::Optimal;
                }
                if fresh {
                    warn!("simplex solution fails verification after refactoring");
                    break LpStatus::IterationLimit;
                }
                self.refactor();
                fresh = true;
                continue;
            }
            let before = iters;
            let phase = if dual_ok {
                self.dual(&mut iters, cap)
            } else {
                self.primal(&mut iters, cap)
            };
            if iters != before {
                fresh = false;
            }
            match phase {
                Phase::Optimal => {}
                Phase::NeedPrimal => {
                    if !fresh {
                        self.refactor();
                        fresh = true;
                    }
                }
                Phase::Infeasible => break LpStatus::Infeasible,
                Phase::Unbounded => break LpStatus::Unbounded,
                Phase::IterationLimit => break LpStatus::IterationLimit,
            }
        };
        self.iterations_total += iters;
        let x = self.x[..self.ncols].to_vec();
        let objective = if status == LpStatus::Optimal {
            self.cost.iter().zip(&x).map(|(c, v)| c * v).sum()
        } else {
            f64::NAN
        };
        LpResult {
            status,
            x,
            objective,
            iterations: iters,
        }
    }

    /// Checks bounds and rows directly against the structural values.
    fn verify(&self) -> bool {
        let tol = self.params.feas_tol;
        let n = self.ncols;
        for j in 0..n {
            if self.x[j] < self.lo[j] - tol || self.x[j] > self.hi[j] + tol {
                return false;
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let act: f64 = row.iter().map(|&(j, a)| a * self.x[j]).sum();
            let (l, u) = (self.lo[n + i], self.hi[n + i]);
            if act < l - tol || act > u + tol {
                return false;
            }
        }
        true
    }

    fn dual(&mut self, iters: &mut usize, cap: usize) -> Phase {
        let ptol = self.ptol();
        let dtol = self.params.dual_tol;
        let piv_tol = self.params.pivot_tol;
        let mut degenerate = 0usize;
        let mut retried_infeasible = false;
        let mut col = std::mem::take(&mut self.col_buf);
        let result = loop {
            if *iters >= cap {
                break Phase::IterationLimit;
            }
            if self.since_refactor >= self.params.refactor_interval {
                self.refactor();
                self.recompute_primal();
                self.recompute_duals();
                if !self.restore_dual_feasibility() {
                    break Phase::NeedPrimal;
                }
            }
            if self.primal_dirty {
                self.recompute_primal();
            }
            let bland = degenerate >= self.params.bland_trigger;

            // leaving row
            let mut r = NONE;
            let mut best = 0.0;
            for p in 0..self.m() {
                let j = self.head[p];
                let inf = self.primal_infeasibility(j);
                if inf > ptol {
                    if bland {
                        if r == NONE || j < self.head[r] {
                            r = p;
                        }
                    } else if inf * inf > best * self.weights[p] {
                        best = inf * inf / self.weights[p];
                        r = p;
                    }
                }
            }
            if r == NONE {
                break Phase::Optimal;
            }
            let leaving = self.head[r];
            let to_lower = self.x[leaving] < self.lo[leaving];
            let target = if to_lower { self.lo[leaving] } else { self.hi[leaving] };

            self.pivot_row(r);

            // ratio test
            let eligible = |s: &Self, j: usize, a: f64| -> bool {
                if s.state[j] == State::Basic || a.abs() <= piv_tol || s.is_fixed(j) {
                    return false;
                }
                let up_ok = matches!(s.state[j], State::Lower | State::Zero);
                let down_ok = matches!(s.state[j], State::Upper | State::Zero);
                // x_leaving moves by -a * dx_j
                if to_lower {
                    (a < 0.0 && up_ok) || (a > 0.0 && down_ok)
                } else {
                    (a > 0.0 && up_ok) || (a < 0.0 && down_ok)
                }
            };
            let mut q = NONE;
            if bland {
                let mut best_ratio = f64::INFINITY;
                for &j in &self.touched {
                    let a = self.row_buf[j];
                    if !eligible(self, j, a) {
                        continue;
                    }
                    let ratio = self.d[j].abs() / a.abs();
                    if ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && (q == NONE || j < q)) {
                        if ratio < best_ratio {
                            best_ratio = ratio;
                        }
                        q = j;
                    }
                }
            } else {
                let mut theta_max = f64::INFINITY;
                for &j in &self.touched {
                    let a = self.row_buf[j];
                    if eligible(self, j, a) {
                        let t = (self.d[j].abs() + dtol) / a.abs();
                        if t < theta_max {
                            theta_max = t;
                        }
                    }
                }
                let mut best_a = 0.0;
                for &j in &self.touched {
                    let a = self.row_buf[j];
                    if eligible(self, j, a) && self.d[j].abs() / a.abs() <= theta_max && a.abs() > best_a {
                        best_a = a.abs();
                        q = j;
                    }
                }
            }
            if q == NONE {
                if !retried_infeasible && self.since_refactor > 0 {
                    retried_infeasible = true;
                    self.refactor();
                    self.recompute_primal();
                    self.recompute_duals();
                    if !self.restore_dual_feasibility() {
                        break Phase::NeedPrimal;
                    }
                    continue;
                }
                break Phase::Infeasible;
            }
            retried_infeasible = false;

            self.ftran(q, &mut col);
            let a_rq = col[r];
            if (a_rq - self.row_buf[q]).abs() > 1e-6 * (1.0 + a_rq.abs()) || a_rq.abs() <= piv_tol {
                debug!("dual pivot mismatch {} vs {}, refactoring", a_rq, self.row_buf[q]);
                if self.since_refactor == 0 {
                    break Phase::NeedPrimal;
                }
                self.refactor();
                self.recompute_primal();
                self.recompute_duals();
                if !self.restore_dual_feasibility() {
                    break Phase::NeedPrimal;
                }
                continue;
            }

            // primal step
            let delta = (self.x[leaving] - target) / a_rq;
            if delta != 0.0 {
                for p in 0..self.m() {
                    let a = col[p];
                    if a != 0.0 {
                        let j = self.head[p];
                        self.x[j] -= a * delta;
                    }
                }
                self.x[q] += delta;
            }
            // dual step
            let theta = self.d[q] / a_rq;
            if theta != 0.0 {
                for &j in &self.touched {
                    if self.state[j] != State::Basic {
                        self.d[j] -= theta * self.row_buf[j];
                    }
                }
            }
            if theta.abs() < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.d[q] = 0.0;
            self.d[leaving] = -theta;
            self.x[leaving] = target;
            self.state[leaving] = if to_lower { State::Lower } else { State::Upper };
            self.pos[leaving] = NONE;
            self.update_weights(r, &col);
            self.factor.update(r, &col);
            self.set_basic(r, q);
            self.since_refactor += 1;
            *iters += 1;
        };
        self.col_buf = col;
        result
    }

    fn primal(&mut self, iters: &mut usize, cap: usize) -> Phase {
        let piv_tol = self.params.pivot_tol;
        let dtol = self.params.dual_tol;
        let mut degenerate = 0usize;
        let mut col = std::mem::take(&mut self.col_buf);
        let result = loop {
            if *iters >= cap {
                break Phase::IterationLimit;
            }
            if self.since_refactor >= self.params.refactor_interval {
                self.refactor();
            }
            if self.primal_dirty {
                self.recompute_primal();
            }
            let ptol = self.ptol();
            let phase1 = !self.is_primal_feasible();
            if phase1 {
                self.recompute_duals_with(|s, j| {
                    if s.state[j] != State::Basic {
                        0.0
                    } else if s.x[j] < s.lo[j] - ptol {
                        -1.0
                    } else if s.x[j] > s.hi[j] + ptol {
                        1.0
                    } else {
                        0.0
                    }
                });
            } else {
                self.recompute_duals();
            }
            let bland = degenerate >= self.params.bland_trigger;

            // pricing
            let mut q = NONE;
            let mut best = 0.0;
            for j in 0..self.nvars() {
                if !self.dual_infeasible(j) {
                    continue;
                }
                if bland {
                    q = j;
                    break;
                }
                if self.d[j].abs() > best {
                    best = self.d[j].abs();
                    q = j;
                }
            }
            if q == NONE {
                break if phase1 { Phase::Infeasible } else { Phase::Optimal };
            }
            let _ = dtol;
            let dir = if self.d[q] < 0.0 { 1.0 } else { -1.0 };
            self.ftran(q, &mut col);

            // effective bounds for the ratio test
            let bounds_of = |s: &Self, j: usize| -> (f64, f64) {
                let v = s.x[j];
                if phase1 && v < s.lo[j] - ptol {
                    (f64::NEG_INFINITY, s.lo[j])
                } else if phase1 && v > s.hi[j] + ptol {
                    (s.hi[j], f64::INFINITY)
                } else {
                    (s.lo[j], s.hi[j])
                }
            };
            let range = self.hi[q] - self.lo[q];
            let mut theta_max = f64::INFINITY;
            for p in 0..self.m() {
                let a = col[p];
                if a.abs() <= piv_tol {
                    continue;
                }
                let j = self.head[p];
                let (l, u) = bounds_of(self, j);
                let delta = -dir * a;
                let t = if delta < 0.0 {
                    (self.x[j] - l + ptol) / -delta
                } else {
                    (u - self.x[j] + ptol) / delta
                };
                if t < theta_max {
                    theta_max = t;
                }
            }
            let mut r = NONE;
            let mut theta = f64::INFINITY;
            let mut best_a = 0.0;
            for p in 0..self.m() {
                let a = col[p];
                if a.abs() <= piv_tol {
                    continue;
                }
                let j = self.head[p];
                let (l, u) = bounds_of(self, j);
                let delta = -dir * a;
                let t = if delta < 0.0 {
                    (self.x[j] - l) / -delta
                } else {
                    (u - self.x[j]) / delta
                };
                if !t.is_finite() || t > theta_max {
                    continue;
                }
                let better = if bland {
                    r == NONE || j < self.head[r]
                } else {
                    a.abs() > best_a
                };
                if better {
                    best_a = a.abs();
                    r = p;
                    theta = t.max(0.0);
                }
            }
            if range.is_finite() && (r == NONE || range <= theta) {
                // bound flip
                let newst = if dir > 0.0 { State::Upper } else { State::Lower };
                for p in 0..self.m() {
                    let a = col[p];
                    if a != 0.0 {
                        let j = self.head[p];
                        self.x[j] -= dir * range * a;
                    }
                }
                self.state[q] = newst;
                self.x[q] = self.nonbasic_value(q, newst);
                degenerate = 0;
                *iters += 1;
                continue;
            }
            if r == NONE {
                break if phase1 { Phase::Infeasible } else { Phase::Unbounded };
            }
            if theta < 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let leaving = self.head[r];
            let (l, u) = bounds_of(self, leaving);
            for p in 0..self.m() {
                let a = col[p];
                if a != 0.0 {
                    let j = self.head[p];
                    self.x[j] -= dir * theta * a;
                }
            }
            self.x[q] += dir * theta;
            let delta = -dir * col[r];
            let st = if delta < 0.0 {
                debug_assert!(l.is_finite());
                if l == self.lo[leaving] {
                    State::Lower
                } else {
                    State::Upper
                }
            } else if u == self.hi[leaving] {
                State::Upper
            } else {
                State::Lower
            };
            self.state[leaving] = st;
            self.x[leaving] = self.nonbasic_value(leaving, st);
            self.pos[leaving] = NONE;
            self.weights.fill(1.0);
            self.factor.update(r, &col);
            self.set_basic(r, q);
            self.since_refactor += 1;
            *iters += 1;
        };
        self.col_buf = col;
        result
    }

    fn sense_bounds(sense: Sense, rhs: f64) -> (f64, f64) {
        match sense {
            Sense::Le => (f64::NEG_INFINITY, rhs),
            Sense::Ge => (rhs, f64::INFINITY),
            Sense::Eq => (rhs, rhs),
        }
    }

    pub fn add_rows(&mut self, new_rows: &[LinearRow]) {
        if new_rows.is_empty() {
            return;
        }
        let m_old = self.m();
        let n = self.ncols;
        self.factor.invalidate();
        for (t, row) in new_rows.iter().enumerate() {
            let i = m_old + t;
            let coefs: Vec<(usize, f64)> = row.coefs().to_vec();
            for &(j, a) in &coefs {
                self.cols[j].push((i, a));
            }
            let act: f64 = coefs.iter().map(|&(j, a)| a * self.x[j]).sum();
            self.rows.push(coefs);
            let (l, u) = Self::sense_bounds(row.sense, row.rhs);
            self.lo.push(l);
            self.hi.push(u);
            self.state.push(State::Basic);
            self.x.push(act);
            self.d.push(0.0);
            self.pos.push(m_old + t);
            self.head.push(n + i);
            self.weights.push(1.0);
            self.row_buf.push(0.0);
            self.marked.push(false);
        }
    }

    /// Removes rows whose logical is basic; others are kept. Returns the
    /// removed row indices (in terms of the indexing before removal).
    pub fn remove_rows(&mut self, which: &[usize]) -> Vec<usize> {
        let m = self.m();
        let n = self.ncols;
        let mut drop = vec![false; m];
        let mut removed = Vec::new();
        for &i in which {
            if i < m && !drop[i] && self.state[n + i] == State::Basic {
                drop[i] = true;
                removed.push(i);
            }
        }
        if removed.is_empty() {
            return removed;
        }
        removed.sort_unstable();
        let drop_pos: Vec<bool> = (0..m)
            .map(|p| {
                let j = self.head[p];
                j >= n && drop[j - n]
            })
            .collect();
        let keep_rows: Vec<usize> = (0..m).filter(|&i| !drop[i]).collect();
        let keep_pos: Vec<usize> = (0..m).filter(|&p| !drop_pos[p]).collect();
        self.factor.invalidate();
        let mut new_index = vec![NONE; m];
        for (ni, &i) in keep_rows.iter().enumerate() {
            new_index[i] = ni;
        }
        let remap = |j: usize| if j < n { j } else { n + new_index[j - n] };
        let new_head: Vec<usize> = keep_pos.iter().map(|&p| remap(self.head[p])).collect();
        let keep_var = |j: usize| j < n || !drop[j - n];
        let filter = |v: &Vec<f64>| -> Vec<f64> {
            v.iter().enumerate().filter(|(j, _)| keep_var(*j)).map(|(_, &x)| x).collect()
        };
        self.lo = filter(&self.lo);
        self.hi = filter(&self.hi);
        self.x = filter(&self.x);
        self.d = filter(&self.d);
        self.state = self
            .state
            .iter()
            .enumerate()
            .filter(|(j, _)| keep_var(*j))
            .map(|(_, &s)| s)
            .collect();
        let rows = std::mem::take(&mut self.rows);
        self.rows = rows
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !drop[*i])
            .map(|(_, r)| r)
            .collect();
        for c in self.cols.iter_mut() {
            c.retain(|&(i, _)| !drop[i]);
            for e in c.iter_mut() {
                e.0 = new_index[e.0];
            }
        }
        self.weights = keep_pos.iter().map(|&p| self.weights[p]).collect();
        self.head = new_head;
        self.pos = vec![NONE; self.nvars()];
        for (p, &j) in self.head.iter().enumerate() {
            self.pos[j] = p;
        }
        self.touched.clear();
        self.row_buf = vec![0.0; self.nvars()];
        self.marked = vec![false; self.nvars()];
        removed
    }

    pub fn set_bounds(&mut self, j: usize, lower: f64, upper: f64) {
        assert!(j < self.ncols, "bound change on unknown variable {j}");
        self.lo[j] = lower;
        self.hi[j] = upper;
        match self.state[j] {
            State::Basic => {}
            st => {
                let st = match st {
                    State::Lower if lower.is_finite() => State::Lower,
                    State::Upper if upper.is_finite() => State::Upper,
                    _ => self.dual_friendly_state(j),
                };
                self.state[j] = st;
                let v = self.nonbasic_value(j, st);
                if v != self.x[j] {
                    self.x[j] = v;
                    self.primal_dirty = true;
                }
            }
        }
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    pub fn num_rows(&self) -> usize {
        self.m()
    }

    pub fn num_cols(&self) -> usize {
        self.ncols
    }

    pub fn row_activity(&self, i: usize) -> f64 {
        self.x[self.ncols + i]
    }

    pub fn total_iterations(&self) -> usize {
        self.iterations_total
    }

    pub fn invalidate(&mut self) {
        self.since_refactor = self.params.refactor_interval;
        self.primal_dirty = true;
    }
}

impl LpBackend for Simplex {
    fn num_rows(&self) -> usize {
        Simplex::num_rows(self)
    }

    fn add_rows(&mut self, rows: &[LinearRow]) {
        Simplex::add_rows(self, rows)
    }

    fn remove_rows(&mut self, rows: &[usize]) -> Vec<usize> {
        Simplex::remove_rows(self, rows)
    }

    fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        Simplex::set_bounds(self, var, lower, upper)
    }

    fn solve(&mut self) -> LpResult {
        Simplex::solve(self)
    }

    fn row_activity(&self, row: usize) -> f64 {
        Simplex::row_activity(self, row)
    }

    fn reset_factorization(&mut self) {
        self.invalidate()
    }
}
