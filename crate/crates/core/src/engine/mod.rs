//! Best-first branch-and-cut.
//!
//! The root LP is presolved once; every node then re-optimizes the same
//! simplex session with its bound overrides applied, so cuts and bases carry
//! over between nodes. Cuts live in a global pool and are valid everywhere.

mod node;
mod pool;

use std::time::{Duration, Instant};

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

pub use node::{branch, branching_variable, Node, NodeQueue};
pub use pool::CutPool;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::lp::{LpParams, LpStatus, Presolve, Simplex};
use crate::model::{build_model_with, decode_point, validate, ModelOptions, Solution, ViolationKind};
use crate::separation::{Cut, Separator, SEPARATION_TOL};

#[derive(Clone, Debug)]
pub struct SolveParams {
    pub time_limit: Duration,
    pub integrality_tol: f64,
    pub separation_tol: f64,
    /// Separation rounds at fractional points before branching. Rounds that
    /// only add lazy rows at integral points do not count.
    pub max_cut_rounds: usize,
    pub node_limit: Option<usize>,
    pub penalty_mode: bool,
    /// Initial incumbent; must pass the validator.
    pub warm_start: Option<Solution>,
    /// Collect cut-log lines in the result.
    pub log_cuts: bool,
    pub lp: LpParams,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            time_limit: Duration::from_secs(9000),
            integrality_tol: 1e-6,
            separation_tol: SEPARATION_TOL,
            max_cut_rounds: 50,
            node_limit: None,
            penalty_mode: false,
            warm_start: None,
            log_cuts: false,
            lp: LpParams::default(),
        }
    }
}

/// Search statistics.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Subtour rows added (ground and UAV, lazy ones included).
    pub sec_cuts: usize,
    pub two_matching_cuts: usize,
    pub nodes_explored: usize,
    pub lp_solves: usize,
    pub lp_iterations: usize,
    pub root_bound: f64,
    /// Nodes given up after repeated LP failures.
    pub failed_nodes: usize,
    pub wall_time_secs: f64,
}

impl SolveStats {
    /// Text block with the counters and the wall time.
    pub fn report(&self) -> String {
        format!(
            "SEC cuts        {}\n2-matching cuts {}\nB&C nodes       {}\nLP solves       {}\nwall time (s)   {:.3}\n",
            self.sec_cuts, self.two_matching_cuts, self.nodes_explored, self.lp_solves, self.wall_time_secs
        )
    }

    /// The statistics with wall time zeroed; identical inputs give identical
    /// values.
    pub fn counters(&self) -> SolveStats {
        SolveStats {
            wall_time_secs: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Optimal,
    /// Time or node limit reached; `gap` is relative to the incumbent.
    Timeout { gap: Option<f64> },
    Infeasible { reason: String },
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub solution: Option<Solution>,
    /// Proven lower bound on the optimum.
    pub lower_bound: f64,
    pub stats: SolveStats,
    /// Every cut generated during the run.
    pub cuts: Vec<Cut>,
    /// Cut-log lines when requested.
    pub cut_log: Vec<String>,
}

impl SolveResult {
    pub fn objective(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.objective)
    }
}

struct Session<'a> {
    inst: &'a Instance,
    params: &'a SolveParams,
    pre: Presolve,
    lp: Simplex,
    pool: CutPool,
    /// Current reduced-space bounds in the session.
    cur_lo: Vec<f64>,
    cur_hi: Vec<f64>,
    stats: SolveStats,
    log: Vec<String>,
    incumbent: Option<Solution>,
    upper: f64,
    started: Instant,
}

enum NodeEnd {
    Pruned,
    Branched(usize, f64),
    Failed(f64),
    OutOfTime,
}

impl<'a> Session<'a> {
    fn emit(&mut self, line: String) {
        debug!("{line}");
        if self.params.log_cuts {
            self.log.push(line);
        }
    }

    fn out_of_time(&self) -> bool {
        self.started.elapsed() >= self.params.time_limit
    }

    fn prune_level(&self) -> f64 {
        self.upper - 1e-9 * self.upper.abs().max(1.0)
    }

    /// Applies a node's overrides on top of the root bounds. Returns false if
    /// some domain is empty.
    fn apply_bounds(&mut self, node: &Node) -> bool {
        let pre = &self.pre;
        let mut lo = pre.reduced.lower.clone();
        let mut hi = pre.reduced.upper.clone();
        for &(var, l, h) in &node.bounds {
            match pre.orig_to_reduced[var] {
                Some(r) => {
                    lo[r] = lo[r].max(l);
                    hi[r] = hi[r].min(h);
                    if lo[r] > hi[r] {
                        return false;
                    }
                }
                None => {
                    let v = pre.fixed_value[var];
                    if v < l || v > h {
                        return false;
                    }
                }
            }
        }
        for r in 0..lo.len() {
            if lo[r] != self.cur_lo[r] || hi[r] != self.cur_hi[r] {
                self.lp.set_bounds(r, lo[r], hi[r]);
            }
        }
        self.cur_lo = lo;
        self.cur_hi = hi;
        true
    }

    /// Adds cuts to the pool and the LP. Returns how many rows entered the LP.
    fn add_cuts(&mut self, cuts: Vec<Cut>) -> usize {
        let mut entered = 0;
        for cut in cuts {
            let line = cut.log_line();
            let kind = cut.kind;
            match self.pool.insert(cut, &self.pre, &mut self.lp) {
                pool::Insert::New { active } => {
                    if kind.is_sec() {
                        self.stats.sec_cuts += 1;
                    } else {
                        self.stats.two_matching_cuts += 1;
                    }
                    self.emit(line);
                    entered += active as usize;
                }
                pool::Insert::Reactivated => entered += 1,
                pool::Insert::AlreadyActive => {}
            }
        }
        entered
    }

    fn offer_incumbent(&mut self, sol: Solution, lp_value: f64) -> Result<()> {
        let report = validate(self.inst, &sol);
        let acceptable = report
            .iter()
            .all(|v| self.params.penalty_mode && v.kind == ViolationKind::CommRadius);
        if !acceptable {
            let msgs: Vec<String> = report.iter().map(|v| v.to_string()).collect();
            return Err(Error::Contract(format!(
                "integral point passed separation but fails validation: {}",
                msgs.join("; ")
            )));
        }
        if (sol.objective - lp_value).abs() > 1e-6 * sol.objective.abs().max(1.0) {
            warn!(
                "decoded cost {} differs from LP value {lp_value}",
                sol.objective
            );
        }
        if sol.objective < self.upper {
            info!("incumbent {:.6} at {:.2}s", sol.objective, self.started.elapsed().as_secs_f64());
            self.emit(format!("incumbent {:.6}", sol.objective));
            self.upper = sol.objective;
            self.incumbent = Some(sol);
        }
        Ok(())
    }

    fn process(&mut self, node: &Node) -> Result<NodeEnd> {
        if !self.apply_bounds(node) {
            return Ok(NodeEnd::Pruned);
        }
        let sp = crate::model::VariableSpace::new(self.inst.n());
        let sep = Separator::new(&sp, self.inst.depot()).with_tol(self.params.separation_tol);
        let mut rounds = 0;
        let mut retried = false;
        let mut last_value = node.key;
        loop {
            if self.out_of_time() {
                return Ok(NodeEnd::OutOfTime);
            }
            let res = self.lp.solve();
            self.stats.lp_solves += 1;
            self.stats.lp_iterations += res.iterations;
            match res.status {
                LpStatus::Optimal => retried = false,
                LpStatus::Infeasible => return Ok(NodeEnd::Pruned),
                LpStatus::IterationLimit | LpStatus::Unbounded => {
                    if !retried {
                        warn!("node {}: LP returned {:?}, refactoring", node.id, res.status);
                        retried = true;
                        self.lp.invalidate();
                        continue;
                    }
                    warn!("node {}: LP failed twice ({:?}), node abandoned", node.id, res.status);
                    return Ok(NodeEnd::Failed(last_value));
                }
            }
            let value = res.objective + self.pre.objective_offset;
            last_value = value.max(node.key);
            if node.id == 0 && rounds == 0 {
                self.stats.root_bound = value;
            }
            if value >= self.prune_level() {
                return Ok(NodeEnd::Pruned);
            }
            let point = self.pre.postsolve(&res.x);
            self.pool.age(&point);
            self.pool.shelve_inactive(&mut self.lp);

            let branch_var = branching_variable(&sp, &point, self.params.integrality_tol);
            let reactivated = self.pool.reactivate_violated(&point, self.params.separation_tol, &mut self.lp);
            if reactivated > 0 {
                rounds += branch_var.is_some() as usize;
                continue;
            }
            if branch_var.is_none() {
                let cuts = sep.check_integral(&point);
                if cuts.is_empty() {
                    let sol = decode_point(self.inst, &sp, &point)?;
                    self.offer_incumbent(sol, value)?;
                    return Ok(NodeEnd::Pruned);
                }
                if self.add_cuts(cuts) == 0 {
                    return Err(Error::Contract(
                        "violated lazy rows are already in the LP; the relaxation is numerically inconsistent".into(),
                    ));
                }
                continue;
            }
            let var = branch_var.unwrap();
            if rounds >= self.params.max_cut_rounds {
                return Ok(NodeEnd::Branched(var, value));
            }
            let cuts = sep.separate(&point);
            if self.add_cuts(cuts) == 0 {
                return Ok(NodeEnd::Branched(var, value));
            }
            rounds += 1;
        }
    }
}

/// Solves `inst` to optimality or until a limit is hit.
pub fn solve(inst: &Instance, params: &SolveParams) -> Result<SolveResult> {
    let started = Instant::now();
    let model = build_model_with(
        inst,
        ModelOptions {
            penalty_mode: params.penalty_mode,
        },
    );
    let lp = model.to_lp();
    let pre = Presolve::new(&lp);
    if let Some(reason) = pre.infeasible.clone() {
        return Ok(SolveResult {
            outcome: SolveOutcome::Infeasible { reason },
            solution: None,
            lower_bound: f64::INFINITY,
            stats: SolveStats {
                wall_time_secs: started.elapsed().as_secs_f64(),
                ..SolveStats::default()
            },
            cuts: Vec::new(),
            cut_log: Vec::new(),
        });
    }
    debug!(
        "presolve kept {} of {} columns and {} of {} rows",
        pre.reduced.num_vars,
        lp.num_vars,
        pre.reduced.rows.len(),
        lp.rows.len()
    );
    let simplex = Simplex::new(&pre.reduced, params.lp.clone());
    let mut s = Session {
        inst,
        params,
        cur_lo: pre.reduced.lower.clone(),
        cur_hi: pre.reduced.upper.clone(),
        lp: simplex,
        pool: CutPool::new(pre.reduced.rows.len()),
        pre,
        stats: SolveStats::default(),
        log: Vec::new(),
        incumbent: None,
        upper: f64::INFINITY,
        started,
    };
    if let Some(ws) = &params.warm_start {
        let report = validate(inst, ws);
        if !report.is_empty() {
            return Err(Error::invalid(format!(
                "warm start is not feasible: {}",
                report[0]
            )));
        }
        s.upper = ws.objective;
        s.incumbent = Some(Solution { stats: None, ..ws.clone() });
    }

    let mut queue = NodeQueue::new();
    queue.push(Node::root());
    let mut next_id = 1;
    let mut failed_bound = f64::INFINITY;
    let mut stopped = false;
    while let Some(node) = queue.pop() {
        if node.key >= s.prune_level() {
            continue;
        }
        let over_nodes = params.node_limit.is_some_and(|l| s.stats.nodes_explored >= l);
        if over_nodes || s.out_of_time() {
            queue.push(node);
            stopped = true;
            break;
        }
        s.stats.nodes_explored += 1;
        let bound = node.key;
        s.emit(format!("node {} depth {} bound {:.6}", node.id, node.depth, bound));
        match s.process(&node)? {
            NodeEnd::Pruned => {}
            NodeEnd::Branched(var, value) => {
                let (down, up) = branch(&node, var, value, (next_id, next_id + 1));
                next_id += 2;
                queue.push(down);
                queue.push(up);
            }
            NodeEnd::Failed(value) => {
                s.stats.failed_nodes += 1;
                failed_bound = failed_bound.min(value);
            }
            NodeEnd::OutOfTime => {
                queue.push(node);
                stopped = true;
                break;
            }
        }
    }

    let open_bound = queue.min_key().unwrap_or(f64::INFINITY).min(failed_bound);
    let lower_bound = open_bound.min(s.upper);
    s.stats.wall_time_secs = started.elapsed().as_secs_f64();
    let outcome = if !stopped && s.stats.failed_nodes == 0 {
        match &s.incumbent {
            Some(_) => SolveOutcome::Optimal,
            None => SolveOutcome::Infeasible {
                reason: "search exhausted without a feasible tour".into(),
            },
        }
    } else {
        let gap = s
            .incumbent
            .as_ref()
            .map(|_| ((s.upper - lower_bound) / s.upper.abs().max(1e-9)).max(0.0));
        SolveOutcome::Timeout { gap }
    };
    let stats = s.stats.clone();
    let solution = s.incumbent.take().map(|mut sol| {
        sol.stats = Some(stats.clone());
        sol
    });
    Ok(SolveResult {
        outcome,
        solution,
        lower_bound,
        stats,
        cuts: s.pool.into_cuts(),
        cut_log: s.log,
    })
}

#[cfg(test)]
mod tests;
