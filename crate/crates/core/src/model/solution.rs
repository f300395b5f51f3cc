use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::space::VariableSpace;
use crate::engine::SolveStats;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::io;

const INTEGRALITY_TOL: f64 = 1e-6;
const COST_TOL: f64 = 1e-6;

/// A ground tour with UAV sub-tours hanging off its stops.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    /// Stops in visiting order, starting at the depot.
    pub tour: Vec<usize>,
    /// Directed UAV cycles keyed by their stop; each starts at the stop.
    /// Stops without assigned targets have no entry.
    pub subtours: BTreeMap<usize, Vec<usize>>,
    /// Stop serving each target; stops serve themselves.
    pub assignment: Vec<usize>,
    pub gv_cost: f64,
    pub uav_cost: f64,
    /// Big-M charges for communication-infeasible assignments.
    pub penalty_cost: f64,
    pub objective: f64,
    pub stats: Option<SolveStats>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CostBreakdown {
    pub gv: f64,
    pub uav: f64,
    pub penalty: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.gv + self.uav + self.penalty
    }
}

impl Solution {
    /// Builds a solution from its structure and fills in the costs.
    pub fn from_structure(
        inst: &Instance,
        tour: Vec<usize>,
        subtours: BTreeMap<usize, Vec<usize>>,
        assignment: Vec<usize>,
    ) -> Self {
        let mut sol = Solution {
            tour,
            subtours,
            assignment,
            gv_cost: 0.0,
            uav_cost: 0.0,
            penalty_cost: 0.0,
            objective: 0.0,
            stats: None,
        };
        let c = cost_breakdown(inst, &sol);
        sol.gv_cost = c.gv;
        sol.uav_cost = c.uav;
        sol.penalty_cost = c.penalty;
        sol.objective = c.total();
        sol
    }

    pub fn stops(&self) -> &[usize] {
        &self.tour
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: SolutionFile = io::read_json(path)?;
        Ok(file.into())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        io::write_json(&SolutionFile::from(self), path)
    }
}

/// On-disk layout of a solution.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub objective: f64,
    pub gv_cost: f64,
    pub uav_cost: f64,
    #[serde(default)]
    pub penalty_cost: f64,
    pub gv_tour: Vec<usize>,
    pub subtours: BTreeMap<usize, Vec<usize>>,
    pub assignment: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<SolveStats>,
}

impl From<&Solution> for SolutionFile {
    fn from(s: &Solution) -> Self {
        SolutionFile {
            objective: s.objective,
            gv_cost: s.gv_cost,
            uav_cost: s.uav_cost,
            penalty_cost: s.penalty_cost,
            gv_tour: s.tour.clone(),
            subtours: s.subtours.clone(),
            assignment: s.assignment.clone(),
            stats: s.stats.clone(),
        }
    }
}

impl From<SolutionFile> for Solution {
    fn from(f: SolutionFile) -> Self {
        Solution {
            tour: f.gv_tour,
            subtours: f.subtours,
            assignment: f.assignment,
            gv_cost: f.gv_cost,
            uav_cost: f.uav_cost,
            penalty_cost: f.penalty_cost,
            objective: f.objective,
            stats: f.stats,
        }
    }
}

/// Recomputes the cost of a solution from the instance matrices.
pub fn cost_breakdown(inst: &Instance, sol: &Solution) -> CostBreakdown {
    let n = inst.n();
    let in_range = |i: usize| i < n;
    let t = &sol.tour;
    let mut gv = 0.0;
    if t.len() >= 2 {
        for a in 0..t.len() {
            let (i, j) = (t[a], t[(a + 1) % t.len()]);
            if in_range(i) && in_range(j) {
                gv += inst.gv_cost(i, j);
            }
        }
    }
    let mut uav = 0.0;
    for cycle in sol.subtours.values() {
        for a in 0..cycle.len() {
            let (i, j) = (cycle[a], cycle[(a + 1) % cycle.len()]);
            if in_range(i) && in_range(j) {
                uav += inst.uav_cost(i, j);
            }
        }
    }
    let mut penalty = 0.0;
    for (i, &k) in sol.assignment.iter().enumerate() {
        if in_range(i) && in_range(k) && !inst.comm_ok(i, k) {
            penalty += inst.penalty_weight();
        }
    }
    CostBreakdown { gv, uav, penalty }
}

/// Ground tour cost plus UAV arc costs plus any assignment penalties.
pub fn objective_of(inst: &Instance, sol: &Solution) -> f64 {
    cost_breakdown(inst, sol).total()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    Coverage,
    GroundTour,
    SubTour,
    DetachedSubTour,
    CommRadius,
    Assignment,
    Cost,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Coverage => "coverage",
            ViolationKind::GroundTour => "ground-tour",
            ViolationKind::SubTour => "sub-tour",
            ViolationKind::DetachedSubTour => "detached-sub-tour",
            ViolationKind::CommRadius => "comm-radius",
            ViolationKind::Assignment => "assignment",
            ViolationKind::Cost => "cost",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

/// Lists every way `sol` fails to be a feasible CAGVRP solution. An empty
/// report means the solution is feasible and its cost fields are right.
pub fn validate(inst: &Instance, sol: &Solution) -> Vec<Violation> {
    let n = inst.n();
    let mut out = Vec::new();
    let mut push = |kind, message: String| out.push(Violation { kind, message });

    if sol.assignment.len() != n {
        push(
            ViolationKind::Assignment,
            format!("assignment has {} entries, expected {n}", sol.assignment.len()),
        );
        return out;
    }
    if let Some(i) = sol.assignment.iter().position(|&k| k >= n) {
        push(ViolationKind::Assignment, format!("target {i} assigned to unknown stop"));
        return out;
    }
    if sol.tour.iter().chain(sol.subtours.values().flatten()).any(|&i| i >= n)
        || sol.subtours.keys().any(|&k| k >= n)
    {
        push(ViolationKind::Coverage, "tour references an unknown target".into());
        return out;
    }

    // Ground tour: simple cycle through the depot with at least 3 stops.
    let mut on_tour = vec![false; n];
    if sol.tour.first() != Some(&inst.depot()) {
        push(
            ViolationKind::GroundTour,
            format!("ground tour does not start at depot {}", inst.depot()),
        );
    }
    if sol.tour.len() < 3 {
        push(
            ViolationKind::GroundTour,
            format!("ground tour has {} stops, at least 3 required", sol.tour.len()),
        );
    }
    for &i in &sol.tour {
        if on_tour[i] {
            push(ViolationKind::GroundTour, format!("stop {i} visited twice"));
        }
        on_tour[i] = true;
    }
    if !on_tour[inst.depot()] {
        push(ViolationKind::Coverage, format!("depot {} not on ground tour", inst.depot()));
    }

    // Assignment consistency.
    for i in 0..n {
        let k = sol.assignment[i];
        if on_tour[i] && k != i {
            push(
                ViolationKind::Assignment,
                format!("stop {i} is assigned to {k} instead of itself"),
            );
        }
        if k == i && !on_tour[i] {
            push(ViolationKind::Coverage, format!("stop {i} is not on the ground tour"));
        }
        if k != i && !on_tour[k] {
            push(
                ViolationKind::Assignment,
                format!("target {i} assigned to {k}, which is not a stop"),
            );
        }
        if !inst.comm_ok(i, k) {
            push(
                ViolationKind::CommRadius,
                format!(
                    "target {i} is {:.4} from its stop {k}, radius is {}",
                    inst.distance(i, k),
                    inst.radius()
                ),
            );
        }
    }

    // Sub-tours.
    let mut seen_in_subtour = vec![0usize; n];
    for (&k, cycle) in &sol.subtours {
        if !on_tour[k] {
            push(
                ViolationKind::DetachedSubTour,
                format!("UAV cycle {cycle:?} keyed at {k} does not pass through a stop"),
            );
        } else if !cycle.contains(&k) {
            push(
                ViolationKind::DetachedSubTour,
                format!("UAV cycle {cycle:?} does not pass through its stop {k}"),
            );
        } else if cycle[0] != k {
            push(ViolationKind::SubTour, format!("sub-tour at {k} does not start at its stop"));
        }
        if cycle.len() < 2 {
            push(ViolationKind::SubTour, format!("sub-tour at {k} has no targets"));
        }
        let mut local = vec![false; n];
        for &i in cycle {
            if local[i] {
                push(ViolationKind::SubTour, format!("sub-tour at {k} visits {i} twice"));
            }
            local[i] = true;
            if i != k {
                seen_in_subtour[i] += 1;
                if sol.assignment[i] != k {
                    push(
                        ViolationKind::SubTour,
                        format!("target {i} flown from {k} but assigned to {}", sol.assignment[i]),
                    );
                }
                if on_tour[i] {
                    push(
                        ViolationKind::SubTour,
                        format!("stop {i} also appears inside the sub-tour at {k}"),
                    );
                }
            }
        }
    }

    // Every target exactly once: as a stop or inside exactly one sub-tour.
    for i in 0..n {
        let count = usize::from(on_tour[i]) + seen_in_subtour[i];
        if count == 0 {
            push(ViolationKind::Coverage, format!("target {i} is never visited"));
        } else if count > 1 {
            push(ViolationKind::Coverage, format!("target {i} is visited {count} times"));
        }
    }

    let c = cost_breakdown(inst, sol);
    for (name, have, want) in [
        ("gv_cost", sol.gv_cost, c.gv),
        ("uav_cost", sol.uav_cost, c.uav),
        ("penalty_cost", sol.penalty_cost, c.penalty),
        ("objective", sol.objective, c.total()),
    ] {
        if (have - want).abs() > COST_TOL * want.abs().max(1.0) {
            push(ViolationKind::Cost, format!("{name} is {have}, recomputed {want}"));
        }
    }
    out
}

fn check_integral(name: &str, v: &[f64]) -> Result<()> {
    if let Some((i, x)) = v
        .iter()
        .enumerate()
        .find(|(_, &x)| (x - x.round()).abs() > INTEGRALITY_TOL || !(-INTEGRALITY_TOL..=1.0 + INTEGRALITY_TOL).contains(&x))
    {
        return Err(Error::Contract(format!("{name}[{i}] = {x} is not 0/1")));
    }
    Ok(())
}

fn on(v: f64) -> bool {
    v > 0.5
}

/// Structure read off an integral point, without any feasibility checks.
struct RawStructure {
    stop: Vec<bool>,
    assignment: Vec<Option<usize>>,
    /// Neighbours of each vertex in the ground edge set.
    ground_adj: Vec<Vec<usize>>,
    /// Successor of each target on its UAV cycle.
    succ: Vec<Option<usize>>,
}

fn read_structure(n: usize, x: &[f64], w: &[f64], y: &[f64]) -> Result<RawStructure> {
    let sp = VariableSpace::new(n);
    if x.len() != sp.num_edges() || w.len() != n * n || y.len() != n * n {
        return Err(Error::Contract("vector lengths do not match instance size".into()));
    }
    check_integral("x", x)?;
    check_integral("w", w)?;
    check_integral("y", y)?;
    let stop = (0..n).map(|i| on(y[i * n + i])).collect();
    let mut assignment = vec![None; n];
    for i in 0..n {
        let chosen: Vec<usize> = (0..n).filter(|&k| on(y[i * n + k])).collect();
        if chosen.len() > 1 {
            return Err(Error::InfeasibleDecode(format!(
                "target {i} assigned to several stops {chosen:?}"
            )));
        }
        assignment[i] = chosen.first().copied();
    }
    let mut ground_adj = vec![Vec::new(); n];
    for (e, &v) in x.iter().enumerate() {
        if on(v) {
            let (i, j) = sp.edge_endpoints(e);
            ground_adj[i].push(j);
            ground_adj[j].push(i);
        }
    }
    let mut succ = vec![None; n];
    for i in 0..n {
        let outs: Vec<usize> = (0..n).filter(|&j| on(w[i * n + j])).collect();
        if outs.len() > 1 {
            return Err(Error::InfeasibleDecode(format!("target {i} has several UAV successors")));
        }
        succ[i] = outs.first().copied();
    }
    Ok(RawStructure {
        stop,
        assignment,
        ground_adj,
        succ,
    })
}

/// Walks ground edges from `start`; returns the visited cycle.
fn walk_ground(adj: &[Vec<usize>], start: usize) -> Vec<usize> {
    let mut tour = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = adj[cur].iter().copied().find(|&j| j != prev && j != cur);
        match next {
            Some(j) if j != start && !tour.contains(&j) => {
                tour.push(j);
                prev = cur;
                cur = j;
            }
            _ => break,
        }
    }
    tour
}

/// Splits the successor map into cycles; each cycle starts at its smallest
/// vertex. Targets without a successor are skipped.
fn uav_cycles(succ: &[Option<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut path = vec![s];
        let mut pos = vec![usize::MAX; n];
        pos[s] = 0;
        let mut cur = s;
        let cycle = loop {
            match succ[cur] {
                Some(j) if !seen[j] && pos[j] == usize::MAX => {
                    pos[j] = path.len();
                    path.push(j);
                    cur = j;
                }
                Some(j) if pos[j] != usize::MAX => break Some(path[pos[j]..].to_vec()),
                _ => break None,
            }
        };
        for &v in &path {
            seen[v] = true;
        }
        if let Some(c) = cycle {
            cycles.push(c);
        }
    }
    cycles
}

/// Turns a CAGVRP-feasible integral point into a [`Solution`].
///
/// `x` is indexed by edge, `w` and `y` are row-major `n x n`. Costs are
/// recomputed from the instance.
pub fn decode(inst: &Instance, x: &[f64], w: &[f64], y: &[f64]) -> Result<Solution> {
    let n = inst.n();
    let raw = read_structure(n, x, w, y)?;
    let depot = inst.depot();
    if !raw.stop[depot] {
        return Err(Error::InfeasibleDecode("depot is not a stop".into()));
    }
    for i in 0..n {
        let deg = raw.ground_adj[i].len();
        let want = if raw.stop[i] { 2 } else { 0 };
        if deg != want {
            return Err(Error::InfeasibleDecode(format!(
                "target {i} has ground degree {deg}, expected {want}"
            )));
        }
    }
    let tour = walk_ground(&raw.ground_adj, depot);
    let n_stops = raw.stop.iter().filter(|&&s| s).count();
    if tour.len() != n_stops {
        return Err(Error::InfeasibleDecode(format!(
            "ground edges are disconnected: depot cycle covers {} of {n_stops} stops",
            tour.len()
        )));
    }
    if tour.len() < 3 {
        return Err(Error::InfeasibleDecode("ground tour has fewer than 3 stops".into()));
    }
    let mut assignment = vec![0; n];
    for i in 0..n {
        let k = raw.assignment[i]
            .ok_or_else(|| Error::InfeasibleDecode(format!("target {i} is unassigned")))?;
        if !raw.stop[k] {
            return Err(Error::InfeasibleDecode(format!(
                "target {i} assigned to non-stop {k}"
            )));
        }
        assignment[i] = k;
    }
    if let Some(i) = raw.succ.iter().position(Option::is_none) {
        return Err(Error::InfeasibleDecode(format!("target {i} has no UAV successor")));
    }
    let mut subtours = BTreeMap::new();
    for cycle in uav_cycles(&raw.succ) {
        let stops: Vec<usize> = cycle.iter().copied().filter(|&v| raw.stop[v]).collect();
        if cycle.len() == 1 {
            if stops.is_empty() {
                return Err(Error::InfeasibleDecode(format!(
                    "target {} loops on itself without being a stop",
                    cycle[0]
                )));
            }
            continue;
        }
        let &[k] = stops.as_slice() else {
            return Err(Error::InfeasibleDecode(format!(
                "UAV cycle {cycle:?} passes through {} stops",
                stops.len()
            )));
        };
        if let Some(&i) = cycle.iter().find(|&&i| assignment[i] != k) {
            return Err(Error::InfeasibleDecode(format!(
                "target {i} flown from stop {k} but assigned to {}",
                assignment[i]
            )));
        }
        subtours.insert(k, rotate_to(&cycle, k));
    }
    if raw.succ.len() != n || uav_cycles(&raw.succ).iter().map(Vec::len).sum::<usize>() != n {
        return Err(Error::InfeasibleDecode("UAV arcs do not form a cycle cover".into()));
    }
    Ok(Solution::from_structure(inst, tour, subtours, assignment))
}

/// Like [`decode`] but never rejects a structure: the result may violate any
/// CAGVRP condition and is meant to be handed to [`validate`].
///
/// Only non-integral input is an error.
pub fn decode_lenient(inst: &Instance, x: &[f64], w: &[f64], y: &[f64]) -> Result<Solution> {
    let n = inst.n();
    let raw = read_structure(n, x, w, y)?;
    let tour = walk_ground(&raw.ground_adj, inst.depot());
    let assignment = (0..n).map(|i| raw.assignment[i].unwrap_or(i)).collect::<Vec<_>>();
    let mut subtours = BTreeMap::new();
    for cycle in uav_cycles(&raw.succ) {
        if cycle.len() == 1 {
            continue;
        }
        let stops: Vec<usize> = cycle.iter().copied().filter(|&v| raw.stop[v]).collect();
        let key = match stops.as_slice() {
            &[k] => k,
            _ => cycle[0],
        };
        subtours.insert(key, rotate_to(&cycle, key));
    }
    Ok(Solution::from_structure(inst, tour, subtours, assignment))
}

/// [`decode`] on a full point laid out by `space`.
pub fn decode_point(inst: &Instance, space: &VariableSpace, point: &[f64]) -> Result<Solution> {
    decode(
        inst,
        &point[space.x_range()],
        &point[space.w_range()],
        &point[space.y_range()],
    )
}

fn rotate_to(cycle: &[usize], start: usize) -> Vec<usize> {
    let p = cycle.iter().position(|&v| v == start).unwrap_or(0);
    cycle[p..].iter().chain(&cycle[..p]).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::encode;

    fn tri() -> Instance {
        Instance::euclidean("tri", vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]], 0, 0.1, 50.0)
            .unwrap()
    }

    fn square_center(alpha: f64, radius: f64) -> Instance {
        let pts = vec![[0.0, 0.0], [20.0, 0.0], [20.0, 20.0], [0.0, 20.0], [10.0, 10.0]];
        Instance::euclidean("sq", pts, 0, alpha, radius).unwrap()
    }

    fn split(inst: &Instance, v: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let sp = VariableSpace::new(inst.n());
        (
            v[sp.x_range()].to_vec(),
            v[sp.w_range()].to_vec(),
            v[sp.y_range()].to_vec(),
        )
    }

    #[test]
    fn triangle_perimeter() {
        let inst = tri();
        let sol = Solution::from_structure(&inst, vec![0, 1, 2], BTreeMap::new(), vec![0, 1, 2]);
        assert!((objective_of(&inst, &sol) - (20.0 + 200f64.sqrt())).abs() < 1e-9);
        assert!(validate(&inst, &sol).is_empty());
    }

    #[test]
    fn out_and_back_flight_cost() {
        let inst = Instance::euclidean(
            "tri+",
            vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [5.0, 5.0]],
            0,
            0.1,
            50.0,
        )
        .unwrap();
        let base = Solution::from_structure(&inst, vec![0, 1, 2], BTreeMap::new(), vec![0, 1, 2, 3]);
        let mut sub = BTreeMap::new();
        sub.insert(0, vec![0, 3]);
        let with = Solution::from_structure(&inst, vec![0, 1, 2], sub, vec![0, 1, 2, 0]);
        assert!((with.objective - base.objective - 0.1 * 2.0 * 50f64.sqrt()).abs() < 1e-9);
        assert!(validate(&inst, &with).is_empty());
        assert!((base.objective - (20.0 + 200f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn decode_all_stops() {
        let inst = tri();
        let n = 3;
        let x = vec![1.0; 3];
        let mut w = vec![0.0; 9];
        let mut y = vec![0.0; 9];
        for i in 0..n {
            w[i * n + i] = 1.0;
            y[i * n + i] = 1.0;
        }
        let sol = decode(&inst, &x, &w, &y).unwrap();
        assert_eq!(sol.tour, vec![0, 1, 2]);
        assert!(sol.subtours.is_empty());
        assert_eq!(sol.uav_cost, 0.0);
    }

    #[test]
    fn decode_one_flight() {
        let inst = Instance::euclidean(
            "four",
            vec![[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [12.0, 3.0]],
            0,
            0.2,
            50.0,
        )
        .unwrap();
        let mut sub = BTreeMap::new();
        sub.insert(1, vec![1, 3]);
        let sol = Solution::from_structure(&inst, vec![0, 1, 2], sub, vec![0, 1, 2, 1]);
        let sp = VariableSpace::new(4);
        let v = encode(&sp, &sol);
        let (x, w, y) = split(&inst, &v);
        let back = decode(&inst, &x, &w, &y).unwrap();
        assert_eq!(back.subtours.get(&1), Some(&vec![1, 3]));
        assert_eq!(back.assignment[3], 1);
        assert!((back.uav_cost - (inst.uav_cost(1, 3) + inst.uav_cost(3, 1))).abs() < 1e-12);
    }

    /// Two disjoint ground cycles and a UAV cycle that touches no stop.
    fn disjoint_point(inst: &Instance) -> Vec<f64> {
        let n = inst.n();
        let sp = VariableSpace::new(n);
        let mut v = vec![0.0; sp.len()];
        for (i, j) in [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)] {
            v[sp.x(i, j)] = 1.0;
        }
        for i in 0..6 {
            v[sp.y(i, i)] = 1.0;
            v[sp.w(i, i)] = 1.0;
        }
        v[sp.y(6, 0)] = 1.0;
        v[sp.y(7, 0)] = 1.0;
        v[sp.w(6, 7)] = 1.0;
        v[sp.w(7, 6)] = 1.0;
        v
    }

    fn eight_points() -> Instance {
        let pts = (0..8).map(|i| [10.0 * i as f64, (i % 3) as f64 * 7.0]).collect();
        Instance::euclidean("eight", pts, 0, 0.1, 500.0).unwrap()
    }

    #[test]
    fn disjoint_ground_cycles_do_not_decode() {
        let inst = eight_points();
        let v = disjoint_point(&inst);
        let (x, w, y) = split(&inst, &v);
        assert!(matches!(decode(&inst, &x, &w, &y), Err(Error::InfeasibleDecode(_))));
        let lenient = decode_lenient(&inst, &x, &w, &y).unwrap();
        let report = validate(&inst, &lenient);
        assert!(report.iter().any(|v| v.kind == ViolationKind::Coverage));
        assert!(report.iter().any(|v| v.kind == ViolationKind::DetachedSubTour));
    }

    #[test]
    fn non_integral_is_a_contract_violation() {
        let inst = tri();
        let x = vec![0.5; 3];
        let w = vec![0.0; 9];
        let y = vec![0.0; 9];
        assert!(matches!(decode(&inst, &x, &w, &y), Err(Error::Contract(_))));
    }

    #[test]
    fn comm_radius_violation_is_reported() {
        // target 4 sits at distance 11 from stop 0 while the radius is 10
        let pts = vec![[0.0, 0.0], [5.0, 0.0], [0.0, 5.0], [5.0, 5.0], [-11.0, 0.0]];
        let inst = Instance::euclidean("far", pts, 0, 0.1, 10.0).unwrap();
        let mut sub = BTreeMap::new();
        sub.insert(0, vec![0, 4]);
        let sol = Solution::from_structure(&inst, vec![0, 1, 3, 2], sub, vec![0, 1, 2, 3, 0]);
        let report = validate(&inst, &sol);
        let comm: Vec<_> = report.iter().filter(|v| v.kind == ViolationKind::CommRadius).collect();
        assert_eq!(comm.len(), 1);
        assert!(comm[0].message.contains("target 4") && comm[0].message.contains("stop 0"));
    }

    #[test]
    fn detached_cycle_is_reported() {
        let inst = square_center(0.1, 30.0);
        let mut sub = BTreeMap::new();
        sub.insert(4, vec![4, 3]);
        let sol = Solution::from_structure(&inst, vec![0, 1, 2], sub, vec![0, 1, 2, 4, 4]);
        let report = validate(&inst, &sol);
        assert!(report.iter().any(|v| v.kind == ViolationKind::DetachedSubTour));
    }

    #[test]
    fn dropped_target_is_a_coverage_violation() {
        let inst = square_center(0.1, 30.0);
        let sol = Solution::from_structure(&inst, vec![0, 1, 2, 3], BTreeMap::new(), vec![0, 1, 2, 3, 4]);
        let report = validate(&inst, &sol);
        assert!(report.iter().any(|v| v.kind == ViolationKind::Coverage));
    }

    #[test]
    fn uav_loop_from_the_depot_is_valid() {
        let inst = square_center(0.1, 30.0);
        let mut sub = BTreeMap::new();
        sub.insert(0, vec![0, 4]);
        let sol = Solution::from_structure(&inst, vec![0, 1, 2, 3], sub, vec![0, 1, 2, 3, 0]);
        assert!(validate(&inst, &sol).is_empty());
        let sp = VariableSpace::new(5);
        let v = encode(&sp, &sol);
        let back = decode_point(&inst, &sp, &v).unwrap();
        assert_eq!(back.tour, sol.tour);
        assert_eq!(back.subtours, sol.subtours);
        assert_eq!(back.assignment, sol.assignment);
    }

    #[test]
    fn wrong_cost_field_is_reported() {
        let inst = tri();
        let mut sol = Solution::from_structure(&inst, vec![0, 1, 2], BTreeMap::new(), vec![0, 1, 2]);
        sol.objective += 1.0;
        let report = validate(&inst, &sol);
        assert_eq!(report.len(), 1);
        assert_eq!(report[0].kind, ViolationKind::Cost);
    }

    #[test]
    fn solution_file_round_trip() {
        let inst = square_center(0.1, 30.0);
        let mut sub = BTreeMap::new();
        sub.insert(0, vec![0, 4]);
        let sol = Solution::from_structure(&inst, vec![0, 1, 2, 3], sub, vec![0, 1, 2, 3, 0]);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sol.json");
        sol.save(&path).unwrap();
        assert_eq!(Solution::load(&path).unwrap(), sol);
    }
}
