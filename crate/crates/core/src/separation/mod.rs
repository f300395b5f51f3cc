//! Separation of the exponential row families: ground subtour elimination
//! (`sec-x`), UAV connectivity (`sec-w-out`, `sec-w-in`) and 2-matching
//! inequalities.
//!
//! Every routine takes a point over the full variable space and returns
//! rows it violates by more than the separation tolerance.

mod flow;
mod support;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use flow::{MinCut, Network};
pub use support::SupportGraph;

use crate::model::VariableSpace;
use crate::row::{LinearRow, RowTag, Sense};

pub const SEPARATION_TOL: f64 = 1e-4;
/// Values at or below this are treated as absent from support graphs.
pub const SUPPORT_EPS: f64 = 1e-6;
/// SEC-x rows emitted per candidate set.
const SEC_X_PER_SET: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CutKind {
    SecX,
    SecWOut,
    SecWIn,
    TwoMatching,
}

impl CutKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CutKind::SecX => "sec-x",
            CutKind::SecWOut => "sec-w-out",
            CutKind::SecWIn => "sec-w-in",
            CutKind::TwoMatching => "two-matching",
        }
    }

    pub fn is_sec(self) -> bool {
        !matches!(self, CutKind::TwoMatching)
    }

    fn tag(self) -> RowTag {
        match self {
            CutKind::SecX => RowTag::SecX,
            CutKind::SecWOut => RowTag::SecWOut,
            CutKind::SecWIn => RowTag::SecWIn,
            CutKind::TwoMatching => RowTag::TwoMatching,
        }
    }
}

impl fmt::Display for CutKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cut {
    pub kind: CutKind,
    /// `S` for subtour rows, the handle `H` for 2-matching rows.
    pub set: Vec<usize>,
    /// The target `i` of a subtour row.
    pub target: Option<usize>,
    /// Teeth of a 2-matching row as `(inside, outside)` endpoint pairs.
    pub teeth: Vec<(usize, usize)>,
    pub row: LinearRow,
    /// Amount by which the separating point violates `row`.
    pub violation: f64,
}

impl Cut {
    /// `|S|`, or `|H|` for 2-matching rows.
    pub fn size(&self) -> usize {
        self.set.len()
    }

    /// One cut-log line.
    pub fn log_line(&self) -> String {
        match self.kind {
            CutKind::TwoMatching => format!(
                "cut {} {}/{} {:.6}",
                self.kind,
                self.set.len(),
                self.teeth.len(),
                self.violation
            ),
            _ => format!("cut {} {} {:.6}", self.kind, self.set.len(), self.violation),
        }
    }
}

/// `sum_{e in delta(S)} x_e - 2 sum_{j in S} y_ij >= 0`.
pub fn sec_x_row(sp: &VariableSpace, set: &[usize], i: usize) -> LinearRow {
    let inside = membership(sp.n(), set);
    let mut terms = Vec::new();
    for &a in set {
        for b in 0..sp.n() {
            if !inside[b] {
                terms.push((sp.x(a, b), 1.0));
            }
        }
        terms.push((sp.y(i, a), -2.0));
    }
    LinearRow::new(terms, Sense::Ge, 0.0, RowTag::SecX)
}

/// `sum_{(u,v) in delta+(S)} w_uv + sum_{j in S} y_ij >= 1`.
pub fn sec_w_out_row(sp: &VariableSpace, set: &[usize], i: usize) -> LinearRow {
    sec_w_row(sp, set, i, true)
}

/// `sum_{(u,v) in delta-(S)} w_uv + sum_{j in S} y_ij >= 1`.
pub fn sec_w_in_row(sp: &VariableSpace, set: &[usize], i: usize) -> LinearRow {
    sec_w_row(sp, set, i, false)
}

fn sec_w_row(sp: &VariableSpace, set: &[usize], i: usize, out: bool) -> LinearRow {
    let inside = membership(sp.n(), set);
    let mut terms = Vec::new();
    for &a in set {
        for b in 0..sp.n() {
            if !inside[b] {
                let var = if out { sp.w(a, b) } else { sp.w(b, a) };
                terms.push((var, 1.0));
            }
        }
        terms.push((sp.y(i, a), 1.0));
    }
    let tag = if out { RowTag::SecWOut } else { RowTag::SecWIn };
    LinearRow::new(terms, Sense::Ge, 1.0, tag)
}

/// `sum_{gamma(H)} x + sum_{e in I} x_e - sum_{i in H} y_ii <= (|I| - 1) / 2`.
pub fn two_matching_row(sp: &VariableSpace, handle: &[usize], teeth: &[(usize, usize)]) -> LinearRow {
    let mut terms = Vec::new();
    for (k, &a) in handle.iter().enumerate() {
        for &b in &handle[k + 1..] {
            terms.push((sp.x(a, b), 1.0));
        }
        terms.push((sp.y(a, a), -1.0));
    }
    for &(a, b) in teeth {
        terms.push((sp.x(a, b), 1.0));
    }
    let rhs = (teeth.len() as f64 - 1.0) / 2.0;
    LinearRow::new(terms, Sense::Le, rhs, RowTag::TwoMatching)
}

fn membership(n: usize, set: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; n];
    for &v in set {
        inside[v] = true;
    }
    inside
}

/// Separation routines bound to a variable layout and depot.
#[derive(Clone, Debug)]
pub struct Separator<'a> {
    space: &'a VariableSpace,
    depot: usize,
    pub tol: f64,
}

impl<'a> Separator<'a> {
    pub fn new(space: &'a VariableSpace, depot: usize) -> Self {
        Separator {
            space,
            depot,
            tol: SEPARATION_TOL,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn make_cut(
        &self,
        kind: CutKind,
        set: Vec<usize>,
        target: Option<usize>,
        teeth: Vec<(usize, usize)>,
        row: LinearRow,
        point: &[f64],
    ) -> Cut {
        debug_assert_eq!(row.tag, kind.tag());
        let violation = row.violation(point);
        Cut {
            kind,
            set,
            target,
            teeth,
            row,
            violation,
        }
    }

    /// Ground subtour elimination rows.
    pub fn sec_x(&self, point: &[f64]) -> Vec<Cut> {
        let sp = self.space;
        let n = sp.n();
        let g = SupportGraph::undirected(sp, self.depot, point);
        let comps = g.components();
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        if comps.len() > 1 {
            candidates.extend(comps.into_iter().filter(|c| !c.contains(&self.depot)));
        } else {
            let net = g.network();
            let in_graph = membership(n, g.vertices());
            let mut seen = HashSet::new();
            for &v in g.vertices() {
                if v == self.depot {
                    continue;
                }
                let cut = net.min_cut(self.depot, v);
                if cut.value >= 2.0 - self.tol {
                    continue;
                }
                let set: Vec<usize> = (0..n).filter(|&u| in_graph[u] && !cut.source_side[u]).collect();
                if seen.insert(set.clone()) {
                    candidates.push(set);
                }
            }
        }

        let mut cuts = Vec::new();
        let mut keys = HashSet::new();
        for set in candidates {
            let inside = membership(n, &set);
            let boundary: f64 = set
                .iter()
                .flat_map(|&a| (0..n).filter(|&b| !inside[b]).map(move |b| (a, b)))
                .map(|(a, b)| point[sp.x(a, b)])
                .sum();
            let mut scored: Vec<(f64, usize)> = set
                .iter()
                .map(|&i| (set.iter().map(|&j| point[sp.y(i, j)]).sum::<f64>(), i))
                .filter(|&(ysum, _)| 2.0 * ysum - boundary > self.tol)
                .collect();
            scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            for &(_, i) in scored.iter().take(SEC_X_PER_SET) {
                let row = sec_x_row(sp, &set, i);
                if keys.insert(row.canonical_key()) {
                    cuts.push(self.make_cut(CutKind::SecX, set.clone(), Some(i), Vec::new(), row, point));
                }
            }
        }
        cuts
    }

    /// UAV connectivity rows, both orientations.
    pub fn sec_w(&self, point: &[f64]) -> Vec<Cut> {
        let sp = self.space;
        let n = sp.n();
        let g = SupportGraph::directed(sp, point);
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        let mut seen = HashSet::new();
        for c in g.components() {
            if c.len() < n && seen.insert(c.clone()) {
                candidates.push(c);
            }
        }
        for out in [true, false] {
            let mut net = Network::new(n + 1);
            for &(u, v, w) in g.edges() {
                if out {
                    net.add_arc(u, v, w);
                } else {
                    net.add_arc(v, u, w);
                }
            }
            for i in 0..n {
                let mut net = net.clone();
                for j in 0..n {
                    let y = point[sp.y(i, j)];
                    if y > 0.0 {
                        net.add_arc(j, n, y);
                    }
                }
                let cut = net.min_cut(i, n);
                if cut.value >= 1.0 - self.tol {
                    continue;
                }
                let set: Vec<usize> = (0..n).filter(|&u| cut.source_side[u]).collect();
                if set.len() < n && seen.insert(set.clone()) {
                    candidates.push(set);
                }
            }
        }

        let mut cuts = Vec::new();
        let mut keys = HashSet::new();
        for set in candidates {
            let inside = membership(n, &set);
            let (mut out_w, mut in_w) = (0.0, 0.0);
            for &a in &set {
                for b in (0..n).filter(|&b| !inside[b]) {
                    out_w += point[sp.w(a, b)];
                    in_w += point[sp.w(b, a)];
                }
            }
            for &i in &set {
                let ysum: f64 = set.iter().map(|&j| point[sp.y(i, j)]).sum();
                for (kind, lhs) in [(CutKind::SecWOut, out_w), (CutKind::SecWIn, in_w)] {
                    if 1.0 - ysum - lhs <= self.tol {
                        continue;
                    }
                    let row = if kind == CutKind::SecWOut {
                        sec_w_out_row(sp, &set, i)
                    } else {
                        sec_w_in_row(sp, &set, i)
                    };
                    if keys.insert(row.canonical_key()) {
                        cuts.push(self.make_cut(kind, set.clone(), Some(i), Vec::new(), row, point));
                    }
                }
            }
        }
        cuts
    }

    /// Heuristic 2-matching separation over the fractional-edge components.
    pub fn two_matching(&self, point: &[f64]) -> Vec<Cut> {
        let sp = self.space;
        let n = sp.n();
        let frac: Vec<(usize, usize)> = sp
            .x_range()
            .filter(|&e| point[e] > SUPPORT_EPS && point[e] < 1.0 - SUPPORT_EPS)
            .map(|e| sp.edge_endpoints(e))
            .collect();
        let mut cuts = Vec::new();
        let mut keys = HashSet::new();
        for handle in support::components_of(n, &frac) {
            let inside = membership(n, &handle);
            let mut used = vec![false; n];
            let mut teeth = Vec::new();
            for e in sp.x_range() {
                if point[e] < 1.0 - SUPPORT_EPS {
                    continue;
                }
                let (a, b) = sp.edge_endpoints(e);
                if inside[a] == inside[b] || used[a] || used[b] {
                    continue;
                }
                used[a] = true;
                used[b] = true;
                teeth.push(if inside[a] { (a, b) } else { (b, a) });
            }
            if teeth.len() < 3 || teeth.len() % 2 == 0 {
                continue;
            }
            let row = two_matching_row(sp, &handle, &teeth);
            if row.violation(point) > self.tol && keys.insert(row.canonical_key()) {
                cuts.push(self.make_cut(CutKind::TwoMatching, handle, None, teeth, row, point));
            }
        }
        cuts
    }

    /// Subtour rows violated at an integral point; empty exactly when the
    /// point encodes a feasible tour structure.
    pub fn check_integral(&self, point: &[f64]) -> Vec<Cut> {
        let mut cuts = self.sec_x(point);
        cuts.extend(self.sec_w(point));
        cuts
    }

    /// All three separators.
    pub fn separate(&self, point: &[f64]) -> Vec<Cut> {
        let mut cuts = self.sec_x(point);
        cuts.extend(self.sec_w(point));
        cuts.extend(self.two_matching(point));
        cuts
    }
}
