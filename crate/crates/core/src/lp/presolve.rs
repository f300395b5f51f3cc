//! Light presolve: fixed-variable substitution, singleton rows turned into
//! bounds, redundant and duplicate rows dropped.

use std::collections::HashSet;

use super::LpProblem;
use crate::row::{LinearRow, Sense};

const TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Presolve {
    /// Problem over the surviving columns.
    pub reduced: LpProblem,
    /// Original index of each reduced column.
    pub col_map: Vec<usize>,
    pub orig_to_reduced: Vec<Option<usize>>,
    /// Value of every removed column, `NaN` for surviving ones.
    pub fixed_value: Vec<f64>,
    /// Tightened bounds in original indexing.
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Objective contribution of the removed columns.
    pub objective_offset: f64,
    /// Reason, when presolve proved the problem infeasible.
    pub infeasible: Option<String>,
}

/// A row expressed over the reduced columns.
#[derive(Clone, Debug, PartialEq)]
pub enum MappedRow {
    Row(LinearRow),
    /// All variables fixed and the row holds.
    Satisfied,
    /// All variables fixed and the row is violated.
    Infeasible,
}

fn sense_holds(sense: Sense, lhs: f64, rhs: f64) -> bool {
    match sense {
        Sense::Le => lhs <= rhs + TOL,
        Sense::Ge => lhs >= rhs - TOL,
        Sense::Eq => (lhs - rhs).abs() <= TOL,
    }
}

impl Presolve {
    pub fn new(problem: &LpProblem) -> Self {
        let n = problem.num_vars;
        let mut lo = problem.lower.clone();
        let mut hi = problem.upper.clone();
        let mut active = vec![true; problem.rows.len()];
        let mut infeasible = None;

        let fixed = |lo: &[f64], hi: &[f64], j: usize| lo[j] == hi[j];

        let mut changed = true;
        while changed && infeasible.is_none() {
            changed = false;
            for (i, row) in problem.rows.iter().enumerate() {
                if !active[i] {
                    continue;
                }
                let mut rhs = row.rhs;
                let mut terms = Vec::new();
                for &(j, a) in row.coefs() {
                    if fixed(&lo, &hi, j) {
                        rhs -= a * lo[j];
                    } else {
                        terms.push((j, a));
                    }
                }
                if terms.is_empty() {
                    if !sense_holds(row.sense, 0.0, rhs) {
                        infeasible = Some(format!("row {i} ({}) is violated by fixed variables", row.tag));
                        break;
                    }
                    active[i] = false;
                    continue;
                }
                if terms.len() == 1 {
                    let (j, a) = terms[0];
                    let v = rhs / a;
                    let (upper, lower) = match (row.sense, a > 0.0) {
                        (Sense::Le, true) | (Sense::Ge, false) => (Some(v), None),
                        (Sense::Le, false) | (Sense::Ge, true) => (None, Some(v)),
                        (Sense::Eq, _) => (Some(v), Some(v)),
                    };
                    if let Some(u) = upper {
                        if u < hi[j] - TOL {
                            hi[j] = u;
                        }
                    }
                    if let Some(l) = lower {
                        if l > lo[j] + TOL {
                            lo[j] = l;
                        }
                    }
                    if lo[j] > hi[j] + TOL {
                        infeasible = Some(format!("row {i} ({}) empties the domain of variable {j}", row.tag));
                        break;
                    }
                    if lo[j] > hi[j] - TOL {
                        // collapse near-equal bounds onto the one that was already there
                        let keep = if problem.lower[j] == lo[j] || problem.upper[j] != hi[j] {
                            lo[j]
                        } else {
                            hi[j]
                        };
                        lo[j] = keep;
                        hi[j] = keep;
                    }
                    active[i] = false;
                    changed = true;
                    continue;
                }
                let (mut min_act, mut max_act) = (0.0, 0.0);
                for &(j, a) in &terms {
                    if a > 0.0 {
                        min_act += a * lo[j];
                        max_act += a * hi[j];
                    } else {
                        min_act += a * hi[j];
                        max_act += a * lo[j];
                    }
                }
                let (can_fail_low, can_fail_high) = match row.sense {
                    Sense::Le => (false, true),
                    Sense::Ge => (true, false),
                    Sense::Eq => (true, true),
                };
                if (can_fail_high && min_act > rhs + TOL) || (can_fail_low && max_act < rhs - TOL) {
                    infeasible = Some(format!("row {i} ({}) cannot be satisfied within bounds", row.tag));
                    break;
                }
                let high_ok = !can_fail_high || max_act <= rhs + TOL;
                let low_ok = !can_fail_low || min_act >= rhs - TOL;
                if high_ok && low_ok {
                    active[i] = false;
                    changed = true;
                }
            }
        }

        let mut col_map = Vec::new();
        let mut orig_to_reduced = vec![None; n];
        let mut fixed_value = vec![f64::NAN; n];
        let mut objective_offset = 0.0;
        for j in 0..n {
            if lo[j] == hi[j] {
                fixed_value[j] = lo[j];
                objective_offset += problem.objective[j] * lo[j];
            } else {
                orig_to_reduced[j] = Some(col_map.len());
                col_map.push(j);
            }
        }
        let mut reduced = LpProblem::new(col_map.len());
        for (r, &j) in col_map.iter().enumerate() {
            reduced.objective[r] = problem.objective[j];
            reduced.lower[r] = lo[j];
            reduced.upper[r] = hi[j];
        }
        let mut pre = Presolve {
            reduced,
            col_map,
            orig_to_reduced,
            fixed_value,
            lower: lo,
            upper: hi,
            objective_offset,
            infeasible,
        };
        if pre.infeasible.is_some() {
            return pre;
        }
        let mut seen = HashSet::new();
        for (i, row) in problem.rows.iter().enumerate() {
            if !active[i] {
                continue;
            }
            match pre.map_row(row) {
                MappedRow::Row(r) => {
                    if seen.insert(r.canonical_key()) {
                        pre.reduced.rows.push(r);
                    }
                }
                MappedRow::Satisfied => {}
                MappedRow::Infeasible => {
                    pre.infeasible = Some(format!("row {i} is violated by fixed variables"));
                    return pre;
                }
            }
        }
        pre
    }

    /// Rewrites `row` over the reduced columns, substituting removed ones.
    pub fn map_row(&self, row: &LinearRow) -> MappedRow {
        let mut rhs = row.rhs;
        let mut terms = Vec::with_capacity(row.len());
        for &(j, a) in row.coefs() {
            match self.orig_to_reduced[j] {
                Some(r) => terms.push((r, a)),
                None => rhs -= a * self.fixed_value[j],
            }
        }
        if terms.is_empty() {
            return if sense_holds(row.sense, 0.0, rhs) {
                MappedRow::Satisfied
            } else {
                MappedRow::Infeasible
            };
        }
        MappedRow::Row(LinearRow::new(terms, row.sense, rhs, row.tag))
    }

    /// Expands a reduced point to the original columns.
    pub fn postsolve(&self, reduced_x: &[f64]) -> Vec<f64> {
        let mut x = self.fixed_value.clone();
        for (r, &j) in self.col_map.iter().enumerate() {
            x[j] = reduced_x[r];
        }
        x
    }

    /// Restricts an original-index point to the reduced columns.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.col_map.iter().map(|&j| x[j]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::row::RowTag;

    #[test]
    fn singleton_row_becomes_bound() {
        let mut p = LpProblem::new(2);
        p.upper = vec![1.0, 1.0];
        p.rows.push(LinearRow::new([(0, 2.0)], Sense::Le, 1.0, RowTag::Other));
        p.rows.push(LinearRow::new([(0, 1.0), (1, 1.0)], Sense::Ge, 1.0, RowTag::Other));
        let pre = Presolve::new(&p);
        assert!(pre.infeasible.is_none());
        assert_eq!(pre.upper[0], 0.5);
        assert_eq!(pre.reduced.rows.len(), 1);
    }

    #[test]
    fn fixed_variables_cascade() {
        // y fixed to 0 forces z <= y to fix z, which empties z + w >= 1 to w >= 1.
        let mut p = LpProblem::new(3);
        p.upper = vec![0.0, 1.0, 1.0];
        p.rows.push(LinearRow::new([(1, 1.0), (0, -1.0)], Sense::Le, 0.0, RowTag::Other));
        p.rows.push(LinearRow::new([(1, 1.0), (2, 1.0)], Sense::Ge, 1.0, RowTag::Other));
        let pre = Presolve::new(&p);
        assert_eq!(pre.col_map, Vec::<usize>::new());
        assert_eq!(pre.postsolve(&[]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn contradiction_is_reported() {
        let mut p = LpProblem::new(1);
        p.upper = vec![1.0];
        p.rows.push(LinearRow::new([(0, 1.0)], Sense::Ge, 2.0, RowTag::Other));
        assert!(Presolve::new(&p).infeasible.is_some());
    }

    #[test]
    fn map_row_substitutes_fixed_columns() {
        let mut p = LpProblem::new(3);
        p.lower = vec![1.0, 0.0, 0.0];
        p.upper = vec![1.0, 1.0, 1.0];
        let pre = Presolve::new(&p);
        let r = LinearRow::new([(0, 1.0), (2, 1.0)], Sense::Le, 1.5, RowTag::SecX);
        match pre.map_row(&r) {
            MappedRow::Row(m) => {
                assert_eq!(m.coefs(), &[(1, 1.0)]);
                assert!((m.rhs - 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        let r = LinearRow::new([(0, 1.0)], Sense::Ge, 2.0, RowTag::SecX);
        assert_eq!(pre.map_row(&r), MappedRow::Infeasible);
    }
}
