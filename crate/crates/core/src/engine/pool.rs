use std::collections::HashMap;

use log::warn;

use crate::lp::{MappedRow, Presolve, Simplex};
use crate::row::{LinearRow, RowKey, Sense};
use crate::separation::Cut;

/// Solves in a row with slack above `IDLE_SLACK` before a cut is shelved.
const IDLE_SOLVES: usize = 20;
const IDLE_SLACK: f64 = 0.5;

struct Entry {
    cut: Cut,
    /// The row over the presolved columns; `None` when it is implied by
    /// fixed columns.
    mapped: Option<LinearRow>,
    /// Row index in the LP while active.
    row: Option<usize>,
    idle: usize,
}

pub(crate) enum Insert {
    New { active: bool },
    Reactivated,
    AlreadyActive,
}

/// Global pool of generated cuts. Cuts are never deleted; long-slack ones
/// are shelved out of the LP and brought back when violated again.
pub struct CutPool {
    entries: Vec<Entry>,
    index: HashMap<RowKey, usize>,
    /// Pool entry owning each LP row past the static ones.
    owners: Vec<usize>,
    base_rows: usize,
}

impl CutPool {
    pub fn new(base_rows: usize) -> Self {
        CutPool {
            entries: Vec::new(),
            index: HashMap::new(),
            owners: Vec::new(),
            base_rows,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn active(&self) -> usize {
        self.owners.len()
    }

    pub fn cuts(&self) -> impl Iterator<Item = &Cut> {
        self.entries.iter().map(|e| &e.cut)
    }

    pub fn into_cuts(self) -> Vec<Cut> {
        self.entries.into_iter().map(|e| e.cut).collect()
    }

    fn activate(&mut self, k: usize, lp: &mut Simplex) -> bool {
        let Some(row) = self.entries[k].mapped.clone() else {
            return false;
        };
        lp.add_rows(std::slice::from_ref(&row));
        let idx = lp.num_rows() - 1;
        debug_assert_eq!(idx, self.base_rows + self.owners.len());
        self.owners.push(k);
        self.entries[k].row = Some(idx);
        self.entries[k].idle = 0;
        true
    }

    pub(crate) fn insert(&mut self, cut: Cut, pre: &Presolve, lp: &mut Simplex) -> Insert {
        let key = cut.row.canonical_key();
        if let Some(&k) = self.index.get(&key) {
            if self.entries[k].row.is_none() && self.activate(k, lp) {
                return Insert::Reactivated;
            }
            return Insert::AlreadyActive;
        }
        let mapped = match pre.map_row(&cut.row) {
            MappedRow::Row(r) => Some(r),
            MappedRow::Satisfied => None,
            MappedRow::Infeasible => {
                warn!("cut {} is violated by presolve-fixed columns", cut.log_line());
                None
            }
        };
        let k = self.entries.len();
        self.entries.push(Entry {
            cut,
            mapped,
            row: None,
            idle: 0,
        });
        self.index.insert(key, k);
        let active = self.activate(k, lp);
        Insert::New { active }
    }

    /// Updates idle counters from the slack of active cuts at `point`.
    pub fn age(&mut self, point: &[f64]) {
        for &k in &self.owners {
            let e = &mut self.entries[k];
            let act = e.cut.row.activity(point);
            let slack = match e.cut.row.sense {
                Sense::Ge => act - e.cut.row.rhs,
                Sense::Le => e.cut.row.rhs - act,
                Sense::Eq => 0.0,
            };
            if slack > IDLE_SLACK {
                e.idle += 1;
            } else {
                e.idle = 0;
            }
        }
    }

    /// Takes long-idle cuts out of the LP. Returns how many left.
    pub fn shelve_inactive(&mut self, lp: &mut Simplex) -> usize {
        let rows: Vec<usize> = self
            .owners
            .iter()
            .enumerate()
            .filter(|(_, &k)| self.entries[k].idle >= IDLE_SOLVES)
            .map(|(p, _)| self.base_rows + p)
            .collect();
        if rows.is_empty() {
            return 0;
        }
        let removed = lp.remove_rows(&rows);
        if removed.is_empty() {
            return 0;
        }
        let mut gone = vec![false; self.owners.len()];
        for &r in &removed {
            gone[r - self.base_rows] = true;
        }
        let mut kept = Vec::with_capacity(self.owners.len());
        for (p, &k) in self.owners.iter().enumerate() {
            if gone[p] {
                self.entries[k].row = None;
                self.entries[k].idle = 0;
            } else {
                self.entries[k].row = Some(self.base_rows + kept.len());
                kept.push(k);
            }
        }
        self.owners = kept;
        removed.len()
    }

    /// Puts shelved cuts violated at `point` back into the LP.
    pub fn reactivate_violated(&mut self, point: &[f64], tol: f64, lp: &mut Simplex) -> usize {
        let mut count = 0;
        for k in 0..self.entries.len() {
            let e = &self.entries[k];
            if e.row.is_none() && e.mapped.is_some() && e.cut.row.violation(point) > tol && self.activate(k, lp) {
                count += 1;
            }
        }
        count
    }
}
