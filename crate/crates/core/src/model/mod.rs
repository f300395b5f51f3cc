//! The linearized MILP: objective, static rows and variable bounds.
//!
//! Subtour elimination, UAV connectivity and 2-matching rows are exponential
//! families and are never enumerated here; the separation routines add them
//! on demand.

mod solution;
mod space;

pub use solution::{
    decode, decode_lenient, decode_point, objective_of, validate, CostBreakdown, Solution,
    SolutionFile, Violation, ViolationKind,
};
pub use space::{Var, VariableSpace};

use crate::instance::Instance;
use crate::lp::LpProblem;
use crate::row::{LinearRow, RowTag, Sense};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelOptions {
    /// Encode forbidden assignments with a big-M objective term instead of
    /// fixing `y_ij = 0`.
    pub penalty_mode: bool,
}

#[derive(Clone, Debug)]
pub struct MilpModel {
    pub space: VariableSpace,
    pub objective: Vec<f64>,
    pub rows: Vec<LinearRow>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Variables whose bounds were collapsed to a single value.
    pub fixed: Vec<usize>,
    pub options: ModelOptions,
}

pub fn build_model(inst: &Instance) -> MilpModel {
    build_model_with(inst, ModelOptions::default())
}

pub fn build_model_with(inst: &Instance, options: ModelOptions) -> MilpModel {
    let n = inst.n();
    let sp = VariableSpace::new(n);
    let nv = sp.len();

    let mut objective = vec![0.0; nv];
    for i in 0..n {
        for j in i + 1..n {
            objective[sp.x(i, j)] = inst.gv_cost(i, j);
        }
        for j in 0..n {
            objective[sp.w(i, j)] = inst.uav_cost(i, j);
            if options.penalty_mode && !inst.comm_ok(i, j) {
                objective[sp.y(i, j)] = inst.penalty_weight();
            }
        }
    }

    let mut rows = Vec::with_capacity(4 * n + n * n + 3 * n * n * n);

    // Ground degree: sum_{e in delta(i)} x_e = 2 y_ii.
    for i in 0..n {
        let terms = (0..n)
            .filter(|&j| j != i)
            .map(|j| (sp.x(i, j), 1.0))
            .chain(std::iter::once((sp.y(i, i), -2.0)));
        rows.push(LinearRow::new(terms, Sense::Eq, 0.0, RowTag::DegreeX));
    }
    // UAV out- and in-degree, self-loops included.
    for i in 0..n {
        let terms = (0..n).map(|j| (sp.w(i, j), 1.0));
        rows.push(LinearRow::new(terms, Sense::Eq, 1.0, RowTag::OutDegreeW));
    }
    for j in 0..n {
        let terms = (0..n).map(|i| (sp.w(i, j), 1.0));
        rows.push(LinearRow::new(terms, Sense::Eq, 1.0, RowTag::InDegreeW));
    }
    // w_ij <= sum_k z_ijk
    for i in 0..n {
        for j in 0..n {
            let terms = std::iter::once((sp.w(i, j), 1.0))
                .chain((0..n).map(|k| (sp.z(i, j, k), -1.0)));
            rows.push(LinearRow::new(terms, Sense::Le, 0.0, RowTag::LinkWz));
        }
    }
    // z_ijk <= y_ik, z_ijk <= y_jk, z_ijk >= y_ik + y_jk - 1; degenerate
    // triples included.
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = sp.z(i, j, k);
                rows.push(LinearRow::new(
                    [(z, 1.0), (sp.y(i, k), -1.0)],
                    Sense::Le,
                    0.0,
                    RowTag::ZLeYik,
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = sp.z(i, j, k);
                rows.push(LinearRow::new(
                    [(z, 1.0), (sp.y(j, k), -1.0)],
                    Sense::Le,
                    0.0,
                    RowTag::ZLeYjk,
                ));
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let z = sp.z(i, j, k);
                rows.push(LinearRow::new(
                    [(z, 1.0), (sp.y(i, k), -1.0), (sp.y(j, k), -1.0)],
                    Sense::Ge,
                    -1.0,
                    RowTag::ZGe,
                ));
            }
        }
    }
    // Each target belongs to exactly one stop, and only to a stop.
    for i in 0..n {
        let terms = (0..n).map(|j| (sp.y(i, j), 1.0));
        rows.push(LinearRow::new(terms, Sense::Eq, 1.0, RowTag::Assign));
    }
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows.push(LinearRow::new(
                    [(sp.y(i, j), 1.0), (sp.y(j, j), -1.0)],
                    Sense::Le,
                    0.0,
                    RowTag::AssignLeStop,
                ));
            }
        }
    }

    let mut lower = vec![0.0; nv];
    let mut upper = vec![1.0; nv];
    let mut fixed = Vec::new();
    if !options.penalty_mode {
        for i in 0..n {
            for j in 0..n {
                if !inst.comm_ok(i, j) {
                    upper[sp.y(i, j)] = 0.0;
                    fixed.push(sp.y(i, j));
                }
            }
        }
    }
    let d = inst.depot();
    lower[sp.y(d, d)] = 1.0;
    fixed.push(sp.y(d, d));
    fixed.sort_unstable();

    MilpModel {
        space: sp,
        objective,
        rows,
        lower,
        upper,
        fixed,
        options,
    }
}

impl MilpModel {
    pub fn num_vars(&self) -> usize {
        self.space.len()
    }

    /// Rows of the linearized formulation proper: degree, linking and
    /// product rows. Excludes the assignment rows.
    pub fn formulation_rows(&self) -> impl Iterator<Item = &LinearRow> {
        self.rows
            .iter()
            .filter(|r| !matches!(r.tag, RowTag::Assign | RowTag::AssignLeStop))
    }

    pub fn to_lp(&self) -> LpProblem {
        LpProblem {
            num_vars: self.num_vars(),
            objective: self.objective.clone(),
            rows: self.rows.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, v)| c * v).sum()
    }

    /// Encodes a structured solution as a 0/1 point over all variables.
    pub fn encode(&self, sol: &Solution) -> Vec<f64> {
        encode(&self.space, sol)
    }
}

pub fn encode(sp: &VariableSpace, sol: &Solution) -> Vec<f64> {
    let n = sp.n();
    let mut v = vec![0.0; sp.len()];
    let t = &sol.tour;
    for (a, &i) in t.iter().enumerate() {
        let j = t[(a + 1) % t.len()];
        if i != j {
            v[sp.x(i, j)] = 1.0;
        }
    }
    let mut has_out = vec![false; n];
    for cycle in sol.subtours.values() {
        for (a, &i) in cycle.iter().enumerate() {
            let j = cycle[(a + 1) % cycle.len()];
            v[sp.w(i, j)] = 1.0;
            has_out[i] = true;
        }
    }
    for i in 0..n {
        if !has_out[i] {
            v[sp.w(i, i)] = 1.0;
        }
    }
    for (i, &k) in sol.assignment.iter().enumerate() {
        v[sp.y(i, k)] = 1.0;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if sol.assignment[i] == k && sol.assignment[j] == k {
                    v[sp.z(i, j, k)] = 1.0;
                }
            }
        }
    }
    v
}
