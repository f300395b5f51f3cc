use std::fmt::Write;

use super::LpProblem;
use crate::row::Sense;

fn term(out: &mut String, first: bool, a: f64, name: &str) {
    if a < 0.0 {
        let _ = write!(out, " - {} {name}", -a);
    } else if first {
        let _ = write!(out, " {a} {name}");
    } else {
        let _ = write!(out, " + {a} {name}");
    }
}

/// Renders `problem` in CPLEX LP text format, naming columns with `name`.
pub fn write_lp_text(problem: &LpProblem, name: impl Fn(usize) -> String) -> String {
    let mut out = String::from("Minimize\n obj:");
    let mut first = true;
    for (j, &c) in problem.objective.iter().enumerate() {
        if c != 0.0 {
            term(&mut out, first, c, &name(j));
            first = false;
        }
    }
    if first {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for (i, row) in problem.rows.iter().enumerate() {
        let _ = write!(out, " {}_{i}:", row.tag);
        let mut first = true;
        for &(j, a) in row.coefs() {
            term(&mut out, first, a, &name(j));
            first = false;
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    out.push_str("Bounds\n");
    for j in 0..problem.num_vars {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        let v = name(j);
        if l == u {
            let _ = writeln!(out, " {v} = {l}");
        } else if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(out, " {v} free");
        } else if u == f64::INFINITY {
            if l != 0.0 {
                let _ = writeln!(out, " {v} >= {l}");
            }
        } else if l == f64::NEG_INFINITY {
            let _ = writeln!(out, " -inf <= {v} <= {u}");
        } else {
            let _ = writeln!(out, " {l} <= {v} <= {u}");
        }
    }
    out.push_str("End\n");
    out
}
