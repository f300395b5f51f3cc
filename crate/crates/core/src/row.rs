//! Sparse linear rows shared by the static model, the cut generators and the
//! LP solver.

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

/// Where a row came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowTag {
    DegreeX,
    OutDegreeW,
    InDegreeW,
    LinkWz,
    ZLeYik,
    ZLeYjk,
    ZGe,
    Assign,
    AssignLeStop,
    SecX,
    SecWOut,
    SecWIn,
    TwoMatching,
    Fix,
    Other,
}

impl RowTag {
    pub fn as_str(self) -> &'static str {
        match self {
            RowTag::DegreeX => "degree-x",
            RowTag::OutDegreeW => "out-degree-w",
            RowTag::InDegreeW => "in-degree-w",
            RowTag::LinkWz => "link-wz",
            RowTag::ZLeYik => "z-le-yik",
            RowTag::ZLeYjk => "z-le-yjk",
            RowTag::ZGe => "z-ge",
            RowTag::Assign => "assign",
            RowTag::AssignLeStop => "assign-le-stop",
            RowTag::SecX => "sec-x",
            RowTag::SecWOut => "sec-w-out",
            RowTag::SecWIn => "sec-w-in",
            RowTag::TwoMatching => "two-matching",
            RowTag::Fix => "fix",
            RowTag::Other => "other",
        }
    }
}

impl fmt::Display for RowTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sum coef_k * x_k  (sense)  rhs`.
///
/// Indices are strictly increasing and no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
    pub tag: RowTag,
}

impl LinearRow {
    /// Sorts the terms, merges repeated indices and drops zeros.
    pub fn new(
        terms: impl IntoIterator<Item = (usize, f64)>,
        sense: Sense,
        rhs: f64,
        tag: RowTag,
    ) -> Self {
        let mut coefs: Vec<(usize, f64)> = terms.into_iter().collect();
        coefs.sort_by_key(|&(j, _)| j);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(coefs.len());
        for (j, a) in coefs {
            match merged.last_mut() {
                Some((k, b)) if *k == j => *b += a,
                _ => merged.push((j, a)),
            }
        }
        merged.retain(|&(_, a)| a != 0.0);
        LinearRow {
            coefs: merged,
            sense,
            rhs,
            tag,
        }
    }

    pub fn coefs(&self) -> &[(usize, f64)] {
        &self.coefs
    }

    pub fn len(&self) -> usize {
        self.coefs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefs.is_empty()
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefs.iter().map(|&(j, a)| a * x[j]).sum()
    }

    /// Amount by which `x` violates the row; zero or negative when satisfied.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let act = self.activity(x);
        match self.sense {
            Sense::Le => act - self.rhs,
            Sense::Ge => self.rhs - act,
            Sense::Eq => (act - self.rhs).abs(),
        }
    }

    pub fn is_satisfied(&self, x: &[f64], tol: f64) -> bool {
        self.violation(x) <= tol
    }

    pub fn max_index(&self) -> Option<usize> {
        self.coefs.last().map(|&(j, _)| j)
    }

    /// Hash key identifying rows with the same support, coefficients, sense
    /// and right-hand side. The tag is ignored.
    pub fn canonical_key(&self) -> RowKey {
        RowKey {
            coefs: self.coefs.iter().map(|&(j, a)| (j, canon_bits(a))).collect(),
            sense: self.sense,
            rhs: canon_bits(self.rhs),
        }
    }
}

fn canon_bits(v: f64) -> u64 {
    // -0.0 and 0.0 compare equal
    if v == 0.0 {
        0
    } else {
        v.to_bits()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowKey {
    coefs: Vec<(usize, u64)>,
    sense: Sense,
    rhs: u64,
}

impl Hash for RowKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coefs.hash(state);
        self.sense.hash(state);
        self.rhs.hash(state);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terms_are_normalized() {
        let r = LinearRow::new([(3, 1.0), (1, 2.0), (3, -1.0), (2, 0.0), (1, 1.0)], Sense::Le, 4.0, RowTag::Other);
        assert_eq!(r.coefs(), &[(1, 3.0)]);
    }

    #[test]
    fn violation_by_sense() {
        let x = [1.0, 2.0];
        let le = LinearRow::new([(0, 1.0), (1, 1.0)], Sense::Le, 2.0, RowTag::Other);
        let ge = LinearRow::new([(0, 1.0), (1, 1.0)], Sense::Ge, 4.0, RowTag::Other);
        let eq = LinearRow::new([(0, 1.0), (1, 1.0)], Sense::Eq, 3.5, RowTag::Other);
        assert_eq!(le.violation(&x), 1.0);
        assert_eq!(ge.violation(&x), 1.0);
        assert_eq!(eq.violation(&x), 0.5);
        assert!(!le.is_satisfied(&x, 1e-9));
    }

    #[test]
    fn canonical_key_ignores_tag_and_order() {
        let a = LinearRow::new([(2, 1.0), (0, -2.0)], Sense::Ge, 0.0, RowTag::SecX);
        let b = LinearRow::new([(0, -2.0), (2, 1.0)], Sense::Ge, -0.0, RowTag::Other);
        assert_eq!(a.canonical_key(), b.canonical_key());
    }
}
