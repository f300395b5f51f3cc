use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::model::{Var, VariableSpace};

/// A subproblem: bound overrides relative to the root plus its priority key.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub id: usize,
    /// `(variable, lower, upper)`, in the order they were imposed.
    pub bounds: Vec<(usize, f64, f64)>,
    /// Lower bound on every solution in the subtree (the parent's LP value).
    pub key: f64,
    pub depth: usize,
}

impl Node {
    pub fn root() -> Self {
        Node {
            id: 0,
            bounds: Vec::new(),
            key: f64::NEG_INFINITY,
            depth: 0,
        }
    }
}

struct Entry {
    node: Node,
    seq: u64,
}

impl Entry {
    fn rank(&self, other: &Self) -> Ordering {
        self.node
            .key
            .total_cmp(&other.node.key)
            .then(self.node.depth.cmp(&other.node.depth))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.rank(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: the heap pops the smallest key first
    fn cmp(&self, other: &Self) -> Ordering {
        other.rank(self)
    }
}

/// Best-first open list: smallest key, then smallest depth, then insertion
/// order.
#[derive(Default)]
pub struct NodeQueue {
    heap: BinaryHeap<Entry>,
    seq: u64,
}

impl NodeQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, node: Node) {
        self.heap.push(Entry { node, seq: self.seq });
        self.seq += 1;
    }

    pub fn pop(&mut self) -> Option<Node> {
        self.heap.pop().map(|e| e.node)
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn min_key(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.node.key)
    }
}

fn class_rank(v: Var) -> u8 {
    match v {
        Var::Y(..) => 0,
        Var::X(..) => 1,
        Var::W(..) => 2,
        Var::Z(..) => 3,
    }
}

/// Branching variable: class `y` before `x` before `w` before `z`, then
/// closest to one half, then lowest index. `None` when the point is
/// integral within `tol`.
pub fn branching_variable(space: &VariableSpace, point: &[f64], tol: f64) -> Option<usize> {
    let mut best: Option<(u8, f64, usize)> = None;
    for (j, &v) in point.iter().enumerate() {
        let f = v - v.floor();
        if f <= tol || f >= 1.0 - tol {
            continue;
        }
        let cls = class_rank(space.decode(j).expect("index inside the variable space"));
        let dist = (f - 0.5).abs();
        let better = match best {
            None => true,
            Some((c, d, _)) => cls < c || (cls == c && dist < d),
        };
        if better {
            best = Some((cls, dist, j));
        }
    }
    best.map(|b| b.2)
}

/// Down child (`var <= 0`) and up child (`var >= 1`), both keyed by the
/// parent's LP value.
pub fn branch(parent: &Node, var: usize, lp_value: f64, ids: (usize, usize)) -> (Node, Node) {
    let child = |id, lo, hi| {
        let mut bounds = parent.bounds.clone();
        bounds.push((var, lo, hi));
        Node {
            id,
            bounds,
            key: lp_value,
            depth: parent.depth + 1,
        }
    };
    (child(ids.0, 0.0, 0.0), child(ids.1, 1.0, 1.0))
}
