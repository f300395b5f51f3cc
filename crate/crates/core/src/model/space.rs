use std::ops::Range;

/// A decoded variable index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// Ground edge between `i < j`.
    X(usize, usize),
    /// UAV arc `i -> j`; `i == j` is the trivial self-loop.
    W(usize, usize),
    /// Target `i` assigned to stop `j`.
    Y(usize, usize),
    /// Linearization of `y_ik * y_jk`.
    Z(usize, usize, usize),
}

/// Index layout of the `x`, `w`, `y`, `z` variable blocks, in that order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpace {
    n: usize,
    n_edges: usize,
}

impl VariableSpace {
    pub fn new(n: usize) -> Self {
        VariableSpace {
            n,
            n_edges: n * n.saturating_sub(1) / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.n_edges
    }

    pub fn len(&self) -> usize {
        self.n_edges + 2 * self.n * self.n + self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x_range(&self) -> Range<usize> {
        0..self.n_edges
    }

    pub fn w_range(&self) -> Range<usize> {
        let s = self.n_edges;
        s..s + self.n * self.n
    }

    pub fn y_range(&self) -> Range<usize> {
        let s = self.n_edges + self.n * self.n;
        s..s + self.n * self.n
    }

    pub fn z_range(&self) -> Range<usize> {
        let s = self.n_edges + 2 * self.n * self.n;
        s..s + self.n * self.n * self.n
    }

    /// Edge index for the unordered pair `{i, j}`, `i != j`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> usize {
        debug_assert!(i != j && i < self.n && j < self.n);
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    #[inline]
    pub fn w(&self, i: usize, j: usize) -> usize {
        self.n_edges + i * self.n + j
    }

    #[inline]
    pub fn y(&self, i: usize, j: usize) -> usize {
        self.n_edges + self.n * self.n + i * self.n + j
    }

    #[inline]
    pub fn z(&self, i: usize, j: usize, k: usize) -> usize {
        self.n_edges + 2 * self.n * self.n + (i * self.n + j) * self.n + k
    }

    /// Endpoints `(i, j)` with `i < j` of edge index `e`.
    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        debug_assert!(e < self.n_edges);
        let mut rest = e;
        let mut i = 0;
        loop {
            let row = self.n - i - 1;
            if rest < row {
                return (i, i + 1 + rest);
            }
            rest -= row;
            i += 1;
        }
    }

    pub fn decode(&self, idx: usize) -> Option<Var> {
        let nn = self.n * self.n;
        if self.x_range().contains(&idx) {
            let (i, j) = self.edge_endpoints(idx);
            Some(Var::X(i, j))
        } else if self.w_range().contains(&idx) {
            let r = idx - self.n_edges;
            Some(Var::W(r / self.n, r % self.n))
        } else if self.y_range().contains(&idx) {
            let r = idx - self.n_edges - nn;
            Some(Var::Y(r / self.n, r % self.n))
        } else if self.z_range().contains(&idx) {
            let r = idx - self.n_edges - 2 * nn;
            Some(Var::Z(r / nn, (r / self.n) % self.n, r % self.n))
        } else {
            None
        }
    }

    pub fn encode(&self, var: Var) -> usize {
        match var {
            Var::X(i, j) => self.x(i, j),
            Var::W(i, j) => self.w(i, j),
            Var::Y(i, j) => self.y(i, j),
            Var::Z(i, j, k) => self.z(i, j, k),
        }
    }

    pub fn name(&self, idx: usize) -> String {
        match self.decode(idx) {
            Some(Var::X(i, j)) => format!("x_{i}_{j}"),
            Some(Var::W(i, j)) => format!("w_{i}_{j}"),
            Some(Var::Y(i, j)) => format!("y_{i}_{j}"),
            Some(Var::Z(i, j, k)) => format!("z_{i}_{j}_{k}"),
            None => format!("v{idx}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn block_sizes() {
        let s = VariableSpace::new(3);
        assert_eq!(s.len(), 48);
        assert_eq!(s.x_range(), 0..3);
        assert_eq!(s.w_range(), 3..12);
        assert_eq!(s.y_range(), 12..21);
        assert_eq!(s.z_range(), 21..48);
    }

    #[test]
    fn edge_index_is_symmetric() {
        let s = VariableSpace::new(5);
        assert_eq!(s.x(1, 3), s.x(3, 1));
        assert_eq!(s.x(0, 1), 0);
        assert_eq!(s.x(3, 4), 9);
    }

    proptest! {
        #[test]
        fn decode_inverts_encode(n in 2usize..9, seed in any::<u64>()) {
            let s = VariableSpace::new(n);
            let idx = (seed as usize) % s.len();
            let v = s.decode(idx).unwrap();
            prop_assert_eq!(s.encode(v), idx);
            prop_assert!(s.decode(s.len()).is_none());
        }
    }
}
