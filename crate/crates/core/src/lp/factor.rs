//! Sparse basis factorization with product-form updates.
//!
//! Basic logicals (columns `-e_i`) are peeled off up front, so only the
//! kernel formed by the basic structural columns and the rows without a
//! basic logical goes through sparse LU. The LU uses Markowitz pivoting with
//! a relative threshold. Basis changes after the factorization are appended
//! as eta vectors.

const NONE: usize = usize::MAX;
/// Relative pivot threshold of the LU.
const THRESHOLD: f64 = 0.1;
/// Entries below this are treated as structural zeros when pivoting.
const ABS_PIVOT_TOL: f64 = 1e-9;
/// Candidate columns or rows examined per Markowitz search.
const SEARCH_WIDTH: usize = 4;

struct Pivot {
    row: usize,
    pos: usize,
    value: f64,
    /// Row multipliers of the eliminated column.
    lower: Vec<(usize, f64)>,
    /// Remaining entries of the pivot row, by basis position.
    upper: Vec<(usize, f64)>,
}

/// A row whose logical is basic, restricted to the basic structurals.
struct LogicalRow {
    row: usize,
    pos: usize,
    entries: Vec<(usize, f64)>,
}

struct Eta {
    pos: usize,
    pivot: f64,
    entries: Vec<(usize, f64)>,
}

#[derive(Default)]
pub(crate) struct BasisFactor {
    m: usize,
    valid: bool,
    pivots: Vec<Pivot>,
    logical_rows: Vec<LogicalRow>,
    etas: Vec<Eta>,
    work: Vec<f64>,
}

impl BasisFactor {
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn invalidate(&mut self) {
        self.valid = false;
    }

    /// Factors the basis given by `head` (structurals below `ncols`, logical
    /// of row `i` as `ncols + i`). Dependent structural columns are swapped
    /// for logicals; the swapped-out variables are returned and `head` is
    /// updated in place.
    pub fn build(
        &mut self,
        ncols: usize,
        head: &mut [usize],
        cols: &[Vec<(usize, f64)>],
        rows: &[Vec<(usize, f64)>],
    ) -> Vec<usize> {
        let mut dropped = Vec::new();
        loop {
            match self.try_build(ncols, head, cols, rows) {
                Ok(()) => return dropped,
                Err(pairs) => {
                    for (p, i) in pairs {
                        dropped.push(head[p]);
                        head[p] = ncols + i;
                    }
                }
            }
        }
    }

    fn try_build(
        &mut self,
        ncols: usize,
        head: &[usize],
        cols: &[Vec<(usize, f64)>],
        rows: &[Vec<(usize, f64)>],
    ) -> Result<(), Vec<(usize, usize)>> {
        let m = head.len();
        self.m = m;
        self.valid = false;
        self.pivots.clear();
        self.logical_rows.clear();
        self.etas.clear();
        self.work.clear();
        self.work.resize(m, 0.0);

        let mut logical_pos = vec![NONE; m];
        let mut struct_pos = vec![NONE; ncols];
        for (p, &j) in head.iter().enumerate() {
            if j < ncols {
                struct_pos[j] = p;
            } else {
                logical_pos[j - ncols] = p;
            }
        }
        for (i, &p) in logical_pos.iter().enumerate() {
            if p != NONE {
                let entries = rows[i]
                    .iter()
                    .filter(|&&(j, _)| struct_pos[j] != NONE)
                    .map(|&(j, a)| (struct_pos[j], a))
                    .collect();
                self.logical_rows.push(LogicalRow { row: i, pos: p, entries });
            }
        }

        // active kernel: columns by position, row patterns by row index
        let mut col: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut rowpat: Vec<Vec<usize>> = vec![Vec::new(); m];
        let mut active_cols = Vec::new();
        for (p, &j) in head.iter().enumerate() {
            if j < ncols {
                active_cols.push(p);
                for &(i, a) in &cols[j] {
                    if logical_pos[i] == NONE && a != 0.0 {
                        col[p].push((i, a));
                        rowpat[i].push(p);
                    }
                }
            }
        }
        let mut active_rows: Vec<usize> = (0..m).filter(|&i| logical_pos[i] == NONE).collect();
        debug_assert_eq!(active_rows.len(), active_cols.len());

        let col_max = |c: &Vec<(usize, f64)>| c.iter().fold(0.0f64, |acc, e| acc.max(e.1.abs()));
        while !active_cols.is_empty() {
            // Markowitz search over the sparsest columns and rows
            let mut best: Option<(usize, usize, f64, usize)> = None; // (row, pos, value, cost)
            let mut consider = |i: usize, p: usize, a: f64, cost: usize| {
                let better = match best {
                    None => true,
                    Some((_, _, v, c)) => cost < c || (cost == c && a.abs() > v.abs()),
                };
                if better {
                    best = Some((i, p, a, cost));
                }
            };
            let mut by_count: Vec<(usize, usize)> =
                active_cols.iter().map(|&p| (col[p].len(), p)).collect();
            let width = SEARCH_WIDTH.min(by_count.len());
            by_count.select_nth_unstable(width - 1);
            by_count[..width].sort_unstable();
            for &(cnt, p) in &by_count[..width] {
                let cmax = col_max(&col[p]);
                if cmax < ABS_PIVOT_TOL {
                    continue;
                }
                for &(i, a) in &col[p] {
                    if a.abs() >= THRESHOLD * cmax {
                        consider(i, p, a, (rowpat[i].len() - 1) * (cnt - 1));
                    }
                }
            }
            let mut rows_by_count: Vec<(usize, usize)> =
                active_rows.iter().map(|&i| (rowpat[i].len(), i)).collect();
            let width = SEARCH_WIDTH.min(rows_by_count.len());
            rows_by_count.select_nth_unstable(width - 1);
            rows_by_count[..width].sort_unstable();
            for &(cnt, i) in &rows_by_count[..width] {
                if cnt == 0 {
                    continue;
                }
                for &p in &rowpat[i] {
                    let cmax = col_max(&col[p]);
                    if cmax < ABS_PIVOT_TOL {
                        continue;
                    }
                    let a = col[p].iter().find(|e| e.0 == i).map_or(0.0, |e| e.1);
                    if a.abs() >= THRESHOLD * cmax {
                        consider(i, p, a, (cnt - 1) * (col[p].len() - 1));
                    }
                }
            }
            let Some((pr, pc, value, _)) = best else {
                // numerically singular: pair leftover columns with leftover rows
                active_cols.sort_unstable();
                active_rows.sort_unstable();
                return Err(active_cols.into_iter().zip(active_rows).collect());
            };

            let pcol = std::mem::take(&mut col[pc]);
            let lower: Vec<(usize, f64)> = pcol
                .iter()
                .filter(|e| e.0 != pr)
                .map(|&(i, a)| (i, a / value))
                .collect();
            let prow = std::mem::take(&mut rowpat[pr]);
            let mut upper = Vec::with_capacity(prow.len());
            for &p in &prow {
                if p == pc {
                    continue;
                }
                let c = &mut col[p];
                if let Some(k) = c.iter().position(|e| e.0 == pr) {
                    upper.push((p, c[k].1));
                    c.swap_remove(k);
                }
            }
            for &(i, l) in &lower {
                let pat = &mut rowpat[i];
                if let Some(k) = pat.iter().position(|&p| p == pc) {
                    pat.swap_remove(k);
                }
                for &(p, u) in &upper {
                    let c = &mut col[p];
                    match c.iter_mut().find(|e| e.0 == i) {
                        Some(e) => e.1 -= l * u,
                        None => {
                            c.push((i, -l * u));
                            rowpat[i].push(p);
                        }
                    }
                }
            }
            active_cols.retain(|&p| p != pc);
            active_rows.retain(|&i| i != pr);
            self.pivots.push(Pivot {
                row: pr,
                pos: pc,
                value,
                lower,
                upper,
            });
        }
        self.valid = true;
        Ok(())
    }

    /// Solves `B v = a`. `a` is indexed by row and is overwritten; the
    /// result in `out` is indexed by basis position.
    pub fn ftran(&self, a: &mut [f64], out: &mut Vec<f64>) {
        debug_assert!(self.valid);
        out.clear();
        out.resize(self.m, 0.0);
        for pv in &self.pivots {
            let t = a[pv.row];
            if t != 0.0 {
                for &(i, l) in &pv.lower {
                    a[i] -= l * t;
                }
            }
        }
        for pv in self.pivots.iter().rev() {
            let mut s = a[pv.row];
            for &(p, u) in &pv.upper {
                s -= u * out[p];
            }
            out[pv.pos] = s / pv.value;
        }
        for lr in &self.logical_rows {
            let s: f64 = lr.entries.iter().map(|&(p, v)| v * out[p]).sum();
            out[lr.pos] = s - a[lr.row];
        }
        for eta in &self.etas {
            let vr = out[eta.pos] / eta.pivot;
            out[eta.pos] = vr;
            if vr != 0.0 {
                for &(p, v) in &eta.entries {
                    out[p] -= v * vr;
                }
            }
        }
    }

    /// Solves `B^T u = c`. `c` is indexed by basis position and is
    /// overwritten; the result in `out` is indexed by row.
    pub fn btran(&self, c: &mut [f64], out: &mut Vec<f64>) {
        debug_assert!(self.valid);
        out.clear();
        out.resize(self.m, 0.0);
        for eta in self.etas.iter().rev() {
            let mut s = c[eta.pos];
            for &(p, v) in &eta.entries {
                s -= v * c[p];
            }
            c[eta.pos] = s / eta.pivot;
        }
        for lr in &self.logical_rows {
            let cl = c[lr.pos];
            if cl != 0.0 {
                for &(p, v) in &lr.entries {
                    c[p] += v * cl;
                }
            }
            out[lr.row] = -cl;
        }
        for pv in &self.pivots {
            let z = c[pv.pos] / pv.value;
            out[pv.row] = z;
            if z != 0.0 {
                for &(p, u) in &pv.upper {
                    c[p] -= u * z;
                }
            }
        }
        for pv in self.pivots.iter().rev() {
            let mut s = out[pv.row];
            for &(i, l) in &pv.lower {
                s -= l * out[i];
            }
            out[pv.row] = s;
        }
    }

    /// Records the basis change at position `r`, where `alpha` is the
    /// entering column after `ftran`.
    pub fn update(&mut self, r: usize, alpha: &[f64]) {
        let entries = alpha
            .iter()
            .enumerate()
            .filter(|&(p, &v)| p != r && v != 0.0)
            .map(|(p, &v)| (p, v))
            .collect();
        self.etas.push(Eta {
            pos: r,
            pivot: alpha[r],
            entries,
        });
    }

    /// Scratch vector of length `m`, zeroed.
    pub fn take_work(&mut self) -> Vec<f64> {
        let mut w = std::mem::take(&mut self.work);
        w.clear();
        w.resize(self.m, 0.0);
        w
    }

    pub fn put_work(&mut self, w: Vec<f64>) {
        self.work = w;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_mul(ncols: usize, head: &[usize], cols: &[Vec<(usize, f64)>], v: &[f64]) -> Vec<f64> {
        let m = head.len();
        let mut out = vec![0.0; m];
        for (p, &j) in head.iter().enumerate() {
            if j < ncols {
                for &(i, a) in &cols[j] {
                    out[i] += a * v[p];
                }
            } else {
                out[j - ncols] -= v[p];
            }
        }
        out
    }

    fn rows_of(m: usize, cols: &[Vec<(usize, f64)>]) -> Vec<Vec<(usize, f64)>> {
        let mut rows = vec![Vec::new(); m];
        for (j, c) in cols.iter().enumerate() {
            for &(i, a) in c {
                rows[i].push((j, a));
            }
        }
        rows
    }

    #[test]
    fn solves_mixed_basis() {
        // 4 rows, 3 structurals; basis = x0, x2, logical 1, x1
        let cols = vec![
            vec![(0, 2.0), (1, 1.0), (3, 1.0)],
            vec![(0, 1.0), (2, -1.0), (3, 3.0)],
            vec![(2, 4.0), (3, 1.0)],
        ];
        let rows = rows_of(4, &cols);
        let mut head = vec![0, 2, 3 + 1, 1];
        let mut f = BasisFactor::default();
        assert!(f.build(3, &mut head, &cols, &rows).is_empty());
        let a = vec![1.0, -2.0, 0.5, 3.0];
        let mut v = Vec::new();
        f.ftran(&mut a.clone(), &mut v);
        let back = dense_mul(3, &head, &cols, &v);
        for (x, y) in back.iter().zip(&a) {
            assert!((x - y).abs() < 1e-12);
        }
        // B^T u = c  <=>  u . (B e_p) = c_p
        let c = vec![0.3, -1.0, 2.0, 0.7];
        let mut u = Vec::new();
        f.btran(&mut c.clone(), &mut u);
        for p in 0..4 {
            let mut e = vec![0.0; 4];
            e[p] = 1.0;
            let bp = dense_mul(3, &head, &cols, &e);
            let dot: f64 = bp.iter().zip(&u).map(|(x, y)| x * y).sum();
            assert!((dot - c[p]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_columns_are_replaced() {
        let cols = vec![vec![(0, 1.0), (1, 1.0)], vec![(0, 2.0), (1, 2.0)]];
        let rows = rows_of(2, &cols);
        let mut head = vec![0, 1];
        let mut f = BasisFactor::default();
        let dropped = f.build(2, &mut head, &cols, &rows);
        assert_eq!(dropped.len(), 1);
        assert!(f.is_valid());
        assert_eq!(head.iter().filter(|&&j| j >= 2).count(), 1);
    }

    #[test]
    fn eta_update_matches_rebuild() {
        let cols = vec![
            vec![(0, 1.0), (1, 2.0)],
            vec![(1, 1.0), (2, 1.0)],
            vec![(0, 3.0), (2, -1.0)],
        ];
        let rows = rows_of(3, &cols);
        let mut head = vec![0, 3 + 1, 3 + 2];
        let mut f = BasisFactor::default();
        f.build(3, &mut head, &cols, &rows);
        // bring column 2 in at position 2
        let mut a = vec![0.0; 3];
        for &(i, v) in &cols[2] {
            a[i] = v;
        }
        let mut alpha = Vec::new();
        f.ftran(&mut a, &mut alpha);
        f.update(2, &alpha);
        head[2] = 2;
        let mut g = BasisFactor::default();
        let mut head2 = head.clone();
        g.build(3, &mut head2, &cols, &rows);
        let rhs = vec![1.0, 2.0, 3.0];
        let (mut v1, mut v2) = (Vec::new(), Vec::new());
        f.ftran(&mut rhs.clone(), &mut v1);
        g.ftran(&mut rhs.clone(), &mut v2);
        for (x, y) in v1.iter().zip(&v2) {
            assert!((x - y).abs() < 1e-12);
        }
        let (mut u1, mut u2) = (Vec::new(), Vec::new());
        f.btran(&mut rhs.clone(), &mut u1);
        g.btran(&mut rhs.clone(), &mut u2);
        for (x, y) in u1.iter().zip(&u2) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}
