//! Exact integer matrices: sparse storage, Smith normal form, integer linear systems.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Column-major sparse integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    cols: Vec<BTreeMap<usize, BigInt>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, cols: vec![BTreeMap::new(); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.cols[i].insert(i, BigInt::one());
        }
        m
    }

    pub fn from_triplets(nrows: usize, ncols: usize, t: impl IntoIterator<Item = (usize, usize, BigInt)>) -> Self {
        let mut m = Self::zeros(nrows, ncols);
        for (r, c, v) in t {
            m.add_to(r, c, &v);
        }
        m
    }

    pub fn from_dense(d: &[Vec<BigInt>], ncols: usize) -> Self {
        let mut m = Self::zeros(d.len(), ncols);
        for (r, row) in d.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.cols[c].insert(r, v.clone());
                }
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.cols[c].get(&r).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn col(&self, c: usize) -> &BTreeMap<usize, BigInt> {
        &self.cols[c]
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        assert!(r < self.nrows && c < self.ncols, "index ({r},{c}) out of bounds");
        if v.is_zero() {
            return;
        }
        let e = self.cols[c].entry(r).or_insert_with(BigInt::zero);
        *e += v;
        if e.is_zero() {
            self.cols[c].remove(&r);
        }
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            self.cols[c].remove(&r);
        } else {
            self.cols[c].insert(r, v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> {
        self.cols.iter().enumerate().flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for (r, c, v) in self.triplets() {
            t.cols[r].insert(c, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.nrows, other.ncols);
        for (j, col) in other.cols.iter().enumerate() {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (k, b) in col {
                for (i, a) in &self.cols[*k] {
                    *acc.entry(*i).or_insert_with(BigInt::zero) += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.cols[j] = acc;
        }
        out
    }

    pub fn apply(&self, x: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![BigInt::zero(); self.nrows];
        for (c, col) in self.cols.iter().enumerate() {
            if x[c].is_zero() {
                continue;
            }
            for (r, v) in col {
                y[r.to_owned()] += v * &x[c];
            }
        }
        y
    }

    pub fn scaled(&self, k: &BigInt) -> SparseMatrix {
        let mut out = Self::zeros(self.nrows, self.ncols);
        if k.is_zero() {
            return out;
        }
        for (c, col) in self.cols.iter().enumerate() {
            out.cols[c] = col.iter().map(|(r, v)| (*r, v * k)).collect();
        }
        out
    }

    pub fn add(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols), "matrix sum shape mismatch");
        let mut out = self.clone();
        for (r, c, v) in other.triplets() {
            out.add_to(r, c, v);
        }
        out
    }

    pub fn sub(&self, other: &SparseMatrix) -> SparseMatrix {
        self.add(&other.scaled(&BigInt::from(-1)))
    }

    /// Submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let mut pos = vec![usize::MAX; self.nrows];
        for (i, r) in rows.iter().enumerate() {
            pos[*r] = i;
        }
        let mut out = Self::zeros(rows.len(), cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (r, v) in &self.cols[*c] {
                if pos[*r] != usize::MAX {
                    out.cols[j].insert(pos[*r], v.clone());
                }
            }
        }
        out
    }

    pub fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.ncols]; self.nrows];
        for (r, c, v) in self.triplets() {
            d[r][c] = v.clone();
        }
        d
    }
}

/// Result of a Smith normal form computation: `u * a * v = diag`.
#[derive(Clone, Debug)]
pub struct Snf {
    pub u: Vec<Vec<BigInt>>,
    pub u_inv: Vec<Vec<BigInt>>,
    pub v: Vec<Vec<BigInt>>,
    pub v_inv: Vec<Vec<BigInt>>,
    /// Nonzero diagonal entries, positive and each dividing the next.
    pub diag: Vec<BigInt>,
}

fn dense_identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn dense_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, ncols: usize) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![BigInt::zero(); ncols]; a.len()];
    for (i, row) in a.iter().enumerate() {
        for k in 0..inner {
            if row[k].is_zero() {
                continue;
            }
            for j in 0..ncols {
                if !b[k][j].is_zero() {
                    out[i][j] += &row[k] * &b[k][j];
                }
            }
        }
    }
    out
}

struct SnfWork {
    a: Vec<Vec<BigInt>>,
    u: Vec<Vec<BigInt>>,
    u_inv: Vec<Vec<BigInt>>,
    v: Vec<Vec<BigInt>>,
    v_inv: Vec<Vec<BigInt>>,
    m: usize,
    n: usize,
}

impl SnfWork {
    // row_i += k * row_j
    fn row_add(&mut self, i: usize, j: usize, k: &BigInt) {
        for c in 0..self.n {
            let t = &self.a[j][c] * k;
            self.a[i][c] += t;
        }
        for c in 0..self.m {
            let t = &self.u[j][c] * k;
            self.u[i][c] += t;
        }
        for r in 0..self.m {
            let t = &self.u_inv[r][i] * k;
            self.u_inv[r][j] -= t;
        }
    }

    fn row_swap(&mut self, i: usize, j: usize) {
        self.a.swap(i, j);
        self.u.swap(i, j);
        for r in 0..self.m {
            self.u_inv[r].swap(i, j);
        }
    }

    fn row_neg(&mut self, i: usize) {
        for c in 0..self.n {
            self.a[i][c] = -&self.a[i][c];
        }
        for c in 0..self.m {
            self.u[i][c] = -&self.u[i][c];
        }
        for r in 0..self.m {
            self.u_inv[r][i] = -&self.u_inv[r][i];
        }
    }

    // col_i += k * col_j
    fn col_add(&mut self, i: usize, j: usize, k: &BigInt) {
        for r in 0..self.m {
            let t = &self.a[r][j] * k;
            self.a[r][i] += t;
        }
        for r in 0..self.n {
            let t = &self.v[r][j] * k;
            self.v[r][i] += t;
        }
        for c in 0..self.n {
            let t = &self.v_inv[i][c] * k;
            self.v_inv[j][c] -= t;
        }
    }

    fn col_swap(&mut self, i: usize, j: usize) {
        for r in 0..self.m {
            self.a[r].swap(i, j);
        }
        for r in 0..self.n {
            self.v[r].swap(i, j);
        }
        self.v_inv.swap(i, j);
    }
}

/// Smith normal form of a dense `m x n` matrix with unimodular transforms.
pub fn smith_normal_form(a: &[Vec<BigInt>], m: usize, n: usize) -> Snf {
    let mut w = SnfWork {
        a: a.to_vec(),
        u: dense_identity(m),
        u_inv: dense_identity(m),
        v: dense_identity(n),
        v_inv: dense_identity(n),
        m,
        n,
    };
    let mut diag = Vec::new();
    let mut t = 0;
    while t < m.min(n) {
        // pivot of minimal absolute value, then smallest position
        let mut best: Option<(BigInt, usize, usize)> = None;
        for r in t..m {
            for c in t..n {
                let x = &w.a[r][c];
                if !x.is_zero() {
                    let ax = x.abs();
                    if best.as_ref().map_or(true, |(b, _, _)| ax < *b) {
                        best = Some((ax, r, c));
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        w.row_swap(t, pr);
        w.col_swap(t, pc);
        loop {
            let mut dirty = false;
            for r in (t + 1)..m {
                if w.a[r][t].is_zero() {
                    continue;
                }
                let q = w.a[r][t].div_floor(&w.a[t][t]);
                w.row_add(r, t, &-q);
                if !w.a[r][t].is_zero() {
                    w.row_swap(t, r);
                    dirty = true;
                }
            }
            for c in (t + 1)..n {
                if w.a[t][c].is_zero() {
                    continue;
                }
                let q = w.a[t][c].div_floor(&w.a[t][t]);
                w.col_add(c, t, &-q);
                if !w.a[t][c].is_zero() {
                    w.col_swap(t, c);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the remaining block
            let mut fix = None;
            'outer: for r in (t + 1)..m {
                for c in (t + 1)..n {
                    if !w.a[r][c].is_multiple_of(&w.a[t][t]) {
                        fix = Some(r);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(r) => {
                    w.row_add(t, r, &BigInt::one());
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.row_neg(t);
        }
        diag.push(w.a[t][t].clone());
        t += 1;
    }
    let snf = Snf { u: w.u, u_inv: w.u_inv, v: w.v, v_inv: w.v_inv, diag };
    if cfg!(debug_assertions) {
        check_snf(a, m, n, &snf);
    }
    snf
}

fn check_snf(a: &[Vec<BigInt>], m: usize, n: usize, s: &Snf) {
    let ua = dense_mul(&s.u, a, m, n);
    let uav = dense_mul(&ua, &s.v, n, n);
    for i in 0..m {
        for j in 0..n {
            let want = if i == j && i < s.diag.len() { s.diag[i].clone() } else { BigInt::zero() };
            assert_eq!(uav[i][j], want, "Smith normal form check failed at ({i},{j})");
        }
    }
    assert_eq!(dense_mul(&s.u, &s.u_inv, m, m), dense_identity(m));
    assert_eq!(dense_mul(&s.v, &s.v_inv, n, n), dense_identity(n));
    for k in 1..s.diag.len() {
        assert!(s.diag[k].is_multiple_of(&s.diag[k - 1]));
    }
}

/// Rank and invariant factors (> 1) of a sparse matrix.
///
/// Unit pivots are eliminated sparsely first; the remaining core goes through the
/// dense Smith normal form.
pub fn rank_and_torsion(m: &SparseMatrix) -> (usize, Vec<BigInt>) {
    let mut rows: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
    let mut colidx: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (r, c, v) in m.triplets() {
        rows.entry(r).or_default().insert(c, v.clone());
        colidx.entry(c).or_default().insert(r);
    }
    let mut rank = 0;
    loop {
        // Markowitz-style choice among unit entries
        let mut best: Option<(usize, usize, usize)> = None;
        for (r, row) in &rows {
            for (c, v) in row {
                if v.abs().is_one() {
                    let cost = (row.len() - 1) * (colidx[c].len() - 1);
                    if best.map_or(true, |(b, _, _)| cost < b) {
                        best = Some((cost, *r, *c));
                    }
                    if cost == 0 {
                        break;
                    }
                }
            }
            if best.map_or(false, |(b, _, _)| b == 0) {
                break;
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let prow = rows.remove(&pr).unwrap();
        let pval = prow[&pc].clone();
        for c in prow.keys() {
            colidx.get_mut(c).unwrap().remove(&pr);
        }
        let others: Vec<usize> = colidx[&pc].iter().copied().collect();
        for r in others {
            let row = rows.get_mut(&r).unwrap();
            let factor = &row[&pc] * &pval; // pval is a unit, so this is row[pc] / pval
            for (c, v) in &prow {
                let e = row.entry(*c).or_insert_with(BigInt::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    row.remove(c);
                    colidx.get_mut(c).unwrap().remove(&r);
                } else {
                    colidx.entry(*c).or_default().insert(r);
                }
            }
            if row.is_empty() {
                rows.remove(&r);
            }
        }
        colidx.remove(&pc);
        rank += 1;
    }
    let live_rows: Vec<usize> = rows.keys().copied().collect();
    let live_cols: Vec<usize> = colidx.iter().filter(|(_, s)| !s.is_empty()).map(|(c, _)| *c).collect();
    if live_rows.is_empty() || live_cols.is_empty() {
        return (rank, Vec::new());
    }
    let cpos: BTreeMap<usize, usize> = live_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let dense: Vec<Vec<BigInt>> = live_rows
        .iter()
        .map(|r| {
            let mut v = vec![BigInt::zero(); live_cols.len()];
            for (c, x) in &rows[r] {
                v[cpos[c]] = x.clone();
            }
            v
        })
        .collect();
    let snf = smith_normal_form(&dense, live_rows.len(), live_cols.len());
    rank += snf.diag.len();
    let torsion = snf.diag.into_iter().filter(|d| !d.is_one()).collect();
    (rank, torsion)
}

type SparseColumn = BTreeMap<usize, BigInt>;

fn axpy(target: &mut SparseColumn, k: &BigInt, x: &SparseColumn) {
    for (r, v) in x {
        let e = target.entry(*r).or_insert_with(BigInt::zero);
        *e += k * v;
        if e.is_zero() {
            target.remove(r);
        }
    }
}

/// `a v = e` with `v` unimodular and `e` in column echelon form: `pivots[k]` is the row
/// of the leading entry of column `k` of `e`, rows increase with `k`, and the columns
/// of `e` after the pivots are zero.
struct ColumnEchelon {
    e: Vec<SparseColumn>,
    v: Vec<SparseColumn>,
    pivots: Vec<usize>,
}

fn column_echelon(a: &SparseMatrix) -> ColumnEchelon {
    let n = a.ncols();
    let mut e: Vec<SparseColumn> = a.cols.clone();
    let mut v: Vec<SparseColumn> = (0..n).map(|i| [(i, BigInt::one())].into_iter().collect()).collect();
    // which active columns have an entry in each row
    let mut at_row: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (c, col) in e.iter().enumerate() {
        for r in col.keys() {
            at_row.entry(*r).or_default().insert(c);
        }
    }
    let mut active: BTreeSet<usize> = (0..n).collect();
    let mut order: Vec<usize> = Vec::new();
    let mut pivots = Vec::new();
    while let Some((&r, _)) = at_row.iter().find(|(_, cs)| !cs.is_empty()) {
        loop {
            let cs: Vec<usize> = at_row[&r].iter().copied().collect();
            let best = *cs.iter().min_by_key(|c| (e[**c][&r].abs(), **c)).expect("nonempty row");
            if cs.len() == 1 {
                break;
            }
            let pivot_e = e[best].clone();
            let pivot_v = v[best].clone();
            for c in cs {
                if c == best {
                    continue;
                }
                let q = -(e[c][&r].div_floor(&pivot_e[&r]));
                let before: BTreeSet<usize> = e[c].keys().copied().collect();
                axpy(&mut e[c], &q, &pivot_e);
                axpy(&mut v[c], &q, &pivot_v);
                for row in before.iter().filter(|x| !e[c].contains_key(x)) {
                    at_row.get_mut(row).expect("indexed").remove(&c);
                }
                for row in e[c].keys().filter(|x| !before.contains(x)) {
                    at_row.entry(*row).or_default().insert(c);
                }
            }
        }
        let c = *at_row[&r].iter().next().expect("one column left");
        for row in e[c].keys() {
            at_row.get_mut(row).expect("indexed").remove(&c);
        }
        active.remove(&c);
        order.push(c);
        pivots.push(r);
    }
    order.extend(active);
    ColumnEchelon {
        e: order.iter().map(|c| std::mem::take(&mut e[*c])).collect(),
        v: order.iter().map(|c| std::mem::take(&mut v[*c])).collect(),
        pivots,
    }
}

/// Solve `a x = b` over the integers; `None` if no integral solution exists.
pub fn solve_integer(a: &SparseMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let (m, n) = (a.nrows(), a.ncols());
    assert_eq!(b.len(), m);
    if b.iter().all(|x| x.is_zero()) {
        return Some(vec![BigInt::zero(); n]);
    }
    let ech = column_echelon(a);
    // forward substitution on the pivot rows, then check the rest
    let mut residual: SparseColumn = b.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect();
    let mut y = vec![BigInt::zero(); ech.pivots.len()];
    for (k, r) in ech.pivots.iter().enumerate() {
        let Some(val) = residual.get(r).cloned() else { continue };
        let (q, rem) = val.div_rem(&ech.e[k][r]);
        if !rem.is_zero() {
            return None;
        }
        axpy(&mut residual, &-&q, &ech.e[k]);
        y[k] = q;
    }
    if !residual.is_empty() {
        return None;
    }
    let mut x: SparseColumn = SparseColumn::new();
    for (k, yk) in y.iter().enumerate() {
        if !yk.is_zero() {
            axpy(&mut x, yk, &ech.v[k]);
        }
    }
    Some((0..n).map(|i| x.get(&i).cloned().unwrap_or_else(BigInt::zero)).collect())
}

/// A basis of the integer kernel of `a`, as columns. The basis spans a saturated lattice.
pub fn integer_kernel(a: &SparseMatrix) -> Vec<Vec<BigInt>> {
    let n = a.ncols();
    let ech = column_echelon(a);
    ech.v[ech.pivots.len()..]
        .iter()
        .map(|col| (0..n).map(|i| col.get(&i).cloned().unwrap_or_else(BigInt::zero)).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        let d: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|x| bi(*x)).collect()).collect();
        SparseMatrix::from_dense(&d, rows.first().map_or(0, |r| r.len()))
    }

    #[test]
    fn snf_of_two() {
        let (r, t) = rank_and_torsion(&mat(&[&[2]]));
        assert_eq!(r, 1);
        assert_eq!(t, vec![bi(2)]);
    }

    #[test]
    fn snf_mixed() {
        let a = mat(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let s = smith_normal_form(&a.to_dense(), 3, 3);
        assert_eq!(s.diag, vec![bi(2), bi(6), bi(12)]);
        let (r, t) = rank_and_torsion(&a);
        assert_eq!(r, 3);
        assert_eq!(t, vec![bi(2), bi(6), bi(12)]);
    }

    #[test]
    fn sparse_and_dense_agree_with_units() {
        let a = mat(&[&[1, 2, 0, 3], &[0, 1, 4, 0], &[2, 0, 0, 2], &[0, 0, 6, 1]]);
        let s = smith_normal_form(&a.to_dense(), 4, 4);
        let (r, t) = rank_and_torsion(&a);
        assert_eq!(r, s.diag.len());
        let dense_t: Vec<BigInt> = s.diag.into_iter().filter(|d| !d.is_one()).collect();
        assert_eq!(t, dense_t);
    }

    #[test]
    fn kernel_of_a_rank_one_matrix() {
        let a = mat(&[&[2, 4, 6], &[1, 2, 3]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).iter().all(Zero::is_zero));
        }
        // saturated: (1, 1, -1) is an integer combination of the basis
        let basis = SparseMatrix::from_triplets(3, 2, k.iter().enumerate().flat_map(|(c, v)| v.iter().enumerate().map(move |(r, x)| (r, c, x.clone()))));
        assert!(solve_integer(&basis, &[bi(1), bi(1), bi(-1)]).is_some());
    }

    #[test]
    fn integer_solve() {
        let a = mat(&[&[2, 0], &[0, 3]]);
        assert_eq!(solve_integer(&a, &[bi(4), bi(9)]), Some(vec![bi(2), bi(3)]));
        assert_eq!(solve_integer(&a, &[bi(1), bi(0)]), None);
    }

    #[test]
    fn kernel_basis() {
        let a = mat(&[&[1, 1, 0], &[0, 0, 0]]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(a.apply(v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn product_and_transpose() {
        let a = mat(&[&[1, 2], &[3, 4]]);
        let b = a.transpose();
        let p = a.mul(&b);
        assert_eq!(p.to_dense(), vec![vec![bi(5), bi(11)], vec![bi(11), bi(25)]]);
    }
}
