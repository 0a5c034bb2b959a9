//! Bigraded chain complexes of free abelian groups and maps between them.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{KhError, Result};
use crate::linalg::{rank_and_torsion, solve_integer, SparseMatrix};

pub type Grade = (i64, i64);

/// A bigraded complex on a finite basis. The differential is stored as one sparse
/// matrix (columns are sources) and lowers `h` by one while preserving `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub grades: Vec<Grade>,
    pub d: SparseMatrix,
}

impl GradedComplex {
    pub fn new(grades: Vec<Grade>, d: SparseMatrix) -> Result<Self> {
        let c = GradedComplex { grades, d };
        c.validate()?;
        Ok(c)
    }

    pub fn zero() -> Self {
        GradedComplex { grades: Vec::new(), d: SparseMatrix::zeros(0, 0) }
    }

    /// A single copy of Z in bidegree `g`.
    pub fn unit(g: Grade) -> Self {
        GradedComplex { grades: vec![g], d: SparseMatrix::zeros(1, 1) }
    }

    pub fn dim(&self) -> usize {
        self.grades.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        if self.d.nrows() != n || self.d.ncols() != n {
            return Err(KhError::Shape("differential has the wrong size".into()));
        }
        for (r, c, _) in self.d.triplets() {
            let (hs, qs) = self.grades[c];
            let (ht, qt) = self.grades[r];
            if ht != hs - 1 || qt != qs {
                return Err(KhError::Bidegree(format!("entry {c}->{r} goes ({hs},{qs})->({ht},{qt})")));
            }
        }
        if !self.d.mul(&self.d).is_zero() {
            return Err(KhError::NotAComplex("d∘d".into()));
        }
        Ok(())
    }

    pub fn shifted(&self, dh: i64, dq: i64) -> GradedComplex {
        GradedComplex { grades: self.grades.iter().map(|(h, q)| (h + dh, q + dq)).collect(), d: self.d.clone() }
    }

    /// Basis indices grouped by bidegree.
    pub fn groups(&self) -> BTreeMap<Grade, Vec<usize>> {
        let mut g: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
        for (i, x) in self.grades.iter().enumerate() {
            g.entry(*x).or_default().push(i);
        }
        g
    }

    pub fn direct_sum(&self, other: &GradedComplex) -> GradedComplex {
        let n = self.dim();
        let mut grades = self.grades.clone();
        grades.extend(other.grades.iter().copied());
        let t = self
            .d
            .triplets()
            .map(|(r, c, v)| (r, c, v.clone()))
            .chain(other.d.triplets().map(|(r, c, v)| (r + n, c + n, v.clone())));
        let m = grades.len();
        GradedComplex { grades, d: SparseMatrix::from_triplets(m, m, t) }
    }

    pub fn homology(&self) -> HomologyTable {
        homology(self)
    }
}

/// Free rank and torsion (prime-power orders) of one bigraded piece.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomologyGroup {
    pub free: usize,
    pub torsion: Vec<u64>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomologyTable {
    pub groups: BTreeMap<Grade, HomologyGroup>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HomologyEntry {
    pub h: i64,
    pub q: i64,
    pub free: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub torsion: Vec<u64>,
}

impl HomologyTable {
    pub fn get(&self, h: i64, q: i64) -> HomologyGroup {
        self.groups.get(&(h, q)).cloned().unwrap_or_default()
    }

    pub fn shifted(&self, dh: i64, dq: i64) -> HomologyTable {
        HomologyTable { groups: self.groups.iter().map(|((h, q), g)| ((h + dh, q + dq), g.clone())).collect() }
    }

    pub fn total_rank(&self) -> usize {
        self.groups.values().map(|g| g.free).sum()
    }

    pub fn entries(&self) -> Vec<HomologyEntry> {
        self.groups
            .iter()
            .map(|((h, q), g)| HomologyEntry { h: *h, q: *q, free: g.free, torsion: g.torsion.clone() })
            .collect()
    }

    pub fn from_entries(es: &[HomologyEntry]) -> HomologyTable {
        let mut t = HomologyTable::default();
        for e in es {
            let g = t.groups.entry((e.h, e.q)).or_default();
            g.free += e.free;
            g.torsion.extend(e.torsion.iter().copied());
            g.torsion.sort_unstable();
        }
        t.groups.retain(|_, g| !g.is_zero());
        t
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.entries()).expect("serializable")
    }

    /// Graded Euler characteristic as a map q-exponent -> coefficient.
    pub fn euler_characteristic(&self) -> BTreeMap<i64, i64> {
        let mut out: BTreeMap<i64, i64> = BTreeMap::new();
        for ((h, q), g) in &self.groups {
            let s = if h.rem_euclid(2) == 0 { 1 } else { -1 };
            *out.entry(*q).or_insert(0) += s * g.free as i64;
        }
        out.retain(|_, v| *v != 0);
        out
    }
}

/// Split an invariant factor into prime-power orders.
fn prime_powers(x: &BigInt) -> Vec<u64> {
    let mut n = x.abs().to_u64().expect("torsion order fits in u64");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut pk = 1;
            while n % p == 0 {
                n /= p;
                pk *= p;
            }
            out.push(pk);
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Homology of a complex, computed per bigrading with Smith normal forms.
pub fn homology(c: &GradedComplex) -> HomologyTable {
    let groups = c.groups();
    // rank and torsion of the differential leaving each bigrading
    let keys: Vec<Grade> = groups.keys().copied().collect();
    let out_data: BTreeMap<Grade, (usize, Vec<BigInt>)> = keys
        .par_iter()
        .map(|g| {
            let src = &groups[g];
            let tgt = groups.get(&(g.0 - 1, g.1)).cloned().unwrap_or_default();
            (*g, rank_and_torsion(&c.d.select(&tgt, src)))
        })
        .collect();
    let mut table = HomologyTable::default();
    for g in &keys {
        let dim = groups[g].len();
        let rank_out = out_data[g].0;
        let (rank_in, tors) = out_data.get(&(g.0 + 1, g.1)).cloned().unwrap_or_default();
        let mut torsion: Vec<u64> = tors.iter().flat_map(prime_powers).collect();
        torsion.sort_unstable();
        let hg = HomologyGroup { free: dim - rank_out - rank_in, torsion };
        if !hg.is_zero() {
            table.groups.insert(*g, hg);
        }
    }
    table
}

/// A map between complexes given by one matrix (rows index the target basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    pub m: SparseMatrix,
    pub bidegree: Grade,
}

impl ChainMap {
    pub fn new(m: SparseMatrix, bidegree: Grade) -> Self {
        ChainMap { m, bidegree }
    }

    pub fn identity(c: &GradedComplex) -> Self {
        ChainMap { m: SparseMatrix::identity(c.dim()), bidegree: (0, 0) }
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        ChainMap {
            m: self.m.mul(&first.m),
            bidegree: (self.bidegree.0 + first.bidegree.0, self.bidegree.1 + first.bidegree.1),
        }
    }

    pub fn neg(&self) -> ChainMap {
        ChainMap { m: self.m.scaled(&BigInt::from(-1)), bidegree: self.bidegree }
    }

    /// Check homogeneity and `d f = (-1)^{dh} f d`.
    pub fn check(&self, source: &GradedComplex, target: &GradedComplex) -> Result<()> {
        if self.m.nrows() != target.dim() || self.m.ncols() != source.dim() {
            return Err(KhError::Shape("chain map size".into()));
        }
        for (r, c, _) in self.m.triplets() {
            let (hs, qs) = source.grades[c];
            let (ht, qt) = target.grades[r];
            if (ht - hs, qt - qs) != self.bidegree {
                return Err(KhError::Bidegree(format!("map entry {c}->{r} has degree ({},{})", ht - hs, qt - qs)));
            }
        }
        let lhs = target.d.mul(&self.m);
        let mut rhs = self.m.mul(&source.d);
        if self.bidegree.0.rem_euclid(2) == 1 {
            rhs = rhs.scaled(&BigInt::from(-1));
        }
        if lhs != rhs {
            return Err(KhError::NotAComplex("map does not commute with differentials".into()));
        }
        Ok(())
    }
}

/// Mapping cone of a bidegree-(0,0) map: target plus source shifted up by one in `h`.
pub fn cone(f: &ChainMap, source: &GradedComplex, target: &GradedComplex) -> Result<GradedComplex> {
    if f.bidegree != (0, 0) {
        return Err(KhError::Bidegree(format!("cone needs a (0,0) map, got {:?}", f.bidegree)));
    }
    f.check(source, target)?;
    let nt = target.dim();
    let mut grades = target.grades.clone();
    grades.extend(source.grades.iter().map(|(h, q)| (h + 1, *q)));
    let n = grades.len();
    let mut t: Vec<(usize, usize, BigInt)> = target.d.triplets().map(|(r, c, v)| (r, c, v.clone())).collect();
    t.extend(f.m.triplets().map(|(r, c, v)| (r, c + nt, v.clone())));
    t.extend(source.d.triplets().map(|(r, c, v)| (r + nt, c + nt, -v)));
    GradedComplex::new(grades, SparseMatrix::from_triplets(n, n, t))
}

/// Tensor product with the Koszul sign rule; basis pairs are ordered `(i, j)` row-major.
pub fn tensor(a: &GradedComplex, b: &GradedComplex) -> GradedComplex {
    let (na, nb) = (a.dim(), b.dim());
    let idx = |i: usize, j: usize| i * nb + j;
    let mut grades = Vec::with_capacity(na * nb);
    for ga in &a.grades {
        for gb in &b.grades {
            grades.push((ga.0 + gb.0, ga.1 + gb.1));
        }
    }
    let mut t = Vec::new();
    for (r, c, v) in a.d.triplets() {
        for j in 0..nb {
            t.push((idx(r, j), idx(c, j), v.clone()));
        }
    }
    for (r, c, v) in b.d.triplets() {
        for i in 0..na {
            let s = if a.grades[i].0.rem_euclid(2) == 0 { v.clone() } else { -v };
            t.push((idx(i, r), idx(i, c), s));
        }
    }
    let n = na * nb;
    GradedComplex { grades, d: SparseMatrix::from_triplets(n, n, t) }
}

/// The complex of maps `C -> D` restricted to the given h-degrees (all q-degrees).
///
/// Basis element `(j, i)` is the elementary map sending basis vector `i` of `C` to
/// basis vector `j` of `D`; its bidegree is `grade_D(j) - grade_C(i)`.
pub struct HomComplex {
    pub complex: GradedComplex,
    pub pairs: Vec<(usize, usize)>,
}

pub fn hom_complex(c: &GradedComplex, d: &GradedComplex, h_degrees: Option<&[i64]>) -> HomComplex {
    let wanted: Option<BTreeSet<i64>> = h_degrees.map(|s| s.iter().copied().collect());
    let mut pairs = Vec::new();
    let mut grades = Vec::new();
    let mut index = BTreeMap::new();
    for j in 0..d.dim() {
        for i in 0..c.dim() {
            let g = (d.grades[j].0 - c.grades[i].0, d.grades[j].1 - c.grades[i].1);
            if wanted.as_ref().map_or(true, |w| w.contains(&g.0)) {
                index.insert((j, i), pairs.len());
                pairs.push((j, i));
                grades.push(g);
            }
        }
    }
    // D(E_{ji}) = sum_l dD[l,j] E_{li} - (-1)^k sum_m dC[i,m] E_{jm}
    let dc_rows = c.d.transpose();
    let mut t = Vec::new();
    for (col, (j, i)) in pairs.iter().enumerate() {
        let k = grades[col].0;
        for (l, v) in d.d.col(*j) {
            if let Some(row) = index.get(&(*l, *i)) {
                t.push((*row, col, v.clone()));
            }
        }
        for (m, v) in dc_rows.col(*i) {
            if let Some(row) = index.get(&(*j, *m)) {
                let s = if k.rem_euclid(2) == 0 { -v } else { v.clone() };
                t.push((*row, col, s));
            }
        }
    }
    let n = pairs.len();
    HomComplex { complex: GradedComplex { grades, d: SparseMatrix::from_triplets(n, n, t) }, pairs }
}

/// A deformation retraction of a complex onto a smaller one obtained by Gaussian
/// elimination: `proj * incl = id` and `incl * proj` is homotopic to the identity.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub complex: GradedComplex,
    /// Original basis indices that survive, in order.
    pub kept: Vec<usize>,
    pub incl: SparseMatrix,
    pub proj: SparseMatrix,
}

/// Sparse differential with both row and column access, used for elimination.
struct Workspace {
    cols: BTreeMap<usize, BTreeMap<usize, BigInt>>,
    rows: BTreeMap<usize, BTreeMap<usize, BigInt>>,
    // incl: original x current, stored by current column
    incl: BTreeMap<usize, BTreeMap<usize, BigInt>>,
    // proj: current x original, stored by current row
    proj: BTreeMap<usize, BTreeMap<usize, BigInt>>,
}

fn add_scaled(target: &mut BTreeMap<usize, BigInt>, src: &BTreeMap<usize, BigInt>, k: &BigInt) {
    for (i, v) in src {
        let e = target.entry(*i).or_insert_with(BigInt::zero);
        *e += v * k;
        if e.is_zero() {
            target.remove(i);
        }
    }
}

impl Workspace {
    fn new(c: &GradedComplex) -> Self {
        let mut cols: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        let mut rows: BTreeMap<usize, BTreeMap<usize, BigInt>> = BTreeMap::new();
        for i in 0..c.dim() {
            cols.insert(i, BTreeMap::new());
            rows.insert(i, BTreeMap::new());
        }
        for (r, col, v) in c.d.triplets() {
            cols.get_mut(&col).unwrap().insert(r, v.clone());
            rows.get_mut(&r).unwrap().insert(col, v.clone());
        }
        let unit = |i: usize| -> BTreeMap<usize, BigInt> { [(i, BigInt::one())].into_iter().collect() };
        Workspace {
            cols,
            rows,
            incl: (0..c.dim()).map(|i| (i, unit(i))).collect(),
            proj: (0..c.dim()).map(|i| (i, unit(i))).collect(),
        }
    }

    fn set(&mut self, r: usize, c: usize, v: BigInt) {
        if v.is_zero() {
            self.cols.get_mut(&c).unwrap().remove(&r);
            self.rows.get_mut(&r).unwrap().remove(&c);
        } else {
            self.cols.get_mut(&c).unwrap().insert(r, v.clone());
            self.rows.get_mut(&r).unwrap().insert(c, v);
        }
    }

    /// Eliminate the unit entry `d[b2, b1]`.
    fn eliminate(&mut self, b1: usize, b2: usize) {
        let phi = self.cols[&b1][&b2].clone();
        debug_assert!(phi.abs().is_one());
        let phi_inv = phi; // a unit is its own inverse
        // d' = d - d[., b1] phi^-1 d[b2, .]
        let into: Vec<(usize, BigInt)> =
            self.cols[&b1].iter().filter(|(r, _)| **r != b2).map(|(r, v)| (*r, v.clone())).collect();
        let out: Vec<(usize, BigInt)> =
            self.rows[&b2].iter().filter(|(c, _)| **c != b1).map(|(c, v)| (*c, v.clone())).collect();
        for (r, a) in &into {
            for (c, b) in &out {
                let cur = self.cols[c].get(r).cloned().unwrap_or_else(BigInt::zero);
                let nv = cur - a * &phi_inv * b;
                self.set(*r, *c, nv);
            }
        }
        // incl: column x -= phi^-1 d[b2, x] * column b1
        let col_b1 = self.incl[&b1].clone();
        for (x, b) in &out {
            let k = -(&phi_inv * b);
            add_scaled(self.incl.get_mut(x).unwrap(), &col_b1, &k);
        }
        // proj: row r -= d[r, b1] phi^-1 * row b2
        let row_b2 = self.proj[&b2].clone();
        for (r, a) in &into {
            let k = -(a * &phi_inv);
            add_scaled(self.proj.get_mut(r).unwrap(), &row_b2, &k);
        }
        for b in [b1, b2] {
            let col: Vec<usize> = self.cols[&b].keys().copied().collect();
            for r in col {
                self.rows.get_mut(&r).unwrap().remove(&b);
            }
            let row: Vec<usize> = self.rows[&b].keys().copied().collect();
            for c in row {
                self.cols.get_mut(&c).unwrap().remove(&b);
            }
            self.cols.remove(&b);
            self.rows.remove(&b);
            self.incl.remove(&b);
            self.proj.remove(&b);
        }
    }

    fn finish(self, c: &GradedComplex) -> Reduction {
        let kept: Vec<usize> = self.cols.keys().copied().collect();
        let pos: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let n = kept.len();
        let grades = kept.iter().map(|k| c.grades[*k]).collect();
        let mut t = Vec::new();
        for (col, entries) in &self.cols {
            for (r, v) in entries {
                t.push((pos[r], pos[col], v.clone()));
            }
        }
        let mut ti = Vec::new();
        for (col, entries) in &self.incl {
            for (r, v) in entries {
                ti.push((*r, pos[col], v.clone()));
            }
        }
        let mut tp = Vec::new();
        for (row, entries) in &self.proj {
            for (col, v) in entries {
                tp.push((pos[row], *col, v.clone()));
            }
        }
        Reduction {
            complex: GradedComplex { grades, d: SparseMatrix::from_triplets(n, n, t) },
            kept,
            incl: SparseMatrix::from_triplets(c.dim(), n, ti),
            proj: SparseMatrix::from_triplets(n, c.dim(), tp),
        }
    }
}

/// Gaussian elimination of every available unit entry of the differential.
pub fn simplify(c: &GradedComplex) -> Reduction {
    let mut w = Workspace::new(c);
    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        for (col, entries) in &w.cols {
            for (r, v) in entries {
                if v.abs().is_one() {
                    let cost = entries.len() * w.rows[r].len();
                    if best.map_or(true, |(b, _, _)| cost < b) {
                        best = Some((cost, *col, *r));
                    }
                }
            }
        }
        match best {
            Some((_, b1, b2)) => w.eliminate(b1, b2),
            None => break,
        }
    }
    w.finish(c)
}

/// Gaussian elimination along a prescribed list of pivots `(source, target)`, in order.
/// Every pivot entry must still be a unit when it is reached.
pub fn eliminate_pivots(c: &GradedComplex, pivots: &[(usize, usize)]) -> Result<Reduction> {
    let mut w = Workspace::new(c);
    for (b1, b2) in pivots {
        let ok = w.cols.get(b1).and_then(|col| col.get(b2)).map_or(false, |v| v.abs().is_one());
        if !ok {
            return Err(KhError::NotApplicable(format!("pivot {b1}->{b2} is not a unit")));
        }
        w.eliminate(*b1, *b2);
    }
    Ok(w.finish(c))
}

/// Gaussian elimination of the unit entries `d[target, source]` accepted by `allowed`,
/// scanning columns and rows in increasing order until nothing is left to eliminate.
pub fn eliminate_where(c: &GradedComplex, allowed: impl Fn(usize, usize) -> bool) -> Reduction {
    let mut w = Workspace::new(c);
    loop {
        let mut found = None;
        'scan: for (col, entries) in &w.cols {
            for (r, v) in entries {
                if v.abs().is_one() && allowed(*col, *r) {
                    found = Some((*col, *r));
                    break 'scan;
                }
            }
        }
        match found {
            Some((b1, b2)) => w.eliminate(b1, b2),
            None => break,
        }
    }
    w.finish(c)
}

/// Whether the map `delta: C -> D` (any mixture of bidegrees) is null-homotopic.
pub fn is_null_homotopic(delta: &SparseMatrix, c: &GradedComplex, d: &GradedComplex) -> bool {
    let rc = simplify(c);
    let rd = simplify(d);
    let reduced = rd.proj.mul(delta).mul(&rc.incl);
    null_homotopic_exact(&reduced, &rc.complex, &rd.complex)
}

fn null_homotopic_exact(delta: &SparseMatrix, c: &GradedComplex, d: &GradedComplex) -> bool {
    null_homotopy_exact(delta, c, d).is_some()
}

/// A homotopy `H: C -> D` with `delta = d H - (-1)^{k+1} H d` on each homogeneous
/// component of bidegree `(k, l)`, if there is one.
fn null_homotopy_exact(delta: &SparseMatrix, c: &GradedComplex, d: &GradedComplex) -> Option<SparseMatrix> {
    let mut homotopy = Vec::new();
    if delta.is_zero() {
        return Some(SparseMatrix::zeros(d.dim(), c.dim()));
    }
    // split into homogeneous components
    let mut parts: BTreeMap<Grade, Vec<(usize, usize, BigInt)>> = BTreeMap::new();
    for (r, col, v) in delta.triplets() {
        let g = (d.grades[r].0 - c.grades[col].0, d.grades[r].1 - c.grades[col].1);
        parts.entry(g).or_default().push((r, col, v.clone()));
    }
    for ((k, l), entries) in parts {
        let vars: Vec<(usize, usize)> = (0..d.dim())
            .flat_map(|j| (0..c.dim()).map(move |i| (j, i)))
            .filter(|(j, i)| (d.grades[*j].0 - c.grades[*i].0, d.grades[*j].1 - c.grades[*i].1) == (k + 1, l))
            .collect();
        let eqs: Vec<(usize, usize)> = (0..d.dim())
            .flat_map(|j| (0..c.dim()).map(move |i| (j, i)))
            .filter(|(j, i)| (d.grades[*j].0 - c.grades[*i].0, d.grades[*j].1 - c.grades[*i].1) == (k, l))
            .collect();
        let eq_index: BTreeMap<(usize, usize), usize> = eqs.iter().enumerate().map(|(n, p)| (*p, n)).collect();
        // (d H - (-1)^{k+1} H d)[j', i']
        let hsign = if (k + 1).rem_euclid(2) == 0 { BigInt::from(-1) } else { BigInt::one() };
        let dc_t = c.d.transpose();
        let mut t = Vec::new();
        for (col, (j, i)) in vars.iter().enumerate() {
            for (jp, v) in d.d.col(*j) {
                if let Some(row) = eq_index.get(&(*jp, *i)) {
                    t.push((*row, col, v.clone()));
                }
            }
            for (ip, v) in dc_t.col(*i) {
                // (H d)[j, ip] gets H[j, i] * d[i, ip]
                if let Some(row) = eq_index.get(&(*j, *ip)) {
                    t.push((*row, col, &hsign * v));
                }
            }
        }
        let a = SparseMatrix::from_triplets(eqs.len(), vars.len(), t);
        let mut b = vec![BigInt::zero(); eqs.len()];
        for (r, col, v) in entries {
            b[*eq_index.get(&(r, col))?] = v;
        }
        let x = solve_integer(&a, &b)?;
        homotopy.extend(vars.iter().zip(x).filter(|(_, v)| !v.is_zero()).map(|((j, i), v)| (*j, *i, v)));
    }
    Some(SparseMatrix::from_triplets(d.dim(), c.dim(), homotopy))
}

/// The signs `s` with `f - s g` null-homotopic.
pub fn homotopy_signs(f: &SparseMatrix, g: &SparseMatrix, c: &GradedComplex, d: &GradedComplex) -> Vec<i64> {
    let rc = simplify(c);
    let rd = simplify(d);
    let fr = rd.proj.mul(f).mul(&rc.incl);
    let gr = rd.proj.mul(g).mul(&rc.incl);
    [1i64, -1]
        .into_iter()
        .filter(|s| null_homotopic_exact(&fr.sub(&gr.scaled(&BigInt::from(*s))), &rc.complex, &rd.complex))
        .collect()
}

/// A homotopy between `f` and `sign * g`, written on the minimal complexes of `c`
/// and `d` that `simplify` produces.
pub fn minimal_homotopy(f: &SparseMatrix, g: &SparseMatrix, sign: i64, c: &GradedComplex, d: &GradedComplex) -> Option<SparseMatrix> {
    let rc = simplify(c);
    let rd = simplify(d);
    let delta = rd.proj.mul(&f.sub(&g.scaled(&BigInt::from(sign)))).mul(&rc.incl);
    null_homotopy_exact(&delta, &rc.complex, &rd.complex)
}

/// One block of a map between minimal complexes: the columns are the generators at
/// `source` and the rows those at `target`. When no differential touches either side
/// (`exact`), the generators are bases of free homology and the block is the induced
/// map on homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalBlock {
    pub source: Grade,
    pub target: Grade,
    #[serde(serialize_with = "crate::io::serialize_rows")]
    pub matrix: Vec<Vec<BigInt>>,
    pub exact: bool,
}

/// The map `f: C -> D` of bidegree `bidegree` pushed to the minimal complexes.
pub fn minimal_map(f: &SparseMatrix, bidegree: Grade, c: &GradedComplex, d: &GradedComplex) -> Vec<MinimalBlock> {
    let rc = simplify(c);
    let rd = simplify(d);
    let m = rd.proj.mul(f).mul(&rc.incl);
    let touched = |r: &Reduction| -> Vec<bool> {
        let mut t = vec![false; r.complex.dim()];
        for (i, j, _) in r.complex.d.triplets() {
            t[i] = true;
            t[j] = true;
        }
        t
    };
    let (tc, td) = (touched(&rc), touched(&rd));
    let gc = rc.complex.groups();
    let gd = rd.complex.groups();
    gc.iter()
        .map(|(g, cols)| {
            let target = (g.0 + bidegree.0, g.1 + bidegree.1);
            let rows = gd.get(&target).cloned().unwrap_or_default();
            let matrix = rows.iter().map(|r| cols.iter().map(|c| m.get(*r, *c)).collect()).collect();
            let exact = cols.iter().all(|c| !tc[*c]) && rows.iter().all(|r| !td[*r]);
            MinimalBlock { source: *g, target, matrix, exact }
        })
        .collect()
}

/// `[f - g] = 0` or `[f + g] = 0` in the homology of the Hom complex.
pub fn equal_up_to_sign_and_homotopy(
    f: &ChainMap,
    g: &ChainMap,
    c: &GradedComplex,
    d: &GradedComplex,
) -> Result<bool> {
    if f.m.nrows() != g.m.nrows() || f.m.ncols() != g.m.ncols() {
        return Err(KhError::Shape("maps have different shapes".into()));
    }
    if f.m.nrows() != d.dim() || f.m.ncols() != c.dim() {
        return Err(KhError::Shape("maps do not match the complexes".into()));
    }
    Ok(!homotopy_signs(&f.m, &g.m, c, d).is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn two_term(k: i64) -> GradedComplex {
        // Z at (1,0) -> Z at (0,0) by multiplication with k
        GradedComplex::new(vec![(1, 0), (0, 0)], SparseMatrix::from_triplets(2, 2, [(1, 0, bi(k))])).unwrap()
    }

    #[test]
    fn homology_of_free_group() {
        let c = GradedComplex::new(vec![(0, 0), (0, 0)], SparseMatrix::zeros(2, 2)).unwrap();
        let h = c.homology();
        assert_eq!(h.get(0, 0), HomologyGroup { free: 2, torsion: vec![] });
    }

    #[test]
    fn homology_of_multiplication_by_two() {
        let h = two_term(2).homology();
        assert_eq!(h.get(0, 0), HomologyGroup { free: 0, torsion: vec![2] });
        assert!(h.get(1, 0).is_zero());
        assert_eq!(h.to_json(), r#"[{"h":0,"q":0,"free":0,"torsion":[2]}]"#);
    }

    #[test]
    fn torsion_splits_into_prime_powers() {
        assert_eq!(two_term(12).homology().get(0, 0).torsion, vec![3, 4]);
    }

    #[test]
    fn rejects_non_complex() {
        let d = SparseMatrix::from_triplets(3, 3, [(1, 0, bi(1)), (2, 1, bi(1))]);
        assert!(GradedComplex::new(vec![(2, 0), (1, 0), (0, 0)], d).is_err());
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = two_term(3);
        let cc = cone(&ChainMap::identity(&c), &c, &c).unwrap();
        assert!(cc.homology().groups.is_empty());
    }

    #[test]
    fn cone_of_zero_is_sum() {
        let c = two_term(2);
        let z = ChainMap::new(SparseMatrix::zeros(2, 2), (0, 0));
        let h = cone(&z, &c, &c).unwrap().homology();
        assert_eq!(h, c.homology().shifted(1, 0).groups.into_iter().chain(c.homology().groups).fold(
            HomologyTable::default(),
            |mut t, (k, v)| {
                t.groups.insert(k, v);
                t
            }
        ));
    }

    #[test]
    fn tensor_with_unit() {
        let c = two_term(2);
        let t = tensor(&c, &GradedComplex::unit((0, 0)));
        assert_eq!(t.homology(), c.homology());
        t.validate().unwrap();
    }

    #[test]
    fn hom_of_unit() {
        let u = GradedComplex::unit((0, 0));
        let h = hom_complex(&u, &u, None);
        assert_eq!(h.complex.homology().get(0, 0).free, 1);
    }

    #[test]
    fn homotopy_decisions() {
        let c = GradedComplex::unit((0, 0));
        let id = ChainMap::identity(&c);
        assert!(equal_up_to_sign_and_homotopy(&id, &id, &c, &c).unwrap());
        assert!(equal_up_to_sign_and_homotopy(&id, &id.neg(), &c, &c).unwrap());
        let two = ChainMap::new(SparseMatrix::identity(1).scaled(&bi(2)), (0, 0));
        assert!(!equal_up_to_sign_and_homotopy(&two, &id, &c, &c).unwrap());
        // on an acyclic complex every map is null-homotopic
        let a = two_term(1);
        let z = ChainMap::new(SparseMatrix::zeros(2, 2), (0, 0));
        assert!(equal_up_to_sign_and_homotopy(&ChainMap::identity(&a), &z, &a, &a).unwrap());
    }

    #[test]
    fn simplification_is_a_retraction() {
        let d = SparseMatrix::from_triplets(
            4,
            4,
            [(1, 0, bi(1)), (2, 0, bi(2)), (3, 1, bi(2)), (3, 2, bi(-1))],
        );
        let c = GradedComplex::new(vec![(2, 0), (1, 0), (1, 0), (0, 0)], d).unwrap();
        let r = simplify(&c);
        assert_eq!(r.proj.mul(&r.incl), SparseMatrix::identity(r.complex.dim()));
        ChainMap::new(r.incl.clone(), (0, 0)).check(&r.complex, &c).unwrap();
        ChainMap::new(r.proj.clone(), (0, 0)).check(&c, &r.complex).unwrap();
        assert_eq!(r.complex.homology(), c.homology());
        let back = r.incl.mul(&r.proj);
        assert!(is_null_homotopic(&back.sub(&SparseMatrix::identity(4)), &c, &c));
    }
}
