//! Khovanov's arc algebras: `hom(a, b) = V(a b̄)` with composition by the
//! canonical saddles contracting `b̄ ⊔ b`.

use std::collections::BTreeMap;

use crate::error::{KhError, Result};
use crate::matching::{enumerate_matchings, CrossinglessMatching};
use crate::surgery::{Surgery, SECOND_BASE};
use crate::tqft::{all_labelings, labeling_degree, rename_circles, CircleId, Label, Labeling, TqftVector};
use crate::unionfind::UnionFind;

// arc tags used in pictures
pub const TAG_INSIDE: u8 = 0;
pub const TAG_OUTSIDE: u8 = 1;
pub const TAG_GLUED: u8 = 2;

/// Circles of the picture `a b̄` on points `1..=n`, each named by its smallest point.
/// Returns the circle id of every point (index `k - 1`).
pub fn picture_circles(a: &CrossinglessMatching, b: &CrossinglessMatching) -> Vec<CircleId> {
    let n = a.n;
    let mut uf = UnionFind::new(n);
    for (i, j) in a.pairs.iter().chain(&b.pairs) {
        uf.union(i - 1, j - 1);
    }
    let mut min_of: BTreeMap<usize, CircleId> = BTreeMap::new();
    for k in 0..n {
        let r = uf.find(k);
        min_of.entry(r).or_insert(k as CircleId + 1);
    }
    (0..n).map(|k| min_of[&uf.find(k)]).collect()
}

#[derive(Clone, Debug)]
pub struct ArcAlgebra {
    pub n: usize,
    pub matchings: Vec<CrossinglessMatching>,
}

impl ArcAlgebra {
    pub fn new(n: usize) -> Result<Self> {
        Ok(ArcAlgebra { n, matchings: enumerate_matchings(n)? })
    }

    pub fn index_of(&self, m: &CrossinglessMatching) -> usize {
        self.matchings.iter().position(|x| x == m).expect("matching belongs to the algebra")
    }

    pub fn hom_circles(&self, a: usize, b: usize) -> Vec<CircleId> {
        let mut c = picture_circles(&self.matchings[a], &self.matchings[b]);
        c.sort_unstable();
        c.dedup();
        c
    }

    pub fn hom_basis(&self, a: usize, b: usize) -> Vec<Labeling> {
        all_labelings(&self.hom_circles(a, b))
    }

    pub fn q_grade(&self, l: &Labeling) -> i64 {
        labeling_degree(l) + self.n as i64 / 2
    }

    pub fn total_rank(&self) -> usize {
        let k = self.matchings.len();
        (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).map(|(a, b)| 1usize << self.hom_circles(a, b).len()).sum()
    }

    /// The idempotent `1_a`: every circle of `a ā` labeled 1.
    pub fn identity(&self, a: usize) -> TqftVector {
        TqftVector::generator(self.hom_circles(a, a).into_iter().map(|c| (c, Label::One)).collect())
    }

    /// Product `hom(a, b) ⊗ hom(b, c) -> hom(a, c)`.
    pub fn compose(&self, a: usize, b: usize, c: usize, x: &TqftVector, y: &TqftVector) -> Result<TqftVector> {
        let n = self.n;
        let (ma, mb, mc) = (&self.matchings[a], &self.matchings[b], &self.matchings[c]);
        // nodes 0..n carry the picture a b̄, nodes n..2n the picture b c̄
        let mut arcs = Vec::new();
        for (i, j) in &ma.pairs {
            arcs.push((i - 1, j - 1, TAG_INSIDE));
        }
        for (i, j) in &mb.pairs {
            arcs.push((i - 1, j - 1, TAG_OUTSIDE));
            arcs.push((n + i - 1, n + j - 1, TAG_INSIDE));
        }
        for (i, j) in &mc.pairs {
            arcs.push((n + i - 1, n + j - 1, TAG_OUTSIDE));
        }
        let cx = picture_circles(ma, mb);
        let cy = picture_circles(mb, mc);
        let mut node_circle = cx.clone();
        node_circle.extend(cy.iter().map(|c| c + SECOND_BASE));
        let shift: BTreeMap<CircleId, CircleId> = cy.iter().map(|c| (*c, c + SECOND_BASE)).collect();
        if x.circles().iter().copied().ne(self.hom_circles(a, b)) || y.circles().iter().copied().ne(self.hom_circles(b, c)) {
            return Err(KhError::Shape("factors do not live in the requested hom spaces".into()));
        }
        let v = x.tensor(&rename_circles(y, &shift)?)?;
        let mut s = Surgery::new(arcs, node_circle, v);
        let xs: Vec<usize> = (0..n).collect();
        let ys: Vec<usize> = (n..2 * n).collect();
        s.contract(mb, &xs, TAG_OUTSIDE, &ys, TAG_INSIDE, TAG_GLUED)?;
        let target = picture_circles(ma, mc);
        s.finish(|node| target[node % n], &BTreeMap::new())
    }

    /// Exhaustive check on basis elements: the idempotents are units, products add
    /// quantum grades, and composition is associative.
    pub fn check_structure(&self) -> Result<()> {
        let k = self.matchings.len();
        let fail = |what: &str, a: usize, b: usize| Err(KhError::Precondition(format!("{what} fails on hom({a}, {b})")));
        for a in 0..k {
            for b in 0..k {
                for x in self.hom_basis(a, b) {
                    let xv = TqftVector::generator(x.clone());
                    if self.compose(a, a, b, &self.identity(a), &xv)? != xv || self.compose(a, b, b, &xv, &self.identity(b))? != xv {
                        return fail("unit", a, b);
                    }
                    for c in 0..k {
                        for y in self.hom_basis(b, c) {
                            let yv = TqftVector::generator(y.clone());
                            let xy = self.compose(a, b, c, &xv, &yv)?;
                            if xy.terms().keys().any(|l| self.q_grade(l) != self.q_grade(&x) + self.q_grade(&y)) {
                                return fail("grading", a, c);
                            }
                            for d in 0..k {
                                for z in self.hom_basis(c, d) {
                                    let zv = TqftVector::generator(z);
                                    let left = self.compose(a, c, d, &xy, &zv)?;
                                    let right = self.compose(a, b, d, &xv, &self.compose(b, c, d, &yv, &zv)?)?;
                                    if left != right {
                                        return fail("associativity", a, d);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(ArcAlgebra::new(0).unwrap().total_rank(), 1);
        assert_eq!(ArcAlgebra::new(2).unwrap().total_rank(), 2);
        assert_eq!(ArcAlgebra::new(4).unwrap().total_rank(), 12);
        assert!(ArcAlgebra::new(3).is_err());
    }

    #[test]
    fn two_point_algebra_is_dual_numbers() {
        let alg = ArcAlgebra::new(2).unwrap();
        let x = TqftVector::generator([(1, Label::X)].into_iter().collect());
        let one = alg.identity(0);
        assert_eq!(alg.compose(0, 0, 0, &one, &x).unwrap(), x);
        assert!(alg.compose(0, 0, 0, &x, &x).unwrap().is_zero());
    }

    #[test]
    fn associative_unital_graded_n4() {
        ArcAlgebra::new(4).unwrap().check_structure().unwrap();
    }
}
