//! The Frobenius algebra V = Z[X]/(X^2) acting on labelings of closed planar 1-manifolds.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{KhError, Result};

pub type CircleId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    One,
    X,
}

impl Label {
    pub fn q_degree(self) -> i64 {
        match self {
            Label::One => -1,
            Label::X => 1,
        }
    }
}

/// A full labeling of a set of circles, kept sorted by circle id.
pub type Labeling = BTreeMap<CircleId, Label>;

pub fn labeling_degree(l: &Labeling) -> i64 {
    l.values().map(|x| x.q_degree()).sum()
}

/// All labelings of the given circles, ordered lexicographically with `One < X`.
pub fn all_labelings(circles: &[CircleId]) -> Vec<Labeling> {
    let mut sorted: Vec<CircleId> = circles.to_vec();
    sorted.sort_unstable();
    let k = sorted.len();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0..(1u64 << k) {
        let mut l = Labeling::new();
        for (i, c) in sorted.iter().enumerate() {
            // most significant circle first so that the order is lexicographic
            let bit = (mask >> (k - 1 - i)) & 1;
            l.insert(*c, if bit == 1 { Label::X } else { Label::One });
        }
        out.push(l);
    }
    out
}

/// An integer combination of labelings of one fixed 1-manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TqftVector {
    circles: BTreeSet<CircleId>,
    terms: BTreeMap<Labeling, BigInt>,
}

impl TqftVector {
    pub fn zero(circles: impl IntoIterator<Item = CircleId>) -> Self {
        TqftVector { circles: circles.into_iter().collect(), terms: BTreeMap::new() }
    }

    /// The generator `1` of V(empty manifold) = Z.
    pub fn unit() -> Self {
        Self::generator(Labeling::new())
    }

    pub fn generator(l: Labeling) -> Self {
        let circles = l.keys().copied().collect();
        let mut terms = BTreeMap::new();
        terms.insert(l, BigInt::one());
        TqftVector { circles, terms }
    }

    pub fn from_terms(
        circles: impl IntoIterator<Item = CircleId>,
        terms: impl IntoIterator<Item = (Labeling, BigInt)>,
    ) -> Result<Self> {
        let mut v = Self::zero(circles);
        for (l, c) in terms {
            if !l.keys().copied().eq(v.circles.iter().copied()) {
                return Err(KhError::Shape("labeling does not match the manifold".into()));
            }
            v.add_term(l, c);
        }
        Ok(v)
    }

    pub fn circles(&self) -> &BTreeSet<CircleId> {
        &self.circles
    }

    pub fn terms(&self) -> &BTreeMap<Labeling, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, l: &Labeling) -> BigInt {
        self.terms.get(l).cloned().unwrap_or_else(BigInt::zero)
    }

    fn add_term(&mut self, l: Labeling, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(l) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &TqftVector) -> Result<TqftVector> {
        if self.circles != other.circles {
            return Err(KhError::Shape("vectors live on different manifolds".into()));
        }
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c.clone());
        }
        Ok(out)
    }

    /// Tensor product over disjoint circle sets.
    pub fn tensor(&self, other: &TqftVector) -> Result<TqftVector> {
        if let Some(c) = self.circles.intersection(&other.circles).next() {
            return Err(KhError::CircleIdCollision(*c));
        }
        let mut out = TqftVector::zero(self.circles.union(&other.circles).copied());
        for (l, a) in &self.terms {
            for (m, b) in &other.terms {
                let mut nl = l.clone();
                nl.extend(m.iter().map(|(c, x)| (*c, *x)));
                out.add_term(nl, a * b);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &BigInt) -> TqftVector {
        let mut out = Self::zero(self.circles.iter().copied());
        if k.is_zero() {
            return out;
        }
        for (l, c) in &self.terms {
            out.terms.insert(l.clone(), c * k);
        }
        out
    }

    fn require(&self, c: CircleId) -> Result<()> {
        if self.circles.contains(&c) {
            Ok(())
        } else {
            Err(KhError::UnknownCircle(c))
        }
    }

    fn fresh(circles: &BTreeSet<CircleId>, c: CircleId) -> Result<()> {
        if circles.contains(&c) {
            Err(KhError::CircleIdCollision(c))
        } else {
            Ok(())
        }
    }
}

/// Multiplication m: V (x) V -> V merging `c1` and `c2` into `c_new`.
pub fn apply_merge(v: &TqftVector, c1: CircleId, c2: CircleId, c_new: CircleId) -> Result<TqftVector> {
    if c1 == c2 {
        return Err(KhError::RepeatedCircle(c1));
    }
    v.require(c1)?;
    v.require(c2)?;
    let mut circles = v.circles.clone();
    circles.remove(&c1);
    circles.remove(&c2);
    TqftVector::fresh(&circles, c_new)?;
    circles.insert(c_new);
    let mut out = TqftVector::zero(circles);
    for (l, c) in &v.terms {
        let label = match (l[&c1], l[&c2]) {
            (Label::One, Label::One) => Label::One,
            (Label::X, Label::X) => continue,
            _ => Label::X,
        };
        let mut nl = l.clone();
        nl.remove(&c1);
        nl.remove(&c2);
        nl.insert(c_new, label);
        out.add_term(nl, c.clone());
    }
    Ok(out)
}

/// Comultiplication: 1 -> 1(x)X + X(x)1, X -> X(x)X.
pub fn apply_split(v: &TqftVector, c: CircleId, c1: CircleId, c2: CircleId) -> Result<TqftVector> {
    v.require(c)?;
    if c1 == c2 {
        return Err(KhError::RepeatedCircle(c1));
    }
    let mut circles = v.circles.clone();
    circles.remove(&c);
    TqftVector::fresh(&circles, c1)?;
    TqftVector::fresh(&circles, c2)?;
    circles.insert(c1);
    circles.insert(c2);
    let mut out = TqftVector::zero(circles);
    for (l, k) in &v.terms {
        let mut base = l.clone();
        base.remove(&c);
        let pairs: &[(Label, Label)] = match l[&c] {
            Label::One => &[(Label::One, Label::X), (Label::X, Label::One)],
            Label::X => &[(Label::X, Label::X)],
        };
        for (a, b) in pairs {
            let mut nl = base.clone();
            nl.insert(c1, *a);
            nl.insert(c2, *b);
            out.add_term(nl, k.clone());
        }
    }
    Ok(out)
}

/// Unit: a new circle labeled 1.
pub fn apply_birth(v: &TqftVector, c_new: CircleId) -> Result<TqftVector> {
    TqftVector::fresh(&v.circles, c_new)?;
    let mut circles = v.circles.clone();
    circles.insert(c_new);
    let mut out = TqftVector::zero(circles);
    for (l, k) in &v.terms {
        let mut nl = l.clone();
        nl.insert(c_new, Label::One);
        out.add_term(nl, k.clone());
    }
    Ok(out)
}

/// Counit: e(1) = 0, e(X) = 1.
pub fn apply_death(v: &TqftVector, c: CircleId) -> Result<TqftVector> {
    v.require(c)?;
    let mut circles = v.circles.clone();
    circles.remove(&c);
    let mut out = TqftVector::zero(circles);
    for (l, k) in &v.terms {
        if l[&c] == Label::X {
            let mut nl = l.clone();
            nl.remove(&c);
            out.add_term(nl, k.clone());
        }
    }
    Ok(out)
}

/// Multiplication by X on one circle.
pub fn apply_dot(v: &TqftVector, c: CircleId) -> Result<TqftVector> {
    v.require(c)?;
    let mut out = TqftVector::zero(v.circles.iter().copied());
    for (l, k) in &v.terms {
        if l[&c] == Label::One {
            let mut nl = l.clone();
            nl.insert(c, Label::X);
            out.add_term(nl, k.clone());
        }
    }
    Ok(out)
}

/// Relabel circle ids by an injective map; ids not in the map are kept.
pub fn rename_circles(v: &TqftVector, map: &BTreeMap<CircleId, CircleId>) -> Result<TqftVector> {
    let f = |c: CircleId| *map.get(&c).unwrap_or(&c);
    let circles: BTreeSet<CircleId> = v.circles.iter().map(|c| f(*c)).collect();
    if circles.len() != v.circles.len() {
        return Err(KhError::Shape("circle renaming is not injective".into()));
    }
    let mut out = TqftVector::zero(circles);
    for (l, k) in &v.terms {
        let nl: Labeling = l.iter().map(|(c, x)| (f(*c), *x)).collect();
        out.add_term(nl, k.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(pairs: &[(CircleId, Label)]) -> Labeling {
        pairs.iter().copied().collect()
    }

    fn gen(pairs: &[(CircleId, Label)]) -> TqftVector {
        TqftVector::generator(lab(pairs))
    }

    use Label::{One as I, X};

    #[test]
    fn merge_table() {
        assert_eq!(apply_merge(&gen(&[(1, I), (2, I)]), 1, 2, 3).unwrap(), gen(&[(3, I)]));
        assert_eq!(apply_merge(&gen(&[(1, I), (2, X)]), 1, 2, 3).unwrap(), gen(&[(3, X)]));
        assert_eq!(apply_merge(&gen(&[(1, X), (2, I)]), 1, 2, 3).unwrap(), gen(&[(3, X)]));
        assert!(apply_merge(&gen(&[(1, X), (2, X)]), 1, 2, 3).unwrap().is_zero());
    }

    #[test]
    fn merge_errors() {
        let v = gen(&[(1, I), (2, I)]);
        assert_eq!(apply_merge(&v, 1, 1, 3), Err(KhError::RepeatedCircle(1)));
        assert_eq!(apply_merge(&v, 1, 7, 3), Err(KhError::UnknownCircle(7)));
    }

    #[test]
    fn split_table() {
        let s = apply_split(&gen(&[(5, I)]), 5, 1, 2).unwrap();
        let want = gen(&[(1, I), (2, X)]).add(&gen(&[(1, X), (2, I)])).unwrap();
        assert_eq!(s, want);
        assert_eq!(apply_split(&gen(&[(5, X)]), 5, 1, 2).unwrap(), gen(&[(1, X), (2, X)]));
        let both = gen(&[(5, I)]).add(&gen(&[(5, X)])).unwrap();
        assert_eq!(apply_split(&both, 5, 1, 2).unwrap().terms().len(), 3);
    }

    #[test]
    fn birth_death_dot() {
        assert_eq!(apply_birth(&TqftVector::unit(), 4).unwrap(), gen(&[(4, I)]));
        assert_eq!(apply_birth(&gen(&[(1, X)]), 4).unwrap(), gen(&[(1, X), (4, I)]));
        assert_eq!(apply_birth(&gen(&[(1, X)]), 1), Err(KhError::CircleIdCollision(1)));
        let two = gen(&[(1, I)]).scale(&BigInt::from(2));
        assert_eq!(apply_birth(&two, 4).unwrap(), gen(&[(1, I), (4, I)]).scale(&BigInt::from(2)));
        assert_eq!(apply_death(&gen(&[(1, I), (3, X)]), 3).unwrap(), gen(&[(1, I)]));
        assert!(apply_death(&gen(&[(1, I), (3, I)]), 3).unwrap().is_zero());
        let s = gen(&[(3, X)]).add(&gen(&[(3, I)])).unwrap();
        assert_eq!(apply_death(&s, 3).unwrap(), TqftVector::unit());
        assert_eq!(apply_dot(&gen(&[(3, I)]), 3).unwrap(), gen(&[(3, X)]));
        assert!(apply_dot(&gen(&[(3, X)]), 3).unwrap().is_zero());
        assert!(apply_dot(&apply_dot(&gen(&[(3, I)]), 3).unwrap(), 3).unwrap().is_zero());
    }

    #[test]
    fn frobenius_identity() {
        // split after merge equals (merge (x) id) after (id (x) split) on every two-circle labeling
        for a in [I, X] {
            for b in [I, X] {
                let v = gen(&[(1, a), (2, b)]);
                let lhs = apply_split(&apply_merge(&v, 1, 2, 9).unwrap(), 9, 1, 2).unwrap();
                let rhs = apply_merge(&apply_split(&v, 2, 7, 2).unwrap(), 1, 7, 1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn counit_identity() {
        for a in [I, X] {
            let v = gen(&[(1, a)]);
            let s = apply_split(&v, 1, 2, 3).unwrap();
            let left = rename_circles(&apply_death(&s, 2).unwrap(), &[(3, 1)].into()).unwrap();
            let right = rename_circles(&apply_death(&s, 3).unwrap(), &[(2, 1)].into()).unwrap();
            assert_eq!(left, v);
            assert_eq!(right, v);
        }
    }

    #[test]
    fn dot_is_merge_with_x_labeled_unknot() {
        for a in [I, X] {
            let v = gen(&[(1, a)]);
            let born = apply_birth(&v, 2).unwrap();
            let forced = apply_dot(&born, 2).unwrap();
            let merged = apply_merge(&forced, 2, 1, 1).unwrap();
            assert_eq!(merged, apply_dot(&v, 1).unwrap());
        }
    }

    #[test]
    fn labelings_are_lexicographic() {
        let ls = all_labelings(&[3, 1]);
        assert_eq!(ls.len(), 4);
        assert_eq!(ls[0], lab(&[(1, I), (3, I)]));
        assert_eq!(ls[1], lab(&[(1, I), (3, X)]));
        assert_eq!(ls[3], lab(&[(1, X), (3, X)]));
    }
}
