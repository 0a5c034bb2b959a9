//! Saddle surgery on planar pictures made of arcs between nodes.
//!
//! Every node meets exactly two arcs, so the picture is a union of circles. A
//! saddle swaps two arcs for two others; the TQFT vector living on the circles is
//! pushed through the resulting merge or split.

use std::collections::BTreeMap;

use crate::error::{KhError, Result};
use crate::matching::CrossinglessMatching;
use crate::tqft::{apply_merge, apply_split, rename_circles, CircleId, TqftVector};
use crate::unionfind::UnionFind;

/// Circle ids handed out during surgery; callers keep their own ids below this.
pub const FRESH_BASE: CircleId = 1 << 31;
/// Offset used to keep a second picture's circle ids apart from the first.
pub const SECOND_BASE: CircleId = 1 << 30;

pub type Tag = u8;

#[derive(Clone, Debug)]
pub struct Surgery {
    arcs: Vec<Option<(usize, usize, Tag)>>,
    node_circle: Vec<CircleId>,
    vector: TqftVector,
    next_fresh: CircleId,
}

impl Surgery {
    /// `node_circle[i]` is the circle id through node `i`; it must be constant on
    /// the components of the arcs and match the circles of `vector`.
    pub fn new(arcs: Vec<(usize, usize, Tag)>, node_circle: Vec<CircleId>, vector: TqftVector) -> Self {
        Surgery { arcs: arcs.into_iter().map(Some).collect(), node_circle, vector, next_fresh: FRESH_BASE }
    }

    fn fresh(&mut self) -> CircleId {
        self.next_fresh += 1;
        self.next_fresh
    }

    fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.node_circle.len());
        for (a, b, _) in self.arcs.iter().flatten() {
            uf.union(*a, *b);
        }
        (0..self.node_circle.len()).map(|x| uf.find(x)).collect()
    }

    fn take_arc(&mut self, a: usize, b: usize, tag: Tag) -> Result<()> {
        let pos = self
            .arcs
            .iter()
            .position(|x| matches!(x, Some((p, q, t)) if *t == tag && ((*p, *q) == (a, b) || (*p, *q) == (b, a))))
            .ok_or_else(|| KhError::NotApplicable(format!("no arc {a}-{b} with tag {tag}")))?;
        self.arcs[pos] = None;
        Ok(())
    }

    /// Replace arcs `a0-a1` (tag `ta`) and `b0-b1` (tag `tb`) by `a0-b0` and `a1-b1`,
    /// the new arcs getting tag `t_new`.
    pub fn saddle(&mut self, (a0, a1, ta): (usize, usize, Tag), (b0, b1, tb): (usize, usize, Tag), t_new: Tag) -> Result<()> {
        let c1 = self.node_circle[a0];
        let c2 = self.node_circle[b0];
        self.take_arc(a0, a1, ta)?;
        self.take_arc(b0, b1, tb)?;
        self.arcs.push(Some((a0, b0, t_new)));
        self.arcs.push(Some((a1, b1, t_new)));
        let comp = self.components();
        if c1 != c2 {
            let f = self.fresh();
            self.vector = apply_merge(&self.vector, c1, c2, f)?;
            for (i, c) in self.node_circle.iter_mut().enumerate() {
                if comp[i] == comp[a0] {
                    *c = f;
                }
            }
        } else {
            if comp[a0] == comp[a1] {
                return Err(KhError::NotApplicable("saddle on one circle did not split it".into()));
            }
            let (f1, f2) = (self.fresh(), self.fresh());
            self.vector = apply_split(&self.vector, c1, f1, f2)?;
            for (i, c) in self.node_circle.iter_mut().enumerate() {
                if comp[i] == comp[a0] {
                    *c = f1;
                } else if comp[i] == comp[a1] {
                    *c = f2;
                }
            }
        }
        Ok(())
    }

    /// Contract the arcs of `m` drawn on `xs` (tag `tx`) against the arcs of `m`
    /// drawn on `ys` (tag `ty`), innermost pair first. Point `k` of `m` sits at
    /// nodes `xs[k-1]` and `ys[k-1]`.
    pub fn contract(&mut self, m: &CrossinglessMatching, xs: &[usize], tx: Tag, ys: &[usize], ty: Tag, t_new: Tag) -> Result<()> {
        for (i, j) in m.innermost_first() {
            self.saddle((xs[i - 1], xs[j - 1], tx), (ys[i - 1], ys[j - 1], ty), t_new)?;
        }
        Ok(())
    }

    pub fn node_circle(&self, node: usize) -> CircleId {
        self.node_circle[node]
    }

    /// Rename each remaining circle through `target(node)` for a node on it, and
    /// circles untouched by the picture through `others`.
    pub fn finish(self, target: impl Fn(usize) -> CircleId, others: &BTreeMap<CircleId, CircleId>) -> Result<TqftVector> {
        let mut map = others.clone();
        for (i, c) in self.node_circle.iter().enumerate() {
            let t = target(i);
            if let Some(old) = map.insert(*c, t) {
                if old != t {
                    return Err(KhError::Shape(format!("circle {c} has two targets {old} and {t}")));
                }
            }
        }
        rename_circles(&self.vector, &map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tqft::{Label, Labeling};

    fn gen(pairs: &[(CircleId, Label)]) -> TqftVector {
        TqftVector::generator(pairs.iter().copied().collect::<Labeling>())
    }

    #[test]
    fn merge_then_split() {
        // two circles 0-1 and 2-3, each drawn by two parallel arcs
        let arcs = vec![(0, 1, 0), (0, 1, 1), (2, 3, 0), (2, 3, 1)];
        let mut s = Surgery::new(arcs, vec![10, 10, 20, 20], gen(&[(10, Label::One), (20, Label::X)]));
        s.saddle((0, 1, 1), (2, 3, 1), 2).unwrap();
        assert_eq!(s.node_circle(0), s.node_circle(3));
        // now arcs 0-1(0), 2-3(0), 0-2, 1-3: one circle; cut it along 0-2 and 1-3
        s.saddle((0, 2, 2), (1, 3, 2), 3).unwrap();
        let v = s.finish(|i| if i < 2 { 1 } else { 2 }, &BTreeMap::new()).unwrap();
        assert_eq!(v, gen(&[(1, Label::X), (2, Label::X)]));
    }
}
