//! The Khovanov complex of a closed diagram as a signed cube of resolutions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::complex::{GradedComplex, Grade, HomologyTable};
use crate::error::{KhError, Result};
use crate::linalg::SparseMatrix;
use crate::tangle::{height, smoothing_pairs, CubeVertex, DiskularTangle, EdgeId};
use crate::tqft::{all_labelings, apply_merge, apply_split, labeling_degree, CircleId, Label, Labeling, TqftVector};

/// Circles of one complete resolution of a closed diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedVertex {
    pub circles: Vec<CircleId>,
    pub circle_of: BTreeMap<EdgeId, CircleId>,
}

pub fn resolve_closed(d: &DiskularTangle, v: CubeVertex) -> Result<ResolvedVertex> {
    let flat = d.resolve(v)?;
    if !flat.arcs.is_empty() {
        return Err(KhError::Precondition("diagram is not closed".into()));
    }
    let circle_of = flat
        .provenance
        .iter()
        .map(|(e, c)| match c {
            crate::tangle::FlatComponent::Circle(id) => (*e, *id),
            crate::tangle::FlatComponent::Arc(_) => unreachable!(),
        })
        .collect();
    Ok(ResolvedVertex { circles: flat.circles, circle_of })
}

/// Apply the saddle that turns circles `before` into circles `after`: a merge when
/// the two before-circles differ, a split otherwise.
pub fn saddle_vector(x: &TqftVector, before: (CircleId, CircleId), after: (CircleId, CircleId)) -> Result<TqftVector> {
    if before.0 != before.1 {
        if after.0 != after.1 {
            return Err(KhError::NotApplicable("saddle between two circles must merge them".into()));
        }
        apply_merge(x, before.0, before.1, after.0)
    } else {
        if after.0 == after.1 {
            return Err(KhError::NotApplicable("saddle on one circle must split it".into()));
        }
        apply_split(x, before.0, after.0, after.1)
    }
}

/// Circles touched by the saddle at crossing `j` between resolutions `v` and `v + e_j`.
pub fn crossing_saddle(
    d: &DiskularTangle,
    src: &ResolvedVertex,
    dst: &ResolvedVertex,
    j: usize,
) -> ((CircleId, CircleId), (CircleId, CircleId)) {
    let x = d.crossings[j];
    let [(a0, _), (b0, _)] = smoothing_pairs(false);
    let [(c0, _), (d0, _)] = smoothing_pairs(true);
    let before = (src.circle_of[&x[a0]], src.circle_of[&x[b0]]);
    let after = (dst.circle_of[&x[c0]], dst.circle_of[&x[d0]]);
    (before, after)
}

/// Sign of the cube edge changing crossing `j` at vertex `v`.
pub fn edge_sign(v: CubeVertex, j: usize) -> i64 {
    if (v & ((1u64 << j) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Index of a labeling among `all_labelings` of its (sorted) circles.
pub fn labeling_index(l: &Labeling) -> usize {
    l.values().fold(0, |acc, x| acc * 2 + usize::from(*x == Label::X))
}

#[derive(Clone, Debug)]
pub struct KhComplex {
    pub diagram: DiskularTangle,
    pub q_shift: i64,
    pub vertices: Vec<ResolvedVertex>,
    /// First basis index of each vertex.
    pub offsets: Vec<usize>,
    pub complex: GradedComplex,
}

impl KhComplex {
    /// Build the complex; `q_shift` is added to every quantum grading.
    pub fn new(d: &DiskularTangle, q_shift: i64) -> Result<Self> {
        if !d.is_closed() {
            return Err(KhError::Precondition("Khovanov complex needs a closed diagram".into()));
        }
        let n = d.num_crossings();
        let nv = 1u64 << n;
        let vertices: Vec<ResolvedVertex> =
            (0..nv).into_par_iter().map(|v| resolve_closed(d, v)).collect::<Result<Vec<_>>>()?;
        let mut offsets = Vec::with_capacity(vertices.len() + 1);
        let mut total = 0;
        for rv in &vertices {
            offsets.push(total);
            total += 1usize << rv.circles.len();
        }
        offsets.push(total);
        let mut kc = KhComplex {
            diagram: d.clone(),
            q_shift,
            vertices,
            offsets,
            complex: GradedComplex::zero(),
        };
        let mut grades = Vec::with_capacity(total);
        for v in 0..nv {
            for l in all_labelings(&kc.vertices[v as usize].circles) {
                grades.push(kc.grade(v, &l));
            }
        }
        let triplets: Vec<(usize, usize, BigInt)> = (0..nv)
            .into_par_iter()
            .map(|v| kc.differential_from(v))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        kc.complex = GradedComplex { grades, d: SparseMatrix::from_triplets(total, total, triplets) };
        debug_assert!(kc.complex.validate().is_ok());
        Ok(kc)
    }

    pub fn num_crossings(&self) -> usize {
        self.diagram.num_crossings()
    }

    pub fn grade(&self, v: CubeVertex, l: &Labeling) -> Grade {
        let n = self.num_crossings() as i64;
        let p = self.diagram.p;
        let hv = height(v) as i64;
        (n - hv - p, labeling_degree(l) + self.q_shift - hv + 2 * n - 3 * p)
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn index_of(&self, v: CubeVertex, l: &Labeling) -> usize {
        self.offsets[v as usize] + labeling_index(l)
    }

    /// The vertex and labeling of a basis element.
    pub fn generator(&self, i: usize) -> (CubeVertex, Labeling) {
        let v = self.offsets.partition_point(|o| *o <= i) - 1;
        let circles = &self.vertices[v].circles;
        let k = i - self.offsets[v];
        let l = circles
            .iter()
            .enumerate()
            .map(|(pos, c)| {
                let bit = k >> (circles.len() - 1 - pos) & 1;
                (*c, if bit == 1 { Label::X } else { Label::One })
            })
            .collect();
        (v as CubeVertex, l)
    }

    /// Sparse column of a vector living at vertex `v`.
    pub fn column(&self, v: CubeVertex, x: &TqftVector) -> Vec<(usize, BigInt)> {
        x.terms().iter().map(|(l, c)| (self.index_of(v, l), c.clone())).collect()
    }

    /// Basis vector as a TQFT vector.
    pub fn basis_vector(&self, i: usize) -> (CubeVertex, TqftVector) {
        let (v, l) = self.generator(i);
        (v, TqftVector::generator(l))
    }

    fn differential_from(&self, v: CubeVertex) -> Result<Vec<(usize, usize, BigInt)>> {
        let mut out = Vec::new();
        let src = &self.vertices[v as usize];
        for j in 0..self.num_crossings() {
            if v >> j & 1 == 1 {
                continue;
            }
            let w = v | 1 << j;
            let dst = &self.vertices[w as usize];
            let (before, after) = crossing_saddle(&self.diagram, src, dst, j);
            let sign = BigInt::from(edge_sign(v, j));
            for l in all_labelings(&src.circles) {
                let col = self.index_of(v, &l);
                let img = saddle_vector(&TqftVector::generator(l), before, after)?;
                for (row, c) in self.column(w, &img) {
                    out.push((row, col, c * &sign));
                }
            }
        }
        Ok(out)
    }

    pub fn homology(&self) -> HomologyTable {
        self.complex.homology()
    }
}

/// Khovanov homology of a closed diagram.
pub fn khovanov_homology(d: &DiskularTangle) -> Result<HomologyTable> {
    Ok(KhComplex::new(d, 0)?.homology())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::HomologyGroup;

    fn pd(crossings: Vec<[EdgeId; 4]>, p: i64) -> DiskularTangle {
        DiskularTangle::new(0, vec![], crossings, vec![], vec![], vec![], p).unwrap()
    }

    fn free(k: usize) -> HomologyGroup {
        HomologyGroup { free: k, torsion: vec![] }
    }

    #[test]
    fn empty_and_unknot() {
        let h = khovanov_homology(&DiskularTangle::empty()).unwrap();
        assert_eq!(h.to_json(), r#"[{"h":0,"q":0,"free":1}]"#);
        let u = khovanov_homology(&DiskularTangle::unlink(1)).unwrap();
        assert_eq!(u.to_json(), r#"[{"h":0,"q":-1,"free":1},{"h":0,"q":1,"free":1}]"#);
        let u2 = khovanov_homology(&DiskularTangle::unlink(2)).unwrap();
        assert_eq!(u2.get(0, 0), free(2));
        assert_eq!(u2.get(0, -2), free(1));
        assert_eq!(u2.get(0, 2), free(1));
    }

    #[test]
    fn one_crossing_unknots() {
        // a kink in either direction is still the unknot once P is set correctly
        for (x, p) in [([1, 1, 2, 2], 1), ([1, 2, 2, 1], 0)] {
            let h = khovanov_homology(&pd(vec![x], p)).unwrap();
            assert_eq!(h.total_rank(), 2, "{x:?}");
            assert_eq!(h.get(0, -1), free(1), "{x:?}");
            assert_eq!(h.get(0, 1), free(1), "{x:?}");
        }
    }

    #[test]
    fn hopf_link() {
        let h = khovanov_homology(&pd(vec![[4, 1, 3, 2], [2, 3, 1, 4]], 2)).unwrap();
        assert_eq!(h.total_rank(), 4);
        h.groups.values().for_each(|g| assert!(g.torsion.is_empty()));
    }

    #[test]
    fn trefoil_has_two_torsion() {
        let h = khovanov_homology(&pd(vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], 0)).unwrap();
        assert_eq!(h.total_rank(), 4);
        let torsion: usize = h.groups.values().map(|g| g.torsion.len()).sum();
        assert_eq!(torsion, 1);
    }

    #[test]
    fn generator_round_trip() {
        let k = KhComplex::new(&pd(vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], 0), 0).unwrap();
        for i in 0..k.dim() {
            let (v, l) = k.generator(i);
            assert_eq!(k.index_of(v, &l), i);
            assert_eq!(k.complex.grades[i], k.grade(v, &l));
        }
        k.complex.validate().unwrap();
    }
}
