//! Gluing a tangle into an inner disk of another, compared against the tensor
//! product of their modules over the arc algebra of the shared circle.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::complex::{tensor, Grade, GradedComplex};
use crate::error::{KhError, Result};
use crate::linalg::{rank_and_torsion, smith_normal_form, SparseMatrix};
use crate::module::{columns_to_matrix, ModuleEntry, TangleModule, TAG_INNER_CAP, TAG_OUTER_CAP, TAG_RADIAL};
use crate::surgery::{Surgery, SECOND_BASE};
use crate::tangle::{CubeVertex, DiskularTangle, EdgeId};
use crate::tqft::{rename_circles, CircleId, TqftVector};

/// The modules of `outer`, of `inner`, and of `outer ∘_disk inner`.
#[derive(Clone, Debug)]
pub struct Gluing {
    pub outer: TangleModule,
    pub inner: TangleModule,
    pub disk: usize,
    pub composite: TangleModule,
    outer_edges: BTreeMap<EdgeId, EdgeId>,
    inner_edges: BTreeMap<EdgeId, EdgeId>,
}

/// Free module `⊕_a M_outer(…a…) ⊗ M_inner(…; a)` with the balancing relations and
/// the gluing map into the composite module.
#[derive(Clone, Debug)]
pub struct TensorPresentation {
    pub free: GradedComplex,
    /// Columns are relations `(α·x) ⊗ y − x ⊗ (y·α)`.
    pub relations: SparseMatrix,
    pub glue: SparseMatrix,
    pub target: GradedComplex,
    /// First index of each summand, by matching of the shared circle.
    pub offsets: Vec<usize>,
}

impl Gluing {
    pub fn new(outer: &DiskularTangle, disk: usize, inner: &DiskularTangle) -> Result<Self> {
        let (glued, outer_edges, inner_edges) = outer.compose_with_map(disk, inner)?;
        Ok(Gluing {
            outer: TangleModule::new(outer)?,
            inner: TangleModule::new(inner)?,
            disk,
            composite: TangleModule::new(&glued)?,
            outer_edges,
            inner_edges,
        })
    }

    fn shared_size(&self) -> usize {
        self.outer.inner_algebras[self.disk].matchings.len()
    }

    /// Split composite caps into the outer tangle's caps (with `a` on the shared
    /// disk) and the inner tangle's caps.
    pub fn split_caps(&self, caps: &[usize], a: usize) -> (Vec<usize>, Vec<usize>) {
        let k = self.inner.tangle.inner.len();
        let i = self.disk;
        let mut outer_caps = caps[..i].to_vec();
        outer_caps.push(a);
        outer_caps.extend_from_slice(&caps[i + k..]);
        (outer_caps, caps[i..i + k].to_vec())
    }

    /// Glue `x` at vertex `vo` of `M_outer(…a…; b)` with `y` at vertex `vi` of
    /// `M_inner(caps; a)`. Returns the composite vertex and the signed image.
    #[allow(clippy::too_many_arguments)]
    pub fn glue(&self, caps: &[usize], b: usize, a: usize, vo: CubeVertex, x: &TqftVector, vi: CubeVertex, y: &TqftVector) -> Result<(CubeVertex, TqftVector)> {
        let (oc, ic) = self.split_caps(caps, a);
        let eo = self.outer.entry(&oc, b);
        let ei = self.inner.entry(&ic, a);
        let dst = self.composite.entry(caps, b);
        let no = self.outer.tangle.num_crossings();
        let v = vo | vi << no;
        let (mut arcs, co, lo) = self.outer.picture(eo, vo, 0)?;
        let (ai, ci, li) = self.inner.picture(ei, vi, lo.total)?;
        arcs.extend(ai);
        let mut node_circle = vec![0; li.total];
        for (node, c) in &co {
            node_circle[*node] = *c;
        }
        for (node, c) in &ci {
            node_circle[*node] = c + SECOND_BASE;
        }
        let shift: BTreeMap<CircleId, CircleId> = y.circles().iter().map(|c| (*c, c + SECOND_BASE)).collect();
        let vec = x.tensor(&rename_circles(y, &shift)?)?;
        let mut s = Surgery::new(arcs, node_circle, vec);
        let m = &self.outer.inner_algebras[self.disk].matchings[a];
        s.contract(m, &lo.inner[self.disk], TAG_INNER_CAP, &li.outer, TAG_OUTER_CAP, TAG_RADIAL)?;

        let mut target = vec![0; li.total];
        let (to, ti) = (&self.outer.tangle, &self.inner.tangle);
        let mut put = |t: &DiskularTangle, layout: &crate::module::NodeLayout, map: &BTreeMap<EdgeId, EdgeId>| {
            for (j, e) in t.boundary_edges.iter().enumerate() {
                target[layout.outer[j]] = dst.circle_of(v, map[e]);
            }
            for (d, es) in t.inner_boundary_edges.iter().enumerate() {
                for (j, e) in es.iter().enumerate() {
                    target[layout.inner[d][j]] = dst.circle_of(v, map[e]);
                }
            }
        };
        put(to, &lo, &self.outer_edges);
        put(ti, &li, &self.inner_edges);
        let node_ids_o: BTreeSet<CircleId> = co.iter().map(|(_, c)| *c).collect();
        let node_ids_i: BTreeSet<CircleId> = ci.iter().map(|(_, c)| *c).collect();
        let mut others = BTreeMap::new();
        for c in x.circles().difference(&node_ids_o) {
            others.insert(*c, dst.circle_of(v, self.outer_edges[c]));
        }
        for c in y.circles().difference(&node_ids_i) {
            others.insert(c + SECOND_BASE, dst.circle_of(v, self.inner_edges[c]));
        }
        let out = s.finish(|node| target[node], &others)?;
        let hy = ei.kc.grade(vi, y.terms().keys().next().ok_or(KhError::Shape("cannot glue the zero vector".into()))?).0;
        let sign_exp = (no as i64 - self.outer.tangle.p) * hy;
        let out = if sign_exp.rem_euclid(2) == 1 { out.scale(&-BigInt::one()) } else { out };
        Ok((v, out))
    }

    /// The presentation of the tensor product for composite caps and outer matching `b`.
    pub fn presentation(&self, caps: &[usize], b: usize) -> Result<TensorPresentation> {
        let k = self.shared_size();
        let entries: Vec<(&ModuleEntry, &ModuleEntry)> = (0..k)
            .map(|a| {
                let (oc, ic) = self.split_caps(caps, a);
                (self.outer.entry(&oc, b), self.inner.entry(&ic, a))
            })
            .collect();
        let mut free = GradedComplex::zero();
        let mut offsets = Vec::new();
        for (eo, ei) in &entries {
            offsets.push(free.dim());
            free = free.direct_sum(&tensor(&eo.kc.complex, &ei.kc.complex));
        }
        offsets.push(free.dim());
        let index = |a: usize, i: usize, j: usize| offsets[a] + i * entries[a].1.kc.dim() + j;

        let dst = &self.composite.entry(caps, b).kc;
        let glue_cols: Vec<Vec<(usize, BigInt)>> = (0..k)
            .flat_map(|a| {
                let (no, ni) = (entries[a].0.kc.dim(), entries[a].1.kc.dim());
                (0..no).flat_map(move |i| (0..ni).map(move |j| (a, i, j)))
            })
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|(a, i, j)| {
                let (vo, x) = entries[a].0.kc.basis_vector(i);
                let (vi, y) = entries[a].1.kc.basis_vector(j);
                let (v, img) = self.glue(caps, b, a, vo, &x, vi, &y)?;
                Ok(dst.column(v, &img))
            })
            .collect::<Result<_>>()?;
        let glue = columns_to_matrix(dst.dim(), glue_cols);

        let alg = &self.outer.inner_algebras[self.disk];
        let mut rel_cols: Vec<Vec<(usize, BigInt)>> = Vec::new();
        for a in 0..k {
            for a_new in 0..k {
                let (oc, _) = self.split_caps(caps, a);
                let (_, ic_new) = self.split_caps(caps, a_new);
                for l in alg.hom_basis(a_new, a) {
                    let alpha = TqftVector::generator(l);
                    let left = self.outer.inner_action_matrix(self.disk, &oc, a_new, b, &alpha)?;
                    let right = self.inner.outer_action_matrix(&ic_new, a_new, a, &alpha)?;
                    for i in 0..entries[a].0.kc.dim() {
                        for j in 0..entries[a_new].1.kc.dim() {
                            let mut col: BTreeMap<usize, BigInt> = BTreeMap::new();
                            for (r, v) in left.col(i) {
                                *col.entry(index(a_new, *r, j)).or_default() += v;
                            }
                            for (r, v) in right.col(j) {
                                *col.entry(index(a, i, *r)).or_default() -= v;
                            }
                            col.retain(|_, v| !v.is_zero());
                            if !col.is_empty() {
                                rel_cols.push(col.into_iter().collect());
                            }
                        }
                    }
                }
            }
        }
        let relations = columns_to_matrix(free.dim(), rel_cols);
        Ok(TensorPresentation { free, relations, glue, target: dst.complex.clone(), offsets })
    }
}

fn column_grade(m: &SparseMatrix, c: usize, grades: &[Grade]) -> Option<Grade> {
    m.col(c).keys().next().map(|r| grades[*r])
}

impl TensorPresentation {
    /// Check that the gluing map is a chain map killing the relations and that it
    /// induces a bigraded isomorphism from the quotient, bidegree by bidegree.
    pub fn check_isomorphism(&self) -> Result<()> {
        let g = &self.glue;
        if self.target.d.mul(g) != g.mul(&self.free.d) {
            return Err(KhError::NotModuleMap("gluing map does not commute with the differentials".into()));
        }
        for (r, c, _) in g.triplets() {
            if self.target.grades[r] != self.free.grades[c] {
                return Err(KhError::Bidegree(format!("gluing map moves generator {c} to a different bidegree")));
            }
        }
        if !g.mul(&self.relations).is_zero() {
            return Err(KhError::NotModuleMap("gluing map does not vanish on the balancing relations".into()));
        }
        let free_groups = self.free.groups();
        let target_groups = self.target.groups();
        let mut rel_by_grade: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
        for c in 0..self.relations.ncols() {
            if let Some(gr) = column_grade(&self.relations, c, &self.free.grades) {
                rel_by_grade.entry(gr).or_default().push(c);
            }
        }
        let grades: BTreeSet<Grade> = free_groups.keys().chain(target_groups.keys()).copied().collect();
        let empty = Vec::new();
        grades.into_par_iter().try_for_each(|gr| {
            let fi = free_groups.get(&gr).unwrap_or(&empty);
            let ti = target_groups.get(&gr).unwrap_or(&empty);
            let ri = rel_by_grade.get(&gr).unwrap_or(&empty);
            let (rank_r, tors_r) = rank_and_torsion(&self.relations.select(fi, ri));
            if !tors_r.is_empty() || rank_r + ti.len() != fi.len() {
                return Err(KhError::NotModuleMap(format!(
                    "relations in bidegree {gr:?} have rank {rank_r} and torsion {tors_r:?}; expected rank {}",
                    fi.len() as i64 - ti.len() as i64
                )));
            }
            let (rank_g, tors_g) = rank_and_torsion(&g.select(ti, fi));
            if !tors_g.is_empty() || rank_g != ti.len() {
                return Err(KhError::NotModuleMap(format!("gluing map is not onto in bidegree {gr:?}")));
            }
            Ok(())
        })
    }

    /// The quotient complex `free / relations`.
    pub fn quotient(&self) -> Result<GradedComplex> {
        Ok(quotient_complex(&self.free, &self.relations)?.0)
    }
}

/// Quotient of a complex by the span of homogeneous relation columns, which must
/// form a subcomplex with torsion-free cokernel. Returns the quotient and the
/// projection matrix onto it.
pub fn quotient_complex(c: &GradedComplex, relations: &SparseMatrix) -> Result<(GradedComplex, SparseMatrix)> {
    let n = c.dim();
    let mut rels: Vec<BTreeMap<usize, BigInt>> =
        (0..relations.ncols()).map(|j| relations.col(j).clone()).filter(|m| !m.is_empty()).collect();
    let mut occ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (k, r) in rels.iter().enumerate() {
        for i in r.keys() {
            occ[*i].insert(k);
        }
    }
    let mut elim: Vec<Option<BTreeMap<usize, BigInt>>> = vec![None; n];
    let mut progress = true;
    while progress {
        progress = false;
        for k in 0..rels.len() {
            let Some((e, coef)) = rels[k]
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(i, _)| occ[**i].len())
                .map(|(i, v)| (*i, v.clone()))
            else {
                continue;
            };
            progress = true;
            let rel = std::mem::take(&mut rels[k]);
            for i in rel.keys() {
                occ[*i].remove(&k);
            }
            // e = -coef * (rel - coef e)
            let comb: BTreeMap<usize, BigInt> = rel.iter().filter(|(i, _)| **i != e).map(|(i, v)| (*i, -(v * &coef))).collect();
            for k2 in std::mem::take(&mut occ[e]) {
                let c2 = rels[k2].remove(&e).expect("occurrence index is consistent");
                for (i, v) in &comb {
                    let entry = rels[k2].entry(*i).or_default();
                    *entry += &c2 * v;
                    if entry.is_zero() {
                        rels[k2].remove(i);
                        occ[*i].remove(&k2);
                    } else {
                        occ[*i].insert(k2);
                    }
                }
            }
            elim[e] = Some(comb);
        }
    }
    let survivors: Vec<usize> = (0..n).filter(|i| elim[*i].is_none()).collect();
    let pos: BTreeMap<usize, usize> = survivors.iter().enumerate().map(|(p, i)| (*i, p)).collect();
    // projection onto survivors, resolving eliminated basis vectors recursively
    let mut resolved: Vec<Option<BTreeMap<usize, BigInt>>> = vec![None; n];
    fn resolve(
        i: usize,
        elim: &[Option<BTreeMap<usize, BigInt>>],
        resolved: &mut Vec<Option<BTreeMap<usize, BigInt>>>,
        pos: &BTreeMap<usize, usize>,
    ) -> BTreeMap<usize, BigInt> {
        if let Some(r) = &resolved[i] {
            return r.clone();
        }
        let out = match &elim[i] {
            None => [(pos[&i], BigInt::one())].into_iter().collect(),
            Some(comb) => {
                let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
                for (j, v) in comb {
                    for (p, w) in resolve(*j, elim, resolved, pos) {
                        *acc.entry(p).or_default() += v * w;
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                acc
            }
        };
        resolved[i] = Some(out.clone());
        out
    }
    let proj_cols: Vec<Vec<(usize, BigInt)>> =
        (0..n).map(|i| resolve(i, &elim, &mut resolved, &pos).into_iter().collect()).collect();
    let mut proj = columns_to_matrix(survivors.len(), proj_cols);
    let mut grades: Vec<Grade> = survivors.iter().map(|i| c.grades[*i]).collect();

    // relations left without a unit entry, now written in the surviving basis
    let residual: Vec<BTreeMap<usize, BigInt>> = rels
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(|r| r.into_iter().map(|(i, v)| (pos[&i], v)).collect())
        .collect();
    if !residual.is_empty() {
        let res = columns_to_matrix(survivors.len(), residual.into_iter().map(|m| m.into_iter().collect()).collect());
        let (p2, g2) = residual_projection(&res, &grades)?;
        proj = p2.mul(&proj);
        grades = g2;
    }
    // section: a preimage of each quotient basis vector
    let section = section_of(&proj, n)?;
    let d = proj.mul(&c.d).mul(&section);
    Ok((GradedComplex::new(grades, d)?, proj))
}

/// Projection killing the residual relations, per bidegree via Smith normal form.
fn residual_projection(res: &SparseMatrix, grades: &[Grade]) -> Result<(SparseMatrix, Vec<Grade>)> {
    let mut by_grade: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
    for (i, g) in grades.iter().enumerate() {
        by_grade.entry(*g).or_default().push(i);
    }
    let mut rel_by_grade: BTreeMap<Grade, Vec<usize>> = BTreeMap::new();
    for c in 0..res.ncols() {
        if let Some(g) = column_grade(res, c, grades) {
            rel_by_grade.entry(g).or_default().push(c);
        }
    }
    let mut triplets = Vec::new();
    let mut new_grades = Vec::new();
    for (g, rows) in &by_grade {
        let cols = rel_by_grade.get(g).cloned().unwrap_or_default();
        let block = res.select(rows, &cols).to_dense();
        let snf = smith_normal_form(&block, rows.len(), cols.len());
        if snf.diag.iter().any(|x| !x.abs().is_one()) {
            return Err(KhError::NotModuleMap(format!("quotient has torsion in bidegree {g:?}")));
        }
        for row in &snf.u[snf.diag.len()..] {
            let out = new_grades.len();
            new_grades.push(*g);
            for (k, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    triplets.push((out, rows[k], v.clone()));
                }
            }
        }
    }
    Ok((SparseMatrix::from_triplets(new_grades.len(), grades.len(), triplets), new_grades))
}

/// A right inverse of a surjective projection, found row by row.
fn section_of(proj: &SparseMatrix, n: usize) -> Result<SparseMatrix> {
    let m = proj.nrows();
    let mut cols = Vec::with_capacity(m);
    for q in 0..m {
        let mut b = vec![BigInt::zero(); m];
        b[q] = BigInt::one();
        // fast path: a unit column hitting only row q
        let unit = (0..n).find(|c| {
            let col = proj.col(*c);
            col.len() == 1 && col.get(&q).is_some_and(|v| v.is_one())
        });
        match unit {
            Some(c) => cols.push(vec![(c, BigInt::one())]),
            None => {
                let x = crate::linalg::solve_integer(proj, &b)
                    .ok_or_else(|| KhError::NotModuleMap("projection is not onto".into()))?;
                cols.push(x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
            }
        }
    }
    Ok(columns_to_matrix(n, cols))
}

/// `outer ⊗_{arc algebra} inner` for one choice of composite caps and outer matching.
pub fn tensor_over_algebra(outer: &DiskularTangle, disk: usize, inner: &DiskularTangle, caps: &[usize], b: usize) -> Result<GradedComplex> {
    Gluing::new(outer, disk, inner)?.presentation(caps, b)?.quotient()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::CrossinglessMatching;

    fn check_all(g: &Gluing) {
        for (caps, b) in g.composite.entries.keys() {
            let p = g.presentation(caps, *b).unwrap();
            p.check_isomorphism().unwrap();
            assert_eq!(p.quotient().unwrap().homology(), p.target.homology());
        }
    }

    #[test]
    fn cap_into_cup_is_the_unknot() {
        let cup = DiskularTangle::from_matching(&CrossinglessMatching::new(2, vec![(1, 2)]).unwrap());
        let cap = DiskularTangle::new(0, vec![2], vec![], vec![], vec![vec![1, 1]], vec![], 0).unwrap();
        let g = Gluing::new(&cap, 0, &cup).unwrap();
        let p = g.presentation(&[], 0).unwrap();
        p.check_isomorphism().unwrap();
        assert_eq!(p.quotient().unwrap().homology().total_rank(), 2);
    }

    #[test]
    fn identity_is_a_unit() {
        let one_crossing = DiskularTangle::new(4, vec![], vec![[1, 2, 3, 4]], vec![1, 2, 3, 4], vec![], vec![], 0).unwrap();
        check_all(&Gluing::new(&DiskularTangle::identity(4), 0, &one_crossing).unwrap());
    }

    #[test]
    fn crossing_into_crossing() {
        let annulus = DiskularTangle::new(2, vec![2], vec![[1, 2, 3, 4]], vec![3, 4], vec![vec![1, 2]], vec![], 1).unwrap();
        let kink = DiskularTangle::new(2, vec![], vec![[1, 2, 3, 3]], vec![1, 2], vec![], vec![], 0).unwrap();
        check_all(&Gluing::new(&annulus, 0, &kink).unwrap());
        check_all(&Gluing::new(&annulus, 0, &annulus).unwrap());
        // an odd count of negative outer crossings exercises the sign on the inner factor
        let negative = DiskularTangle { p: 0, ..annulus.clone() };
        check_all(&Gluing::new(&negative, 0, &kink).unwrap());
        check_all(&Gluing::new(&negative, 0, &annulus).unwrap());
    }
}
