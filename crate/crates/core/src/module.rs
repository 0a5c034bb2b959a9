//! The complex of multi-modules of a diskular tangle over the arc algebras of its
//! boundary circles.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::arc::{picture_circles, ArcAlgebra, TAG_INSIDE, TAG_OUTSIDE};
use crate::error::{KhError, Result};
use crate::khcomplex::KhComplex;
use crate::linalg::SparseMatrix;
use crate::surgery::{Surgery, Tag, SECOND_BASE};
use crate::tangle::{CubeVertex, DiskularTangle, EdgeId, Port};
use crate::tqft::{rename_circles, CircleId, TqftVector};

pub const TAG_TANGLE: Tag = 3;
pub const TAG_INNER_CAP: Tag = 4;
pub const TAG_OUTER_CAP: Tag = 5;
pub const TAG_RADIAL: Tag = 6;

/// One closure `b̄ ∘ T ∘ (a_1, …, a_k)` with its complex.
#[derive(Clone, Debug)]
pub struct ModuleEntry {
    pub caps: Vec<usize>,
    pub outer: usize,
    /// Id in the closed diagram of each edge of the tangle.
    pub edge_class: BTreeMap<EdgeId, EdgeId>,
    pub kc: KhComplex,
}

impl ModuleEntry {
    /// Circle id through a tangle edge at a vertex.
    pub fn circle_of(&self, v: CubeVertex, e: EdgeId) -> CircleId {
        self.kc.vertices[v as usize].circle_of[&self.edge_class[&e]]
    }
}

/// Node numbering for the boundary points of a tangle inside a surgery picture.
#[derive(Clone, Debug)]
pub struct NodeLayout {
    pub outer: Vec<usize>,
    pub inner: Vec<Vec<usize>>,
    pub total: usize,
}

impl NodeLayout {
    pub fn new(t: &DiskularTangle, base: usize) -> Self {
        let outer: Vec<usize> = (base..base + t.n).collect();
        let mut next = base + t.n;
        let mut inner = Vec::new();
        for m in &t.inner {
            inner.push((next..next + m).collect());
            next += m;
        }
        NodeLayout { outer, inner, total: next }
    }

    pub fn node(&self, p: Port) -> usize {
        match p {
            Port::Outer(j) => self.outer[j],
            Port::Inner { disk, point } => self.inner[disk][point],
            Port::Slot { .. } => panic!("crossing slots are not boundary nodes"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TangleModule {
    pub tangle: DiskularTangle,
    pub inner_algebras: Vec<ArcAlgebra>,
    pub outer_algebra: ArcAlgebra,
    pub entries: BTreeMap<(Vec<usize>, usize), ModuleEntry>,
}

fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for s in sizes {
        out = out.into_iter().flat_map(|t| (0..*s).map(move |k| [t.clone(), vec![k]].concat())).collect();
    }
    out
}

impl TangleModule {
    pub fn new(t: &DiskularTangle) -> Result<Self> {
        t.validate()?;
        let inner_algebras: Vec<ArcAlgebra> = t.inner.iter().map(|m| ArcAlgebra::new(*m)).collect::<Result<_>>()?;
        let outer_algebra = ArcAlgebra::new(t.n)?;
        let sizes: Vec<usize> = inner_algebras.iter().map(|a| a.matchings.len()).collect();
        let keys: Vec<(Vec<usize>, usize)> = tuples(&sizes)
            .into_iter()
            .flat_map(|c| (0..outer_algebra.matchings.len()).map(move |b| (c.clone(), b)))
            .collect();
        let entries = keys
            .par_iter()
            .map(|(caps, b)| {
                let cm: Vec<_> = caps.iter().enumerate().map(|(d, k)| inner_algebras[d].matchings[*k].clone()).collect();
                let (closed, edge_class) = t.close_with_map(&cm, &outer_algebra.matchings[*b])?;
                let kc = KhComplex::new(&closed, t.n as i64 / 2)?;
                Ok(((caps.clone(), *b), ModuleEntry { caps: caps.clone(), outer: *b, edge_class, kc }))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Ok(TangleModule { tangle: t.clone(), inner_algebras, outer_algebra, entries })
    }

    pub fn entry(&self, caps: &[usize], b: usize) -> &ModuleEntry {
        &self.entries[&(caps.to_vec(), b)]
    }

    /// The surgery picture of one closure at a vertex: tangle arcs plus caps.
    /// Returns arcs, node circle ids, and the layout.
    pub fn picture(&self, e: &ModuleEntry, v: CubeVertex, base: usize) -> Result<(Vec<(usize, usize, Tag)>, Vec<(usize, CircleId)>, NodeLayout)> {
        let t = &self.tangle;
        let layout = NodeLayout::new(t, base);
        let flat = t.resolve(v)?;
        let mut arcs = Vec::new();
        for (p, q) in &flat.arcs {
            arcs.push((layout.node(*p), layout.node(*q), TAG_TANGLE));
        }
        for (d, k) in e.caps.iter().enumerate() {
            for (i, j) in &self.inner_algebras[d].matchings[*k].pairs {
                arcs.push((layout.inner[d][i - 1], layout.inner[d][j - 1], TAG_INNER_CAP));
            }
        }
        for (i, j) in &self.outer_algebra.matchings[e.outer].pairs {
            arcs.push((layout.outer[i - 1], layout.outer[j - 1], TAG_OUTER_CAP));
        }
        let mut circles = Vec::new();
        for (j, edge) in t.boundary_edges.iter().enumerate() {
            circles.push((layout.outer[j], e.circle_of(v, *edge)));
        }
        for (d, es) in t.inner_boundary_edges.iter().enumerate() {
            for (j, edge) in es.iter().enumerate() {
                circles.push((layout.inner[d][j], e.circle_of(v, *edge)));
            }
        }
        Ok((arcs, circles, layout))
    }

    /// Right action `M(a⃗; b) ⊗ hom(b, c) -> M(a⃗; c)` on a vector at vertex `v`.
    pub fn act_outer(&self, caps: &[usize], b: usize, c: usize, v: CubeVertex, x: &TqftVector, alpha: &TqftVector) -> Result<TqftVector> {
        let src = self.entry(caps, b);
        let dst = self.entry(caps, c);
        let (mut arcs, circles, layout) = self.picture(src, v, 0)?;
        let n = self.tangle.n;
        let ys: Vec<usize> = (layout.total..layout.total + n).collect();
        let (mb, mc) = (&self.outer_algebra.matchings[b], &self.outer_algebra.matchings[c]);
        for (i, j) in &mb.pairs {
            arcs.push((ys[i - 1], ys[j - 1], TAG_INSIDE));
        }
        for (i, j) in &mc.pairs {
            arcs.push((ys[i - 1], ys[j - 1], TAG_OUTSIDE));
        }
        let alg_circles = picture_circles(mb, mc);
        let mut node_circle = vec![0; layout.total + n];
        for (node, c) in &circles {
            node_circle[*node] = *c;
        }
        for (k, y) in ys.iter().enumerate() {
            node_circle[*y] = alg_circles[k] + SECOND_BASE;
        }
        let shift: BTreeMap<CircleId, CircleId> = alg_circles.iter().map(|c| (*c, c + SECOND_BASE)).collect();
        let vec = x.tensor(&rename_circles(alpha, &shift)?)?;
        let mut s = Surgery::new(arcs, node_circle, vec);
        s.contract(mb, &layout.outer, TAG_OUTER_CAP, &ys, TAG_INSIDE, TAG_RADIAL)?;
        let target = self.node_targets(dst, v, &layout);
        s.finish(|node| if node >= layout.total { target[&layout.outer[node - layout.total]] } else { target[&node] }, &BTreeMap::new())
    }

    /// Left action `hom(a', a) ⊗ M(…a…; b) -> M(…a'…; b)` on inner disk `d`.
    pub fn act_inner(&self, d: usize, caps: &[usize], a_new: usize, b: usize, v: CubeVertex, x: &TqftVector, alpha: &TqftVector) -> Result<TqftVector> {
        let src = self.entry(caps, b);
        let mut new_caps = caps.to_vec();
        new_caps[d] = a_new;
        let dst = self.entry(&new_caps, b);
        let (mut arcs, circles, layout) = self.picture(src, v, 0)?;
        let alg = &self.inner_algebras[d];
        let m = alg.n;
        let ys: Vec<usize> = (layout.total..layout.total + m).collect();
        let (ma_new, ma) = (&alg.matchings[a_new], &alg.matchings[caps[d]]);
        for (i, j) in &ma_new.pairs {
            arcs.push((ys[i - 1], ys[j - 1], TAG_INSIDE));
        }
        for (i, j) in &ma.pairs {
            arcs.push((ys[i - 1], ys[j - 1], TAG_OUTSIDE));
        }
        let alg_circles = picture_circles(ma_new, ma);
        let mut node_circle = vec![0; layout.total + m];
        for (node, c) in &circles {
            node_circle[*node] = *c;
        }
        for (k, y) in ys.iter().enumerate() {
            node_circle[*y] = alg_circles[k] + SECOND_BASE;
        }
        let shift: BTreeMap<CircleId, CircleId> = alg_circles.iter().map(|c| (*c, c + SECOND_BASE)).collect();
        let vec = x.tensor(&rename_circles(alpha, &shift)?)?;
        let mut s = Surgery::new(arcs, node_circle, vec);
        s.contract(ma, &ys, TAG_OUTSIDE, &layout.inner[d], TAG_INNER_CAP, TAG_RADIAL)?;
        let target = self.node_targets(dst, v, &layout);
        let zs = layout.inner[d].clone();
        s.finish(|node| if node >= layout.total { target[&zs[node - layout.total]] } else { target[&node] }, &BTreeMap::new())
    }

    fn node_targets(&self, dst: &ModuleEntry, v: CubeVertex, layout: &NodeLayout) -> BTreeMap<usize, CircleId> {
        let t = &self.tangle;
        let mut m = BTreeMap::new();
        for (j, e) in t.boundary_edges.iter().enumerate() {
            m.insert(layout.outer[j], dst.circle_of(v, *e));
        }
        for (d, es) in t.inner_boundary_edges.iter().enumerate() {
            for (j, e) in es.iter().enumerate() {
                m.insert(layout.inner[d][j], dst.circle_of(v, *e));
            }
        }
        m
    }

    /// Matrix of right multiplication by `alpha ∈ hom(b, c)` from `M(a⃗; b)` to `M(a⃗; c)`.
    pub fn outer_action_matrix(&self, caps: &[usize], b: usize, c: usize, alpha: &TqftVector) -> Result<SparseMatrix> {
        let src = &self.entry(caps, b).kc;
        let dst = &self.entry(caps, c).kc;
        let cols: Vec<Vec<(usize, BigInt)>> = (0..src.dim())
            .into_par_iter()
            .map(|i| {
                let (v, x) = src.basis_vector(i);
                Ok(dst.column(v, &self.act_outer(caps, b, c, v, &x, alpha)?))
            })
            .collect::<Result<_>>()?;
        Ok(columns_to_matrix(dst.dim(), cols))
    }

    /// Matrix of left multiplication by `alpha ∈ hom(a', a)` on inner disk `d`.
    pub fn inner_action_matrix(&self, d: usize, caps: &[usize], a_new: usize, b: usize, alpha: &TqftVector) -> Result<SparseMatrix> {
        let src = &self.entry(caps, b).kc;
        let mut new_caps = caps.to_vec();
        new_caps[d] = a_new;
        let dst = &self.entry(&new_caps, b).kc;
        let cols: Vec<Vec<(usize, BigInt)>> = (0..src.dim())
            .into_par_iter()
            .map(|i| {
                let (v, x) = src.basis_vector(i);
                Ok(dst.column(v, &self.act_inner(d, caps, a_new, b, v, &x, alpha)?))
            })
            .collect::<Result<_>>()?;
        Ok(columns_to_matrix(dst.dim(), cols))
    }
}

pub fn columns_to_matrix(nrows: usize, cols: Vec<Vec<(usize, BigInt)>>) -> SparseMatrix {
    let ncols = cols.len();
    SparseMatrix::from_triplets(nrows, ncols, cols.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v))))
}

/// Check that actions commute with differentials, preserve gradings, and are
/// associative and unital, over every algebra basis element.
pub fn check_module_axioms(m: &TangleModule) -> Result<()> {
    let check_degree = |mat: &SparseMatrix, src: &KhComplex, dst: &KhComplex, dq: i64| -> Result<()> {
        for (r, c, _) in mat.triplets() {
            let (hs, qs) = src.complex.grades[c];
            let (ht, qt) = dst.complex.grades[r];
            if ht != hs || qt != qs + dq {
                return Err(KhError::NotModuleMap(format!("action moves ({hs},{qs}) to ({ht},{qt}), expected q+{dq}")));
            }
        }
        Ok(())
    };
    let ob = &m.outer_algebra;
    for ((caps, b), e) in &m.entries {
        for c in 0..ob.matchings.len() {
            let dst = m.entry(caps, c);
            for l in ob.hom_basis(*b, c) {
                let alpha = TqftVector::generator(l.clone());
                let mat = m.outer_action_matrix(caps, *b, c, &alpha)?;
                check_degree(&mat, &e.kc, &dst.kc, ob.q_grade(&l))?;
                if dst.kc.complex.d.mul(&mat) != mat.mul(&e.kc.complex.d) {
                    return Err(KhError::NotModuleMap("outer action does not commute with d".into()));
                }
            }
        }
        if m.outer_action_matrix(caps, *b, *b, &ob.identity(*b))? != SparseMatrix::identity(e.kc.dim()) {
            return Err(KhError::NotModuleMap("outer unit does not act as the identity".into()));
        }
        for (d, alg) in m.inner_algebras.iter().enumerate() {
            let a = caps[d];
            for a_new in 0..alg.matchings.len() {
                let mut nc = caps.clone();
                nc[d] = a_new;
                let dst = m.entry(&nc, *b);
                for l in alg.hom_basis(a_new, a) {
                    let alpha = TqftVector::generator(l.clone());
                    let mat = m.inner_action_matrix(d, caps, a_new, *b, &alpha)?;
                    check_degree(&mat, &e.kc, &dst.kc, alg.q_grade(&l))?;
                    if dst.kc.complex.d.mul(&mat) != mat.mul(&e.kc.complex.d) {
                        return Err(KhError::NotModuleMap("inner action does not commute with d".into()));
                    }
                    // inner and outer actions commute
                    for c in 0..ob.matchings.len() {
                        for lo in ob.hom_basis(*b, c) {
                            let beta = TqftVector::generator(lo);
                            let one = m.outer_action_matrix(&nc, *b, c, &beta)?.mul(&mat);
                            let two = m.inner_action_matrix(d, caps, a_new, c, &alpha)?.mul(&m.outer_action_matrix(caps, *b, c, &beta)?);
                            if one != two {
                                return Err(KhError::NotModuleMap("inner and outer actions do not commute".into()));
                            }
                        }
                    }
                }
            }
            if m.inner_action_matrix(d, caps, a, *b, &alg.identity(a))? != SparseMatrix::identity(e.kc.dim()) {
                return Err(KhError::NotModuleMap("inner unit does not act as the identity".into()));
            }
        }
    }
    check_associativity(m)
}

fn check_associativity(m: &TangleModule) -> Result<()> {
    let ob = &m.outer_algebra;
    let k = ob.matchings.len();
    for (caps, b) in m.entries.keys() {
        for c in 0..k {
            for d in 0..k {
                for l1 in ob.hom_basis(*b, c) {
                    for l2 in ob.hom_basis(c, d) {
                        let (x1, x2) = (TqftVector::generator(l1.clone()), TqftVector::generator(l2));
                        let seq = m.outer_action_matrix(caps, c, d, &x2)?.mul(&m.outer_action_matrix(caps, *b, c, &x1)?);
                        let prod = ob.compose(*b, c, d, &x1, &x2)?;
                        let mut direct = SparseMatrix::zeros(seq.nrows(), seq.ncols());
                        for (l, coef) in prod.terms() {
                            let mat = m.outer_action_matrix(caps, *b, d, &TqftVector::generator(l.clone()))?;
                            direct = direct.add(&mat.scaled(coef));
                        }
                        if seq != direct {
                            return Err(KhError::NotModuleMap("outer action is not associative".into()));
                        }
                    }
                }
            }
        }
        for (dsk, alg) in m.inner_algebras.iter().enumerate() {
            let a = caps[dsk];
            let ka = alg.matchings.len();
            for a1 in 0..ka {
                for a2 in 0..ka {
                    for l1 in alg.hom_basis(a1, a) {
                        for l2 in alg.hom_basis(a2, a1) {
                            let (x1, x2) = (TqftVector::generator(l1.clone()), TqftVector::generator(l2));
                            let mut c1 = caps.clone();
                            c1[dsk] = a1;
                            let seq = m
                                .inner_action_matrix(dsk, &c1, a2, *b, &x2)?
                                .mul(&m.inner_action_matrix(dsk, caps, a1, *b, &x1)?);
                            let prod = alg.compose(a2, a1, a, &x2, &x1)?;
                            let mut direct = SparseMatrix::zeros(seq.nrows(), seq.ncols());
                            for (l, coef) in prod.terms() {
                                let mat = m.inner_action_matrix(dsk, caps, a2, *b, &TqftVector::generator(l.clone()))?;
                                direct = direct.add(&mat.scaled(coef));
                            }
                            if seq != direct {
                                return Err(KhError::NotModuleMap("inner action is not associative".into()));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Check that the column of vertex `v` is projective: for every choice of inner
/// caps, `M(a⃗; ·)` at `v` is `V^{⊗j} ⊗ hom(a′, ·)`, where `a′` is the matching the
/// capped resolution draws on the outer boundary and `j` counts its closed circles.
/// The identification must intertwine the right action.
pub fn check_projective(m: &TangleModule, v: CubeVertex) -> Result<()> {
    let ob = &m.outer_algebra;
    let n = m.tangle.n;
    let cap_tuples: std::collections::BTreeSet<Vec<usize>> = m.entries.keys().map(|(c, _)| c.clone()).collect();
    for caps in cap_tuples {
        let (arcs, _, layout) = m.picture(m.entry(&caps, 0), v, 0)?;
        let mut uf = crate::unionfind::UnionFind::new(layout.total);
        for (a, b, t) in &arcs {
            if *t != TAG_OUTER_CAP {
                uf.union(*a, *b);
            }
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if uf.find(layout.outer[i]) == uf.find(layout.outer[j]) {
                    pairs.push((i + 1, j + 1));
                }
            }
        }
        let a_prime = ob.index_of(&crate::matching::CrossinglessMatching::new(n, pairs)?);
        // closed circles are the same for every outer cap
        let closed_of = |b: usize| -> (Vec<CircleId>, BTreeMap<CircleId, CircleId>) {
            let e = m.entry(&caps, b);
            let alg_ids = picture_circles(&ob.matchings[a_prime], &ob.matchings[b]);
            let mut to_alg = BTreeMap::new();
            for (j, edge) in m.tangle.boundary_edges.iter().enumerate() {
                to_alg.insert(e.circle_of(v, *edge), alg_ids[j]);
            }
            let closed = e.kc.vertices[v as usize].circles.iter().copied().filter(|c| !to_alg.contains_key(c)).collect();
            (closed, to_alg)
        };
        let closed = closed_of(0).0;
        let embed = |b: usize, z: &crate::tqft::Labeling, x: &TqftVector| -> Result<TqftVector> {
            let (cl, to_alg) = closed_of(b);
            if cl != closed {
                return Err(KhError::NotModuleMap("closed circles depend on the outer cap".into()));
            }
            let back: BTreeMap<CircleId, CircleId> = to_alg.iter().map(|(k, a)| (*a, *k)).collect();
            if back.len() != to_alg.len() || back.len() != ob.hom_circles(a_prime, b).len() {
                return Err(KhError::NotModuleMap("boundary circles do not match hom(a′, b)".into()));
            }
            TqftVector::generator(z.clone()).tensor(&rename_circles(x, &back)?)
        };
        for b in 0..ob.matchings.len() {
            let e = m.entry(&caps, b);
            let count = e.kc.vertices[v as usize].circles.len();
            if count != closed.len() + ob.hom_circles(a_prime, b).len() {
                return Err(KhError::NotModuleMap("column rank differs from V^j ⊗ hom(a′, b)".into()));
            }
            for z in crate::tqft::all_labelings(&closed) {
                for x in ob.hom_basis(a_prime, b) {
                    let xv = TqftVector::generator(x);
                    let phi = embed(b, &z, &xv)?;
                    for c in 0..ob.matchings.len() {
                        for l in ob.hom_basis(b, c) {
                            let alpha = TqftVector::generator(l);
                            let acted = m.act_outer(&caps, b, c, v, &phi, &alpha)?;
                            let expected = embed(c, &z, &ob.compose(a_prime, b, c, &xv, &alpha)?)?;
                            if acted != expected {
                                return Err(KhError::NotModuleMap(format!("column {v} is not V^j ⊗ hom(a′, ·)")));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_crossing() -> DiskularTangle {
        DiskularTangle::new(4, vec![], vec![[1, 2, 3, 4]], vec![1, 2, 3, 4], vec![], vec![], 0).unwrap()
    }

    #[test]
    fn unknot_module() {
        let m = TangleModule::new(&DiskularTangle::unlink(1)).unwrap();
        let h = m.entry(&[], 0).kc.homology();
        assert_eq!(h.to_json(), r#"[{"h":0,"q":-1,"free":1},{"h":0,"q":1,"free":1}]"#);
    }

    #[test]
    fn one_crossing_module_axioms() {
        let m = TangleModule::new(&one_crossing()).unwrap();
        check_module_axioms(&m).unwrap();
        check_projective(&m, 0).unwrap();
        check_projective(&m, 1).unwrap();
    }

    #[test]
    fn identity_tangle_module_axioms() {
        check_module_axioms(&TangleModule::new(&DiskularTangle::identity(4)).unwrap()).unwrap();
        let crossing_in_annulus =
            DiskularTangle::new(2, vec![2], vec![[1, 2, 3, 4]], vec![3, 4], vec![vec![1, 2]], vec![], 1).unwrap();
        let m = TangleModule::new(&crossing_in_annulus).unwrap();
        check_module_axioms(&m).unwrap();
        check_projective(&m, 0).unwrap();
        check_projective(&m, 1).unwrap();
    }
}
