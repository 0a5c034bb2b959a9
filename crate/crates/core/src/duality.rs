//! Complexes of module maps between tangle modules over the outer arc algebra, and the
//! comparison of the dual of a tangle module with the module of its mirror.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use crate::cobordism::ModuleMap;
use crate::complex::{Grade, GradedComplex, HomologyTable};
use crate::error::{KhError, Result};
use crate::linalg::{integer_kernel, solve_integer, SparseMatrix};
use crate::khcomplex::KhComplex;
use crate::module::TangleModule;
use crate::tangle::DiskularTangle;
use crate::tqft::TqftVector;

/// One matrix entry `f_b[row, col]` of a family of maps `M(b) -> N(b)`.
type Variable = (usize, usize, usize);

/// The complex of maps `f_b: M(b) -> N(c⃗; b)` commuting with the right action of every
/// `hom(b, c)`, graded by the bidegree of the maps. The differential is
/// `D f = d f - (-1)^h f d`.
#[derive(Clone, Debug)]
pub struct ModuleHomComplex {
    pub complex: GradedComplex,
    /// Each generator as integer coefficients on the variables of its bidegree.
    pub generators: Vec<Vec<BigInt>>,
    pub variables: BTreeMap<Grade, Vec<Variable>>,
    pub target_caps: Vec<usize>,
}

/// Module maps from a tangle module without inner disks to the closures of `target`
/// with inner caps `target_caps`.
pub fn module_hom_complex(source: &TangleModule, target: &TangleModule, target_caps: &[usize]) -> Result<ModuleHomComplex> {
    if !source.tangle.inner.is_empty() {
        return Err(KhError::InnerDisks);
    }
    if source.tangle.n != target.tangle.n {
        return Err(KhError::Arity("modules over different algebras".into()));
    }
    let alg = &source.outer_algebra;
    let nb = alg.matchings.len();
    let src = |b: usize| &source.entry(&[], b).kc.complex;
    let tgt = |b: usize| &target.entry(target_caps, b).kc.complex;
    let mut variables: BTreeMap<Grade, Vec<Variable>> = BTreeMap::new();
    for b in 0..nb {
        for (j, gt) in tgt(b).grades.iter().enumerate() {
            for (i, gs) in src(b).grades.iter().enumerate() {
                variables.entry((gt.0 - gs.0, gt.1 - gs.1)).or_default().push((b, j, i));
            }
        }
    }
    let index: BTreeMap<Variable, (Grade, usize)> =
        variables.iter().flat_map(|(g, vs)| vs.iter().enumerate().map(move |(k, v)| (*v, (*g, k)))).collect();
    // action matrices for every basis element of every hom(b, c)
    let mut actions = Vec::new();
    for b in 0..nb {
        for c in 0..nb {
            for l in alg.hom_basis(b, c) {
                let alpha = TqftVector::generator(l);
                let on_source = source.outer_action_matrix(&[], b, c, &alpha)?;
                let on_target = target.outer_action_matrix(target_caps, b, c, &alpha)?;
                actions.push((b, c, on_source, on_target));
            }
        }
    }
    // constraints per bidegree: A_t f_b - f_c A_s = 0, one row per (action, row, col)
    let kernels: BTreeMap<Grade, Vec<Vec<BigInt>>> = variables
        .par_iter()
        .map(|(g, vs)| {
            let mut rows: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
            let mut t = Vec::new();
            for (a, (b, c, on_s, on_t)) in actions.iter().enumerate() {
                let ont_cols: Vec<&BTreeMap<usize, BigInt>> = (0..on_t.ncols()).map(|k| on_t.col(k)).collect();
                let ons_t = on_s.transpose();
                for (col, (bb, j, i)) in vs.iter().enumerate() {
                    if bb == b {
                        // (A_t f_b)[j', i] gets A_t[j', j]
                        for (jp, v) in ont_cols[*j] {
                            let n = rows.len();
                            let r = *rows.entry((a, *jp, *i)).or_insert(n);
                            t.push((r, col, v.clone()));
                        }
                    }
                    if bb == c {
                        // (f_c A_s)[j, i'] gets A_s[i, i'] for f_c[j, i]
                        for (ip, v) in ons_t.col(*i) {
                            let n = rows.len();
                            let r = *rows.entry((a, *j, *ip)).or_insert(n);
                            t.push((r, col, -v));
                        }
                    }
                }
            }
            let m = SparseMatrix::from_triplets(rows.len(), vs.len(), t);
            (*g, integer_kernel(&m))
        })
        .collect();
    let mut grades = Vec::new();
    let mut generators = Vec::new();
    let mut first: BTreeMap<Grade, usize> = BTreeMap::new();
    for (g, ks) in &kernels {
        first.insert(*g, generators.len());
        for k in ks {
            grades.push(*g);
            generators.push(k.clone());
        }
    }
    let mut t = Vec::new();
    for (g, ks) in &kernels {
        if ks.is_empty() {
            continue;
        }
        let g2 = (g.0 - 1, g.1);
        let target_basis = kernels.get(&g2).cloned().unwrap_or_default();
        if target_basis.is_empty() {
            continue;
        }
        let basis_matrix = columns(&target_basis, variables[&g2].len());
        let sign = if g.0.rem_euclid(2) == 0 { BigInt::from(-1) } else { BigInt::from(1) };
        for (k, f) in ks.iter().enumerate() {
            let image = differential(&variables[g], f, &variables[&g2], &index, &sign, &src, &tgt);
            if image.iter().all(Zero::is_zero) {
                continue;
            }
            let coords = solve_integer(&basis_matrix, &image)
                .ok_or_else(|| KhError::NotModuleMap("the differential leaves the module maps".into()))?;
            for (r, v) in coords.into_iter().enumerate() {
                if !v.is_zero() {
                    t.push((first[&g2] + r, first[g] + k, v));
                }
            }
        }
    }
    let n = grades.len();
    let complex = GradedComplex::new(grades, SparseMatrix::from_triplets(n, n, t))?;
    Ok(ModuleHomComplex { complex, generators, variables, target_caps: target_caps.to_vec() })
}

fn columns(vectors: &[Vec<BigInt>], nrows: usize) -> SparseMatrix {
    SparseMatrix::from_triplets(
        nrows,
        vectors.len(),
        vectors
            .iter()
            .enumerate()
            .flat_map(|(c, v)| v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(move |(r, x)| (r, c, x.clone()))),
    )
}

/// `D f = d f - (-1)^h f d` for `f` given on the variables `vs`, written on the variables `ws`.
fn differential<'a>(
    vs: &[Variable],
    f: &[BigInt],
    ws: &[Variable],
    index: &BTreeMap<Variable, (Grade, usize)>,
    sign: &BigInt,
    src: &impl Fn(usize) -> &'a GradedComplex,
    tgt: &impl Fn(usize) -> &'a GradedComplex,
) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); ws.len()];
    for ((b, j, i), x) in vs.iter().zip(f) {
        if x.is_zero() {
            continue;
        }
        // (d f)[j', i] += d[j', j] f[j, i]
        for (jp, v) in tgt(*b).d.col(*j) {
            let (_, k) = index[&(*b, *jp, *i)];
            out[k] += v * x;
        }
        // (f d)[j, i'] += f[j, i] d[i, i']: rows of the source differential
        for (ip, v) in src_row(src(*b), *i) {
            let (_, k) = index[&(*b, *j, ip)];
            out[k] += sign * &v * x;
        }
    }
    out
}

fn src_row(c: &GradedComplex, i: usize) -> Vec<(usize, BigInt)> {
    // entries d[i, i'] over all columns i'
    (0..c.dim()).filter_map(|ip| {
        let v = c.d.get(i, ip);
        (!v.is_zero()).then_some((ip, v))
    }).collect()
}

impl ModuleHomComplex {
    pub fn homology(&self) -> HomologyTable {
        self.complex.homology()
    }

    /// Coordinates of a module map in the generators of its bidegree, or an error if the
    /// map does not commute with the actions.
    pub fn coordinates(&self, f: &ModuleMap, bidegree: Grade) -> Result<Vec<BigInt>> {
        let vs = self.variables.get(&bidegree).cloned().unwrap_or_default();
        let mut x = vec![BigInt::zero(); vs.len()];
        let mut seen = 0usize;
        for (k, (b, j, i)) in vs.iter().enumerate() {
            let m = f
                .maps
                .iter()
                .find(|((_, bb), _)| bb == b)
                .map(|(_, m)| m)
                .ok_or_else(|| KhError::Shape(format!("map has no component at {b}")))?;
            x[k] = m.get(*j, *i);
        }
        for m in f.maps.values() {
            seen += m.nnz();
        }
        if seen != x.iter().filter(|v| !v.is_zero()).count() {
            return Err(KhError::Bidegree(format!("map is not homogeneous of bidegree {bidegree:?}")));
        }
        let ids: Vec<usize> = (0..self.generators.len()).filter(|k| self.complex.grades[*k] == bidegree).collect();
        let basis = columns(&ids.iter().map(|k| self.generators[*k].clone()).collect::<Vec<_>>(), vs.len());
        if ids.is_empty() {
            return if x.iter().all(Zero::is_zero) { Ok(vec![]) } else { Err(KhError::NotModuleMap("no module maps in this bidegree".into())) };
        }
        solve_integer(&basis, &x).ok_or_else(|| KhError::NotModuleMap("map does not commute with the actions".into()))
    }

    fn boundary_solvable(&self, bidegree: Grade, coords: &[BigInt]) -> bool {
        let here: Vec<usize> = (0..self.generators.len()).filter(|k| self.complex.grades[*k] == bidegree).collect();
        let above: Vec<usize> = (0..self.generators.len()).filter(|k| self.complex.grades[*k] == (bidegree.0 + 1, bidegree.1)).collect();
        if coords.iter().all(Zero::is_zero) {
            return true;
        }
        if above.is_empty() {
            return false;
        }
        let d = self.complex.d.select(&here, &above);
        solve_integer(&d, coords).is_some()
    }

    /// Whether a module map is null-homotopic through module maps.
    pub fn is_null_homotopic(&self, f: &ModuleMap, bidegree: Grade) -> Result<bool> {
        let x = self.coordinates(f, bidegree)?;
        Ok(self.boundary_solvable(bidegree, &x))
    }

    /// The signs `s` with `f - s g` null-homotopic through module maps.
    pub fn homotopy_signs(&self, f: &ModuleMap, g: &ModuleMap, bidegree: Grade) -> Result<Vec<i64>> {
        let x = self.coordinates(f, bidegree)?;
        let y = self.coordinates(g, bidegree)?;
        Ok([1i64, -1]
            .into_iter()
            .filter(|s| {
                let diff: Vec<BigInt> = x.iter().zip(&y).map(|(a, b)| a - b * BigInt::from(*s)).collect();
                self.boundary_solvable(bidegree, &diff)
            })
            .collect())
    }
}

/// Both sides of the dualization of a tangle module at one cap `a`: module maps
/// `M_T -> hom(a, ·)` against the closure of the mirror of `T` by the reflection of `a`.
/// They should agree as `Hom_{h,q} = C(mirror)_{h, q - m/2}`, on chain ranks and on homology.
#[derive(Clone, Debug)]
pub struct DualitySides {
    pub hom_ranks: BTreeMap<Grade, usize>,
    pub hom_homology: HomologyTable,
    /// Already moved up by `m/2` in `q`.
    pub mirror_ranks: BTreeMap<Grade, usize>,
    pub mirror_homology: HomologyTable,
}

impl DualitySides {
    pub fn agree(&self) -> bool {
        self.hom_ranks == self.mirror_ranks && self.hom_homology == self.mirror_homology
    }
}

fn ranks(c: &GradedComplex) -> BTreeMap<Grade, usize> {
    c.groups().into_iter().map(|(g, v)| (g, v.len())).collect()
}

pub fn duality_sides(t: &DiskularTangle, a: usize) -> Result<DualitySides> {
    if !t.inner.is_empty() {
        return Err(KhError::InnerDisks);
    }
    let m = t.n;
    let source = TangleModule::new(t)?;
    let algebra = TangleModule::new(&DiskularTangle::identity(m))?;
    let hom = module_hom_complex(&source, &algebra, &[a])?;
    // the mirror lists its boundary points in the opposite order
    let cap = &source.outer_algebra.matchings[a];
    let reflected = crate::matching::CrossinglessMatching::new(
        m,
        cap.pairs.iter().map(|(i, j)| (m + 1 - j, m + 1 - i)).collect(),
    )?;
    let closed = t.mirror()?.close(&[], &reflected)?;
    let kc = KhComplex::new(&closed, m as i64 / 2)?;
    Ok(DualitySides {
        hom_ranks: ranks(&hom.complex),
        hom_homology: hom.homology(),
        mirror_ranks: ranks(&kc.complex),
        mirror_homology: kc.homology(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{all_tangles, tangle};

    #[test]
    fn dual_of_a_matching_is_its_reflection() {
        let t = tangle("arc").unwrap();
        let sides = duality_sides(&t, 0).unwrap();
        assert!(sides.agree());
        // the unknot moved up by one
        assert_eq!(sides.hom_homology.get(0, 0).free, 1);
        assert_eq!(sides.hom_homology.get(0, 2).free, 1);
    }

    #[test]
    fn bundled_tangles_dualize() {
        for (name, t) in all_tangles() {
            for a in 0..crate::arc::ArcAlgebra::new(t.n).unwrap().matchings.len() {
                let sides = duality_sides(&t, a).unwrap();
                assert!(sides.agree(), "{name} {a}: {sides:?}");
            }
        }
    }

    #[test]
    fn identity_generates_self_maps_of_a_bridge() {
        let t = tangle("kinked_arc").unwrap();
        let m = TangleModule::new(&t).unwrap();
        let h = module_hom_complex(&m, &m, &[]).unwrap();
        assert_eq!(h.homology().get(0, 0).free, 1);
        let id = ModuleMap::identity(&m);
        assert!(!h.is_null_homotopic(&id, (0, 0)).unwrap());
        assert_eq!(h.homotopy_signs(&id, &id.scaled(-1), (0, 0)).unwrap(), vec![-1]);
        assert!(h.is_null_homotopic(&id.scaled(0), (0, 0)).unwrap());
    }
}
