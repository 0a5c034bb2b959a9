//! Movies of elementary cobordisms between diskular tangles and the chain maps they
//! induce on tangle modules.
//!
//! A map between modules is a chain map on every closure. Births, deaths, dots and
//! saddles act vertex by vertex through the TQFT; relabelings permute the cube;
//! Reidemeister moves use the local equivalences of [`crate::equivalence`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::complex::Grade;
use crate::equivalence::{local_equivalence, LocalSide};
use crate::error::{KhError, Result};
use crate::khcomplex::KhComplex;
use crate::linalg::SparseMatrix;
use crate::module::{ModuleEntry, TangleModule};
use crate::moves;
use crate::surgery::FRESH_BASE;
use crate::tangle::{CubeVertex, DiskularTangle, EdgeId};
use crate::tqft::{apply_birth, apply_death, apply_dot, apply_merge, apply_split, rename_circles, CircleId, TqftVector};

/// One elementary cobordism, named by what it does to the diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Step {
    /// Planar isotopy: rename edges, reorder crossings (new crossing `k` is old crossing
    /// `order[k]`) and give some crossings a half turn.
    Relabel {
        #[serde(default, deserialize_with = "crate::io::edge_map")]
        edges: BTreeMap<EdgeId, EdgeId>,
        order: Vec<usize>,
        #[serde(default)]
        half_turns: Vec<usize>,
    },
    R1Create { edge: EdgeId, positive: bool, side: bool },
    R1Remove { crossing: usize },
    R2Create { over: EdgeId, under: EdgeId, #[serde(default)] variant: usize },
    R2Remove { crossings: [usize; 2] },
    R3 { crossings: [usize; 3] },
    Birth { edge: EdgeId },
    Death { edge: EdgeId },
    Saddle { edges: [EdgeId; 2], #[serde(default)] variant: usize },
    Dot { edge: EdgeId },
}

impl Step {
    /// Euler characteristic contribution.
    pub fn chi(&self) -> i64 {
        match self {
            Step::Saddle { .. } => -1,
            Step::Birth { .. } | Step::Death { .. } => 1,
            _ => 0,
        }
    }

    pub fn dots(&self) -> i64 {
        i64::from(matches!(self, Step::Dot { .. }))
    }

    pub fn is_reidemeister(&self) -> bool {
        matches!(
            self,
            Step::R1Create { .. } | Step::R1Remove { .. } | Step::R2Create { .. } | Step::R2Remove { .. } | Step::R3 { .. }
        )
    }
}

/// How a step changes the diagram, as needed to build its map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Effect {
    Relabel { edges: BTreeMap<EdgeId, EdgeId>, order: Vec<usize> },
    /// The first `old` crossings agree; the rest changed inside a disk.
    Local { old: usize },
    Birth { edge: EdgeId },
    Death { edge: EdgeId },
    Dot { edge: EdgeId },
    /// Edges through the saddle before and after.
    Saddle { before: [EdgeId; 2], after: [EdgeId; 2] },
}

#[derive(Clone, Debug)]
pub struct AppliedStep {
    pub step: Step,
    pub source: DiskularTangle,
    pub target: DiskularTangle,
    pub effect: Effect,
}

impl AppliedStep {
    /// Change in the number of positive crossings.
    pub fn p_change(&self) -> i64 {
        self.target.p - self.source.p
    }

    /// Quantum degree of the induced map.
    pub fn q_degree(&self) -> i64 {
        -self.step.chi() + 2 * self.step.dots()
    }
}

fn relabel_step(t: &DiskularTangle, order: Vec<usize>) -> Result<Option<AppliedStep>> {
    if order.iter().enumerate().all(|(k, o)| k == *o) {
        return Ok(None);
    }
    let target = moves::relabel(t, &BTreeMap::new(), &order, &[])?;
    Ok(Some(AppliedStep {
        step: Step::Relabel { edges: BTreeMap::new(), order: order.clone(), half_turns: vec![] },
        source: t.clone(),
        target,
        effect: Effect::Relabel { edges: BTreeMap::new(), order },
    }))
}

/// Apply one step. Removals and R3 first move their crossings to the end, which shows
/// up as an extra relabeling step in front.
pub fn apply_step(t: &DiskularTangle, step: &Step) -> Result<Vec<AppliedStep>> {
    let mut out = Vec::new();
    let mut cur = t.clone();
    let bring_last = |crossings: &[usize], out: &mut Vec<AppliedStep>, cur: &mut DiskularTangle| -> Result<()> {
        let order = moves::order_with_last(cur, crossings)?;
        if let Some(r) = relabel_step(cur, order)? {
            *cur = r.target.clone();
            out.push(r);
        }
        Ok(())
    };
    let (target, effect) = match step {
        Step::Relabel { edges, order, half_turns } => {
            (moves::relabel(&cur, edges, order, half_turns)?, Effect::Relabel { edges: edges.clone(), order: order.clone() })
        }
        Step::R1Create { edge, positive, side } => {
            (moves::r1_create(&cur, *edge, *positive, *side)?, Effect::Local { old: cur.num_crossings() })
        }
        Step::R1Remove { crossing } => {
            bring_last(&[*crossing], &mut out, &mut cur)?;
            (moves::r1_remove(&cur)?.0, Effect::Local { old: cur.num_crossings() - 1 })
        }
        Step::R2Create { over, under, variant } => {
            (moves::r2_create(&cur, *over, *under, *variant)?, Effect::Local { old: cur.num_crossings() })
        }
        Step::R2Remove { crossings } => {
            bring_last(crossings, &mut out, &mut cur)?;
            (moves::r2_remove(&cur)?, Effect::Local { old: cur.num_crossings() - 2 })
        }
        Step::R3 { crossings } => {
            bring_last(crossings, &mut out, &mut cur)?;
            (moves::r3(&cur)?, Effect::Local { old: cur.num_crossings() - 3 })
        }
        Step::Birth { edge } => (moves::birth(&cur, *edge)?, Effect::Birth { edge: *edge }),
        Step::Death { edge } => (moves::death(&cur, *edge)?, Effect::Death { edge: *edge }),
        Step::Dot { edge } => {
            if !cur.all_edges().contains(edge) {
                return Err(KhError::NotApplicable(format!("no edge {edge} to dot")));
            }
            (cur.clone(), Effect::Dot { edge: *edge })
        }
        Step::Saddle { edges, variant } => {
            let (t2, after) = moves::saddle(&cur, edges[0], edges[1], *variant)?;
            (t2, Effect::Saddle { before: *edges, after })
        }
    };
    out.push(AppliedStep { step: step.clone(), source: cur, target, effect });
    Ok(out)
}

/// A start diagram and a list of steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Movie {
    pub start: DiskularTangle,
    pub steps: Vec<Step>,
}

impl Movie {
    pub fn new(start: DiskularTangle, steps: Vec<Step>) -> Self {
        Movie { start, steps }
    }

    /// Every elementary step with its source and target diagrams.
    pub fn apply(&self) -> Result<Vec<AppliedStep>> {
        let mut cur = self.start.clone();
        let mut out = Vec::new();
        for (k, s) in self.steps.iter().enumerate() {
            let applied = apply_step(&cur, s).map_err(|e| KhError::NotComposable(format!("step {k}: {e}")))?;
            cur = applied.last().expect("at least one step").target.clone();
            out.extend(applied);
        }
        Ok(out)
    }

    /// The diagram at the end.
    pub fn end(&self) -> Result<DiskularTangle> {
        Ok(self.apply()?.last().map_or_else(|| self.start.clone(), |s| s.target.clone()))
    }

    /// Total change of `P` and the Euler characteristic `χ′`.
    pub fn bookkeeping(&self) -> Result<(i64, i64)> {
        let steps = self.apply()?;
        Ok((steps.iter().map(AppliedStep::p_change).sum(), self.steps.iter().map(Step::chi).sum()))
    }

    pub fn dots(&self) -> i64 {
        self.steps.iter().map(Step::dots).sum()
    }

    /// Quantum degree of the induced map: `−χ′ + 2·dots`.
    pub fn q_degree(&self) -> i64 {
        self.steps.iter().map(|s| -s.chi() + 2 * s.dots()).sum()
    }
}

/// A chain map between two tangle modules, one matrix per closure.
#[derive(Clone, Debug, PartialEq)]
pub struct ModuleMap {
    pub maps: BTreeMap<(Vec<usize>, usize), SparseMatrix>,
    pub q_degree: i64,
}

impl ModuleMap {
    pub fn identity(m: &TangleModule) -> Self {
        ModuleMap {
            maps: m.entries.iter().map(|(k, e)| (k.clone(), SparseMatrix::identity(e.kc.dim()))).collect(),
            q_degree: 0,
        }
    }

    /// `self ∘ first`.
    pub fn compose(&self, first: &ModuleMap) -> Result<ModuleMap> {
        let maps = first
            .maps
            .iter()
            .map(|(k, f)| {
                let g = self.maps.get(k).ok_or_else(|| KhError::Shape("maps live on different closures".into()))?;
                if g.ncols() != f.nrows() {
                    return Err(KhError::Shape("maps do not compose".into()));
                }
                Ok((k.clone(), g.mul(f)))
            })
            .collect::<Result<_>>()?;
        Ok(ModuleMap { maps, q_degree: self.q_degree + first.q_degree })
    }

    pub fn scaled(&self, k: i64) -> ModuleMap {
        let k = BigInt::from(k);
        ModuleMap { maps: self.maps.iter().map(|(key, m)| (key.clone(), m.scaled(&k))).collect(), q_degree: self.q_degree }
    }

    pub fn add(&self, other: &ModuleMap) -> ModuleMap {
        ModuleMap {
            maps: self.maps.iter().map(|(k, m)| (k.clone(), m.add(&other.maps[k]))).collect(),
            q_degree: self.q_degree,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(SparseMatrix::is_zero)
    }

    /// Commutes with the differentials and has bidegree `(0, q_degree)` on every closure.
    pub fn check_chain_map(&self, source: &TangleModule, target: &TangleModule) -> Result<()> {
        for (k, m) in &self.maps {
            let s = &source.entries[k].kc.complex;
            let t = &target.entries[k].kc.complex;
            if m.nrows() != t.dim() || m.ncols() != s.dim() {
                return Err(KhError::Shape(format!("map on closure {k:?} has the wrong shape")));
            }
            if t.d.mul(m) != m.mul(&s.d) {
                return Err(KhError::NotModuleMap(format!("map on closure {k:?} does not commute with d")));
            }
            for (r, c, _) in m.triplets() {
                let (gs, gt): (Grade, Grade) = (s.grades[c], t.grades[r]);
                if gt != (gs.0, gs.1 + self.q_degree) {
                    return Err(KhError::Bidegree(format!("closure {k:?} sends {gs:?} to {gt:?}")));
                }
            }
        }
        Ok(())
    }

    /// Commutes with the outer and inner algebra actions on every basis element.
    pub fn check_actions(&self, source: &TangleModule, target: &TangleModule) -> Result<()> {
        let ob = &source.outer_algebra;
        for (caps, b) in self.maps.keys() {
            for c in 0..ob.matchings.len() {
                for l in ob.hom_basis(*b, c) {
                    let alpha = TqftVector::generator(l);
                    let left = self.maps[&(caps.clone(), c)].mul(&source.outer_action_matrix(caps, *b, c, &alpha)?);
                    let right = target.outer_action_matrix(caps, *b, c, &alpha)?.mul(&self.maps[&(caps.clone(), *b)]);
                    if left != right {
                        return Err(KhError::NotModuleMap(format!("outer action on closure {caps:?},{b} to {c}")));
                    }
                }
            }
            for (d, alg) in source.inner_algebras.iter().enumerate() {
                for a_new in 0..alg.matchings.len() {
                    let mut nc = caps.clone();
                    nc[d] = a_new;
                    for l in alg.hom_basis(a_new, caps[d]) {
                        let alpha = TqftVector::generator(l);
                        let left = self.maps[&(nc.clone(), *b)].mul(&source.inner_action_matrix(d, caps, a_new, *b, &alpha)?);
                        let right = target.inner_action_matrix(d, caps, a_new, *b, &alpha)?.mul(&self.maps[&(caps.clone(), *b)]);
                        if left != right {
                            return Err(KhError::NotModuleMap(format!("inner action {d} on closure {caps:?},{b}")));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sign of the cube reordering at a vertex of the new cube: parity of inverted pairs
/// of set bits.
fn reorder_sign(new_v: CubeVertex, order: &[usize]) -> i64 {
    let set: Vec<usize> = (0..order.len()).filter(|k| new_v >> k & 1 == 1).collect();
    let mut inv = 0;
    for (i, a) in set.iter().enumerate() {
        for b in &set[i + 1..] {
            if order[*a] > order[*b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Circle renaming through edges that keep their meaning.
fn surviving_circles(
    src: &ModuleEntry,
    tgt: &ModuleEntry,
    v: CubeVertex,
    w: CubeVertex,
    edges: impl Iterator<Item = (EdgeId, EdgeId)>,
) -> BTreeMap<CircleId, CircleId> {
    let mut out = BTreeMap::new();
    for (e, f) in edges {
        out.entry(src.circle_of(v, e)).or_insert_with(|| tgt.circle_of(w, f));
    }
    out
}

fn restrict(map: &BTreeMap<CircleId, CircleId>, x: &TqftVector) -> BTreeMap<CircleId, CircleId> {
    map.iter().filter(|(c, _)| x.circles().contains(c)).map(|(a, b)| (*a, *b)).collect()
}

fn vertexwise(
    src: &KhComplex,
    tgt: &KhComplex,
    image: impl Fn(CubeVertex, &TqftVector) -> Result<(CubeVertex, TqftVector)> + Sync,
) -> Result<SparseMatrix> {
    let cols: Vec<Vec<(usize, BigInt)>> = (0..src.dim())
        .into_par_iter()
        .map(|i| {
            let (v, x) = src.basis_vector(i);
            let (w, y) = image(v, &x)?;
            Ok(tgt.column(w, &y))
        })
        .collect::<Result<_>>()?;
    Ok(crate::module::columns_to_matrix(tgt.dim(), cols))
}

/// The map of one step on one closure.
pub fn closure_map(step: &AppliedStep, src: &ModuleEntry, tgt: &ModuleEntry) -> Result<SparseMatrix> {
    let s_edges: Vec<EdgeId> = step.source.all_edges().into_iter().collect();
    let t_edges = step.target.all_edges();
    let kept = |touched: &[EdgeId]| -> Vec<(EdgeId, EdgeId)> {
        s_edges.iter().filter(|e| !touched.contains(e) && t_edges.contains(e)).map(|e| (*e, *e)).collect()
    };
    match &step.effect {
        Effect::Local { old } => local_equivalence(
            &LocalSide { tangle: &step.source, kc: &src.kc, edge_class: Some(&src.edge_class) },
            &LocalSide { tangle: &step.target, kc: &tgt.kc, edge_class: Some(&tgt.edge_class) },
            *old,
        ),
        Effect::Relabel { edges, order } => {
            let pairs: Vec<(EdgeId, EdgeId)> = s_edges.iter().map(|e| (*e, *edges.get(e).unwrap_or(e))).collect();
            vertexwise(&src.kc, &tgt.kc, |v, x| {
                let w: CubeVertex = (0..order.len()).filter(|k| v >> order[*k] & 1 == 1).map(|k| 1u64 << k).sum();
                let ren = surviving_circles(src, tgt, v, w, pairs.iter().copied());
                let y = rename_circles(x, &ren)?;
                Ok((w, y.scale(&BigInt::from(reorder_sign(w, order)))))
            })
        }
        Effect::Dot { edge } => {
            let pairs = kept(&[]);
            vertexwise(&src.kc, &tgt.kc, |v, x| {
                let y = apply_dot(x, src.circle_of(v, *edge))?;
                Ok((v, rename_circles(&y, &surviving_circles(src, tgt, v, v, pairs.iter().copied()))?))
            })
        }
        Effect::Birth { edge } => {
            let pairs = kept(&[]);
            vertexwise(&src.kc, &tgt.kc, |v, x| {
                let y = rename_circles(x, &surviving_circles(src, tgt, v, v, pairs.iter().copied()))?;
                Ok((v, apply_birth(&y, tgt.circle_of(v, *edge))?))
            })
        }
        Effect::Death { edge } => {
            let pairs = kept(&[*edge]);
            vertexwise(&src.kc, &tgt.kc, |v, x| {
                let y = apply_death(x, src.circle_of(v, *edge))?;
                let ren = surviving_circles(src, tgt, v, v, pairs.iter().copied());
                Ok((v, rename_circles(&y, &restrict(&ren, &y))?))
            })
        }
        Effect::Saddle { before, after } => {
            let pairs = kept(before);
            vertexwise(&src.kc, &tgt.kc, |v, x| {
                let (c1, c2) = (src.circle_of(v, before[0]), src.circle_of(v, before[1]));
                let (d1, d2) = (tgt.circle_of(v, after[0]), tgt.circle_of(v, after[1]));
                let mut ren = surviving_circles(src, tgt, v, v, pairs.iter().copied());
                let y = if c1 != c2 {
                    if d1 != d2 {
                        return Err(KhError::NotApplicable("a merging saddle left two circles".into()));
                    }
                    ren.insert(FRESH_BASE, d1);
                    apply_merge(x, c1, c2, FRESH_BASE)?
                } else {
                    if d1 == d2 {
                        return Err(KhError::NotApplicable("a splitting saddle left one circle".into()));
                    }
                    ren.insert(FRESH_BASE, d1);
                    ren.insert(FRESH_BASE + 1, d2);
                    apply_split(x, c1, FRESH_BASE, FRESH_BASE + 1)?
                };
                Ok((v, rename_circles(&y, &restrict(&ren, &y))?))
            })
        }
    }
}

/// The map of one step between the modules of its source and target.
pub fn elementary_map(step: &AppliedStep, source: &TangleModule, target: &TangleModule) -> Result<ModuleMap> {
    if source.tangle != step.source || target.tangle != step.target {
        return Err(KhError::Precondition("modules do not belong to the step".into()));
    }
    let maps = source
        .entries
        .iter()
        .map(|(k, e)| {
            let t = target.entries.get(k).ok_or_else(|| KhError::Shape("closures differ".into()))?;
            Ok((k.clone(), closure_map(step, e, t)?))
        })
        .collect::<Result<_>>()?;
    Ok(ModuleMap { maps, q_degree: step.q_degree() })
}

/// Everything computed for a movie: the modules along the way and the composite map.
#[derive(Clone, Debug)]
pub struct MovieEvaluation {
    pub steps: Vec<AppliedStep>,
    pub source: TangleModule,
    pub target: TangleModule,
    pub map: ModuleMap,
}

/// The composite of the maps of all steps.
pub fn movie_map(m: &Movie) -> Result<MovieEvaluation> {
    let steps = m.apply()?;
    let source = TangleModule::new(&m.start)?;
    let mut map = ModuleMap::identity(&source);
    let mut cur = source.clone();
    for s in &steps {
        let next = TangleModule::new(&s.target)?;
        map = elementary_map(s, &cur, &next)?.compose(&map)?;
        cur = next;
    }
    Ok(MovieEvaluation { steps, source, target: cur, map })
}

/// Cut the neck around the free loop `edge` present after the first `at` steps.
/// Returns the movies with the dot before the cut and after it; the original map is
/// the sum of theirs.
pub fn neck_cut(m: &Movie, at: usize, edge: EdgeId) -> Result<(Movie, Movie)> {
    if at > m.steps.len() {
        return Err(KhError::NotANeck(format!("no step {at}")));
    }
    let prefix = Movie::new(m.start.clone(), m.steps[..at].to_vec());
    let here = prefix.end()?;
    if !here.loops.contains(&edge) {
        return Err(KhError::NotANeck(format!("edge {edge} is not a free loop after step {at}")));
    }
    let build = |middle: Vec<Step>| {
        let mut steps = m.steps[..at].to_vec();
        steps.extend(middle);
        steps.extend_from_slice(&m.steps[at..]);
        Movie::new(m.start.clone(), steps)
    };
    let plus = build(vec![Step::Dot { edge }, Step::Death { edge }, Step::Birth { edge }]);
    let minus = build(vec![Step::Death { edge }, Step::Birth { edge }, Step::Dot { edge }]);
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::diagram;
    use crate::tqft::Label;

    fn closed_matrix(m: &Movie) -> (MovieEvaluation, SparseMatrix) {
        let ev = movie_map(m).unwrap();
        ev.map.check_chain_map(&ev.source, &ev.target).unwrap();
        let mat = ev.map.maps[&(vec![], 0)].clone();
        (ev, mat)
    }

    #[test]
    fn bookkeeping_examples() {
        let u = DiskularTangle::unlink(1);
        let e = u.loops[0];
        let r1 = Movie::new(u.clone(), vec![Step::R1Create { edge: e, positive: true, side: false }]);
        assert_eq!(r1.bookkeeping().unwrap(), (1, 0));
        let bs = Movie::new(u.clone(), vec![Step::Birth { edge: 50 }, Step::Saddle { edges: [e, 50], variant: 0 }]);
        assert_eq!(bs.bookkeeping().unwrap(), (0, 0));
        let ss = Movie::new(u, vec![Step::Saddle { edges: [e, e], variant: 0 }, Step::Saddle { edges: [e, e + 1], variant: 0 }]);
        assert_eq!(ss.bookkeeping().unwrap(), (0, -2));
    }

    #[test]
    fn birth_hits_the_one_generator() {
        let (ev, m) = closed_matrix(&Movie::new(DiskularTangle::empty(), vec![Step::Birth { edge: 1 }]));
        let kc = &ev.target.entries[&(vec![], 0)].kc;
        assert_eq!(m.ncols(), 1);
        let (r, _, v) = m.triplets().next().unwrap();
        assert_eq!(m.nnz(), 1);
        assert_eq!(*v, BigInt::from(1));
        assert_eq!(kc.complex.grades[r], (0, -1));
        assert_eq!(kc.generator(r).1.values().next(), Some(&Label::One));
    }

    #[test]
    fn death_projects_onto_x() {
        let (ev, m) = closed_matrix(&Movie::new(DiskularTangle::unlink(1), vec![Step::Death { edge: 1 }]));
        let kc = &ev.source.entries[&(vec![], 0)].kc;
        for i in 0..kc.dim() {
            let expected = i64::from(kc.generator(i).1.values().next() == Some(&Label::X));
            assert_eq!(m.get(0, i), BigInt::from(expected));
        }
    }

    #[test]
    fn dotted_spheres() {
        for dots in 0..3 {
            let mut steps = vec![Step::Birth { edge: 1 }];
            steps.extend((0..dots).map(|_| Step::Dot { edge: 1 }));
            steps.push(Step::Death { edge: 1 });
            let (_, m) = closed_matrix(&Movie::new(DiskularTangle::empty(), steps));
            assert_eq!(m.get(0, 0), BigInt::from(i64::from(dots == 1)));
        }
    }

    #[test]
    fn torus_is_two() {
        let steps = vec![
            Step::Birth { edge: 1 },
            Step::Saddle { edges: [1, 1], variant: 0 },
            Step::Saddle { edges: [1, 2], variant: 0 },
            Step::Death { edge: 1 },
        ];
        let (_, m) = closed_matrix(&Movie::new(DiskularTangle::empty(), steps));
        assert_eq!(m.get(0, 0).magnitude(), &2u32.into());
    }

    #[test]
    fn relabel_is_a_chain_isomorphism() {
        let t = diagram("trefoil").unwrap();
        let m = Movie::new(
            t,
            vec![Step::Relabel { edges: (1..=6).map(|e| (e, e + 20)).collect(), order: vec![2, 0, 1], half_turns: vec![1] }],
        );
        let (ev, mat) = closed_matrix(&m);
        let back = Movie::new(ev.target.tangle.clone(), vec![Step::Relabel {
            edges: (1..=6).map(|e| (e + 20, e)).collect(),
            order: vec![1, 2, 0],
            half_turns: vec![0],
        }]);
        assert_eq!(back.end().unwrap(), m.start);
        let (_, inv) = closed_matrix(&back);
        assert_eq!(inv.mul(&mat), SparseMatrix::identity(mat.ncols()));
    }

    #[test]
    fn saddles_on_the_trefoil() {
        let t = diagram("trefoil").unwrap();
        let mut done = 0;
        for e1 in 1..=6 {
            for e2 in e1..=6 {
                for variant in 0..2 {
                    if let Ok(ev) = movie_map(&Movie::new(t.clone(), vec![Step::Saddle { edges: [e1, e2], variant }])) {
                        ev.map.check_chain_map(&ev.source, &ev.target).unwrap();
                        assert_eq!(ev.map.q_degree, 1);
                        done += 1;
                    }
                }
            }
        }
        assert!(done > 3, "{done}");
    }

    #[test]
    fn maps_respect_actions() {
        // a one-crossing (;2)-tangle: a kink on an arc
        let arc = DiskularTangle::identity(2).compose(0, &DiskularTangle::from_matching(
            &crate::matching::CrossinglessMatching::new(2, vec![(1, 2)]).unwrap(),
        ))
        .unwrap();
        let e = arc.boundary_edges[0];
        let steps = vec![
            Step::Birth { edge: 90 },
            Step::Dot { edge: 90 },
            Step::Saddle { edges: [90, e], variant: 0 },
            Step::R1Create { edge: e, positive: true, side: false },
            Step::Dot { edge: e },
        ];
        let m = Movie::new(arc, steps);
        let mut done = 0;
        for k in 1..=m.steps.len() {
            let part = Movie::new(m.start.clone(), m.steps[..k].to_vec());
            let ev = movie_map(&part).unwrap();
            ev.map.check_chain_map(&ev.source, &ev.target).unwrap();
            ev.map.check_actions(&ev.source, &ev.target).unwrap();
            done += 1;
        }
        assert_eq!(done, 5);
    }

    #[test]
    fn neck_cut_sums_to_original() {
        let steps = vec![Step::Birth { edge: 1 }, Step::Saddle { edges: [1, 1], variant: 0 }];
        let m = Movie::new(DiskularTangle::empty(), steps);
        let (plus, minus) = neck_cut(&m, 1, 1).unwrap();
        let a = movie_map(&m).unwrap().map;
        let b = movie_map(&plus).unwrap().map.add(&movie_map(&minus).unwrap().map);
        assert_eq!(a, b);
        assert!(neck_cut(&m, 0, 1).is_err());
    }
}
