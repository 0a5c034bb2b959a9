//! Mechanized checks at the level of integer homology: movie moves, rigidity of bridge
//! tangles, duality, gluing, Euler characteristics, closed surfaces, neck cutting and
//! ribbon concordances. Every check produces a `VerificationReport`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cobordism::{movie_map, neck_cut, ModuleMap, Movie, MovieEvaluation, Step};
use crate::complex::{homotopy_signs, is_null_homotopic, minimal_homotopy, minimal_map};
use crate::duality::{duality_sides, module_hom_complex};
use crate::error::{KhError, Result};
use crate::gluing::Gluing;
use crate::io::matrix_value;
use crate::jones::jones_oracle;
use crate::khcomplex::khovanov_homology;
use crate::library::{all_diagrams, all_tangles, diagram, tangle};
use crate::module::TangleModule;
use crate::moves::{find_relabel, r3};
use crate::random::{braid_triangle, crossing_layer, random_annular_tangle, random_bridge_tangle, random_disk_tangle};
use crate::tangle::{DiskularTangle, EdgeId};
use crate::unionfind::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EqualUpToSign,
    Passed,
    Failed,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub case: String,
    pub verdict: Verdict,
    pub witness: Value,
}

impl VerificationReport {
    fn new(suite: &str, case: impl Into<String>, verdict: Verdict, witness: Value) -> Self {
        VerificationReport { suite: suite.into(), case: case.into(), verdict, witness }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Failed
    }

    /// A report for a check that could not run at all.
    fn error(suite: &str, case: impl Into<String>, e: &KhError) -> Self {
        Self::new(suite, case, Verdict::Failed, json!({ "error": e.to_string() }))
    }
}

/// Selectable suites, in the order `all` runs them.
pub const SUITES: [&str; 7] = ["movie-moves", "rigidity", "duality", "gluing", "euler", "neckcut", "ribbon"];

pub fn run_suite(name: &str, seed: u64) -> Result<Vec<VerificationReport>> {
    match name {
        "movie-moves" => movie_move_suite(),
        "rigidity" => rigidity_suite(seed),
        "duality" => duality_suite(),
        "gluing" => gluing_suite(seed, 20),
        "euler" => euler_suite(),
        "neckcut" => neckcut_suite(),
        "ribbon" => ribbon_suite(),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run_suite(s, seed)?);
            }
            Ok(out)
        }
        other => Err(KhError::UnknownSelector(other.into())),
    }
}

fn signs_value(s: &BTreeSet<i64>) -> Value {
    json!(s.iter().collect::<Vec<_>>())
}

/// Append a relabeling so the movie ends on exactly `end`.
fn ending_at(m: &Movie, end: &DiskularTangle) -> Result<Movie> {
    let here = m.end()?;
    if here == *end {
        return Ok(m.clone());
    }
    let (edges, half_turns) = find_relabel(&here, end)
        .ok_or_else(|| KhError::NotComposable("the two movies end on different diagrams".into()))?;
    let mut steps = m.steps.clone();
    steps.push(Step::Relabel { edges, order: (0..here.num_crossings()).collect(), half_turns });
    Ok(Movie::new(m.start.clone(), steps))
}

/// Compare two module maps with the same source and target closure by closure, up to
/// one sign shared by all closures and up to chain homotopy.
fn compare_maps(left: &ModuleMap, right: &ModuleMap, ev: &MovieEvaluation) -> Result<(Verdict, Value)> {
    let keys: Vec<&(Vec<usize>, usize)> = left.maps.keys().collect();
    let per: Vec<BTreeSet<i64>> = keys
        .par_iter()
        .map(|k| {
            let c = &ev.source.entries[*k].kc.complex;
            let d = &ev.target.entries[*k].kc.complex;
            homotopy_signs(&left.maps[*k], &right.maps[*k], c, d).into_iter().collect()
        })
        .collect();
    let common: BTreeSet<i64> = per.iter().fold([1i64, -1].into_iter().collect(), |acc, s| acc.intersection(s).copied().collect());
    if let Some(sign) = common.iter().next_back().copied() {
        let closures: Vec<Value> = keys
            .iter()
            .zip(&per)
            .map(|(k, s)| {
                let c = &ev.source.entries[*k].kc.complex;
                let d = &ev.target.entries[*k].kc.complex;
                let h = minimal_homotopy(&left.maps[*k], &right.maps[*k], sign, c, d);
                json!({ "caps": k.0, "b": k.1, "signs": signs_value(s), "homotopy": h.as_ref().map(matrix_value) })
            })
            .collect();
        return Ok((Verdict::EqualUpToSign, json!({ "sign": sign, "closures": closures })));
    }
    // a closure where the maps differ for every sign, or the first of two that disagree
    let bad = per.iter().position(BTreeSet::is_empty).unwrap_or(0);
    let k = keys[bad];
    let c = &ev.source.entries[k].kc.complex;
    let d = &ev.target.entries[k].kc.complex;
    let witness = json!({
        "signs": keys.iter().zip(&per).map(|(k, s)| json!({ "caps": k.0, "b": k.1, "signs": signs_value(s) })).collect::<Vec<_>>(),
        "distinguishing": {
            "caps": k.0,
            "b": k.1,
            "left_on_homology": minimal_map(&left.maps[k], (0, left.q_degree), c, d),
            "right_on_homology": minimal_map(&right.maps[k], (0, right.q_degree), c, d),
        }
    });
    Ok((Verdict::Failed, witness))
}

/// Two movies between the same diagrams that should induce the same map up to sign.
#[derive(Clone, Debug)]
pub struct MovieMoveCase {
    pub id: String,
    pub left: Movie,
    pub right: Movie,
}

impl MovieMoveCase {
    fn new(id: impl Into<String>, left: Movie, right: Movie) -> Self {
        MovieMoveCase { id: id.into(), left, right }
    }
}

pub fn check_movie_move(c: &MovieMoveCase) -> Result<VerificationReport> {
    if c.left.start != c.right.start {
        return Err(KhError::Precondition("the movies start on different diagrams".into()));
    }
    let (bl, br) = (c.left.bookkeeping()?, c.right.bookkeeping()?);
    if bl != br {
        return Err(KhError::Precondition(format!("bookkeeping differs: {bl:?} against {br:?}")));
    }
    let left = ending_at(&c.left, &c.right.end()?)?;
    let el = movie_map(&left)?;
    let er = movie_map(&c.right)?;
    let (verdict, witness) = compare_maps(&el.map, &er.map, &el)?;
    Ok(VerificationReport::new("movie-moves", c.id.clone(), verdict, witness))
}

fn first_loop_added(before: &DiskularTangle, after: &DiskularTangle) -> Result<EdgeId> {
    after
        .loops
        .iter()
        .find(|e| !before.loops.contains(e))
        .copied()
        .ok_or_else(|| KhError::NotApplicable("no new free loop".into()))
}

/// The first way to create a Reidemeister II bigon between two different edges.
fn first_bigon(t: &DiskularTangle, over_from: &[EdgeId], under_from: &[EdgeId]) -> Option<Step> {
    for over in over_from {
        for under in under_from {
            for variant in 0..2 {
                if over != under && crate::moves::r2_create(t, *over, *under, variant).is_ok() {
                    return Some(Step::R2Create { over: *over, under: *under, variant });
                }
            }
        }
    }
    None
}

/// The encoded movie-move cases. Each pair of movies presents isotopic cobordisms.
pub fn movie_move_cases() -> Result<Vec<MovieMoveCase>> {
    let mut out = Vec::new();
    let id = |t: &DiskularTangle| Movie::new(t.clone(), vec![]);
    // a Reidemeister move followed by its inverse
    for name in ["arc", "one_crossing"] {
        let t = tangle(name)?;
        let e = t.boundary_edges[0];
        let n = t.num_crossings();
        for positive in [true, false] {
            for side in [true, false] {
                let left = Movie::new(t.clone(), vec![Step::R1Create { edge: e, positive, side }, Step::R1Remove { crossing: n }]);
                let kind = if positive { "positive" } else { "negative" };
                out.push(MovieMoveCase::new(format!("kink-undo/{name}/{kind}/side-{}", u8::from(side)), left, id(&t)));
            }
        }
    }
    {
        let t = diagram("trefoil")?;
        let e = t.crossings[0][1];
        for positive in [true, false] {
            let left = Movie::new(t.clone(), vec![Step::R1Create { edge: e, positive, side: true }, Step::R1Remove { crossing: 3 }]);
            let kind = if positive { "positive" } else { "negative" };
            out.push(MovieMoveCase::new(format!("kink-undo/trefoil/{kind}"), left, id(&t)));
        }
    }
    {
        let t = tangle("cup_pair")?;
        let edges: Vec<EdgeId> = t.all_edges().into_iter().collect();
        for (over, under) in [(edges[0], edges[1]), (edges[1], edges[0])] {
            for variant in 0..4 {
                if crate::moves::r2_create(&t, over, under, variant).is_ok() {
                    let left = Movie::new(t.clone(), vec![Step::R2Create { over, under, variant }, Step::R2Remove { crossings: [0, 1] }]);
                    out.push(MovieMoveCase::new(format!("bigon-undo/cup_pair/{over}-over-{under}/{variant}"), left, id(&t)));
                }
            }
        }
    }
    for name in ["nested_cups", "one_crossing"] {
        let t = tangle(name)?;
        let edges: Vec<EdgeId> = t.all_edges().into_iter().collect();
        let step = first_bigon(&t, &edges, &edges).ok_or_else(|| KhError::NotApplicable(format!("no bigon on {name}")))?;
        let n = t.num_crossings();
        let left = Movie::new(t.clone(), vec![step, Step::R2Remove { crossings: [n, n + 1] }]);
        out.push(MovieMoveCase::new(format!("bigon-undo/{name}"), left, id(&t)));
    }
    for bits in 0..8u8 {
        let t = braid_triangle([bits & 1 == 1, bits & 2 == 2, bits & 4 == 4])?;
        if r3(&t).is_ok() {
            let left = Movie::new(t.clone(), vec![Step::R3 { crossings: [0, 1, 2] }, Step::R3 { crossings: [0, 1, 2] }]);
            out.push(MovieMoveCase::new(format!("triangle-undo/{bits}"), left, id(&t)));
        }
    }
    {
        let t = crossing_layer(6, 4, false, 0)?.compose(0, &braid_triangle([false, false, false])?)?;
        let n = t.num_crossings();
        let triple = (0..n)
            .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| [a, b, c])))
            .find(|x| crate::cobordism::apply_step(&t, &Step::R3 { crossings: *x }).is_ok())
            .ok_or_else(|| KhError::NotApplicable("no triangle".into()))?;
        let last = [n - 3, n - 2, n - 1];
        let left = Movie::new(t.clone(), vec![Step::R3 { crossings: triple }, Step::R3 { crossings: last }]);
        out.push(MovieMoveCase::new("triangle-undo/beside-a-crossing", left, id(&t)));
    }
    // births, deaths and saddles that cancel
    let t = tangle("one_crossing")?;
    let e = t.boundary_edges[0];
    let fresh = t.max_edge() + 10;
    out.push(MovieMoveCase::new(
        "birth-then-merge",
        Movie::new(t.clone(), vec![Step::Birth { edge: fresh }, Step::Saddle { edges: [e, fresh], variant: 0 }]),
        id(&t),
    ));
    {
        let split = Movie::new(t.clone(), vec![Step::Saddle { edges: [e, e], variant: 0 }]);
        let l = first_loop_added(&t, &split.end()?)?;
        let mut steps = split.steps.clone();
        steps.push(Step::Death { edge: l });
        out.push(MovieMoveCase::new("split-then-death", Movie::new(t.clone(), steps), id(&t)));
    }
    // changes far apart commute
    let (a, b) = (t.boundary_edges[0], t.boundary_edges[1]);
    let kink = Step::R1Create { edge: b, positive: true, side: false };
    let pairs: Vec<(&str, Step, Step)> = vec![
        ("birth-and-kink", Step::Birth { edge: fresh }, kink.clone()),
        ("dot-and-kink", Step::Dot { edge: a }, kink.clone()),
        ("split-and-kink", Step::Saddle { edges: [a, a], variant: 0 }, kink.clone()),
    ];
    for (name, x, y) in pairs {
        out.push(MovieMoveCase::new(
            format!("far-commutation/{name}"),
            Movie::new(t.clone(), vec![x.clone(), y.clone()]),
            Movie::new(t.clone(), vec![y, x]),
        ));
    }
    {
        let cups = tangle("cup_pair")?;
        let arcs: Vec<EdgeId> = cups.all_edges().into_iter().collect();
        out.push(MovieMoveCase::new(
            "far-commutation/split-and-dot",
            Movie::new(cups.clone(), vec![Step::Saddle { edges: [arcs[0], arcs[0]], variant: 0 }, Step::Dot { edge: arcs[1] }]),
            Movie::new(cups.clone(), vec![Step::Dot { edge: arcs[1] }, Step::Saddle { edges: [arcs[0], arcs[0]], variant: 0 }]),
        ));
    }
    {
        let t = tangle("nested_cups")?;
        let edges: Vec<EdgeId> = t.all_edges().into_iter().collect();
        let bigon = first_bigon(&t, &edges, &edges).ok_or_else(|| KhError::NotApplicable("no bigon".into()))?;
        let outer = t.boundary_edges[0];
        let split = Step::Saddle { edges: [outer, outer], variant: 0 };
        out.push(MovieMoveCase::new(
            "far-commutation/bigon-and-split",
            Movie::new(t.clone(), vec![bigon.clone(), split.clone()]),
            Movie::new(t.clone(), vec![split, bigon]),
        ));
    }
    // a dot moves through a crossing along its strand
    let x = t.crossings[0];
    for (name, p, q) in [("under", x[0], x[2]), ("over", x[1], x[3])] {
        out.push(MovieMoveCase::new(
            format!("dot-through-crossing/{name}"),
            Movie::new(t.clone(), vec![Step::Dot { edge: p }]),
            Movie::new(t.clone(), vec![Step::Dot { edge: q }]),
        ));
    }
    // a circle is born, gets a kink, passes under an arc and back, and dies with a dot
    {
        let arc = tangle("arc")?;
        let l = arc.max_edge() + 10;
        let mut steps = vec![Step::Birth { edge: l }, Step::R1Create { edge: l, positive: true, side: false }];
        let kinked = Movie::new(arc.clone(), steps.clone()).end()?;
        let strand: Vec<EdgeId> = arc.all_edges().into_iter().collect();
        let circle: Vec<EdgeId> = kinked.all_edges().into_iter().filter(|e| !strand.contains(e)).collect();
        let step = first_bigon(&kinked, &strand, &circle).ok_or_else(|| KhError::NotApplicable("no bigon with the circle".into()))?;
        steps.extend([step, Step::R2Remove { crossings: [1, 2] }, Step::R1Remove { crossing: 0 }]);
        let back = Movie::new(arc.clone(), steps.clone()).end()?;
        let l2 = first_loop_added(&arc, &back)?;
        steps.extend([Step::Dot { edge: l2 }, Step::Death { edge: l2 }]);
        out.push(MovieMoveCase::new(
            "birth-bigon-undo-dot-death",
            Movie::new(arc.clone(), steps),
            Movie::new(arc.clone(), vec![Step::Birth { edge: l }, Step::Dot { edge: l }, Step::Death { edge: l }]),
        ));
    }
    Ok(out)
}

/// A kink made and undone with an extra dot, against doing nothing: must fail.
pub fn corrupted_case() -> Result<MovieMoveCase> {
    let t = tangle("arc")?;
    let e = t.boundary_edges[0];
    let left = Movie::new(
        t.clone(),
        vec![Step::R1Create { edge: e, positive: true, side: false }, Step::R1Remove { crossing: 0 }, Step::Dot { edge: e }],
    );
    Ok(MovieMoveCase::new("control/extra-dot", left, Movie::new(t, vec![])))
}

/// Check a corrupted case: the extra dot keeps the bookkeeping but changes the map.
pub fn check_unequal_movies(c: &MovieMoveCase) -> Result<VerificationReport> {
    let left = ending_at(&c.left, &c.right.end()?)?;
    let el = movie_map(&left)?;
    let er = movie_map(&c.right)?;
    let (verdict, witness) = compare_maps(&el.map, &er.map, &el)?;
    Ok(VerificationReport::new("movie-moves", c.id.clone(), verdict, witness))
}

pub fn movie_move_suite() -> Result<Vec<VerificationReport>> {
    let cases = movie_move_cases()?;
    Ok(cases
        .par_iter()
        .map(|c| check_movie_move(c).unwrap_or_else(|e| VerificationReport::error("movie-moves", c.id.clone(), &e)))
        .collect())
}

/// A tangle without closed components and inner disks. Bridge-ness beyond that is
/// guaranteed by how the tangles are built.
pub fn validate_bridge(t: &DiskularTangle) -> Result<()> {
    if !t.inner.is_empty() {
        return Err(KhError::Precondition("not a bridge tangle: inner disks".into()));
    }
    if !t.loops.is_empty() {
        return Err(KhError::Precondition("not a bridge tangle: free loops".into()));
    }
    let edges: Vec<EdgeId> = t.all_edges().into_iter().collect();
    let pos = |e: EdgeId| edges.binary_search(&e).expect("known edge");
    let mut uf = UnionFind::new(edges.len());
    for x in &t.crossings {
        uf.union(pos(x[0]), pos(x[2]));
        uf.union(pos(x[1]), pos(x[3]));
    }
    let open: BTreeSet<usize> = t.boundary_edges.iter().map(|e| uf.find(pos(*e))).collect();
    if (0..edges.len()).any(|i| !open.contains(&uf.find(i))) {
        return Err(KhError::Precondition("not a bridge tangle: closed component".into()));
    }
    Ok(())
}

/// `Kh_{0,-n/2}` of the mirror of `t` glued to `t`, which must be `Z`, and the
/// module self-maps of degree zero up to homotopy, which must be `Z` spanned by the identity.
pub fn check_bridge_rigidity(t: &DiskularTangle) -> Result<(bool, Value)> {
    validate_bridge(t)?;
    let n = t.n as i64;
    let closed = t.radial_mirror()?.compose(0, t)?;
    let group = khovanov_homology(&closed)?.get(0, -n / 2);
    let on_closure = group.free == 1 && group.torsion.is_empty();
    let m = TangleModule::new(t)?;
    let hom = module_hom_complex(&m, &m, &[])?;
    let self_maps = hom.homology().get(0, 0);
    let id = ModuleMap::identity(&m);
    let identity_essential = !hom.is_null_homotopic(&id, (0, 0))?;
    let minus = hom.homotopy_signs(&id, &id.scaled(-1), (0, 0))?;
    let ok = on_closure && self_maps.free == 1 && self_maps.torsion.is_empty() && identity_essential && minus == vec![-1];
    Ok((
        ok,
        json!({
            "n": t.n,
            "crossings": t.num_crossings(),
            "closure_group": { "h": 0, "q": -n / 2, "free": group.free, "torsion": group.torsion },
            "self_maps": { "free": self_maps.free, "torsion": self_maps.torsion },
            "identity_essential": identity_essential,
        }),
    ))
}

/// Bridge tangles on 2, 4 and 6 points.
pub fn bridge_cases(seed: u64) -> Result<Vec<(String, DiskularTangle)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![("arc".to_string(), tangle("arc")?), ("kinked_arc".to_string(), tangle("kinked_arc")?)];
    for n in [4usize, 6] {
        out.push((format!("matching-{n}"), DiskularTangle::from_matching(&crate::matching::enumerate_matchings(n)?[0])));
        for k in 0..2 {
            out.push((format!("braid-{n}-{k}"), random_bridge_tangle(&mut rng, n, 2)?));
        }
    }
    let base = random_bridge_tangle(&mut rng, 4, 1)?;
    let kinked = crate::moves::r1_create(&base, base.boundary_edges[0], rng.gen_bool(0.5), rng.gen_bool(0.5))?;
    out.push(("braid-4-kinked".to_string(), kinked));
    Ok(out)
}

pub fn rigidity_suite(seed: u64) -> Result<Vec<VerificationReport>> {
    let cases = bridge_cases(seed)?;
    Ok(cases
        .par_iter()
        .map(|(name, t)| match check_bridge_rigidity(t) {
            Ok((ok, w)) => VerificationReport::new("rigidity", name.clone(), if ok { Verdict::Passed } else { Verdict::Failed }, w),
            Err(e) => VerificationReport::error("rigidity", name.clone(), &e),
        })
        .collect())
}

pub fn duality_suite() -> Result<Vec<VerificationReport>> {
    let mut cases = Vec::new();
    for (name, t) in all_tangles() {
        if t.num_crossings() <= 2 {
            for a in 0..crate::matching::enumerate_matchings(t.n)?.len() {
                cases.push((name, t.clone(), a));
            }
        }
    }
    Ok(cases
        .par_iter()
        .map(|(name, t, a)| {
            let case = format!("{name}/cap-{a}");
            match duality_sides(t, *a) {
                Ok(s) => VerificationReport::new(
                    "duality",
                    case,
                    if s.agree() { Verdict::Passed } else { Verdict::Failed },
                    json!({ "hom": s.hom_homology.entries(), "mirror_shifted": s.mirror_homology.entries() }),
                ),
                Err(e) => VerificationReport::error("duality", case, &e),
            }
        })
        .collect())
}

/// Random pairs of an annular tangle and a disk tangle, with at most three crossings
/// in total, on 2 or 4 gluing points.
pub fn gluing_pairs(seed: u64, count: usize) -> Result<Vec<(DiskularTangle, DiskularTangle)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let n = if k % 2 == 0 { 2 } else { 4 };
            let inner_crossings = rng.gen_range(0..=2);
            let outer_crossings = rng.gen_range(0..=3 - inner_crossings).min(2);
            let outer_n = if rng.gen_bool(0.5) { 0 } else { 2 };
            let inner = random_disk_tangle(&mut rng, n, inner_crossings)?;
            let outer = random_annular_tangle(&mut rng, n, outer_n, outer_crossings)?;
            Ok((outer, inner))
        })
        .collect()
}

/// The tensor product over the arc algebra against the module of the composite, in every closure.
pub fn check_gluing(outer: &DiskularTangle, inner: &DiskularTangle) -> Result<(bool, Value)> {
    let g = Gluing::new(outer, 0, inner)?;
    let mut ok = true;
    let mut closures = 0;
    for (caps, b) in g.composite.entries.keys() {
        let p = g.presentation(caps, *b)?;
        p.check_isomorphism()?;
        ok &= p.quotient()?.homology() == p.target.homology();
        closures += 1;
    }
    Ok((ok, json!({ "n": inner.n, "crossings": outer.num_crossings() + inner.num_crossings(), "closures": closures })))
}

pub fn gluing_suite(seed: u64, count: usize) -> Result<Vec<VerificationReport>> {
    let pairs = gluing_pairs(seed, count)?;
    Ok(pairs
        .par_iter()
        .enumerate()
        .map(|(k, (o, i))| {
            let case = format!("pair-{k}");
            match check_gluing(o, i) {
                Ok((ok, w)) => VerificationReport::new("gluing", case, if ok { Verdict::Passed } else { Verdict::Failed }, w),
                Err(e) => VerificationReport::error("gluing", case, &e),
            }
        })
        .collect())
}

/// Graded Euler characteristic of the homology against the bracket state sum.
pub fn check_euler(d: &DiskularTangle) -> Result<(bool, Value)> {
    let chi = khovanov_homology(d)?.euler_characteristic();
    let bracket = jones_oracle(d)?;
    Ok((chi == bracket, json!({ "euler": chi, "bracket": bracket })))
}

pub fn euler_suite() -> Result<Vec<VerificationReport>> {
    Ok(all_diagrams()
        .par_iter()
        .map(|(name, d)| match check_euler(d) {
            Ok((ok, w)) => VerificationReport::new("euler", *name, if ok { Verdict::Passed } else { Verdict::Failed }, w),
            Err(e) => VerificationReport::error("euler", *name, &e),
        })
        .collect())
}

/// The number a closed surface evaluates to.
pub fn closed_surface_value(m: &Movie) -> Result<BigInt> {
    let ev = movie_map(m)?;
    if !m.start.is_closed() || m.start.num_crossings() + m.start.loops.len() != 0 {
        return Err(KhError::Precondition("a closed surface starts on the empty diagram".into()));
    }
    let end = &ev.target.tangle;
    if end.num_crossings() + end.loops.len() != 0 {
        return Err(KhError::Precondition("a closed surface ends on the empty diagram".into()));
    }
    Ok(ev.map.maps[&(vec![], 0)].get(0, 0))
}

pub fn torus_movie() -> Movie {
    Movie::new(
        DiskularTangle::empty(),
        vec![
            Step::Birth { edge: 1 },
            Step::Saddle { edges: [1, 1], variant: 0 },
            Step::Saddle { edges: [1, 2], variant: 0 },
            Step::Death { edge: 1 },
        ],
    )
}

pub fn dotted_sphere(dots: usize) -> Movie {
    let mut steps = vec![Step::Birth { edge: 1 }];
    steps.extend((0..dots).map(|_| Step::Dot { edge: 1 }));
    steps.push(Step::Death { edge: 1 });
    Movie::new(DiskularTangle::empty(), steps)
}

/// Necked movies with the step after which the neck appears and the loop it cuts.
pub fn necked_movies() -> Result<Vec<(String, Movie, usize, EdgeId)>> {
    let mut out = vec![("torus".to_string(), torus_movie(), 2, 2)];
    let trefoil = diagram("trefoil")?;
    let l = trefoil.max_edge() + 10;
    let e = trefoil.crossings[0][0];
    out.push((
        "trefoil-birth-merge".to_string(),
        Movie::new(trefoil, vec![Step::Birth { edge: l }, Step::Saddle { edges: [e, l], variant: 0 }]),
        1,
        l,
    ));
    let t = tangle("one_crossing")?;
    let e = t.boundary_edges[0];
    let split = Movie::new(t.clone(), vec![Step::Saddle { edges: [e, e], variant: 0 }]);
    let f = first_loop_added(&t, &split.end()?)?;
    out.push((
        "crossing-split-merge".to_string(),
        Movie::new(t, vec![Step::Saddle { edges: [e, e], variant: 0 }, Step::Saddle { edges: [e, f], variant: 0 }]),
        1,
        f,
    ));
    Ok(out)
}

/// Whether the map of `m` is `s1 m₊ + s2 m₋` up to homotopy in every closure, for some signs.
pub fn check_neck_cut(m: &Movie, at: usize, edge: EdgeId) -> Result<(bool, Value)> {
    let (plus, minus) = neck_cut(m, at, edge)?;
    let ev = movie_map(m)?;
    let ep = movie_map(&plus)?;
    let em = movie_map(&minus)?;
    let mut working = Vec::new();
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            let combo = ep.map.scaled(s1).add(&em.map.scaled(s2));
            let ok = ev.map.maps.par_iter().all(|(k, f)| {
                let delta = f.sub(&combo.maps[k]);
                is_null_homotopic(&delta, &ev.source.entries[k].kc.complex, &ev.target.entries[k].kc.complex)
            });
            if ok {
                working.push(json!([s1, s2]));
            }
        }
    }
    let exact = ev.map == ep.map.add(&em.map);
    Ok((!working.is_empty(), json!({ "signs": working, "sum_on_the_nose": exact })))
}

pub fn neckcut_suite() -> Result<Vec<VerificationReport>> {
    let mut out = Vec::new();
    let torus = closed_surface_value(&torus_movie())?;
    let two = BigInt::from(2);
    out.push(VerificationReport::new(
        "neckcut",
        "closed/torus",
        if torus == two || -&torus == two { Verdict::Passed } else { Verdict::Failed },
        json!({ "value": crate::io::integer_value(&torus) }),
    ));
    for k in 0..4 {
        let v = closed_surface_value(&dotted_sphere(k))?;
        let ok = if k == 1 { is_unit(&v) } else { v.is_zero() };
        out.push(VerificationReport::new(
            "neckcut",
            format!("closed/sphere-{k}-dots"),
            if ok { Verdict::Passed } else { Verdict::Failed },
            json!({ "value": crate::io::integer_value(&v) }),
        ));
    }
    let movies = necked_movies()?;
    out.extend(movies.par_iter().map(|(name, m, at, e)| match check_neck_cut(m, *at, *e) {
        Ok((ok, w)) => VerificationReport::new("neckcut", name.clone(), if ok { Verdict::Passed } else { Verdict::Failed }, w),
        Err(err) => VerificationReport::error("neckcut", name.clone(), &err),
    }).collect::<Vec<_>>());
    Ok(out)
}

fn is_unit(x: &BigInt) -> bool {
    x.is_one() || (-x).is_one()
}

/// Births first, then saddles, with Reidemeister moves and relabelings anywhere.
pub fn check_ribbon_shape(m: &Movie) -> Result<()> {
    let mut seen_saddle = false;
    for s in &m.steps {
        match s {
            Step::Birth { .. } if seen_saddle => return Err(KhError::Precondition("birth after a saddle".into())),
            Step::Birth { .. } => {}
            Step::Saddle { .. } => seen_saddle = true,
            Step::Death { .. } | Step::Dot { .. } => return Err(KhError::Precondition("not of ribbon shape: deaths and dots are not allowed".into())),
            _ => {}
        }
    }
    Ok(())
}

/// Whether `reverse ∘ forward` is plus or minus the identity up to homotopy, and
/// independently whether it acts as plus or minus the identity on homology.
pub fn check_ribbon_retraction(forward: &Movie, reverse: &Movie) -> Result<(Verdict, Value)> {
    check_ribbon_shape(forward)?;
    if reverse.start != forward.end()? {
        return Err(KhError::NotComposable("the reverse movie does not start where the forward one ends".into()));
    }
    let mut steps = forward.steps.clone();
    steps.extend(reverse.steps.iter().cloned());
    let both = ending_at(&Movie::new(forward.start.clone(), steps), &forward.start)?;
    let ev = movie_map(&both)?;
    let id = ModuleMap::identity(&ev.source);
    let (verdict, witness) = compare_maps(&ev.map, &id, &ev)?;
    // on homology: every block of the map between minimal complexes is plus or minus
    // the identity, with one sign; blocks over torsion are not homology maps and are
    // reported as such
    let mut signs = BTreeSet::new();
    let mut exact = true;
    for (k, f) in &ev.map.maps {
        let c = &ev.source.entries[k].kc.complex;
        for block in minimal_map(f, (0, ev.map.q_degree), c, c) {
            exact &= block.exact;
            for (r, row) in block.matrix.iter().enumerate() {
                for (col, v) in row.iter().enumerate() {
                    if r == col {
                        signs.insert(v.clone());
                    } else if !v.is_zero() {
                        signs.insert(BigInt::zero());
                    }
                }
            }
        }
    }
    let on_homology = signs.len() == 1 && signs.iter().all(is_unit);
    let verdict = if verdict == Verdict::EqualUpToSign && on_homology { verdict } else { Verdict::Failed };
    Ok((verdict, json!({ "chain_level": witness, "on_homology": on_homology, "free_homology_only": exact })))
}

/// A circle born next to `edge` and merged into it, reversed by a split and a death.
fn birth_band(t: &DiskularTangle, edge: EdgeId) -> Result<(Movie, Movie)> {
    let l = t.max_edge() + 10;
    let forward = Movie::new(t.clone(), vec![Step::Birth { edge: l }, Step::Saddle { edges: [edge, l], variant: 0 }]);
    let end = forward.end()?;
    let split = Movie::new(end.clone(), vec![Step::Saddle { edges: [edge, edge], variant: 0 }]);
    let f = first_loop_added(&end, &split.end()?)?;
    let reverse = Movie::new(end, vec![Step::Saddle { edges: [edge, edge], variant: 0 }, Step::Death { edge: f }]);
    Ok((forward, reverse))
}

/// A circle born and banded to `edge`, then a kink on the result; the reverse removes
/// the kink, splits the circle off and kills it.
fn band_then_kink(t: &DiskularTangle, edge: EdgeId) -> Result<(Movie, Movie)> {
    let (band, _) = birth_band(t, edge)?;
    let mut steps = band.steps.clone();
    let banded = band.end()?;
    steps.push(Step::R1Create { edge, positive: false, side: true });
    let forward = Movie::new(t.clone(), steps);
    let end = forward.end()?;
    let unkinked = Movie::new(end.clone(), vec![Step::R1Remove { crossing: end.num_crossings() - 1 }]).end()?;
    let (e2, _) = find_relabel(&unkinked, &banded).ok_or_else(|| KhError::NotApplicable("kink did not come off".into()))?;
    let inverse: std::collections::BTreeMap<EdgeId, EdgeId> = e2.iter().map(|(a, b)| (*b, *a)).collect();
    let x = *inverse.get(&edge).unwrap_or(&edge);
    let split = Movie::new(unkinked.clone(), vec![Step::Saddle { edges: [x, x], variant: 0 }]).end()?;
    let l = first_loop_added(&unkinked, &split)?;
    let reverse = Movie::new(
        end.clone(),
        vec![Step::R1Remove { crossing: end.num_crossings() - 1 }, Step::Saddle { edges: [x, x], variant: 0 }, Step::Death { edge: l }],
    );
    Ok((forward, reverse))
}

pub fn ribbon_cases() -> Result<Vec<(String, Movie, Movie)>> {
    let mut out = Vec::new();
    let unknot = diagram("unknot")?;
    let (f, r) = birth_band(&unknot, unknot.loops[0])?;
    out.push(("unknot-birth-band".to_string(), f, r));
    let trefoil = diagram("trefoil")?;
    let (f, r) = birth_band(&trefoil, trefoil.crossings[0][0])?;
    out.push(("trefoil-birth-band".to_string(), f, r));
    let t = tangle("one_crossing")?;
    let (f, r) = birth_band(&t, t.boundary_edges[0])?;
    out.push(("crossing-birth-band".to_string(), f, r));
    let arc = tangle("arc")?;
    let (f, r) = band_then_kink(&arc, arc.boundary_edges[0])?;
    out.push(("arc-band-then-kink".to_string(), f, r));
    Ok(out)
}

pub fn ribbon_suite() -> Result<Vec<VerificationReport>> {
    let cases = ribbon_cases()?;
    Ok(cases
        .par_iter()
        .map(|(name, f, r)| match check_ribbon_retraction(f, r) {
            Ok((v, w)) => VerificationReport::new("ribbon", name.clone(), v, w),
            Err(e) => VerificationReport::error("ribbon", name.clone(), &e),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_control_fails_with_a_witness() {
        let r = check_unequal_movies(&corrupted_case().unwrap()).unwrap();
        assert_eq!(r.verdict, Verdict::Failed);
        assert!(r.witness["distinguishing"].is_object());
    }

    #[test]
    fn kink_undo_is_the_identity() {
        let cases = movie_move_cases().unwrap();
        let r = check_movie_move(&cases[0]).unwrap();
        assert_eq!(r.verdict, Verdict::EqualUpToSign, "{}", r.witness);
    }

    #[test]
    fn deaths_are_not_ribbon() {
        let m = Movie::new(DiskularTangle::unlink(1), vec![Step::Death { edge: 1 }]);
        assert!(matches!(check_ribbon_shape(&m), Err(KhError::Precondition(_))));
    }

    #[test]
    fn closed_components_are_not_bridges() {
        assert!(validate_bridge(&diagram("unknot").unwrap()).is_err());
        assert!(validate_bridge(&tangle("arc").unwrap()).is_ok());
    }

    #[test]
    fn unknown_suite() {
        assert!(matches!(run_suite("bogus", 0), Err(KhError::UnknownSelector(_))));
    }
}
