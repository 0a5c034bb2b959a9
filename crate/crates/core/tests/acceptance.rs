//! End-to-end acceptance checks, one printed line per criterion.

use std::collections::BTreeMap;

use kh_core::arc::ArcAlgebra;
use kh_core::cobordism::{movie_map, Movie, Step};
use kh_core::complex::{cone, ChainMap, HomologyEntry, HomologyTable};
use kh_core::error::Result;
use kh_core::khcomplex::{khovanov_homology, KhComplex};
use kh_core::library::{all_diagrams, all_tangles, diagram, tangle};
use kh_core::module::{check_module_axioms, TangleModule};
use kh_core::moves::{find_relabel, r1_create, r2_create, r3};
use kh_core::random::{braid_triangle, random_disk_tangle};
use kh_core::tangle::DiskularTangle;
use kh_core::verify::*;
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(h, q, free rank, torsion)`.
type Row = (i64, i64, usize, &'static [u64]);

fn table(rows: &[Row]) -> HomologyTable {
    let entries: Vec<HomologyEntry> =
        rows.iter().map(|(h, q, free, torsion)| HomologyEntry { h: *h, q: *q, free: *free, torsion: torsion.to_vec() }).collect();
    HomologyTable::from_entries(&entries)
}

const Z2: &[u64] = &[2];
const NONE: &[u64] = &[];

fn golden_tables() -> Result<bool> {
    let five_two = table(&[
        (0, 1, 1, NONE),
        (0, 3, 1, NONE),
        (1, 3, 1, NONE),
        (2, 5, 1, NONE),
        (3, 9, 1, NONE),
        (4, 9, 1, NONE),
        (5, 13, 1, NONE),
        (1, 5, 0, Z2),
        (4, 11, 0, Z2),
        (2, 7, 1, Z2),
    ]);
    let k1 = table(&[
        (-2, -2, 1, NONE),
        (-2, 0, 1, NONE),
        (1, 6, 1, NONE),
        (4, 10, 1, NONE),
        (5, 14, 1, NONE),
        (0, 2, 2, NONE),
        (2, 6, 2, NONE),
        (3, 10, 2, NONE),
        (0, 4, 1, Z2),
        (2, 8, 0, &[2, 2]),
        (4, 12, 0, Z2),
    ]);
    let eight_nineteen = table(&[
        (0, 5, 1, NONE),
        (0, 7, 1, NONE),
        (2, 9, 1, NONE),
        (4, 11, 1, NONE),
        (3, 13, 1, NONE),
        (4, 13, 1, NONE),
        (5, 15, 1, NONE),
        (5, 17, 1, NONE),
        (2, 11, 0, Z2),
    ]);
    let mut ok = true;
    for (name, want) in [("5_2", five_two), ("k1", k1), ("8_19", eight_nineteen)] {
        let got = khovanov_homology(&diagram(name)?)?;
        if got != want {
            println!("  {name}: got {}", got.to_json());
            ok = false;
        }
    }
    Ok(ok)
}

/// The saddle from `5_2` to `k1` at the circled crossing of `8_19`, with its cone.
fn cone_identity() -> Result<bool> {
    let start = diagram("5_2")?;
    let k1 = diagram("k1")?;
    let saddle = Step::Saddle { edges: [12, 14], variant: 0 };
    let end = Movie::new(start.clone(), vec![saddle.clone()]).end()?;
    let Some((edges, half_turns)) = find_relabel(&end, &k1) else {
        println!("  the saddle does not end on k1");
        return Ok(false);
    };
    let relabel = Step::Relabel { edges, order: (0..end.num_crossings()).collect(), half_turns };
    let movie = Movie::new(start, vec![saddle, relabel]);
    let ev = movie_map(&movie)?;
    let f = ev.map.maps[&(vec![], 0)].clone();
    // the saddle raises q by one; moving the source up makes it degree zero
    let source = KhComplex::new(&movie.start, 0)?.complex.shifted(0, movie.q_degree());
    let target = KhComplex::new(&k1, 0)?.complex;
    let c = cone(&ChainMap::new(f, (0, 0)), &source, &target)?;
    let want = khovanov_homology(&diagram("8_19")?)?.shifted(-2, -7);
    Ok(c.homology() == want)
}

fn all_pass(reports: &[VerificationReport]) -> bool {
    for r in reports.iter().filter(|r| r.failed()) {
        println!("  {} {}: {}", r.suite, r.case, r.witness);
    }
    !reports.is_empty() && reports.iter().all(|r| !r.failed())
}

fn gluing() -> Result<bool> {
    let pairs = gluing_pairs(0, 20)?;
    let sizes_ok = pairs.iter().all(|(outer, inner)| {
        outer.num_crossings() + inner.num_crossings() <= 3 && [2, 4].contains(&inner.n)
    });
    Ok(pairs.len() >= 20 && sizes_ok && all_pass(&gluing_suite(0, 20)?))
}

fn rigidity() -> Result<bool> {
    let cases = bridge_cases(0)?;
    let sizes: Vec<usize> = cases.iter().map(|(_, t)| t.n).collect();
    let covered = [2, 4, 6].iter().all(|n| sizes.contains(n));
    Ok(covered && all_pass(&rigidity_suite(0)?))
}

fn movie_moves() -> Result<bool> {
    let reports = movie_move_suite()?;
    let all_equal = reports.iter().all(|r| r.verdict == Verdict::EqualUpToSign);
    let control = check_unequal_movies(&corrupted_case()?)?;
    if control.verdict != Verdict::Failed {
        println!("  the corrupted control was not caught");
    }
    Ok(all_pass(&reports) && all_equal && control.verdict == Verdict::Failed)
}

fn closed_surfaces() -> Result<bool> {
    let torus = closed_surface_value(&torus_movie())?;
    let mut ok = torus == BigInt::from(2) || torus == BigInt::from(-2);
    for k in 0..4 {
        let v = closed_surface_value(&dotted_sphere(k))?;
        let want_unit = k == 1;
        ok &= if want_unit { v == BigInt::from(1) || v == BigInt::from(-1) } else { v == BigInt::from(0) };
    }
    Ok(ok)
}

fn neck_cutting() -> Result<bool> {
    let movies = necked_movies()?;
    let mut ok = movies.len() >= 3;
    for (name, m, at, edge) in &movies {
        let (works, witness) = check_neck_cut(m, *at, *edge)?;
        if !works {
            println!("  {name}: {witness}");
        }
        ok &= works;
    }
    Ok(ok)
}

fn random_tangles() -> Result<Vec<DiskularTangle>> {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    (0..12).map(|k| random_disk_tangle(&mut rng, [0, 2, 4][k % 3], k % 4)).collect()
}

fn differentials_are_graded() -> Result<bool> {
    let mut ok = true;
    let mut tangles: Vec<DiskularTangle> = all_diagrams().into_iter().map(|(_, d)| d).collect();
    tangles.extend(all_tangles().into_iter().map(|(_, t)| t));
    tangles.extend(random_tangles()?);
    for t in &tangles {
        for e in TangleModule::new(t)?.entries.values() {
            if let Err(err) = e.kc.complex.validate() {
                println!("  {err}");
                ok = false;
            }
        }
    }
    Ok(ok)
}

/// Every movie of the movie-move cases gives chain maps commuting with the actions.
fn maps_respect_actions() -> Result<bool> {
    let mut ok = true;
    for (_, t) in all_tangles() {
        check_module_axioms(&TangleModule::new(&t)?)?;
    }
    for case in movie_move_cases()? {
        for m in [&case.left, &case.right] {
            let ev = movie_map(m)?;
            let checked = ev.map.check_chain_map(&ev.source, &ev.target).and_then(|_| ev.map.check_actions(&ev.source, &ev.target));
            if let Err(err) = checked {
                println!("  {}: {err}", case.id);
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn arc_algebras() -> Result<bool> {
    for n in [0, 2, 4, 6] {
        ArcAlgebra::new(n)?.check_structure()?;
    }
    Ok(true)
}

fn module_homology(t: &DiskularTangle) -> Result<BTreeMap<(Vec<usize>, usize), HomologyTable>> {
    Ok(TangleModule::new(t)?.entries.iter().map(|(k, e)| (k.clone(), e.kc.homology())).collect())
}

/// Homology of every closure survives R1 and R2 on every edge of the bundled tangles,
/// and R3 on every triangle.
fn reidemeister_invariance() -> Result<bool> {
    let mut ok = true;
    let mut checked = 0;
    let mut tangles: Vec<(String, DiskularTangle)> = all_tangles().into_iter().map(|(n, t)| (n.to_string(), t)).collect();
    for name in ["unknot", "hopf", "trefoil"] {
        tangles.push((name.to_string(), diagram(name)?));
    }
    for (name, t) in &tangles {
        let before = module_homology(t)?;
        let edges: Vec<_> = t.all_edges().into_iter().filter(|e| !t.loops.contains(e)).collect();
        let mut after = Vec::new();
        for e in &edges {
            for (positive, side) in [(true, true), (true, false), (false, true), (false, false)] {
                after.push((format!("R1 on {e}"), r1_create(t, *e, positive, side)?));
            }
            for f in &edges {
                for variant in 0..4 {
                    if let Ok(moved) = r2_create(t, *e, *f, variant) {
                        after.push((format!("R2 of {e} over {f}"), moved));
                    }
                }
            }
        }
        for (what, moved) in after {
            checked += 1;
            if module_homology(&moved)? != before {
                println!("  {name}: {what} changes the homology");
                ok = false;
            }
        }
    }
    let mut triangles = 0;
    for k in 0..8u8 {
        let twists = [k & 1 != 0, k & 2 != 0, k & 4 != 0];
        let t = braid_triangle(twists)?;
        // alternating triangles admit no third move
        let Ok(moved) = r3(&t) else { continue };
        triangles += 1;
        if module_homology(&moved)? != module_homology(&t)? {
            println!("  R3 on {twists:?} changes the homology");
            ok = false;
        }
    }
    let kinked = tangle("kinked_arc")?;
    Ok(ok && checked > 0 && triangles > 0 && module_homology(&kinked)? == module_homology(&tangle("arc")?)?)
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Result<bool>>)> = vec![
        ("1 golden tables for 5_2, k1, 8_19", Box::new(golden_tables)),
        ("2 cone of the 5_2 -> k1 saddle is 8_19 shifted", Box::new(cone_identity)),
        ("3 gluing is an isomorphism on 20 random pairs", Box::new(gluing)),
        ("4 duality on bundled (2,0) and (4,0) tangles", Box::new(|| Ok(all_pass(&duality_suite()?)))),
        ("5 rigidity of bridges with n = 2, 4, 6", Box::new(rigidity)),
        ("6 movie moves, with the corrupted control caught", Box::new(movie_moves)),
        ("7 closed surfaces: torus and dotted spheres", Box::new(closed_surfaces)),
        ("8 neck cutting on three necked movies", Box::new(neck_cutting)),
        ("9 Euler characteristic against the bracket of the mirror", Box::new(|| Ok(all_pass(&euler_suite()?)))),
        ("10a d^2 = 0 and differentials of bidegree (-1,0)", Box::new(differentials_are_graded)),
        ("10b movie maps are chain maps respecting the actions", Box::new(maps_respect_actions)),
        ("10c arc algebras up to n = 6 are associative", Box::new(arc_algebras)),
        ("10d Reidemeister moves preserve homology", Box::new(reidemeister_invariance)),
    ];
    let mut failures = Vec::new();
    for (name, check) in &criteria {
        let start = std::time::Instant::now();
        let outcome = check();
        let pass = matches!(outcome, Ok(true));
        if let Err(e) = &outcome {
            println!("  error: {e}");
        }
        println!("{} criterion {name} ({:.1?})", if pass { "PASS" } else { "FAIL" }, start.elapsed());
        if !pass {
            failures.push(*name);
        }
    }
    assert!(failures.is_empty(), "failed: {failures:?}");
}
