//! Chain homotopy equivalences between the complexes of two closed diagrams that
//! differ inside a disk: the crossings `0..old` agree, the rest are local.
//!
//! Each side is reduced by Gaussian elimination along unit arrows that only change
//! what happens inside the disk. The survivors of both sides are then matched by
//! what they look like from outside the disk, and signs are fixed so the matching
//! is a chain isomorphism. The equivalence is `incl ∘ match ∘ proj`.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use crate::complex::{eliminate_where, Grade};
use crate::error::{KhError, Result};
use crate::khcomplex::KhComplex;
use crate::linalg::SparseMatrix;
use crate::tangle::{smoothing_pairs, CubeVertex, DiskularTangle, EdgeId, Port};
use crate::tqft::Label;
use crate::unionfind::UnionFind;

/// Where a strand leaves the disk: a slot of a crossing shared by both sides, or a
/// boundary point of the tangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Exit {
    Slot(usize, usize),
    Outer(usize),
    Inner(usize, usize),
}

/// What a generator looks like from outside the disk.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Outside {
    old_bits: CubeVertex,
    /// Exits joined through edges and local smoothings.
    pairing: Vec<Vec<Exit>>,
    /// Label of the circle through the first exit of each pairing class.
    labels: Vec<Label>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    grade: Grade,
    outside: Outside,
}

/// One side of a local move: a tangle, the complex of one of its closures, and the id
/// in the closed diagram of each tangle edge (the identity when the tangle is closed).
pub struct LocalSide<'a> {
    pub tangle: &'a DiskularTangle,
    pub kc: &'a KhComplex,
    pub edge_class: Option<&'a BTreeMap<EdgeId, EdgeId>>,
}

impl<'a> LocalSide<'a> {
    pub fn closed(kc: &'a KhComplex) -> Self {
        LocalSide { tangle: &kc.diagram, kc, edge_class: None }
    }

    fn closed_edge(&self, e: EdgeId) -> EdgeId {
        self.edge_class.map_or(e, |m| m[&e])
    }
}

struct VertexShape {
    pairing: Vec<Vec<Exit>>,
    /// Circle through the first exit of each class.
    class_circles: Vec<u32>,
}

fn vertex_shape(side: &LocalSide, old: usize, v: CubeVertex) -> VertexShape {
    let t = side.tangle;
    let n = t.num_crossings();
    let outer_base = 4 * n;
    let mut inner_base = vec![outer_base + t.n];
    for k in &t.inner {
        inner_base.push(inner_base.last().expect("nonempty") + k);
    }
    let node = |p: Port| match p {
        Port::Slot { crossing, slot } => 4 * crossing + slot,
        Port::Outer(j) => outer_base + j,
        Port::Inner { disk, point } => inner_base[disk] + point,
    };
    let mut uf = UnionFind::new(inner_base[t.inner.len()]);
    for ports in t.edge_ports().values() {
        if let [p, q] = ports.as_slice() {
            uf.union(node(*p), node(*q));
        }
    }
    for j in old..n {
        for (a, b) in smoothing_pairs(v >> j & 1 == 1) {
            uf.union(4 * j + a, 4 * j + b);
        }
    }
    let mut exits: Vec<(Exit, Port)> = Vec::new();
    for j in 0..old {
        for s in 0..4 {
            exits.push((Exit::Slot(j, s), Port::Slot { crossing: j, slot: s }));
        }
    }
    for j in 0..t.n {
        exits.push((Exit::Outer(j), Port::Outer(j)));
    }
    for (d, k) in t.inner.iter().enumerate() {
        for j in 0..*k {
            exits.push((Exit::Inner(d, j), Port::Inner { disk: d, point: j }));
        }
    }
    let mut classes: BTreeMap<usize, Vec<(Exit, Port)>> = BTreeMap::new();
    for (x, p) in exits {
        classes.entry(uf.find(node(p))).or_default().push((x, p));
    }
    let mut with_ports: Vec<Vec<(Exit, Port)>> = classes.into_values().collect();
    with_ports.sort();
    let rv = &side.kc.vertices[v as usize];
    let class_circles = with_ports.iter().map(|c| rv.circle_of[&side.closed_edge(t.edge_at(c[0].1))]).collect();
    VertexShape { pairing: with_ports.into_iter().map(|c| c.into_iter().map(|(x, _)| x).collect()).collect(), class_circles }
}

fn signatures(side: &LocalSide, old: usize) -> Vec<Signature> {
    let kc = side.kc;
    let old_mask: CubeVertex = if old == 0 { 0 } else { (1u64 << old) - 1 };
    let shapes: Vec<VertexShape> = (0..kc.vertices.len()).map(|v| vertex_shape(side, old, v as CubeVertex)).collect();
    (0..kc.dim())
        .map(|i| {
            let (v, l) = kc.generator(i);
            let shape = &shapes[v as usize];
            let labels: Vec<Label> = shape.class_circles.iter().map(|c| l[c]).collect();
            Signature {
                grade: kc.complex.grades[i],
                outside: Outside { old_bits: v & old_mask, pairing: shape.pairing.clone(), labels },
            }
        })
        .collect()
}

/// A chain homotopy equivalence `C(a) -> C(b)`, where the two diagrams share their
/// first `old` crossings and agree outside a disk containing the others.
pub fn local_equivalence(side_a: &LocalSide, side_b: &LocalSide, old: usize) -> Result<SparseMatrix> {
    let (a, b) = (side_a.kc, side_b.kc);
    let sa = signatures(side_a, old);
    let sb = signatures(side_b, old);
    let ra = eliminate_where(&a.complex, |s, t| sa[s].outside == sa[t].outside);
    let rb = eliminate_where(&b.complex, |s, t| sb[s].outside == sb[t].outside);
    let mut groups: BTreeMap<&Signature, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (k, i) in ra.kept.iter().enumerate() {
        groups.entry(&sa[*i]).or_default().0.push(k);
    }
    for (k, i) in rb.kept.iter().enumerate() {
        groups.entry(&sb[*i]).or_default().1.push(k);
    }
    // matched[k] = kept index on the b side for kept index k on the a side
    let mut matched = vec![usize::MAX; ra.kept.len()];
    for (sig, (xs, ys)) in &groups {
        if xs.len() != ys.len() {
            return Err(KhError::NotApplicable(format!(
                "reductions do not match: {} against {} generators at {:?}",
                xs.len(),
                ys.len(),
                sig.grade
            )));
        }
        for (x, y) in xs.iter().zip(ys) {
            matched[*x] = *y;
        }
    }
    let local_a = |k: usize| a.generator(ra.kept[k]).0 >> old;
    let local_b = |k: usize| b.generator(rb.kept[k]).0 >> old;
    let parity = |k: usize| (sa[ra.kept[k]].outside.old_bits.count_ones() % 2) as u8;
    let class_of = |k: usize| (local_a(k), local_b(matched[k]), parity(k));
    let mut class_index: BTreeMap<(CubeVertex, CubeVertex, u8), usize> = BTreeMap::new();
    for k in 0..ra.kept.len() {
        let next = class_index.len();
        class_index.entry(class_of(k)).or_insert(next);
    }
    let cls: Vec<usize> = (0..ra.kept.len()).map(|k| class_index[&class_of(k)]).collect();
    // constraints sign[c2] * sign[c1] = ratio from every arrow of the reduced a side
    let mut adj: Vec<Vec<(usize, i8)>> = vec![Vec::new(); class_index.len()];
    for (r, c, v) in ra.complex.d.triplets() {
        let w = rb.complex.d.get(matched[r], matched[c]);
        let ratio = if w == *v {
            1
        } else if w == -v {
            -1
        } else {
            return Err(KhError::NotApplicable("reduced differentials differ beyond sign".into()));
        };
        adj[cls[r]].push((cls[c], ratio));
        adj[cls[c]].push((cls[r], ratio));
    }
    let mut sign: Vec<i8> = vec![0; class_index.len()];
    for start in 0..sign.len() {
        if sign[start] != 0 {
            continue;
        }
        sign[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for (y, ratio) in &adj[x] {
                let want = sign[x] * ratio;
                if sign[*y] == 0 {
                    sign[*y] = want;
                    queue.push_back(*y);
                } else if sign[*y] != want {
                    return Err(KhError::NotApplicable("no consistent signs for the matching".into()));
                }
            }
        }
    }
    let iota = SparseMatrix::from_triplets(
        rb.kept.len(),
        ra.kept.len(),
        (0..ra.kept.len()).map(|k| (matched[k], k, BigInt::from(sign[cls[k]]))),
    );
    if rb.complex.d.mul(&iota) != iota.mul(&ra.complex.d) {
        return Err(KhError::NotApplicable("matching is not a chain map".into()));
    }
    Ok(rb.incl.mul(&iota).mul(&ra.proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::ChainMap;
    use crate::library::diagram;
    use crate::moves::{r1_create, r2_create, r3};

    fn check(a: &DiskularTangle, b: &DiskularTangle, old: usize) {
        let ka = KhComplex::new(a, 0).unwrap();
        let kb = KhComplex::new(b, 0).unwrap();
        let (sa, sb) = (LocalSide::closed(&ka), LocalSide::closed(&kb));
        let f = local_equivalence(&sa, &sb, old).unwrap();
        let g = local_equivalence(&sb, &sa, old).unwrap();
        ChainMap::new(f.clone(), (0, 0)).check(&ka.complex, &kb.complex).unwrap();
        ChainMap::new(g.clone(), (0, 0)).check(&kb.complex, &ka.complex).unwrap();
        // g f is homotopic to plus or minus the identity
        let gf = ChainMap::new(g.mul(&f), (0, 0));
        let id = ChainMap::identity(&ka.complex);
        assert!(crate::complex::equal_up_to_sign_and_homotopy(&gf, &id, &ka.complex, &ka.complex).unwrap());
    }

    #[test]
    fn kinks() {
        let t = diagram("trefoil").unwrap();
        for positive in [true, false] {
            for side in [true, false] {
                let s = r1_create(&t, 1, positive, side).unwrap();
                check(&t, &s, 3);
            }
        }
        let u = DiskularTangle::unlink(1);
        let e = u.loops[0];
        check(&u, &r1_create(&u, e, true, false).unwrap(), 0);
    }

    #[test]
    fn bigons() {
        let t = diagram("hopf").unwrap();
        let edges: Vec<_> = t.all_edges().into_iter().collect();
        let mut done = 0;
        for over in &edges {
            for under in &edges {
                for variant in 0..2 {
                    if let Ok(s) = r2_create(&t, *over, *under, variant) {
                        check(&t, &s, 2);
                        done += 1;
                    }
                }
            }
        }
        assert!(done > 0);
    }

    #[test]
    fn triangles() {
        let cap = crate::matching::CrossinglessMatching::new(6, vec![(1, 2), (3, 4), (5, 6)]).unwrap();
        let mut moved = 0;
        for bits in 0..8u8 {
            let t = crate::random::braid_triangle([bits & 1 == 1, bits & 2 == 2, bits & 4 == 4]).unwrap();
            if let Ok(s) = r3(&t) {
                check(&t.close(&[], &cap).unwrap(), &s.close(&[], &cap).unwrap(), 0);
                moved += 1;
            }
        }
        assert_eq!(moved, 6);
    }

    #[test]
    fn triangles_inside_larger_diagrams() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        for k in 0..40 {
            let bits = k as u8 % 8;
            let t = crate::random::braid_triangle([bits & 1 == 1, bits & 2 == 2, bits & 4 == 4]).unwrap();
            let Ok(s) = r3(&t) else { continue };
            let outer = crate::random::random_annular_tangle(&mut rng, 6, 0, 2).unwrap();
            let a = outer.compose(0, &t).unwrap();
            let b = outer.compose(0, &s).unwrap();
            let Ok(moved) = r3(&a) else { continue };
            assert!(crate::moves::find_relabel(&moved, &b).is_some());
            check(&a, &b, 2);
            done += 1;
        }
        assert!(done >= 10, "{done}");
    }
}
