//! Diagram surgery for Reidemeister moves and relabelings.
//!
//! Created crossings are appended after the existing ones; removals expect the
//! crossings they remove to be the last ones. Edges away from the move keep their
//! ids, and each strand through the move keeps the id of one of its pieces.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{KhError, Result};
use crate::tangle::{DiskularTangle, EdgeId, FaceSide, Port};
use crate::unionfind::UnionFind;

fn set_port(t: &mut DiskularTangle, p: Port, e: EdgeId) {
    match p {
        Port::Slot { crossing, slot } => t.crossings[crossing][slot] = e,
        Port::Outer(j) => t.boundary_edges[j] = e,
        Port::Inner { disk, point } => t.inner_boundary_edges[disk][point] = e,
    }
}

fn ports_of(t: &DiskularTangle, e: EdgeId) -> Result<Vec<Port>> {
    if t.loops.contains(&e) {
        return Ok(vec![]);
    }
    t.edge_ports().remove(&e).ok_or_else(|| KhError::NotApplicable(format!("no edge {e}")))
}

/// Move the listed crossings to the end, keeping the relative order of the rest.
/// Returns the new order: new crossing `k` is old crossing `order[k]`.
pub fn order_with_last(t: &DiskularTangle, last: &[usize]) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = last.iter().copied().collect();
    if set.len() != last.len() || last.iter().any(|c| *c >= t.num_crossings()) {
        return Err(KhError::NotApplicable(format!("bad crossing list {last:?}")));
    }
    let mut order: Vec<usize> = (0..t.num_crossings()).filter(|c| !set.contains(c)).collect();
    order.extend_from_slice(last);
    Ok(order)
}

/// Rename edges, reorder crossings (new crossing `k` is old crossing `order[k]`) and
/// give the crossings listed in `half_turns` (new indices) a half turn, which
/// describes the same crossing.
pub fn relabel(t: &DiskularTangle, edges: &BTreeMap<EdgeId, EdgeId>, order: &[usize], half_turns: &[usize]) -> Result<DiskularTangle> {
    let all = t.all_edges();
    let image: BTreeSet<EdgeId> = all.iter().map(|e| *edges.get(e).unwrap_or(e)).collect();
    if image.len() != all.len() {
        return Err(KhError::NotApplicable("edge relabeling is not injective".into()));
    }
    let mut seen: Vec<usize> = order.to_vec();
    seen.sort_unstable();
    if seen != (0..t.num_crossings()).collect::<Vec<_>>() {
        return Err(KhError::NotApplicable("crossing order is not a permutation".into()));
    }
    if half_turns.iter().any(|k| *k >= t.num_crossings()) {
        return Err(KhError::NotApplicable("half turn on a missing crossing".into()));
    }
    let m = |e: &EdgeId| *edges.get(e).unwrap_or(e);
    let mut loops: Vec<EdgeId> = t.loops.iter().map(m).collect();
    loops.sort_unstable();
    let crossings = order
        .iter()
        .enumerate()
        .map(|(k, old)| {
            let mut x = t.crossings[*old].map(|e| m(&e));
            if half_turns.contains(&k) {
                x.rotate_left(2);
            }
            x
        })
        .collect();
    DiskularTangle::new(
        t.n,
        t.inner.clone(),
        crossings,
        t.boundary_edges.iter().map(m).collect(),
        t.inner_boundary_edges.iter().map(|es| es.iter().map(m).collect()).collect(),
        loops,
        t.p,
    )
}

/// An isomorphism from `a` to `b` keeping the crossing order: an edge renaming and
/// the crossings that need a half turn.
pub fn find_relabel(a: &DiskularTangle, b: &DiskularTangle) -> Option<(BTreeMap<EdgeId, EdgeId>, Vec<usize>)> {
    if a.num_crossings() != b.num_crossings() || a.n != b.n || a.inner != b.inner || a.loops.len() != b.loops.len() || a.p != b.p {
        return None;
    }
    fn bind(x: EdgeId, y: EdgeId, m: &mut BTreeMap<EdgeId, EdgeId>) -> bool {
        match m.get(&x) {
            Some(z) => *z == y,
            None => {
                m.insert(x, y);
                true
            }
        }
    }
    let mut base: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    let fixed = a
        .boundary_edges
        .iter()
        .zip(&b.boundary_edges)
        .chain(a.inner_boundary_edges.iter().flatten().zip(b.inner_boundary_edges.iter().flatten()));
    for (x, y) in fixed {
        if !bind(*x, *y, &mut base) {
            return None;
        }
    }
    fn search(a: &DiskularTangle, b: &DiskularTangle, k: usize, m: BTreeMap<EdgeId, EdgeId>, turns: Vec<usize>) -> Option<(BTreeMap<EdgeId, EdgeId>, Vec<usize>)> {
        if k == a.num_crossings() {
            let mut m = m;
            let mut la: Vec<EdgeId> = a.loops.iter().filter(|e| !m.contains_key(e)).copied().collect();
            let used: BTreeSet<EdgeId> = m.values().copied().collect();
            let mut lb: Vec<EdgeId> = b.loops.iter().filter(|e| !used.contains(e)).copied().collect();
            la.sort_unstable();
            lb.sort_unstable();
            if la.len() != lb.len() {
                return None;
            }
            for (x, y) in la.iter().zip(&lb) {
                if !bind(*x, *y, &mut m) {
                    return None;
                }
            }
            let image: BTreeSet<EdgeId> = m.values().copied().collect();
            let order: Vec<usize> = (0..a.num_crossings()).collect();
            return (image.len() == m.len() && relabel(a, &m, &order, &turns).ok()? == *b).then_some((m, turns));
        }
        for turn in [false, true] {
            let mut x = a.crossings[k];
            if turn {
                x.rotate_left(2);
            }
            let mut m2 = m.clone();
            if (0..4).all(|s| bind(x[s], b.crossings[k][s], &mut m2)) {
                let mut t2 = turns.clone();
                if turn {
                    t2.push(k);
                }
                if let Some(r) = search(a, b, k + 1, m2, t2) {
                    return Some(r);
                }
            }
        }
        None
    }
    search(a, b, 0, base, Vec::new())
}

/// Whether a one-crossing kink has its small circle in the 0-smoothing.
fn kink_is_positive(x: &[EdgeId; 4]) -> Option<bool> {
    if x[0] == x[1] || x[2] == x[3] {
        Some(true)
    } else if x[1] == x[2] || x[3] == x[0] {
        Some(false)
    } else {
        None
    }
}

/// Add a kink on edge `e`. `positive` picks the crossing type, `side` the side of
/// the strand it sits on.
pub fn r1_create(t: &DiskularTangle, e: EdgeId, positive: bool, side: bool) -> Result<DiskularTangle> {
    let mut out = t.clone();
    let f = t.max_edge() + 1;
    let g = t.max_edge() + 2;
    let ports = ports_of(t, e)?;
    let x = if ports.is_empty() {
        out.loops.retain(|l| *l != e);
        if positive {
            [g, g, e, e]
        } else {
            [g, e, e, g]
        }
    } else {
        set_port(&mut out, ports[1], f);
        let (a, b) = if side { (f, e) } else { (e, f) };
        if positive {
            [g, g, a, b]
        } else {
            [g, a, b, g]
        }
    };
    out.crossings.push(x);
    out.p += i64::from(positive);
    out.validate()?;
    Ok(out)
}

/// Remove crossings (which must be the last ones), joining edge pairs. In each joined
/// class the first listed edge keeps its id; a class left without ports becomes a loop.
fn remove_last_and_join(t: &DiskularTangle, count: usize, joins: &[(EdgeId, EdgeId)], drop: &[EdgeId], dp: i64) -> Result<DiskularTangle> {
    let keep_n = t.num_crossings() - count;
    let mut out = t.clone();
    out.crossings.truncate(keep_n);
    out.p -= dp;
    let edges: Vec<EdgeId> = t.all_edges().into_iter().collect();
    let idx: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let mut uf = UnionFind::new(edges.len());
    let mut rep: BTreeMap<usize, EdgeId> = BTreeMap::new();
    for (a, b) in joins {
        let ra = uf.find(idx[a]);
        let keep = *rep.get(&ra).unwrap_or(a);
        uf.union(idx[a], idx[b]);
        rep.insert(uf.find(idx[a]), keep);
    }
    let name = |e: EdgeId, uf: &mut UnionFind| -> EdgeId {
        let r = uf.find(idx[&e]);
        *rep.get(&r).unwrap_or(&e)
    };
    let mut renamed = BTreeMap::new();
    for e in &edges {
        renamed.insert(*e, name(*e, &mut uf));
    }
    let m = |e: &EdgeId| renamed[e];
    out.crossings = out.crossings.iter().map(|x| x.map(|e| m(&e))).collect();
    out.boundary_edges = out.boundary_edges.iter().map(m).collect();
    out.inner_boundary_edges = out.inner_boundary_edges.iter().map(|es| es.iter().map(m).collect()).collect();
    let still: BTreeSet<EdgeId> = out
        .crossings
        .iter()
        .flatten()
        .chain(out.boundary_edges.iter())
        .chain(out.inner_boundary_edges.iter().flatten())
        .copied()
        .collect();
    let mut loops: BTreeSet<EdgeId> = t.loops.iter().map(m).collect();
    for e in &edges {
        let r = m(e);
        if !still.contains(&r) && !drop.contains(e) {
            loops.insert(r);
        }
    }
    out.loops = loops.into_iter().collect();
    out.validate()?;
    Ok(out)
}

/// Remove a kink at the last crossing. Returns the new tangle and whether the kink was positive.
pub fn r1_remove(t: &DiskularTangle) -> Result<(DiskularTangle, bool)> {
    let j = t.num_crossings().checked_sub(1).ok_or_else(|| KhError::NotApplicable("no crossing".into()))?;
    let x = t.crossings[j];
    let positive = kink_is_positive(&x).ok_or_else(|| KhError::NotApplicable(format!("crossing {j} is not a kink")))?;
    let s = (0..4).find(|s| x[*s] == x[(s + 1) % 4]).expect("kink has two adjacent equal slots");
    let g = x[s];
    let (e, f) = (x[(s + 2) % 4], x[(s + 3) % 4]);
    if e == g || f == g {
        return Err(KhError::NotApplicable("crossing closes on itself twice".into()));
    }
    let joins = if e == f { vec![] } else { vec![(e.min(f), e.max(f))] };
    Ok((remove_last_and_join(t, 1, &joins, &[g], i64::from(positive))?, positive))
}

/// Add a free loop named `e`.
pub fn birth(t: &DiskularTangle, e: EdgeId) -> Result<DiskularTangle> {
    if t.all_edges().contains(&e) {
        return Err(KhError::NotApplicable(format!("edge {e} already exists")));
    }
    let mut out = t.clone();
    out.loops.push(e);
    out.loops.sort_unstable();
    Ok(out)
}

/// Remove the free loop `e`.
pub fn death(t: &DiskularTangle, e: EdgeId) -> Result<DiskularTangle> {
    if !t.loops.contains(&e) {
        return Err(KhError::NotApplicable(format!("edge {e} is not a free loop")));
    }
    let mut out = t.clone();
    out.loops.retain(|l| *l != e);
    Ok(out)
}

fn share_face(t: &DiskularTangle, a: EdgeId, b: EdgeId) -> bool {
    t.faces().iter().any(|f| {
        let has = |x: EdgeId| f.iter().any(|s| matches!(s, FaceSide::Edge { edge, .. } if *edge == x));
        has(a) && has(b)
    })
}

/// A saddle joining edges `e1` and `e2` across a face. Returns the new tangle and the
/// two edges through the saddle afterwards; they are equal when the saddle merges
/// something into a single edge. `variant` picks among the planar reconnections of
/// two distinct edges.
pub fn saddle(t: &DiskularTangle, e1: EdgeId, e2: EdgeId, variant: usize) -> Result<(DiskularTangle, [EdgeId; 2])> {
    let l1 = t.loops.contains(&e1);
    let l2 = t.loops.contains(&e2);
    let p1 = ports_of(t, e1)?;
    let p2 = ports_of(t, e2)?;
    let fresh = t.max_edge() + 1;
    let mut out = t.clone();
    let after = if e1 == e2 {
        // pinch off a small circle
        out.loops.push(fresh);
        [e1, fresh]
    } else if l1 && l2 {
        out.loops.retain(|l| *l != e2);
        [e1, e1]
    } else if l1 || l2 {
        let (lp, keep) = if l1 { (e1, e2) } else { (e2, e1) };
        out.loops.retain(|l| *l != lp);
        [keep, keep]
    } else {
        if !share_face(t, e1, e2) {
            return Err(KhError::NotApplicable(format!("edges {e1} and {e2} share no face")));
        }
        let mut found = Vec::new();
        for cross in [false, true] {
            let mut c = t.clone();
            let (b, b2) = if cross { (p2[1], p2[0]) } else { (p2[0], p2[1]) };
            // e1 now runs from p1[0] to b, e2 from p1[1] to b2
            set_port(&mut c, b, e1);
            set_port(&mut c, p1[1], e2);
            set_port(&mut c, b2, e2);
            if c.validate().is_ok() && !found.contains(&c) {
                found.push(c);
            }
        }
        out = found
            .into_iter()
            .nth(variant)
            .ok_or_else(|| KhError::NotApplicable(format!("saddle variant {variant} is not planar")))?;
        [e1, e2]
    };
    out.loops.sort_unstable();
    out.validate()?;
    Ok((out, after))
}

/// Whether edges `a` and `b` bound a face of `t` on their own.
fn is_bigon(t: &DiskularTangle, a: EdgeId, b: EdgeId) -> bool {
    t.faces().iter().any(|f| {
        let es: BTreeSet<EdgeId> =
            f.iter().filter_map(|s| if let FaceSide::Edge { edge, .. } = s { Some(*edge) } else { None }).collect();
        f.len() == 2 && es == [a, b].into_iter().collect()
    })
}

/// Push edge `over` across edge `under`, creating two crossings. `variant` picks among
/// the planar ways of doing so.
pub fn r2_create(t: &DiskularTangle, over: EdgeId, under: EdgeId, variant: usize) -> Result<DiskularTangle> {
    if over == under || t.loops.contains(&over) || t.loops.contains(&under) {
        return Err(KhError::NotApplicable("R2 needs two distinct non-loop edges".into()));
    }
    let po = ports_of(t, over)?;
    let pu = ports_of(t, under)?;
    let base = t.max_edge();
    let (mo, fo, mu, fu) = (base + 1, base + 2, base + 3, base + 4);
    let mut found = Vec::new();
    for flip_u in [false, true] {
        for o1 in [false, true] {
            for o2 in [false, true] {
                let mut out = t.clone();
                set_port(&mut out, po[1], fo);
                set_port(&mut out, if flip_u { pu[0] } else { pu[1] }, fu);
                let c1 = if o1 { [under, over, mu, mo] } else { [under, mo, mu, over] };
                let c2 = if o2 { [mu, mo, fu, fo] } else { [mu, fo, fu, mo] };
                out.crossings.push(c1);
                out.crossings.push(c2);
                out.p += 1;
                if out.validate().is_ok() && is_bigon(&out, mo, mu) && !found.contains(&out) {
                    found.push(out);
                }
            }
        }
    }
    let k = found.len();
    found.into_iter().nth(variant).ok_or_else(|| KhError::NotApplicable(format!("R2 variant {variant} of {k} planar choices")))
}

/// Remove the bigon formed by the last two crossings.
pub fn r2_remove(t: &DiskularTangle) -> Result<DiskularTangle> {
    let nc = t.num_crossings();
    if nc < 2 {
        return Err(KhError::NotApplicable("R2 removal needs two crossings".into()));
    }
    let (x, y) = (t.crossings[nc - 2], t.crossings[nc - 1]);
    for su in [0, 2] {
        for so in [1, 3] {
            let (mu, mo) = (x[su], x[so]);
            let yu = (0..4).step_by(2).find(|s| y[*s] == mu);
            let yo = (1..4).step_by(2).find(|s| y[*s] == mo);
            let (Some(yu), Some(yo)) = (yu, yo) else { continue };
            if mu == mo || !is_bigon(t, mu, mo) {
                continue;
            }
            let (eu, eo) = (x[(su + 2) % 4], x[(so + 2) % 4]);
            let (fu, fo) = (y[(yu + 2) % 4], y[(yo + 2) % 4]);
            if [eu, eo, fu, fo].iter().any(|e| *e == mu || *e == mo) {
                continue;
            }
            let mut joins = Vec::new();
            if eu != fu {
                joins.push((eu, fu));
            }
            if eo != fo {
                joins.push((eo, fo));
            }
            return remove_last_and_join(t, 2, &joins, &[mu, mo], 1);
        }
    }
    Err(KhError::NotApplicable("the last two crossings do not form a Reidemeister II bigon".into()))
}

/// Slide a strand across the crossing of the other two: the last three crossings
/// The edges leaving a cluster of crossings, in counterclockwise order around it,
/// rotated to start at the smallest.
fn boundary_cycle(xs: &[[EdgeId; 4]], internal: &BTreeSet<EdgeId>) -> Option<Vec<EdgeId>> {
    let other_end = |c: usize, s: usize| -> Option<(usize, usize)> {
        let e = xs[c][s];
        (0..xs.len()).flat_map(|c2| (0..4).map(move |s2| (c2, s2))).find(|(c2, s2)| (*c2, *s2) != (c, s) && xs[*c2][*s2] == e)
    };
    let start = (0..xs.len()).flat_map(|c| (0..4).map(move |s| (c, s))).find(|(c, s)| !internal.contains(&xs[*c][*s]))?;
    let mut out = vec![xs[start.0][start.1]];
    let mut pos = start;
    for _ in 0..8 * xs.len() {
        pos = (pos.0, (pos.1 + 1) % 4);
        while internal.contains(&xs[pos.0][pos.1]) {
            let (c2, s2) = other_end(pos.0, pos.1)?;
            pos = (c2, (s2 + 1) % 4);
        }
        if pos == start {
            let k = out.iter().enumerate().min_by_key(|(_, e)| **e).map(|(k, _)| k)?;
            out.rotate_left(k);
            return Some(out);
        }
        out.push(xs[pos.0][pos.1]);
    }
    None
}

/// must bound a triangle. The new crossings replace them, in the same order.
pub fn r3(t: &DiskularTangle) -> Result<DiskularTangle> {
    let nc = t.num_crossings();
    if nc < 3 {
        return Err(KhError::NotApplicable("R3 needs three crossings".into()));
    }
    let local: Vec<usize> = (nc - 3..nc).collect();
    let xs: Vec<[EdgeId; 4]> = local.iter().map(|c| t.crossings[*c]).collect();
    // internal edges join two of the three crossings
    let mut internal: BTreeMap<(usize, usize), (EdgeId, usize, usize)> = BTreeMap::new();
    for a in 0..3 {
        for b in a + 1..3 {
            for sa in 0..4 {
                for sb in 0..4 {
                    if xs[a][sa] == xs[b][sb] {
                        if internal.insert((a, b), (xs[a][sa], sa, sb)).is_some() {
                            return Err(KhError::NotApplicable("two crossings share more than one edge".into()));
                        }
                    }
                }
            }
        }
    }
    if internal.len() != 3 {
        return Err(KhError::NotApplicable("the last three crossings do not form a triangle".into()));
    }
    let tri: BTreeSet<EdgeId> = internal.values().map(|v| v.0).collect();
    let is_triangle = t.faces().iter().any(|f| {
        f.len() == 3
            && f.iter().all(|s| matches!(s, FaceSide::Edge { edge, .. } if tri.contains(edge)))
    });
    if !is_triangle {
        return Err(KhError::NotApplicable("the three crossings do not bound a triangular face".into()));
    }
    // slot of each crossing that carries the internal edge towards crossing `o`
    let slot_to = |a: usize, o: usize| -> usize {
        if a < o {
            internal[&(a, o)].1
        } else {
            internal[&(o, a)].2
        }
    };
    for a in 0..3 {
        let others: Vec<usize> = (0..3).filter(|o| *o != a).collect();
        if (slot_to(a, others[0]) + 2) % 4 == slot_to(a, others[1]) {
            return Err(KhError::NotApplicable("a strand passes straight through the triangle".into()));
        }
    }
    let top = (0..3).any(|a| (a + 1..3).any(|b| slot_to(a, b) % 2 == 1 && slot_to(b, a) % 2 == 1));
    if !top {
        return Err(KhError::NotApplicable("no strand passes over both others".into()));
    }
    let base = t.max_edge();
    // strand through edge (a,b): new middle edge id
    let new_mid = |a: usize, b: usize| -> EdgeId {
        base + 1 + match (a.min(b), a.max(b)) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        }
    };
    // new crossing for old crossing a: strands (a,b) and (a,c) now meet near the
    // boundary ends they used to have at b and c
    let mut options: Vec<[[EdgeId; 4]; 2]> = Vec::new();
    for a in 0..3 {
        let others: Vec<usize> = (0..3).filter(|o| *o != a).collect();
        let mut pieces: [(EdgeId, EdgeId); 2] = [(0, 0); 2];
        let mut under_first = false;
        for (k, b) in others.iter().enumerate() {
            // boundary end of strand (a,b) at crossing b
            let sb = slot_to(*b, a);
            let boundary = xs[*b][(sb + 2) % 4];
            pieces[k] = (boundary, new_mid(a, *b));
            if k == 0 {
                under_first = slot_to(a, *b) % 2 == 0;
            }
        }
        let (u, o) = if under_first { (pieces[0], pieces[1]) } else { (pieces[1], pieces[0]) };
        options.push([[u.0, o.0, u.1, o.1], [u.0, o.1, u.1, o.0]]);
    }
    let mut found = Vec::new();
    for choice in 0..8usize {
        let mut out = t.clone();
        for a in 0..3 {
            out.crossings[nc - 3 + a] = options[a][(choice >> a) & 1];
        }
        if out.validate().is_ok() {
            let mids: BTreeSet<EdgeId> = (1..=3).map(|k| base + k).collect();
            let tri_ok = out.faces().iter().any(|f| {
                f.len() == 3 && f.iter().all(|s| matches!(s, FaceSide::Edge { edge, .. } if mids.contains(edge)))
            });
            let local_new: Vec<[EdgeId; 4]> = out.crossings[nc - 3..].to_vec();
            if tri_ok && boundary_cycle(&local_new, &mids) == boundary_cycle(&xs, &tri) {
                found.push(out);
            }
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one result")),
        0 => Err(KhError::NotApplicable("no planar Reidemeister III result".into())),
        k => Err(KhError::NotApplicable(format!("{k} planar Reidemeister III results"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::khcomplex::khovanov_homology;

    fn trefoil() -> DiskularTangle {
        DiskularTangle::new(0, vec![], vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], vec![], vec![], vec![], 0).unwrap()
    }

    #[test]
    fn r1_round_trip_keeps_homology() {
        let t = trefoil();
        let h = khovanov_homology(&t).unwrap();
        for e in 1..=6 {
            for positive in [false, true] {
                for side in [false, true] {
                    let k = r1_create(&t, e, positive, side).unwrap();
                    assert_eq!(khovanov_homology(&k).unwrap(), h);
                    let (back, pos) = r1_remove(&k).unwrap();
                    assert_eq!(pos, positive);
                    assert_eq!(back, t);
                }
            }
        }
        let u = DiskularTangle::unlink(1);
        let k = r1_create(&u, 1, true, false).unwrap();
        assert_eq!(khovanov_homology(&k).unwrap(), khovanov_homology(&u).unwrap());
        assert_eq!(r1_remove(&k).unwrap().0, u);
    }

    #[test]
    fn r2_round_trip_keeps_homology() {
        let t = trefoil();
        let h = khovanov_homology(&t).unwrap();
        let mut made = 0;
        for a in 1..=6 {
            for b in 1..=6 {
                for variant in 0..4 {
                    if let Ok(k) = r2_create(&t, a, b, variant) {
                        made += 1;
                        assert_eq!(khovanov_homology(&k).unwrap(), h);
                        assert_eq!(r2_remove(&k).unwrap(), t);
                    }
                }
            }
        }
        assert!(made > 0);
    }

    #[test]
    fn r3_is_an_involution_up_to_labels() {
        let mut moved = 0;
        for bits in 0..8u8 {
            let t = crate::random::braid_triangle([bits & 1 == 1, bits & 2 == 2, bits & 4 == 4]).unwrap();
            match r3(&t) {
                Ok(s) => {
                    moved += 1;
                    assert_eq!(khovanov_homology(&s.close(&[], &crate::matching::CrossinglessMatching::new(6, vec![(1, 2), (3, 4), (5, 6)]).unwrap()).unwrap()).unwrap(),
                        khovanov_homology(&t.close(&[], &crate::matching::CrossinglessMatching::new(6, vec![(1, 2), (3, 4), (5, 6)]).unwrap()).unwrap()).unwrap());
                    let back = r3(&s).unwrap();
                    assert!(find_relabel(&back, &t).is_some());
                }
                Err(e) => assert!(matches!(e, KhError::NotApplicable(_)), "{e:?}"),
            }
        }
        assert_eq!(moved, 6);
    }

    #[test]
    fn relabel_detects_isomorphism() {
        let t = trefoil();
        let m: BTreeMap<EdgeId, EdgeId> = (1..=6).map(|e| (e, e + 10)).collect();
        let s = relabel(&t, &m, &[0, 1, 2], &[1]).unwrap();
        assert_eq!(find_relabel(&t, &s).unwrap(), (m, vec![1]));
    }
}
