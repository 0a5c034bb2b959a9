//! Diskular tangle diagrams encoded as planar-diagram codes.
//!
//! A crossing lists four edge ids counterclockwise starting at an incoming
//! under-strand end. Smoothing 0 joins slots (0,1) and (2,3); smoothing 1 joins
//! (0,3) and (1,2). Outer boundary points are numbered counterclockwise, as are
//! the points on each inner disk. Crossingless closed components are listed in
//! `loops`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{KhError, Result};
use crate::matching::CrossinglessMatching;
use crate::tqft::CircleId;
use crate::unionfind::UnionFind;

pub type EdgeId = u32;

/// One end of a tangle edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Port {
    Slot { crossing: usize, slot: usize },
    /// Outer boundary point, 0-based.
    Outer(usize),
    /// Inner disk boundary point, both 0-based.
    Inner { disk: usize, point: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskularTangle {
    pub n: usize,
    pub inner: Vec<usize>,
    pub crossings: Vec<[EdgeId; 4]>,
    pub boundary_edges: Vec<EdgeId>,
    pub inner_boundary_edges: Vec<Vec<EdgeId>>,
    pub loops: Vec<EdgeId>,
    pub p: i64,
}

/// A composite tangle with the new ids of the outer and the inner tangle's edges.
pub type ComposeResult = (DiskularTangle, BTreeMap<EdgeId, EdgeId>, BTreeMap<EdgeId, EdgeId>);

/// Resolution vertex: bit `j` is the smoothing of crossing `j`.
pub type CubeVertex = u64;

pub fn height(v: CubeVertex) -> usize {
    v.count_ones() as usize
}

/// Slot pairs joined by the smoothing of one crossing.
pub fn smoothing_pairs(bit: bool) -> [(usize, usize); 2] {
    if bit {
        [(0, 3), (1, 2)]
    } else {
        [(0, 1), (2, 3)]
    }
}

/// One side of a face of the planar graph, traversed with the face on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceSide {
    /// A tangle edge walked from one port to the other.
    Edge { edge: EdgeId, from: Port, to: Port },
    /// A piece of the outer circle between consecutive points.
    OuterArc { from: usize, to: usize },
    /// A piece of an inner circle between consecutive points.
    InnerArc { disk: usize, from: usize, to: usize },
}

/// Half-edge structure built from the rotation system of the diagram.
struct PlanarGraph {
    /// For each half-edge: the vertex it leaves and its position in that rotation.
    half: Vec<(usize, usize)>,
    rot: Vec<Vec<usize>>,
    sides: Vec<FaceSide>,
}

impl PlanarGraph {
    fn twin(h: usize) -> usize {
        h ^ 1
    }

    fn next_in_face(&self, h: usize) -> usize {
        let t = Self::twin(h);
        let (v, pos) = self.half[t];
        let deg = self.rot[v].len();
        self.rot[v][(pos + deg - 1) % deg]
    }

    fn faces(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.half.len()];
        let mut out = Vec::new();
        for start in 0..self.half.len() {
            if seen[start] {
                continue;
            }
            let mut face = Vec::new();
            let mut h = start;
            while !seen[h] {
                seen[h] = true;
                face.push(h);
                h = self.next_in_face(h);
            }
            out.push(face);
        }
        out
    }
}

impl DiskularTangle {
    pub fn new(
        n: usize,
        inner: Vec<usize>,
        crossings: Vec<[EdgeId; 4]>,
        boundary_edges: Vec<EdgeId>,
        inner_boundary_edges: Vec<Vec<EdgeId>>,
        loops: Vec<EdgeId>,
        p: i64,
    ) -> Result<Self> {
        let t = DiskularTangle { n, inner, crossings, boundary_edges, inner_boundary_edges, loops, p };
        t.validate()?;
        Ok(t)
    }

    /// The empty closed diagram.
    pub fn empty() -> Self {
        DiskularTangle {
            n: 0,
            inner: vec![],
            crossings: vec![],
            boundary_edges: vec![],
            inner_boundary_edges: vec![],
            loops: vec![],
            p: 0,
        }
    }

    /// A crossingless `(;n)` tangle drawing the matching; edge `k+1` is the k-th pair.
    pub fn from_matching(m: &CrossinglessMatching) -> Self {
        let mut be = vec![0; m.n];
        for (k, (i, j)) in m.pairs.iter().enumerate() {
            be[i - 1] = k as EdgeId + 1;
            be[j - 1] = k as EdgeId + 1;
        }
        DiskularTangle { n: m.n, boundary_edges: be, ..DiskularTangle::empty() }
    }

    /// The radial `(n;n)` identity tangle; edge `j+1` joins inner and outer point `j`.
    pub fn identity(n: usize) -> Self {
        let e: Vec<EdgeId> = (1..=n as EdgeId).collect();
        DiskularTangle { n, inner: vec![n], boundary_edges: e.clone(), inner_boundary_edges: vec![e], ..DiskularTangle::empty() }
    }

    /// Unlink of `k` crossingless circles.
    pub fn unlink(k: usize) -> Self {
        DiskularTangle { loops: (1..=k as EdgeId).collect(), ..DiskularTangle::empty() }
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_closed(&self) -> bool {
        self.n == 0 && self.inner.is_empty()
    }

    pub fn max_edge(&self) -> EdgeId {
        self.all_edges().into_iter().max().unwrap_or(0)
    }

    pub fn all_edges(&self) -> BTreeSet<EdgeId> {
        let mut s: BTreeSet<EdgeId> = self.crossings.iter().flatten().copied().collect();
        s.extend(self.boundary_edges.iter().copied());
        s.extend(self.inner_boundary_edges.iter().flatten().copied());
        s.extend(self.loops.iter().copied());
        s
    }

    /// All ports in a fixed order: crossing slots, outer points, inner points.
    pub fn port_list(&self) -> Vec<(Port, EdgeId)> {
        let mut out = Vec::new();
        for (c, x) in self.crossings.iter().enumerate() {
            for (s, e) in x.iter().enumerate() {
                out.push((Port::Slot { crossing: c, slot: s }, *e));
            }
        }
        for (j, e) in self.boundary_edges.iter().enumerate() {
            out.push((Port::Outer(j), *e));
        }
        for (d, es) in self.inner_boundary_edges.iter().enumerate() {
            for (j, e) in es.iter().enumerate() {
                out.push((Port::Inner { disk: d, point: j }, *e));
            }
        }
        out
    }

    /// The two ports of every non-loop edge.
    pub fn edge_ports(&self) -> BTreeMap<EdgeId, Vec<Port>> {
        let mut m: BTreeMap<EdgeId, Vec<Port>> = BTreeMap::new();
        for (p, e) in self.port_list() {
            m.entry(e).or_default().push(p);
        }
        m
    }

    pub fn edge_at(&self, p: Port) -> EdgeId {
        match p {
            Port::Slot { crossing, slot } => self.crossings[crossing][slot],
            Port::Outer(j) => self.boundary_edges[j],
            Port::Inner { disk, point } => self.inner_boundary_edges[disk][point],
        }
    }

    /// The port at the other end of the edge leaving `p`.
    pub fn opposite(&self, p: Port) -> Port {
        let e = self.edge_at(p);
        let ports = &self.edge_ports()[&e];
        if ports[0] == p {
            ports[1]
        } else {
            ports[0]
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n % 2 == 1 {
            return Err(KhError::OddBoundary(self.n));
        }
        if self.boundary_edges.len() != self.n {
            return Err(KhError::Malformed("boundary_edges length differs from n".into()));
        }
        if self.inner_boundary_edges.len() != self.inner.len() {
            return Err(KhError::Malformed("inner_boundary_edges length differs from inner".into()));
        }
        for (d, (m, es)) in self.inner.iter().zip(&self.inner_boundary_edges).enumerate() {
            if m % 2 == 1 {
                return Err(KhError::OddBoundary(*m));
            }
            if es.len() != *m {
                return Err(KhError::Malformed(format!("inner disk {d} has {} edges for {m} points", es.len())));
            }
        }
        if self.crossings.len() > 63 {
            return Err(KhError::Malformed("at most 63 crossings are supported".into()));
        }
        let ports = self.edge_ports();
        for (e, ps) in &ports {
            if ps.len() != 2 {
                return Err(KhError::Malformed(format!("edge {e} has {} endpoints", ps.len())));
            }
        }
        let mut loop_set = BTreeSet::new();
        for l in &self.loops {
            if ports.contains_key(l) || !loop_set.insert(*l) {
                return Err(KhError::Malformed(format!("loop {l} reuses an edge id")));
            }
        }
        self.check_planarity()
    }

    fn planar_graph(&self) -> PlanarGraph {
        let mut g = PlanarGraph { half: Vec::new(), rot: Vec::new(), sides: Vec::new() };
        let mut vertex_of: BTreeMap<Port, usize> = BTreeMap::new();
        // vertices: crossings, then outer points, then inner points
        for c in 0..self.crossings.len() {
            g.rot.push(vec![usize::MAX; 4]);
            for s in 0..4 {
                vertex_of.insert(Port::Slot { crossing: c, slot: s }, c);
            }
        }
        let outer_base = g.rot.len();
        for j in 0..self.n {
            g.rot.push(vec![usize::MAX; 3]);
            vertex_of.insert(Port::Outer(j), outer_base + j);
        }
        let mut inner_base = Vec::new();
        for (d, m) in self.inner.iter().enumerate() {
            inner_base.push(g.rot.len());
            for j in 0..*m {
                g.rot.push(vec![usize::MAX; 3]);
                vertex_of.insert(Port::Inner { disk: d, point: j }, g.rot.len() - 1);
            }
        }
        // position of a port in its vertex rotation
        let rot_pos = |p: Port| -> usize {
            match p {
                Port::Slot { slot, .. } => slot,
                Port::Outer(_) => 1,
                Port::Inner { .. } => 0,
            }
        };
        let add = |g: &mut PlanarGraph, a: (usize, usize), b: (usize, usize), sa: FaceSide, sb: FaceSide| {
            let h = g.half.len();
            g.half.push(a);
            g.half.push(b);
            g.rot[a.0][a.1] = h;
            g.rot[b.0][b.1] = h + 1;
            g.sides.push(sa);
            g.sides.push(sb);
        };
        for (e, ps) in self.edge_ports() {
            let (p0, p1) = (ps[0], ps[1]);
            add(
                &mut g,
                (vertex_of[&p0], rot_pos(p0)),
                (vertex_of[&p1], rot_pos(p1)),
                FaceSide::Edge { edge: e, from: p0, to: p1 },
                FaceSide::Edge { edge: e, from: p1, to: p0 },
            );
        }
        // outer point rotation: next point, inward edge, previous point
        for j in 0..self.n {
            let k = (j + 1) % self.n;
            add(
                &mut g,
                (outer_base + j, 0),
                (outer_base + k, 2),
                FaceSide::OuterArc { from: j, to: k },
                FaceSide::OuterArc { from: k, to: j },
            );
        }
        // inner point rotation: outward edge, next point, previous point
        for (d, m) in self.inner.iter().enumerate() {
            for j in 0..*m {
                let k = (j + 1) % m;
                add(
                    &mut g,
                    (inner_base[d] + j, 1),
                    (inner_base[d] + k, 2),
                    FaceSide::InnerArc { disk: d, from: j, to: k },
                    FaceSide::InnerArc { disk: d, from: k, to: j },
                );
            }
        }
        g
    }

    fn check_planarity(&self) -> Result<()> {
        let g = self.planar_graph();
        let nv = g.rot.len();
        let mut uf = UnionFind::new(nv);
        for h in (0..g.half.len()).step_by(2) {
            uf.union(g.half[h].0, g.half[h + 1].0);
        }
        let (label, k) = uf.labels();
        let mut v = vec![0i64; k];
        let mut e = vec![0i64; k];
        let mut f = vec![0i64; k];
        for x in 0..nv {
            v[label[x]] += 1;
        }
        for h in (0..g.half.len()).step_by(2) {
            e[label[g.half[h].0]] += 1;
        }
        let faces = g.faces();
        for face in &faces {
            f[label[g.half[face[0]].0]] += 1;
        }
        for c in 0..k {
            if v[c] - e[c] + f[c] != 2 {
                return Err(KhError::NonPlanar(format!(
                    "component with V={} E={} F={} is not planar",
                    v[c], e[c], f[c]
                )));
            }
        }
        // the outer circle must bound the exterior and each inner circle a hole
        let side_set = |face: &Vec<usize>| -> BTreeSet<usize> { face.iter().copied().collect() };
        let sets: Vec<BTreeSet<usize>> = faces.iter().map(side_set).collect();
        let outer_halves: BTreeSet<usize> = (0..g.half.len())
            .filter(|h| h % 2 == 1 && matches!(g.sides[*h], FaceSide::OuterArc { .. }))
            .collect();
        if self.n > 0 && !sets.contains(&outer_halves) {
            return Err(KhError::NonPlanar("tangle edges leave the outer disk".into()));
        }
        for (d, m) in self.inner.iter().enumerate() {
            if *m == 0 {
                continue;
            }
            let hole: BTreeSet<usize> = (0..g.half.len())
                .filter(|h| h % 2 == 0 && matches!(g.sides[*h], FaceSide::InnerArc { disk, .. } if disk == d))
                .collect();
            if !sets.contains(&hole) {
                return Err(KhError::NonPlanar(format!("tangle edges enter inner disk {d}")));
            }
        }
        Ok(())
    }

    /// Faces of the diagram, each a cyclic list of sides with the face on the left.
    /// Loops are not part of any face.
    pub fn faces(&self) -> Vec<Vec<FaceSide>> {
        let g = self.planar_graph();
        g.faces().into_iter().map(|f| f.into_iter().map(|h| g.sides[h]).collect()).collect()
    }
}

/// A component of a resolved tangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlatComponent {
    Arc(usize),
    Circle(CircleId),
}

/// A complete resolution: boundary arcs, closed circles and where each edge went.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatDiskularTangle {
    /// Arcs between boundary ports, each with the smaller port first, sorted.
    pub arcs: Vec<(Port, Port)>,
    /// Circle ids (minimum edge id on the circle), sorted.
    pub circles: Vec<CircleId>,
    pub provenance: BTreeMap<EdgeId, FlatComponent>,
}

impl DiskularTangle {
    pub fn resolve(&self, v: CubeVertex) -> Result<FlatDiskularTangle> {
        let edges: Vec<EdgeId> = self.all_edges().into_iter().collect();
        let idx: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut uf = UnionFind::new(edges.len());
        for (c, x) in self.crossings.iter().enumerate() {
            for (s, t) in smoothing_pairs(v >> c & 1 == 1) {
                uf.union(idx[&x[s]], idx[&x[t]]);
            }
        }
        let mut comp_edges: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
        for e in &edges {
            comp_edges.entry(uf.find(idx[e])).or_default().push(*e);
        }
        let mut comp_ports: BTreeMap<usize, Vec<Port>> = BTreeMap::new();
        for (p, e) in self.port_list() {
            if !matches!(p, Port::Slot { .. }) {
                comp_ports.entry(uf.find(idx[&e])).or_default().push(p);
            }
        }
        let mut arcs = Vec::new();
        let mut circles = Vec::new();
        let mut label: BTreeMap<usize, FlatComponent> = BTreeMap::new();
        for (root, es) in &comp_edges {
            match comp_ports.get(root).map(|v| v.as_slice()) {
                None => {
                    let id = *es.iter().min().unwrap();
                    circles.push(id);
                    label.insert(*root, FlatComponent::Circle(id));
                }
                Some([a, b]) => {
                    arcs.push(((*a).min(*b), (*a).max(*b)));
                    label.insert(*root, FlatComponent::Arc(usize::MAX));
                }
                Some(ps) => {
                    return Err(KhError::Malformed(format!("resolution component meets {} boundary points", ps.len())))
                }
            }
        }
        arcs.sort();
        circles.sort();
        let mut provenance = BTreeMap::new();
        for e in &edges {
            let root = uf.find(idx[e]);
            let c = match label[&root] {
                FlatComponent::Circle(id) => FlatComponent::Circle(id),
                FlatComponent::Arc(_) => {
                    let ports = &comp_ports[&root];
                    let key = (ports[0].min(ports[1]), ports[0].max(ports[1]));
                    FlatComponent::Arc(arcs.binary_search(&key).unwrap())
                }
            };
            provenance.insert(*e, c);
        }
        Ok(FlatDiskularTangle { arcs, circles, provenance })
    }

    /// Rewrite edge ids through `f`; classes of edges left without ports become loops.
    fn rebuild(&self, f: impl Fn(EdgeId) -> EdgeId, classes: impl IntoIterator<Item = EdgeId>) -> DiskularTangle {
        let crossings: Vec<[EdgeId; 4]> = self.crossings.iter().map(|x| x.map(&f)).collect();
        let boundary_edges: Vec<EdgeId> = self.boundary_edges.iter().map(|e| f(*e)).collect();
        let inner_boundary_edges: Vec<Vec<EdgeId>> =
            self.inner_boundary_edges.iter().map(|es| es.iter().map(|e| f(*e)).collect()).collect();
        let mut used: BTreeSet<EdgeId> = crossings.iter().flatten().copied().collect();
        used.extend(boundary_edges.iter().copied());
        used.extend(inner_boundary_edges.iter().flatten().copied());
        let mut loops: BTreeSet<EdgeId> = self.loops.iter().map(|e| f(*e)).collect();
        loops.extend(classes.into_iter().map(&f).filter(|e| !used.contains(e)));
        DiskularTangle {
            n: self.n,
            inner: self.inner.clone(),
            crossings,
            boundary_edges,
            inner_boundary_edges,
            loops: loops.into_iter().collect(),
            p: self.p,
        }
    }

    /// Map every edge to the smallest id in its class after joining `pairs`.
    fn edge_classes(edges: &BTreeSet<EdgeId>, pairs: &[(EdgeId, EdgeId)]) -> BTreeMap<EdgeId, EdgeId> {
        let list: Vec<EdgeId> = edges.iter().copied().collect();
        let idx: BTreeMap<EdgeId, usize> = list.iter().enumerate().map(|(k, e)| (*e, k)).collect();
        let mut uf = UnionFind::new(list.len());
        for (a, b) in pairs {
            uf.union(idx[a], idx[b]);
        }
        let mut rep: BTreeMap<usize, EdgeId> = BTreeMap::new();
        for e in &list {
            let cur = rep.entry(uf.find(idx[e])).or_insert(*e);
            *cur = (*cur).min(*e);
        }
        list.iter().map(|e| (*e, rep[&uf.find(idx[e])])).collect()
    }

    /// Plug `s` into inner disk `i`; `s`'s edge ids are shifted above this tangle's.
    pub fn compose(&self, i: usize, s: &DiskularTangle) -> Result<DiskularTangle> {
        Ok(self.compose_with_map(i, s)?.0)
    }

    /// `compose` together with the new id of every edge of `self` and of `s`.
    pub fn compose_with_map(&self, i: usize, s: &DiskularTangle) -> Result<ComposeResult> {
        if i >= self.inner.len() || self.inner[i] != s.n {
            return Err(KhError::Arity(format!(
                "cannot plug a tangle with {} endpoints into inner disk {i} of {:?}",
                s.n, self.inner
            )));
        }
        let off = self.max_edge() + 1;
        let sh = |e: &EdgeId| e + off;
        let mut inner = self.inner[..i].to_vec();
        inner.extend(s.inner.iter().copied());
        inner.extend(self.inner[i + 1..].iter().copied());
        let mut ibe = self.inner_boundary_edges[..i].to_vec();
        ibe.extend(s.inner_boundary_edges.iter().map(|es| es.iter().map(sh).collect::<Vec<_>>()));
        ibe.extend(self.inner_boundary_edges[i + 1..].iter().cloned());
        let mut crossings = self.crossings.clone();
        crossings.extend(s.crossings.iter().map(|x| x.map(|e| e + off)));
        let mut loops = self.loops.clone();
        loops.extend(s.loops.iter().map(sh));
        let pairs: Vec<(EdgeId, EdgeId)> =
            self.inner_boundary_edges[i].iter().zip(&s.boundary_edges).map(|(a, b)| (*a, b + off)).collect();
        let glued = DiskularTangle {
            n: self.n,
            inner,
            crossings,
            boundary_edges: self.boundary_edges.clone(),
            inner_boundary_edges: ibe,
            loops,
            p: self.p + s.p,
        };
        let mut all = glued.all_edges();
        for (a, b) in &pairs {
            all.insert(*a);
            all.insert(*b);
        }
        let map = Self::edge_classes(&all, &pairs);
        let edges: Vec<EdgeId> = all.into_iter().collect();
        let out = glued.rebuild(|e| map[&e], edges.clone());
        out.validate()?;
        let outer_map = self.all_edges().iter().map(|e| (*e, map[e])).collect();
        let inner_map = s.all_edges().iter().map(|e| (*e, map[&(e + off)])).collect();
        Ok((out, outer_map, inner_map))
    }

    /// Plug a tangle into every inner disk, first disk first.
    pub fn compose_all(&self, parts: &[DiskularTangle]) -> Result<DiskularTangle> {
        if parts.len() != self.inner.len() {
            return Err(KhError::Arity(format!("{} tangles for {} inner disks", parts.len(), self.inner.len())));
        }
        let mut t = self.clone();
        for (k, s) in parts.iter().enumerate().rev() {
            t = t.compose(k, s)?;
        }
        Ok(t)
    }

    fn reversed_crossings(&self) -> Vec<[EdgeId; 4]> {
        self.crossings.iter().map(|[a, b, c, d]| [*a, *d, *c, *b]).collect()
    }

    /// Reflection of a `(;n)` tangle across the line through its first and last
    /// boundary positions; point `j` goes to `n - 1 - j` and crossing types flip.
    pub fn mirror(&self) -> Result<DiskularTangle> {
        if !self.inner.is_empty() {
            return Err(KhError::InnerDisks);
        }
        Ok(DiskularTangle {
            crossings: self.reversed_crossings(),
            boundary_edges: self.boundary_edges.iter().rev().copied().collect(),
            p: self.num_crossings() as i64 - self.p,
            ..self.clone()
        })
    }

    /// Reflection of a `(;n)` tangle through its boundary circle, giving an `(n;)`
    /// tangle whose inner disk carries the old boundary points in the same order.
    pub fn radial_mirror(&self) -> Result<DiskularTangle> {
        if !self.inner.is_empty() {
            return Err(KhError::InnerDisks);
        }
        Ok(DiskularTangle {
            n: 0,
            inner: vec![self.n],
            crossings: self.reversed_crossings(),
            boundary_edges: vec![],
            inner_boundary_edges: vec![self.boundary_edges.clone()],
            loops: self.loops.clone(),
            p: self.num_crossings() as i64 - self.p,
        })
    }

    /// The closed diagram `b̄ ∘ T ∘ (a_1, …, a_k)`. Edge ids of `T` are kept, with
    /// joined edges taking the smallest id.
    pub fn close(&self, caps: &[CrossinglessMatching], b: &CrossinglessMatching) -> Result<DiskularTangle> {
        Ok(self.close_with_map(caps, b)?.0)
    }

    /// `close` together with the id each edge of `T` carries in the closed diagram.
    pub fn close_with_map(
        &self,
        caps: &[CrossinglessMatching],
        b: &CrossinglessMatching,
    ) -> Result<(DiskularTangle, BTreeMap<EdgeId, EdgeId>)> {
        if caps.len() != self.inner.len() || caps.iter().zip(&self.inner).any(|(a, m)| a.n != *m) || b.n != self.n {
            return Err(KhError::Arity("capping matchings do not fit the tangle".into()));
        }
        let mut pairs = Vec::new();
        for (d, a) in caps.iter().enumerate() {
            for (i, j) in &a.pairs {
                pairs.push((self.inner_boundary_edges[d][i - 1], self.inner_boundary_edges[d][j - 1]));
            }
        }
        for (i, j) in &b.pairs {
            pairs.push((self.boundary_edges[i - 1], self.boundary_edges[j - 1]));
        }
        let all = self.all_edges();
        let map = Self::edge_classes(&all, &pairs);
        let crossings: Vec<[EdgeId; 4]> = self.crossings.iter().map(|x| x.map(|e| map[&e])).collect();
        let used: BTreeSet<EdgeId> = crossings.iter().flatten().copied().collect();
        let loops: BTreeSet<EdgeId> = all.iter().map(|e| map[e]).filter(|e| !used.contains(e)).collect();
        let joined =
            DiskularTangle { crossings, loops: loops.into_iter().collect(), p: self.p, ..DiskularTangle::empty() };
        joined.validate()?;
        Ok((joined, map))
    }
}

impl DiskularTangle {
    /// Crossing signs (+1 or -1) from the convention that slot 0 is an incoming
    /// under-strand end. `None` when some strand is never an under-strand, so its
    /// direction is not recorded in the code.
    pub fn crossing_signs(&self) -> Option<Vec<i8>> {
        let n = self.crossings.len();
        // incoming[c][s]: whether the strand enters crossing c at slot s
        let mut incoming: Vec<[Option<bool>; 4]> = vec![[None; 4]; n];
        let mut stack: Vec<(usize, usize, bool)> = Vec::new();
        for c in 0..n {
            stack.push((c, 0, true));
        }
        while let Some((c, s, inc)) = stack.pop() {
            match incoming[c][s] {
                Some(x) if x == inc => continue,
                Some(_) => return None,
                None => incoming[c][s] = Some(inc),
            }
            // straight through the crossing
            stack.push((c, (s + 2) % 4, !inc));
            // along the edge to the next port
            if let Port::Slot { crossing, slot } = self.opposite(Port::Slot { crossing: c, slot: s }) {
                stack.push((crossing, slot, !inc));
            }
        }
        incoming
            .iter()
            .map(|x| x[3].map(|d_in| if d_in { 1 } else { -1 }))
            .collect()
    }

    /// Number of positive crossings, when every strand direction is determined.
    pub fn positive_crossings(&self) -> Option<i64> {
        self.crossing_signs().map(|s| s.iter().filter(|x| **x > 0).count() as i64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::enumerate_matchings;

    fn hopf() -> DiskularTangle {
        DiskularTangle::new(0, vec![], vec![[4, 1, 3, 2], [2, 3, 1, 4]], vec![], vec![], vec![], 0).unwrap()
    }

    fn one_crossing() -> DiskularTangle {
        DiskularTangle::new(4, vec![], vec![[1, 2, 3, 4]], vec![1, 2, 3, 4], vec![], vec![], 0).unwrap()
    }

    #[test]
    fn hopf_resolutions() {
        let h = hopf();
        let counts: Vec<usize> = (0..4).map(|v| h.resolve(v).unwrap().circles.len()).collect();
        assert_eq!(counts, vec![2, 1, 1, 2]);
    }

    #[test]
    fn one_crossing_resolutions() {
        let t = one_crossing();
        let r0 = t.resolve(0).unwrap();
        assert_eq!(r0.arcs, vec![(Port::Outer(0), Port::Outer(1)), (Port::Outer(2), Port::Outer(3))]);
        assert!(r0.circles.is_empty());
        let r1 = t.resolve(1).unwrap();
        assert_eq!(r1.arcs, vec![(Port::Outer(0), Port::Outer(3)), (Port::Outer(1), Port::Outer(2))]);
    }

    #[test]
    fn rejects_non_planar_boundary_order() {
        let bad = DiskularTangle::new(4, vec![], vec![[1, 2, 3, 4]], vec![1, 3, 2, 4], vec![], vec![], 0);
        assert!(matches!(bad, Err(KhError::NonPlanar(_))));
    }

    #[test]
    fn rejects_dangling_edges() {
        let bad = DiskularTangle::new(0, vec![], vec![[1, 2, 3, 5]], vec![], vec![], vec![], 0);
        assert!(matches!(bad, Err(KhError::Malformed(_))));
    }

    #[test]
    fn signs_from_orientation() {
        assert_eq!(hopf().crossing_signs(), Some(vec![-1, -1]));
        let tref = DiskularTangle::new(0, vec![], vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], vec![], vec![], vec![], 0)
            .unwrap();
        assert_eq!(tref.positive_crossings(), Some(0));
        let kink = DiskularTangle::new(0, vec![], vec![[1, 1, 2, 2]], vec![], vec![], vec![], 1).unwrap();
        assert_eq!(kink.positive_crossings(), Some(1));
    }

    #[test]
    fn trefoil_is_planar() {
        let t = DiskularTangle::new(0, vec![], vec![[1, 4, 2, 5], [3, 6, 4, 1], [5, 2, 6, 3]], vec![], vec![], vec![], 3);
        assert!(t.is_ok());
    }

    #[test]
    fn mirror_swaps_resolutions() {
        let t = one_crossing();
        let m = t.mirror().unwrap();
        let reflect = |p: Port| match p {
            Port::Outer(j) => Port::Outer(3 - j),
            other => other,
        };
        for v in 0..2u64 {
            let a = m.resolve(v).unwrap();
            let b = t.resolve(1 - v).unwrap();
            let mut arcs: Vec<(Port, Port)> = b
                .arcs
                .iter()
                .map(|(x, y)| (reflect(*x).min(reflect(*y)), reflect(*x).max(reflect(*y))))
                .collect();
            arcs.sort();
            assert_eq!(a.arcs, arcs);
        }
        assert_eq!(m.mirror().unwrap(), t);
    }

    #[test]
    fn closures_of_identity() {
        let ms = enumerate_matchings(4).unwrap();
        let id = DiskularTangle::identity(4);
        for a in &ms {
            for b in &ms {
                let c = id.close(std::slice::from_ref(a), b).unwrap();
                assert!(c.is_closed());
                assert_eq!(c.resolve(0).unwrap().circles.len(), a.circles_with(b));
            }
        }
        let m2 = enumerate_matchings(2).unwrap();
        let u = DiskularTangle::identity(2).close(&m2, &m2[0]).unwrap();
        assert_eq!(u.num_crossings(), 0);
        assert_eq!(u.loops.len(), 1);
    }

    #[test]
    fn composition_with_identity_and_caps() {
        let t = one_crossing();
        let same = DiskularTangle::identity(4).compose(0, &t).unwrap();
        assert_eq!(same.num_crossings(), 1);
        for v in 0..2 {
            assert_eq!(same.resolve(v).unwrap().arcs, t.resolve(v).unwrap().arcs);
        }
        // T ∘ a equals closing the inner disk of T by a
        let ms = enumerate_matchings(4).unwrap();
        let outer = t.radial_mirror().unwrap();
        for a in &ms {
            let closed = outer.compose(0, &DiskularTangle::from_matching(a)).unwrap();
            let direct = outer.close(std::slice::from_ref(a), &CrossinglessMatching::empty()).unwrap();
            for v in 0..2 {
                assert_eq!(closed.resolve(v).unwrap().circles.len(), direct.resolve(v).unwrap().circles.len());
            }
        }
    }

    #[test]
    fn composition_is_associative() {
        // a two-disk flat tangle: outer points joined radially to two inner disks
        let two = DiskularTangle::new(
            4,
            vec![2, 2],
            vec![],
            vec![1, 2, 3, 4],
            vec![vec![1, 2], vec![3, 4]],
            vec![],
            0,
        )
        .unwrap();
        let s1 = one_crossing().compose(0, &DiskularTangle::identity(4)).map(|_| ()).err();
        assert!(s1.is_some());
        let cup = DiskularTangle::from_matching(&enumerate_matchings(2).unwrap()[0]);
        let kink = DiskularTangle::new(2, vec![], vec![[1, 2, 2, 3]], vec![1, 3], vec![], vec![], 1).unwrap();
        let a = two.compose(1, &kink).unwrap().compose(0, &cup).unwrap();
        let b = two.compose_all(&[cup.clone(), kink.clone()]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.p, 1);
        for v in 0..2 {
            assert_eq!(a.resolve(v).unwrap().arcs.len(), 2);
            assert_eq!(a.resolve(v).unwrap().circles.len(), v as usize);
        }
    }
}
