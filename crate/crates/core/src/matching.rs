//! Crossingless matchings of boundary points `1..=n` on a circle.

use serde::{Deserialize, Serialize};

use crate::error::{KhError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CrossinglessMatching {
    pub n: usize,
    /// Pairs `(i, j)` with `i < j`, sorted by `i`; points are 1-based.
    pub pairs: Vec<(usize, usize)>,
}

/// Two chords on a circle cross when their endpoints interleave.
pub fn chords_cross(a: (usize, usize), b: (usize, usize)) -> bool {
    let (a0, a1) = (a.0.min(a.1), a.0.max(a.1));
    let (b0, b1) = (b.0.min(b.1), b.0.max(b.1));
    (a0 < b0 && b0 < a1 && a1 < b1) || (b0 < a0 && a0 < b1 && b1 < a1)
}

impl CrossinglessMatching {
    pub fn new(n: usize, pairs: Vec<(usize, usize)>) -> Result<Self> {
        if n % 2 == 1 {
            return Err(KhError::OddBoundary(n));
        }
        let mut seen = vec![false; n + 1];
        let mut norm: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let (i, j) = (a.min(b), a.max(b));
            if i == 0 || j > n || i == j || seen[i] || seen[j] {
                return Err(KhError::Malformed(format!("bad pair ({a},{b}) for {n} points")));
            }
            seen[i] = true;
            seen[j] = true;
            norm.push((i, j));
        }
        if norm.len() * 2 != n {
            return Err(KhError::Malformed("matching is not perfect".into()));
        }
        norm.sort_unstable();
        for (k, p) in norm.iter().enumerate() {
            if norm[k + 1..].iter().any(|q| chords_cross(*p, *q)) {
                return Err(KhError::Malformed(format!("pairs cross at {p:?}")));
            }
        }
        Ok(CrossinglessMatching { n, pairs: norm })
    }

    pub fn empty() -> Self {
        CrossinglessMatching { n: 0, pairs: Vec::new() }
    }

    /// The 1-based partner of point `i`.
    pub fn partner(&self, i: usize) -> usize {
        for (a, b) in &self.pairs {
            if *a == i {
                return *b;
            }
            if *b == i {
                return *a;
            }
        }
        panic!("point {i} not in matching on {} points", self.n)
    }

    /// Pairs ordered innermost first (by span), ties broken by left endpoint.
    pub fn innermost_first(&self) -> Vec<(usize, usize)> {
        let mut p = self.pairs.clone();
        p.sort_by_key(|(i, j)| (j - i, *i));
        p
    }

    /// Reflection `j -> n + 1 - j`.
    pub fn reflected(&self) -> Self {
        let n = self.n;
        let pairs = self.pairs.iter().map(|(i, j)| (n + 1 - j, n + 1 - i)).collect();
        CrossinglessMatching::new(n, pairs).expect("reflection keeps matchings crossingless")
    }

    /// Number of circles in the closed picture `a b̄` (self drawn inside, `other` outside).
    pub fn circles_with(&self, other: &CrossinglessMatching) -> usize {
        assert_eq!(self.n, other.n);
        let mut visited = vec![false; self.n + 1];
        let mut count = 0;
        for start in 1..=self.n {
            if visited[start] {
                continue;
            }
            count += 1;
            let mut p = start;
            loop {
                visited[p] = true;
                let q = self.partner(p);
                visited[q] = true;
                p = other.partner(q);
                if p == start {
                    break;
                }
            }
        }
        count
    }
}

/// All crossingless matchings of `n` points, in a fixed recursive order.
pub fn enumerate_matchings(n: usize) -> Result<Vec<CrossinglessMatching>> {
    if n % 2 == 1 {
        return Err(KhError::OddBoundary(n));
    }
    let points: Vec<usize> = (1..=n).collect();
    Ok(pairings(&points)
        .into_iter()
        .map(|p| CrossinglessMatching::new(n, p).expect("recursive construction is crossingless"))
        .collect())
}

fn pairings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    // the first point pairs with a point leaving an even number on each side
    for k in (1..points.len()).step_by(2) {
        let inside = pairings(&points[1..k]);
        let outside = pairings(&points[k + 1..]);
        for i in &inside {
            for o in &outside {
                let mut p = vec![(points[0], points[k])];
                p.extend(i.iter().copied());
                p.extend(o.iter().copied());
                out.push(p);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_perfect_matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
        if points.is_empty() {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for k in 1..points.len() {
            let rest: Vec<usize> = points[1..].iter().copied().filter(|p| *p != points[k]).collect();
            for mut m in all_perfect_matchings(&rest) {
                m.push((points[0], points[k]));
                out.push(m);
            }
        }
        out
    }

    /// Chords drawn as straight segments between points on the unit circle.
    fn segments_intersect(a: (usize, usize), b: (usize, usize), n: usize) -> bool {
        let pt = |i: usize| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            (t.cos(), t.sin())
        };
        let orient = |p: (f64, f64), q: (f64, f64), r: (f64, f64)| (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0);
        let (p1, p2, p3, p4) = (pt(a.0), pt(a.1), pt(b.0), pt(b.1));
        orient(p1, p2, p3) * orient(p1, p2, p4) < 0.0 && orient(p3, p4, p1) * orient(p3, p4, p2) < 0.0
    }

    #[test]
    fn catalan_counts() {
        let counts: Vec<usize> = (0..=10).step_by(2).map(|n| enumerate_matchings(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 14, 42]);
        assert!(enumerate_matchings(3).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for n in (0..=8).step_by(2) {
            let points: Vec<usize> = (1..=n).collect();
            let mut brute: Vec<CrossinglessMatching> = all_perfect_matchings(&points)
                .into_iter()
                .filter(|m| {
                    m.iter().enumerate().all(|(k, p)| m[k + 1..].iter().all(|q| !segments_intersect(*p, *q, n)))
                })
                .map(|m| CrossinglessMatching::new(n, m).unwrap())
                .collect();
            brute.sort();
            let mut ours = enumerate_matchings(n).unwrap();
            ours.sort();
            assert_eq!(ours, brute);
        }
    }

    #[test]
    fn predicate_agrees_with_geometry() {
        let pts: Vec<usize> = (1..=8).collect();
        for m in all_perfect_matchings(&pts) {
            for a in &m {
                for b in &m {
                    if a != b {
                        assert_eq!(chords_cross(*a, *b), segments_intersect(*a, *b, 8));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_crossing_pairs() {
        assert!(CrossinglessMatching::new(4, vec![(1, 3), (2, 4)]).is_err());
        assert!(CrossinglessMatching::new(4, vec![(1, 2)]).is_err());
    }

    #[test]
    fn circle_counts() {
        let ms = enumerate_matchings(4).unwrap();
        assert_eq!(ms[0].circles_with(&ms[0]), 2);
        assert_eq!(ms[0].circles_with(&ms[1]), 1);
        let total: usize = ms.iter().flat_map(|a| ms.iter().map(move |b| 1usize << a.circles_with(b))).sum();
        assert_eq!(total, 12);
    }

    #[test]
    fn reflection_reverses_nesting() {
        let m = CrossinglessMatching::new(6, vec![(1, 2), (3, 6), (4, 5)]).unwrap();
        assert_eq!(m.reflected().pairs, vec![(1, 4), (2, 3), (5, 6)]);
        assert_eq!(m.reflected().reflected(), m);
    }
}
