//! Random tangles built by stacking annular layers: one crossing, one cap, or one cup.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::matching::{enumerate_matchings, CrossinglessMatching};
use crate::tangle::{DiskularTangle, EdgeId};

/// `(k;k)` layer: radial strands with one crossing between strands `j` and `j+1`.
/// `twist` picks which of the two crossings is drawn.
pub fn crossing_layer(k: usize, j: usize, twist: bool, p: i64) -> Result<DiskularTangle> {
    let inner: Vec<EdgeId> = (1..=k as EdgeId).collect();
    let mut outer = inner.clone();
    let (oj, oj1) = (k as EdgeId + 1, k as EdgeId + 2);
    outer[j] = oj;
    outer[j + 1] = oj1;
    let (ij, ij1) = (inner[j], inner[j + 1]);
    let mut last = None;
    for cyc in [[ij, ij1, oj1, oj], [ij, oj, oj1, ij1]] {
        let mut x = cyc;
        if twist {
            x.rotate_left(1);
        }
        match DiskularTangle::new(k, vec![k], vec![x], outer.clone(), vec![inner.clone()], vec![], p) {
            Ok(t) => return Ok(t),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("two attempts were made"))
}

/// `(k;k-2)` layer joining inner points `j` and `j+1`.
pub fn cap_layer(k: usize, j: usize) -> Result<DiskularTangle> {
    let mut inner: Vec<EdgeId> = (1..=k as EdgeId).collect();
    inner[j + 1] = inner[j];
    let outer: Vec<EdgeId> = (0..k).filter(|i| *i != j && *i != j + 1).map(|i| i as EdgeId + 1).collect();
    DiskularTangle::new(k - 2, vec![k], vec![], outer, vec![inner], vec![], 0)
}

/// `(k;k+2)` layer joining outer points `j` and `j+1`.
pub fn cup_layer(k: usize, j: usize) -> Result<DiskularTangle> {
    let inner: Vec<EdgeId> = (1..=k as EdgeId).collect();
    let cup = k as EdgeId + 1;
    let mut outer = Vec::with_capacity(k + 2);
    outer.extend_from_slice(&inner[..j]);
    outer.push(cup);
    outer.push(cup);
    outer.extend_from_slice(&inner[j..]);
    DiskularTangle::new(k + 2, vec![k], vec![], outer, vec![inner], vec![], 0)
}

enum Layer {
    Crossing,
    Cap,
    Cup,
}

fn random_layers<R: Rng>(rng: &mut R, m: usize, n: usize, crossings: usize) -> Vec<Layer> {
    let mut layers: Vec<Layer> = Vec::new();
    let mut k = m;
    let mut left = crossings;
    while k != n || left > 0 {
        let cross_ok = left > 0 && k >= 2;
        let choice = if cross_ok && rng.gen_bool(0.6) {
            Layer::Crossing
        } else if k < n || (k < 2 && left > 0) {
            Layer::Cup
        } else if k > n {
            Layer::Cap
        } else if cross_ok {
            Layer::Crossing
        } else {
            Layer::Cup
        };
        match choice {
            Layer::Crossing => left -= 1,
            Layer::Cap => k -= 2,
            Layer::Cup => k += 2,
        }
        layers.push(choice);
    }
    layers
}

fn stack<R: Rng>(rng: &mut R, mut acc: DiskularTangle, m: usize, n: usize, crossings: usize) -> Result<DiskularTangle> {
    let mut k = m;
    for layer in random_layers(rng, m, n, crossings) {
        let l = match layer {
            Layer::Crossing => {
                let j = rng.gen_range(0..k - 1);
                crossing_layer(k, j, rng.gen_bool(0.5), rng.gen_range(0..=1))?
            }
            Layer::Cap => {
                let j = rng.gen_range(0..k - 1);
                k -= 2;
                cap_layer(k + 2, j)?
            }
            Layer::Cup => {
                let j = rng.gen_range(0..=k);
                k += 2;
                cup_layer(k - 2, j)?
            }
        };
        acc = l.compose(0, &acc)?;
    }
    Ok(acc)
}

/// A random `(m;n)` tangle with exactly `crossings` crossings.
pub fn random_annular_tangle<R: Rng>(rng: &mut R, m: usize, n: usize, crossings: usize) -> Result<DiskularTangle> {
    stack(rng, DiskularTangle::identity(m), m, n, crossings)
}

/// A random `(;n)` tangle with exactly `crossings` crossings.
pub fn random_disk_tangle<R: Rng>(rng: &mut R, n: usize, crossings: usize) -> Result<DiskularTangle> {
    let start = if n >= 2 && rng.gen_bool(0.5) { n - 2 } else { n };
    let base = enumerate_matchings(start)?.choose(rng).cloned().expect("at least one matching");
    stack(rng, DiskularTangle::from_matching(&base), start, n, crossings)
}

/// A braid on `n` strands, `length` crossings long, closed off below by a random matching:
/// isotopic to boundary-parallel arcs.
pub fn random_bridge_tangle<R: Rng>(rng: &mut R, n: usize, length: usize) -> Result<DiskularTangle> {
    let base = enumerate_matchings(n)?.choose(rng).cloned().expect("at least one matching");
    let mut acc = DiskularTangle::from_matching(&base);
    for _ in 0..length {
        let j = rng.gen_range(0..n - 1);
        acc = crossing_layer(n, j, rng.gen_bool(0.5), rng.gen_range(0..=1))?.compose(0, &acc)?;
    }
    Ok(acc)
}

/// Three crossings on six points forming a triangle, ready for a Reidemeister III move;
/// `twists` picks the type of each crossing.
pub fn braid_triangle(twists: [bool; 3]) -> Result<DiskularTangle> {
    let l0 = crossing_layer(6, 0, twists[0], 0)?;
    let l1 = crossing_layer(6, 1, twists[1], 0)?;
    let l2 = crossing_layer(6, 0, twists[2], 0)?;
    let m = DiskularTangle::from_matching(&CrossinglessMatching::new(6, vec![(1, 6), (2, 5), (3, 4)])?);
    l2.compose(0, &l1.compose(0, &l0.compose(0, &m)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn layers_are_planar() {
        for k in [2, 4, 6] {
            for j in 0..k - 1 {
                crossing_layer(k, j, false, 0).unwrap();
                crossing_layer(k, j, true, 1).unwrap();
                cap_layer(k, j).unwrap();
            }
            for j in 0..=k {
                cup_layer(k, j).unwrap();
            }
        }
    }

    #[test]
    fn random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let m = [2, 4][rng.gen_range(0..2)];
            let n = [0, 2, 4][rng.gen_range(0..3)];
            let c = rng.gen_range(0..=3);
            let t = random_annular_tangle(&mut rng, m, n, c).unwrap();
            assert_eq!((t.n, t.inner.clone(), t.num_crossings()), (n, vec![m], c));
            let s = random_disk_tangle(&mut rng, m, c).unwrap();
            assert_eq!((s.n, s.inner.len(), s.num_crossings()), (m, 0, c));
        }
    }
}
