//! Kauffman-bracket state sum for the unnormalized Jones polynomial, written
//! without any of the chain-complex machinery so it can serve as an oracle.

use std::collections::BTreeMap;

use crate::error::{KhError, Result};
use crate::tangle::DiskularTangle;

/// Laurent polynomial in `q`: exponent -> coefficient, no zero entries.
pub type Laurent = BTreeMap<i64, i64>;

fn mul(a: &Laurent, b: &Laurent) -> Laurent {
    let mut out = Laurent::new();
    for (i, x) in a {
        for (j, y) in b {
            *out.entry(i + j).or_insert(0) += x * y;
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn add_into(acc: &mut Laurent, a: &Laurent) {
    for (i, x) in a {
        *acc.entry(*i).or_insert(0) += x;
    }
    acc.retain(|_, v| *v != 0);
}

fn monomial(k: i64, c: i64) -> Laurent {
    [(k, c)].into_iter().collect()
}

fn count_loops(n: usize, joins: &[(usize, usize)]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for (a, b) in joins {
        let (ra, rb) = (root(&mut parent, *a), root(&mut parent, *b));
        if ra != rb {
            parent[ra] = rb;
            comps -= 1;
        }
    }
    comps
}

/// Unnormalized Jones polynomial of the mirror of a closed diagram, with the
/// unknot evaluating to `q + q^-1`; `P` is read as the positive crossing count.
pub fn jones_oracle(d: &DiskularTangle) -> Result<Laurent> {
    if !d.is_closed() {
        return Err(KhError::Precondition("the state sum needs a closed diagram".into()));
    }
    let edges: Vec<u32> = d.all_edges().into_iter().collect();
    let pos = |e: u32| edges.binary_search(&e).unwrap();
    let n = d.crossings.len() as i64;
    let p = d.p;
    // in the mirror, every crossing type flips: its A-smoothing pairs slots (0,3),(1,2)
    let circle: Laurent = [(-1, 1), (1, 1)].into_iter().collect();
    let mut sum = Laurent::new();
    for state in 0u64..(1u64 << n) {
        let mut joins = Vec::new();
        let mut b_count = 0;
        for (c, x) in d.crossings.iter().enumerate() {
            let a_smoothing = state >> c & 1 == 0;
            if a_smoothing {
                joins.push((pos(x[0]), pos(x[3])));
                joins.push((pos(x[1]), pos(x[2])));
            } else {
                b_count += 1;
                joins.push((pos(x[0]), pos(x[1])));
                joins.push((pos(x[2]), pos(x[3])));
            }
        }
        let k = count_loops(edges.len(), &joins);
        let mut term = monomial(b_count, if b_count % 2 == 0 { 1 } else { -1 });
        for _ in 0..k {
            term = mul(&term, &circle);
        }
        add_into(&mut sum, &term);
    }
    // mirror has N - P positive and P negative crossings
    let (np, nm) = (n - p, p);
    let norm = monomial(np - 2 * nm, if nm % 2 == 0 { 1 } else { -1 });
    Ok(mul(&norm, &sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::diagram;

    fn poly(terms: &[(i64, i64)]) -> Laurent {
        terms.iter().copied().collect()
    }

    #[test]
    fn unknot_and_unlink() {
        assert_eq!(jones_oracle(&diagram("unknot").unwrap()).unwrap(), poly(&[(-1, 1), (1, 1)]));
        assert_eq!(jones_oracle(&diagram("unlink2").unwrap()).unwrap(), poly(&[(-2, 1), (0, 2), (2, 1)]));
        assert_eq!(jones_oracle(&diagram("empty").unwrap()).unwrap(), poly(&[(0, 1)]));
    }

    #[test]
    fn trefoil_mirror() {
        // the bundled trefoil is left-handed; its mirror has q + q^3 + q^5 - q^9
        assert_eq!(jones_oracle(&diagram("trefoil").unwrap()).unwrap(), poly(&[(1, 1), (3, 1), (5, 1), (9, -1)]));
    }

    #[test]
    fn kinks_are_invisible() {
        for (x, p) in [([1, 1, 2, 2], 1), ([1, 2, 2, 1], 0)] {
            let d = DiskularTangle::new(0, vec![], vec![x], vec![], vec![], vec![], p).unwrap();
            assert_eq!(jones_oracle(&d).unwrap(), poly(&[(-1, 1), (1, 1)]));
        }
    }
}
