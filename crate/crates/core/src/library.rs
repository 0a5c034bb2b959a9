//! Diagrams shipped with the crate.

use crate::error::{KhError, Result};
use crate::io::parse_tangle;
use crate::tangle::DiskularTangle;

/// Closed diagrams by name. `k1` is the (5,1) torus knot with a meridian; `8_19`
/// is a closed 4-strand braid; `5_2` and `k1` are the two smoothings of its third
/// crossing.
pub const DIAGRAMS: &[(&str, &str)] = &[
    ("empty", include_str!("../data/empty.json")),
    ("unknot", include_str!("../data/unknot.json")),
    ("unlink2", include_str!("../data/unlink2.json")),
    ("hopf", include_str!("../data/hopf.json")),
    ("trefoil", include_str!("../data/trefoil.json")),
    ("5_1", include_str!("../data/5_1.json")),
    ("5_2", include_str!("../data/5_2.json")),
    ("k1", include_str!("../data/k1.json")),
    ("8_19", include_str!("../data/8_19.json")),
];

pub fn diagram(name: &str) -> Result<DiskularTangle> {
    DIAGRAMS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| KhError::UnknownSelector(name.to_string()))
        .and_then(|(_, s)| parse_tangle(s))
}

pub fn all_diagrams() -> Vec<(&'static str, DiskularTangle)> {
    DIAGRAMS.iter().map(|(n, s)| (*n, parse_tangle(s).expect("bundled diagram parses"))).collect()
}

/// Open tangles with an outer boundary and at most two crossings.
pub const TANGLES: &[(&str, &str)] = &[
    ("arc", include_str!("../data/tangles/arc.json")),
    ("kinked_arc", include_str!("../data/tangles/kinked_arc.json")),
    ("cup_pair", include_str!("../data/tangles/cup_pair.json")),
    ("nested_cups", include_str!("../data/tangles/nested_cups.json")),
    ("one_crossing", include_str!("../data/tangles/one_crossing.json")),
    ("one_crossing_positive", include_str!("../data/tangles/one_crossing_positive.json")),
    ("twist", include_str!("../data/tangles/twist.json")),
    ("crossing_and_kink", include_str!("../data/tangles/crossing_and_kink.json")),
    ("two_kinks", include_str!("../data/tangles/two_kinks.json")),
];

pub fn tangle(name: &str) -> Result<DiskularTangle> {
    TANGLES
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| KhError::UnknownSelector(name.to_string()))
        .and_then(|(_, s)| parse_tangle(s))
}

pub fn all_tangles() -> Vec<(&'static str, DiskularTangle)> {
    TANGLES.iter().map(|(n, s)| (*n, parse_tangle(s).expect("bundled tangle parses"))).collect()
}

/// Index of the crossing of `8_19` whose smoothings give `5_2` and `k1`.
pub const CIRCLED_CROSSING: usize = 2;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_diagrams_parse() {
        for (name, t) in all_diagrams() {
            assert!(t.is_closed(), "{name}");
            if name != "k1" {
                if let Some(p) = t.positive_crossings() {
                    assert_eq!(p, t.p, "{name}");
                }
            }
        }
    }

    #[test]
    fn bundled_tangles_parse() {
        for (name, t) in all_tangles() {
            assert!(t.n > 0 && t.inner.is_empty() && t.num_crossings() <= 2, "{name}");
        }
    }
}
