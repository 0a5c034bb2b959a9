//! JSON encodings of diagrams, movies and integer matrices.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize, Serializer};

use crate::cobordism::{Movie, Step};
use crate::error::{KhError, Result};
use crate::linalg::SparseMatrix;
use crate::tangle::{DiskularTangle, EdgeId};

/// Diskular planar-diagram code. `P` may be omitted for closed diagrams whose
/// strand directions are all recorded, in which case it is the positive crossing count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiskularPdJson {
    #[serde(default)]
    pub n: usize,
    #[serde(default)]
    pub inner: Vec<usize>,
    #[serde(default)]
    pub crossings: Vec<[EdgeId; 4]>,
    #[serde(default)]
    pub boundary_edges: Vec<EdgeId>,
    #[serde(default)]
    pub inner_boundary_edges: Vec<Vec<EdgeId>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loops: Vec<EdgeId>,
    #[serde(rename = "P", default)]
    pub p: Option<i64>,
}

impl DiskularPdJson {
    pub fn to_tangle(&self) -> Result<DiskularTangle> {
        let mut t = DiskularTangle {
            n: self.n,
            inner: self.inner.clone(),
            crossings: self.crossings.clone(),
            boundary_edges: self.boundary_edges.clone(),
            inner_boundary_edges: self.inner_boundary_edges.clone(),
            loops: self.loops.clone(),
            p: 0,
        };
        t.validate()?;
        t.p = match self.p {
            Some(p) => p,
            None => t
                .positive_crossings()
                .ok_or_else(|| KhError::Parse("P is missing and strand directions are incomplete".into()))?,
        };
        Ok(t)
    }

    pub fn from_tangle(t: &DiskularTangle) -> Self {
        DiskularPdJson {
            n: t.n,
            inner: t.inner.clone(),
            crossings: t.crossings.clone(),
            boundary_edges: t.boundary_edges.clone(),
            inner_boundary_edges: t.inner_boundary_edges.clone(),
            loops: t.loops.clone(),
            p: Some(t.p),
        }
    }
}

pub fn parse_tangle(s: &str) -> Result<DiskularTangle> {
    let j: DiskularPdJson = serde_json::from_str(s).map_err(|e| KhError::Parse(e.to_string()))?;
    j.to_tangle()
}

pub fn tangle_to_json(t: &DiskularTangle) -> String {
    serde_json::to_string(&DiskularPdJson::from_tangle(t)).expect("serializable")
}

/// A movie: a starting diagram and the elementary steps applied to it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MovieJson {
    pub start: DiskularPdJson,
    pub steps: Vec<Step>,
}

/// Parse a movie and check that its steps compose.
pub fn parse_movie(s: &str) -> Result<Movie> {
    let j: MovieJson = serde_json::from_str(s).map_err(|e| KhError::Parse(e.to_string()))?;
    let m = Movie::new(j.start.to_tangle()?, j.steps);
    m.apply()?;
    Ok(m)
}

pub fn movie_to_json(m: &Movie) -> String {
    serde_json::to_string(&MovieJson { start: DiskularPdJson::from_tangle(&m.start), steps: m.steps.clone() }).expect("serializable")
}

/// An integer as a JSON number, or as a decimal string when it does not fit in 64 bits.
pub fn integer_value(x: &BigInt) -> serde_json::Value {
    match x.to_i64() {
        Some(v) => v.into(),
        None => x.to_string().into(),
    }
}

/// Edge renamings from JSON objects, whose keys are always strings. Tagged enums buffer
/// their fields, which loses serde_json's own parsing of numeric keys.
pub fn edge_map<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<EdgeId, EdgeId>, D::Error> {
    let raw = BTreeMap::<String, EdgeId>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(|_| serde::de::Error::custom(format!("edge `{k}` is not a number"))))
        .collect()
}

pub fn serialize_rows<S: Serializer>(rows: &[Vec<BigInt>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let v: Vec<Vec<serde_json::Value>> = rows.iter().map(|r| r.iter().map(integer_value).collect()).collect();
    v.serialize(s)
}

/// A sparse matrix as `{"rows", "cols", "entries": [[row, col, value], ...]}`.
pub fn matrix_value(m: &SparseMatrix) -> serde_json::Value {
    let entries: Vec<serde_json::Value> =
        m.triplets().map(|(r, c, v)| serde_json::json!([r, c, integer_value(v)])).collect();
    serde_json::json!({ "rows": m.nrows(), "cols": m.ncols(), "entries": entries })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn movie_round_trip() {
        let text = r#"{"start":{"crossings":[],"loops":[1],"P":0},"steps":[{"kind":"Dot","edge":1},{"kind":"Saddle","edges":[1,1]},{"kind":"Death","edge":2},{"kind":"Relabel","edges":{"1":3},"order":[]}]}"#;
        let m = parse_movie(text).unwrap();
        assert_eq!(m.steps[1], Step::Saddle { edges: [1, 1], variant: 0 });
        assert_eq!(parse_movie(&movie_to_json(&m)).unwrap(), m);
        assert!(matches!(
            parse_movie(r#"{"start":{"crossings":[],"P":0},"steps":[{"kind":"Death","edge":3}]}"#),
            Err(KhError::NotComposable(_))
        ));
    }

    #[test]
    fn big_integers_become_strings() {
        assert_eq!(integer_value(&BigInt::from(-3)), serde_json::json!(-3));
        let big = BigInt::from(u64::MAX) * 4;
        assert_eq!(integer_value(&big), serde_json::json!(big.to_string()));
    }

    #[test]
    fn round_trip() {
        let t = parse_tangle(r#"{"n":4,"crossings":[[1,2,3,4]],"boundary_edges":[1,2,3,4],"P":0}"#).unwrap();
        assert_eq!(parse_tangle(&tangle_to_json(&t)).unwrap(), t);
    }

    #[test]
    fn infers_p() {
        let t = parse_tangle(r#"{"crossings":[[1,1,2,2]]}"#).unwrap();
        assert_eq!(t.p, 1);
    }

    #[test]
    fn reports_errors() {
        assert!(matches!(parse_tangle("{"), Err(KhError::Parse(_))));
        assert!(matches!(parse_tangle(r#"{"crossings":[[1,2,3,4]],"P":0}"#), Err(KhError::Malformed(_))));
        assert!(parse_tangle(r#"{"bogus":1}"#).is_err());
    }
}
