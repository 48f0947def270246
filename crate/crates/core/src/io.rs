//! File formats and serialization.
//!
//! Rationals serialize as `"p/q"` strings (bare `"p"` for integers) and
//! deserialize from such strings or from plain JSON integers; decimal
//! notation is rejected so no rounding can sneak in.
//!
//! Input file formats (JSON):
//! - polytope: `{"name": "...", "dim": n, "vertices": [[int, ...], ...]}`
//! - PL function: `{"mode": "min"|"max", "pieces":
//!   [{"gradient": ["p/q"-or-int, ...], "offset": "p/q"-or-int}, ...]}`

use std::fmt;

use num_bigint::BigInt;
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::RatVec;
use crate::plfunc::{AffinePiece, Mode, PLFunction};
use crate::polytope::LatticePolytope;
use crate::rational::Rational;

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "a \"p/q\" string or an integer (decimals are rejected)")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Rational, E> {
        v.parse::<Rational>().map_err(|e| E::custom(e.to_string()))
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Rational, E> {
        Ok(Rational::from(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Rational, E> {
        Ok(Rational::from_integer(BigInt::from(v)))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Rational, E> {
        Err(E::custom(format!(
            "decimal notation ({v}) is not accepted; use \"p/q\" strings"
        )))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// On-disk polytope description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub name: String,
    pub dim: usize,
    pub vertices: Vec<Vec<i64>>,
}

impl PolytopeFile {
    pub fn to_polytope(&self) -> Result<LatticePolytope> {
        if self.vertices.is_empty() {
            return Err(Error::Parse("polytope file has no vertices".into()));
        }
        if self.vertices.iter().any(|v| v.len() != self.dim) {
            return Err(Error::Parse(format!(
                "vertex length disagrees with dim = {}",
                self.dim
            )));
        }
        LatticePolytope::from_vertices(
            self.vertices
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn from_polytope(name: &str, p: &LatticePolytope) -> Result<Self> {
        let vertices = p
            .vertices()
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| i64::try_from(x).map_err(|_| {
                        Error::InvalidInput("vertex coordinate exceeds 64 bits".into())
                    }))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolytopeFile {
            name: name.to_string(),
            dim: p.dim(),
            vertices,
        })
    }
}

/// On-disk piecewise-linear function description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlFunctionFile {
    pub mode: FileMode,
    pub pieces: Vec<PieceFile>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileMode {
    Min,
    Max,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PieceFile {
    pub gradient: Vec<Rational>,
    pub offset: Rational,
}

impl PlFunctionFile {
    pub fn to_plfunction(&self) -> Result<PLFunction> {
        let mode = match self.mode {
            FileMode::Min => Mode::Min,
            FileMode::Max => Mode::Max,
        };
        PLFunction::new(
            mode,
            self.pieces
                .iter()
                .map(|p| {
                    AffinePiece::new(RatVec::new(p.gradient.clone()), p.offset.clone())
                })
                .collect(),
        )
    }

    pub fn from_plfunction(f: &PLFunction) -> Self {
        let mode = match f.mode() {
            Mode::Min => FileMode::Min,
            Mode::Max => FileMode::Max,
        };
        PlFunctionFile {
            mode,
            pieces: f
                .pieces()
                .iter()
                .map(|p| PieceFile {
                    gradient: p.gradient.iter().cloned().collect(),
                    offset: p.offset.clone(),
                })
                .collect(),
        }
    }
}

/// Parse a polytope from JSON text.
pub fn parse_polytope_json(text: &str) -> Result<LatticePolytope> {
    let file: PolytopeFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_polytope()
}

/// Parse a PL function from JSON text.
pub fn parse_plfunction_json(text: &str) -> Result<PLFunction> {
    let file: PlFunctionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.to_plfunction()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::stability::{invariants, Direction, InvariantReport};

    #[test]
    fn rational_serde_round_trip() {
        for r in [rat(2, 9), rat(-21, 160), int(5), int(0), rat(16, 3)] {
            let s = serde_json::to_string(&r).unwrap();
            let back: Rational = serde_json::from_str(&s).unwrap();
            assert_eq!(back, r);
        }
        assert_eq!(serde_json::to_string(&rat(2, 9)).unwrap(), "\"2/9\"");
        assert_eq!(serde_json::to_string(&int(-3)).unwrap(), "\"-3\"");
    }

    #[test]
    fn rational_accepts_integers_and_rejects_decimals() {
        let r: Rational = serde_json::from_str("7").unwrap();
        assert_eq!(r, int(7));
        let r: Rational = serde_json::from_str("-4").unwrap();
        assert_eq!(r, int(-4));
        assert!(serde_json::from_str::<Rational>("0.5").is_err());
        assert!(serde_json::from_str::<Rational>("\"0.5\"").is_err());
        assert!(serde_json::from_str::<Rational>("\"1e3\"").is_err());
        assert!(serde_json::from_str::<Rational>("\"1/0\"").is_err());
    }

    #[test]
    fn polytope_file_round_trip() {
        let text = r#"{
            "name": "pentagon",
            "dim": 2,
            "vertices": [[-1,-1],[1,-1],[1,0],[0,1],[-1,0]]
        }"#;
        let p = parse_polytope_json(text).unwrap();
        assert_eq!(p.volume(), int(3));
        let file = PolytopeFile::from_polytope("pentagon", &p).unwrap();
        let json = serde_json::to_string(&file).unwrap();
        let q = parse_polytope_json(&json).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn polytope_file_validation() {
        let bad_dim = r#"{"name":"x","dim":3,"vertices":[[1,0],[0,1]]}"#;
        assert!(matches!(
            parse_polytope_json(bad_dim),
            Err(Error::Parse(_))
        ));
        let empty = r#"{"name":"x","dim":2,"vertices":[]}"#;
        assert!(matches!(parse_polytope_json(empty), Err(Error::Parse(_))));
        let garbage = "not json";
        assert!(matches!(parse_polytope_json(garbage), Err(Error::Parse(_))));
    }

    #[test]
    fn plfunction_file_round_trip() {
        let text = r#"{
            "mode": "min",
            "pieces": [
                {"gradient": ["-1", -1], "offset": 1},
                {"gradient": [1, "-1"], "offset": "1"}
            ]
        }"#;
        let f = parse_plfunction_json(text).unwrap();
        assert_eq!(f.pieces().len(), 2);
        assert_eq!(f.eval(&RatVec::from_i64s(&[0, 0])), int(1));
        let json = serde_json::to_string(&PlFunctionFile::from_plfunction(&f)).unwrap();
        let back = parse_plfunction_json(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn plfunction_file_rejects_floats() {
        let text = r#"{"mode":"min","pieces":[{"gradient":[0.5],"offset":0}]}"#;
        assert!(matches!(
            parse_plfunction_json(text),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let p = LatticePolytope::from_i64_vertices(&[
            &[-1, -1],
            &[1, -1],
            &[1, 0],
            &[0, 1],
            &[-1, 0],
        ])
        .unwrap();
        let g = PLFunction::affine(RatVec::from_i64s(&[0, 1]), int(1));
        let rep = invariants(&p, &g, Direction::Increasing).unwrap();
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"df\":\"-2/9\""));
        assert!(json.contains("\"direction\":\"increasing\""));
        let back: InvariantReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }
}
