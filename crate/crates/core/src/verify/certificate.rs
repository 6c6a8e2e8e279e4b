use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::VerifyError;
use crate::algebra::{FieldSpec, FqElem, UniPoly};
use crate::construct::{GonalityProfile, RightProfile};
use crate::curve::CurvePoly;
use crate::lattice::LatticePolygon;

pub const SCHEMA_VERSION: &str = "v1";

/// A rational place of the `t`-line: an element of `F_q` or infinity.
/// Serialized as the element encoding or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(FqElem),
    Infinity,
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(a) => write!(f, "{a}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Place::Finite(a) => s.serialize_u64(a.0),
            Place::Infinity => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Place;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a field element encoding or \"inf\"")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Place, E> {
                Ok(Place::Finite(FqElem(v)))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Place, E> {
                u64::try_from(v).map(|v| Place::Finite(FqElem(v))).map_err(|_| E::custom("negative place"))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Place, E> {
                if v == "inf" {
                    Ok(Place::Infinity)
                } else {
                    Err(E::custom(format!("unknown place {v:?}")))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DiscChecks {
    pub squarefree: bool,
    /// `v_{t−a}(disc)` for `a = 0, …, q−1`.
    pub alpha_valuations: Vec<u32>,
    pub beta_valuation: u32,
    #[serde(rename = "FDegree")]
    pub f_degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibreCertificate {
    pub place: Place,
    /// Valuations (finite place) or degrees (infinity) of `f_0, …, f_γ`.
    pub expected: Vec<i64>,
    pub observed: Vec<Option<i64>>,
    pub slopes: Vec<i64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Checks {
    pub discriminant: DiscChecks,
    pub fibres: Vec<FibreCertificate>,
    pub polygon_interior: u64,
    pub genus: u64,
    #[serde(rename = "N1")]
    pub n1: u64,
    pub gonality: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Meta {
    pub seed: u64,
    pub trials: u64,
    pub tool_version: String,
}

/// Everything needed to re-derive and re-check a constructed curve. Field
/// order here is the canonical key order of the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Certificate {
    pub version: String,
    pub field: FieldSpec,
    pub gamma: usize,
    pub genus: u64,
    pub profile: GonalityProfile,
    pub right: RightProfile,
    pub n: i64,
    pub m: i64,
    pub d: Vec<i64>,
    pub beta: UniPoly,
    pub g_tuple: Vec<UniPoly>,
    pub f: CurvePoly,
    pub polygon: LatticePolygon,
    pub checks: Checks,
    pub meta: Meta,
}

impl Certificate {
    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificate serializes");
        s.push('\n');
        s
    }

    /// Parses and shape-checks; every failure is a schema violation.
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        let cert: Certificate = serde_json::from_str(text).map_err(|e| VerifyError::Schema(e.to_string()))?;
        cert.validate_shape()?;
        Ok(cert)
    }

    /// Structural checks that do not need any arithmetic.
    pub fn validate_shape(&self) -> Result<(), VerifyError> {
        let bad = |m: String| Err(VerifyError::Schema(m));
        if self.version != SCHEMA_VERSION {
            return bad(format!("unsupported version {:?}", self.version));
        }
        if self.gamma < 2 {
            return bad(format!("gamma = {} < 2", self.gamma));
        }
        let len = self.gamma + 1;
        if self.g_tuple.len() != len || self.d.len() != len || self.f.gamma != self.gamma {
            return bad(format!("gTuple, d and f must have gamma + 1 = {len} entries"));
        }
        if self.f.validate().is_err() {
            return bad("f is not a polynomial of y-degree gamma".into());
        }
        if self.profile.k.len() != len || self.right.kp.len() != self.gamma {
            return bad("profile lengths disagree with gamma".into());
        }
        if self.checks.fibres.iter().any(|c| c.observed.len() != len || c.expected.len() != len) {
            return bad("fibre certificates must list gamma + 1 values".into());
        }
        Ok(())
    }
}
