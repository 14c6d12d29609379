//! JSON map documents.
//!
//! ```json
//! { "rep": "choi", "matrix": [[{"re": 0.2, "im": 0.0}, ...], ...] }
//! ```
//!
//! Singular maps carry `"singular": true` and an `"invariant_set"` instead of a matrix.

use serde::{Deserialize, Serialize};

use crate::channels::{
    choi_from_superop, superop_from_choi, ChoiMatrix, InvariantSet, QubitMap, SingularMap, SuperOp,
};
use crate::error::{Error, Result};
use crate::matops::{CMat4, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    Choi,
    Superop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: f64,
    pub im: f64,
}

impl From<C64> for JsonComplex {
    fn from(z: C64) -> Self {
        JsonComplex { re: z.re, im: z.im }
    }
}

impl From<JsonComplex> for C64 {
    fn from(z: JsonComplex) -> Self {
        C64::new(z.re, z.im)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapDocument {
    pub rep: Representation,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<[[JsonComplex; 4]; 4]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub singular: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub invariant_set: Option<InvariantSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

fn to_json_matrix(m: &CMat4) -> [[JsonComplex; 4]; 4] {
    m.0.map(|row| row.map(JsonComplex::from))
}

impl MapDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_choi(choi: &ChoiMatrix) -> Self {
        MapDocument {
            rep: Representation::Choi,
            matrix: Some(to_json_matrix(&choi.b)),
            singular: false,
            invariant_set: None,
            description: None,
        }
    }

    pub fn from_superop(map: &SuperOp) -> Self {
        MapDocument {
            rep: Representation::Superop,
            matrix: Some(to_json_matrix(&map.a)),
            singular: false,
            invariant_set: None,
            description: None,
        }
    }

    /// Serialize a map; regular maps use the requested representation.
    pub fn from_map(map: &QubitMap, rep: Representation) -> Result<Self> {
        match map {
            QubitMap::Regular(s) => Ok(match rep {
                Representation::Superop => Self::from_superop(s),
                Representation::Choi => Self::from_choi(&choi_from_superop(s)?),
            }),
            QubitMap::Singular(s) => Ok(MapDocument {
                rep,
                matrix: None,
                singular: true,
                invariant_set: Some(s.invariant_set),
                description: Some(s.description.clone()),
            }),
        }
    }

    pub fn matrix(&self) -> Option<CMat4> {
        self.matrix
            .map(|m| CMat4::from_fn(|i, j| C64::from(m[i][j])))
    }

    pub fn to_map(&self) -> Result<QubitMap> {
        if self.singular {
            let invariant_set = self.invariant_set.ok_or_else(|| {
                Error::Parse("singular map document needs an invariant_set".into())
            })?;
            return Ok(QubitMap::Singular(SingularMap {
                invariant_set,
                description: self.description.clone().unwrap_or_default(),
            }));
        }
        let m = self
            .matrix()
            .ok_or_else(|| Error::Parse("map document has no matrix".into()))?;
        if !m.is_finite() {
            return Err(Error::Parse("matrix entries must be finite".into()));
        }
        Ok(QubitMap::Regular(match self.rep {
            Representation::Superop => SuperOp::new(m),
            Representation::Choi => superop_from_choi(&ChoiMatrix::new(m)?),
        }))
    }

    /// The Choi matrix of a regular document.
    pub fn to_choi(&self) -> Result<ChoiMatrix> {
        match self.to_map()? {
            QubitMap::Regular(s) => choi_from_superop(&s),
            QubitMap::Singular(_) => Err(Error::InvalidParameter(
                "a singular map has no finite Choi matrix".into(),
            )),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("map documents always serialize")
    }
}
