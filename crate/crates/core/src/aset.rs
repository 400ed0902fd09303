//! (A, S)-sets: encoding matrices paired with repair subspaces, and their JSON form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{Felt, Field, FieldSpec};
use crate::linalg::{Mat, Subspace};

/// Which family produced a set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "r2-access-optimal")]
    R2AccessOptimal,
    #[serde(rename = "r3-access-optimal")]
    R3AccessOptimal,
    #[serde(rename = "r3-long")]
    R3Long,
    /// Hand-assembled sets, mostly for tests.
    #[serde(rename = "custom")]
    Custom,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::R2AccessOptimal => "r2-access-optimal",
            Variant::R3AccessOptimal => "r3-access-optimal",
            Variant::R3Long => "r3-long",
            Variant::Custom => "custom",
        }
    }

    pub fn is_access_optimal(self) -> bool {
        matches!(self, Variant::R2AccessOptimal | Variant::R3AccessOptimal)
    }
}

/// Color of a pair inside its matching: 0, 1, 2 are Z, Z', Z''; 3 is Z*.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub matching: usize,
    pub color: usize,
}

pub const STAR: usize = 3;

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = match self.color {
            0 => "",
            1 => "'",
            2 => "''",
            _ => "*",
        };
        write!(f, "X{}{}", self.matching, suffix)
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        let bad = || Error::Parse(format!("bad pair label {s:?}"));
        let rest = s.strip_prefix('X').ok_or_else(bad)?;
        let digits = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let matching = rest[..digits].parse().map_err(|_| bad())?;
        let color = match &rest[digits..] {
            "" => 0,
            "'" => 1,
            "''" => 2,
            "*" => STAR,
            _ => return Err(bad()),
        };
        Ok(Label { matching, color })
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ASPair {
    pub a: Mat,
    pub s: Subspace,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ASSet {
    pub variant: Variant,
    pub m: usize,
    pub r: usize,
    pub ell: usize,
    pub field: Field,
    pub pairs: Vec<ASPair>,
    /// Geometric ratio of the long three-parity family.
    pub h: Option<Felt>,
    /// One base eigenvalue per matching for the long family.
    pub lambda_base: Vec<Felt>,
}

#[derive(Serialize, Deserialize)]
struct PairJson {
    #[serde(rename = "A")]
    a: Vec<Vec<u32>>,
    #[serde(rename = "S")]
    s: Vec<Vec<u32>>,
    label: Label,
}

#[derive(Serialize, Deserialize)]
struct ASSetJson {
    variant: Variant,
    m: usize,
    r: usize,
    ell: usize,
    field: FieldSpec,
    pairs: Vec<PairJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    h: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_base: Option<Vec<u32>>,
}

impl ASSet {
    pub fn k(&self) -> usize {
        self.pairs.len()
    }

    pub fn n(&self) -> usize {
        self.k() + self.r
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    /// Checks shapes and field agreement of every pair.
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.ell % self.r != 0 {
            return Err(Error::BadLength(self.ell));
        }
        for (i, p) in self.pairs.iter().enumerate() {
            if p.a.rows() != self.ell || p.a.cols() != self.ell || p.s.ambient() != self.ell {
                return Err(Error::DimensionMismatch(format!("pair {i} is not over ambient dimension {}", self.ell)));
            }
            if p.a.field() != &self.field || p.s.field() != &self.field {
                return Err(Error::DimensionMismatch(format!("pair {i} is over a different field")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let wire = ASSetJson {
            variant: self.variant,
            m: self.m,
            r: self.r,
            ell: self.ell,
            field: self.field.spec(),
            pairs: self
                .pairs
                .iter()
                .map(|p| PairJson { a: p.a.to_grid(), s: p.s.basis().to_grid(), label: p.label })
                .collect(),
            h: self.h.map(Felt::value),
            lambda_base: (self.variant == Variant::R3Long).then(|| self.lambda_base.iter().map(|x| x.0).collect()),
        };
        serde_json::to_string_pretty(&wire).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<ASSet> {
        let wire: ASSetJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let field = Field::from_spec(&wire.field)?;
        let elems = |v: &[u32]| v.iter().map(|&x| field.elem(x)).collect::<Result<Vec<_>>>();
        let mut pairs = Vec::with_capacity(wire.pairs.len());
        for p in &wire.pairs {
            let a = Mat::from_grid(&field, &p.a)?;
            let rows = p.s.iter().map(|r| elems(r)).collect::<Result<Vec<_>>>()?;
            let s = Subspace::from_vectors(&field, wire.ell, &rows)?;
            pairs.push(ASPair { a, s, label: p.label });
        }
        let set = ASSet {
            variant: wire.variant,
            m: wire.m,
            r: wire.r,
            ell: wire.ell,
            h: wire.h.map(|x| field.elem(x)).transpose()?,
            lambda_base: elems(wire.lambda_base.as_deref().unwrap_or(&[]))?,
            field,
            pairs,
        };
        set.validate()?;
        Ok(set)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn label_roundtrip() {
        for s in ["X0", "X3'", "X12''", "X1*"] {
            assert_eq!(s.parse::<Label>().unwrap().to_string(), s);
        }
        assert!("Y0".parse::<Label>().is_err());
        assert!("X0'''".parse::<Label>().is_err());
    }

    #[test]
    fn json_roundtrip_small() {
        let f = Field::new(5, 1).unwrap();
        let a = Mat::identity(&f, 2).scale(Felt(3));
        let s = Subspace::of_units(&f, 2, &[1]);
        let set = ASSet {
            variant: Variant::Custom,
            m: 1,
            r: 2,
            ell: 2,
            field: f,
            pairs: vec![ASPair { a, s, label: Label { matching: 0, color: 1 } }],
            h: None,
            lambda_base: vec![],
        };
        let back = ASSet::from_json(&set.to_json()).unwrap();
        assert_eq!(back, set);
    }

    #[test]
    fn truncated_json_is_parse_error() {
        assert!(matches!(ASSet::from_json("{\"variant\": \"r2-acc"), Err(Error::Parse(_))));
    }
}
