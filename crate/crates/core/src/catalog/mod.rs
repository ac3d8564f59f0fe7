//! Identity catalog: declarative records of q-series identities, each side
//! written in the expression language of [`expr`], and the verification
//! harness that expands both sides and compares them exactly.
//!
//! The built-in catalog is `data/catalog.json`; setting `QNAHM_CATALOG` to a
//! path loads that file instead. Records are immutable once loaded.

pub mod expr;
mod qsystem;
mod verify;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::Exponent;

pub use qsystem::{q_system_check, QSystem, RelationCheck};
pub use verify::{verify_all, verify_record, Mismatch, Report, Status, Summary, VerifyOptions};

/// Default univariate q-order.
pub const DEFAULT_ORDER: i64 = 50;
/// Default x-order for bivariate records.
pub const DEFAULT_X_ORDER: i64 = 12;
/// Default q-order for bivariate records.
pub const DEFAULT_BIVARIATE_ORDER: i64 = 40;

const BUILTIN: &str = include_str!("../../data/catalog.json");
/// Ids of the built-in catalog, one per line, in catalog order.
pub const MANIFEST: &str = include_str!("../../data/manifest.txt");

/// Whether an identity lives in q alone or in (x, q).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arity {
    #[serde(rename = "q")]
    Q,
    #[serde(rename = "xq")]
    XQ,
}

/// One identity `lhs = rhs`.
///
/// `grid` binds free indices of both sides to every integer in the given
/// inclusive ranges; the identity must hold for each assignment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    pub anchors: Vec<String>,
    pub arity: Arity,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_exponent")]
    pub default_order: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_x_order: Option<i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub grid: BTreeMap<String, [i64; 2]>,
}

impl IdentityRecord {
    /// q-order used when the caller does not fix one.
    pub fn order(&self) -> Exponent {
        self.default_order.unwrap_or_else(|| {
            Exponent::from_integer(match self.arity {
                Arity::Q => DEFAULT_ORDER,
                Arity::XQ => DEFAULT_BIVARIATE_ORDER,
            })
        })
    }

    /// x-order for bivariate records, `None` otherwise.
    pub fn x_order(&self) -> Option<i64> {
        match self.arity {
            Arity::Q => None,
            Arity::XQ => Some(self.default_x_order.unwrap_or(DEFAULT_X_ORDER)),
        }
    }

    /// Every assignment of the grid indices, in lexicographic order.
    pub fn assignments(&self) -> Vec<Vec<(String, i64)>> {
        let mut out = vec![Vec::new()];
        for (name, [lo, hi]) in &self.grid {
            out = out
                .into_iter()
                .flat_map(|env| {
                    (*lo..=*hi).map(move |v| {
                        let mut e = env.clone();
                        e.push((name.clone(), v));
                        e
                    })
                })
                .collect();
        }
        out
    }
}

/// An immutable, validated list of records.
#[derive(Clone, Debug)]
pub struct Catalog {
    records: Vec<IdentityRecord>,
    by_id: BTreeMap<String, usize>,
}

impl Catalog {
    /// The catalog shipped with the crate.
    pub fn builtin() -> Result<Catalog> {
        Self::from_json(BUILTIN)
    }

    /// `QNAHM_CATALOG` if set, else the built-in catalog.
    pub fn load() -> Result<Catalog> {
        match std::env::var_os("QNAHM_CATALOG") {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::InvalidArgument(format!("cannot read catalog {}: {e}", path.to_string_lossy()))
                })?;
                Self::from_json(&text)
            }
            None => Self::builtin(),
        }
    }

    pub fn from_json(text: &str) -> Result<Catalog> {
        let records: Vec<IdentityRecord> =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("catalog: {e}")))?;
        Self::new(records)
    }

    /// Checks id uniqueness and non-empty anchors.
    pub fn new(records: Vec<IdentityRecord>) -> Result<Catalog> {
        let mut by_id = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            if r.anchors.is_empty() {
                return Err(Error::InvalidArgument(format!("record {} has no anchors", r.id)));
            }
            if by_id.insert(r.id.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate id {}", r.id)));
            }
        }
        Ok(Catalog { records, by_id })
    }

    pub fn records(&self) -> &[IdentityRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&IdentityRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    /// Anchor label to the ids carrying it.
    pub fn aliases(&self) -> BTreeMap<&str, Vec<&str>> {
        let mut out: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for r in &self.records {
            for a in &r.anchors {
                out.entry(a.as_str()).or_default().push(r.id.as_str());
            }
        }
        out
    }

    /// Look up by id, or by an anchor label carried by exactly one record.
    pub fn resolve(&self, name: &str) -> Result<&IdentityRecord> {
        if let Some(r) = self.get(name) {
            return Ok(r);
        }
        match self.aliases().get(name).map(Vec::as_slice) {
            Some([id]) => Ok(self.get(id).expect("alias targets exist")),
            _ => Err(Error::UnknownId(name.to_string())),
        }
    }

    /// Records whose id starts with `prefix`, in catalog order.
    pub fn filter(&self, prefix: &str) -> Vec<&IdentityRecord> {
        self.records.iter().filter(|r| r.id.starts_with(prefix)).collect()
    }
}

mod opt_exponent {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::series::rational::{fmt_exponent, parse_exponent};
    use crate::series::Exponent;

    pub fn serialize<S: Serializer>(e: &Option<Exponent>, s: S) -> Result<S::Ok, S::Error> {
        match e {
            Some(e) => s.serialize_str(&fmt_exponent(*e)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Exponent>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| parse_exponent(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

#[cfg(test)]
mod tests;
