//! Optional per-record order overrides, read from JSON:
//!
//! ```text
//! { "orders": { "EX1.1": "80", "T1.3.1": "30" }, "x_orders": { "T1.3.1": 8 } }
//! ```
//!
//! Keys are ids or unique anchor labels. Command-line flags take precedence.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use qnahm::catalog::{Catalog, IdentityRecord};
use qnahm::series::rational::parse_exponent;
use qnahm::Error;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub orders: BTreeMap<String, String>,
    #[serde(default)]
    pub x_orders: BTreeMap<String, i64>,
}

impl Config {
    pub fn load(path: &Path) -> anyhow::Result<Config> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("config {}: {e}", path.display())).into())
    }

    /// Rewrite the default orders of the selected `records`.
    pub fn apply(&self, catalog: &Catalog, records: &mut [IdentityRecord]) -> anyhow::Result<()> {
        for (key, order) in &self.orders {
            let id = catalog.resolve(key)?.id.clone();
            let order = parse_exponent(order)?;
            records.iter_mut().filter(|r| r.id == id).for_each(|r| r.default_order = Some(order));
        }
        for (key, &x) in &self.x_orders {
            let id = catalog.resolve(key)?.id.clone();
            records.iter_mut().filter(|r| r.id == id).for_each(|r| r.default_x_order = Some(x));
        }
        Ok(())
    }
}
