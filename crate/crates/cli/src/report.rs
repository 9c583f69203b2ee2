//! Report document: a JSON object with fixed sections
//! `{meta, verdicts, numerics, witnesses, certificates}`.
//!
//! Reports carry no timestamps and are built from typed values in a fixed
//! order, so identical configs produce byte-identical documents.

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub verdicts: Value,
    pub numerics: Value,
    pub witnesses: Value,
    pub certificates: Value,
}

impl Report {
    pub fn new(subcommand: &str, config_bytes: &[u8]) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(config_bytes);
        Self {
            meta: Meta {
                tool: "lcdde",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: subcommand.to_string(),
                config_hash: hex::encode(hasher.finalize()),
            },
            verdicts: json!({}),
            numerics: json!({}),
            witnesses: json!({}),
            certificates: json!({}),
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}
