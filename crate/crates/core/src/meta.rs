//! Run metadata embedded as the first line of every output file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Everything needed to reproduce an output file. Deliberately carries no
/// timestamp or host information so that reruns are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub flags: BTreeMap<String, serde_json::Value>,
    pub seed: u64,
}

impl RunMeta {
    pub fn new(subcommand: &str, seed: u64) -> Self {
        RunMeta {
            tool: "contraforge".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            flags: BTreeMap::new(),
            seed,
        }
    }

    pub fn flag(mut self, name: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.flags.insert(name.to_string(), value);
        self
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("metadata is always serializable")
    }
}
