//! Run manifests: parameters, constants and input digests of a command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::adversary::{COPY_FACTOR, PATH_FACTOR};
use crate::wrapper::{DEFAULT_SMALL_FACTOR, EPSILON_MAX, RECOURSE_FACTOR};

/// Line endings normalized to `\n` and trailing whitespace dropped per line.
pub fn canonical_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for line in text.lines() {
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn text_digest(text: &str) -> String {
    sha256_hex(canonical_text(text).as_bytes())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub constants: BTreeMap<String, Value>,
    /// Input name to SHA-256 of its canonical text.
    pub inputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut constants = BTreeMap::new();
        constants
            .insert("window_length".into(), Value::from("max(1, floor(eps*|M|)), weighted: max(1, floor(that/psi))"));
        constants.insert("snapshot_cap".into(), Value::from("max(2|M|, 4q)"));
        constants.insert("small_factor".into(), Value::from(DEFAULT_SMALL_FACTOR));
        constants.insert("recourse_factor".into(), Value::from(RECOURSE_FACTOR));
        constants.insert("epsilon_max".into(), Value::from(EPSILON_MAX));
        constants.insert("path_factor".into(), Value::from(PATH_FACTOR));
        constants.insert("copy_factor".into(), Value::from(COPY_FACTOR));
        constants.insert("recourse_unit".into(), Value::from("per edge update"));
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            parameters: BTreeMap::new(),
            constants,
            inputs: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.into(), value.into());
        self
    }

    pub fn input(mut self, name: &str, text: &str) -> Self {
        self.inputs.insert(name.into(), text_digest(text));
        self
    }

    /// Pretty JSON with sorted keys; identical runs give identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    pub fn digest(&self) -> String {
        sha256_hex(self.to_json().as_bytes())
    }
}
