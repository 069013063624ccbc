use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Machine-readable record of one command-line run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub subcommand: String,
    pub version: String,
    /// SHA-256 over the input files and arguments.
    pub inputs_digest: String,
    pub result: serde_json::Value,
    pub exit_code: i32,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

/// Hex SHA-256 over length-prefixed parts.
pub fn inputs_digest<'a>(parts: impl IntoIterator<Item = &'a [u8]>) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_be_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}
