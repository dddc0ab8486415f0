//! Machine-readable report envelope shared by every subcommand.
//!
//! Reports serialize with fixed, versioned field names; the deterministic
//! hash is FNV-1a 64 over the serialized envelope with the hash field blank,
//! so identical inputs give bit-identical output at any parallelism.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Assumptions {
    pub conditional_on: Vec<String>,
    pub notes: Vec<String>,
}

impl Assumptions {
    pub fn unconditional() -> Self {
        Assumptions {
            conditional_on: vec![],
            notes: vec![],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub schema_version: u32,
    pub version: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificates: Option<Value>,
    pub assumptions: Assumptions,
    pub deterministic_hash: String,
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

impl Report {
    pub fn new(
        command: String,
        inputs: Value,
        results: Value,
        certificates: Option<Value>,
        assumptions: Assumptions,
    ) -> Report {
        let mut report = Report {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            inputs,
            results,
            certificates,
            assumptions,
            deterministic_hash: String::new(),
        };
        let body = serde_json::to_vec(&report).expect("report serializes");
        report.deterministic_hash = format!("{:016x}", fnv1a64(&body));
        report
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}
