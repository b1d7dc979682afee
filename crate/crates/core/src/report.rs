//! Artifact stamping and tabular export.
//!
//! Every file the toolkit writes embeds the hash of the configuration
//! that produced it and the library version, so artifacts can be traced
//! back to their run and reruns can be checked byte for byte.

use crate::entropy::EntropyEstimate;
use serde::{Deserialize, Serialize};

/// 64-bit FNV-1a hash.
pub fn fnv1a_64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(PRIME);
    }
    h
}

/// Hex-encoded configuration hash.
pub fn config_hash(config_text: &str) -> String {
    format!("{:016x}", fnv1a_64(config_text.as_bytes()))
}

pub fn toolkit_version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}

/// Envelope wrapping a payload with its provenance stamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stamped<T> {
    pub config_hash: String,
    pub toolkit_version: String,
    pub data: T,
}

impl<T: Serialize> Stamped<T> {
    pub fn new(config_text: &str, data: T) -> Stamped<T> {
        Stamped {
            config_hash: config_hash(config_text),
            toolkit_version: toolkit_version().to_string(),
            data,
        }
    }

    pub fn to_json_pretty(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// CSV export of the separated-set table (`n, delta, k_lower` rows),
/// stamped with the same provenance header as the JSON artifacts. Float
/// formatting uses the shortest round-trip representation, so identical
/// tables give identical bytes.
pub fn entropy_table_csv(estimate: &EntropyEstimate, config_text: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# config_hash={} toolkit_version={}\n",
        config_hash(config_text),
        toolkit_version()
    ));
    out.push_str(&format!("# compact_set={}\n", estimate.compact_set_id));
    out.push_str("n,delta,k_lower\n");
    for e in &estimate.table {
        out.push_str(&format!("{},{},{}\n", e.n, e.delta, e.k_lower));
    }
    out.push_str(&format!("# h_lower={}\n", estimate.h_lower));
    out
}
