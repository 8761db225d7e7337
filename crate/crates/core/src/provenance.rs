//! Content hashes and source records attached to every output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Lowercase hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the run configuration text.
    pub config_hash: Option<String>,
    /// Hashes of data files read during the run, keyed by path.
    #[serde(default)]
    pub data_hashes: Vec<(String, String)>,
    /// Human-readable origin of each dispersion used.
    #[serde(default)]
    pub dispersion_sources: Vec<String>,
}

impl Provenance {
    pub fn with_config_hash(mut self, hash: impl Into<String>) -> Self {
        self.config_hash = Some(hash.into());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
