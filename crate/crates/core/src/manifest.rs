//! Run manifests with a stable digest of their output.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::gf::FieldDescriptor;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config: serde_json::Value,
    pub field: FieldDescriptor,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wall_secs: f64,
    /// sha256 of the canonical JSON of the run's result.
    pub digest: String,
}

/// Canonical JSON: object keys sorted, no whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    // Value's maps are ordered by key
    Ok(serde_json::to_vec(&serde_json::to_value(value)?)?)
}

pub fn digest<T: Serialize>(value: &T) -> Result<String> {
    Ok(hex::encode(Sha256::digest(canonical_json(value)?)))
}
