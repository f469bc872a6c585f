//! Trained model container and its checksummed file format.
//!
//! A model file is two JSON lines: a header `{magic, version, sha256}` and
//! the payload. The checksum covers the raw payload bytes, so truncation is
//! caught before deserialization; floats use the shortest round-trip
//! encoding, making save/load bitwise lossless.

use std::path::Path;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::rbm::RbmLayer;
use super::{sigmoid, DbnError, DbnHyperparams};
use crate::biofeatures::{FeatureSet, FeatureVector, NormalizationBounds};

pub const MODEL_MAGIC: &str = "deepqa-dbn";
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub pretrain_epochs: usize,
    pub finetune_iterations: usize,
    pub final_mse: f64,
    pub final_mae: f64,
    pub line_search_warning: bool,
    pub rng_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnModel {
    pub layers: [RbmLayer; 2],
    pub output_weights: Array1<f64>,
    pub output_bias: f64,
    pub feature_set: FeatureSet,
    pub bounds: NormalizationBounds,
    pub hyperparams: DbnHyperparams,
    pub metadata: TrainingMetadata,
}

#[derive(Debug, Serialize, Deserialize)]
struct ModelHeader {
    magic: String,
    version: u32,
    sha256: String,
}

impl DbnModel {
    pub fn input_width(&self) -> usize {
        self.layers[0].n_visible()
    }

    /// Deterministic forward pass; strictly inside (0,1) for finite inputs.
    pub fn predict(&self, fv: &FeatureVector) -> Result<f64, DbnError> {
        if fv.feature_set() != self.feature_set {
            let expected: Vec<&str> =
                self.feature_set.features().iter().map(|f| f.name()).collect();
            let got: Vec<&str> = fv.feature_set().features().iter().map(|f| f.name()).collect();
            let missing = expected
                .iter()
                .filter(|n| !got.contains(n))
                .map(|n| n.to_string())
                .collect();
            let extra = got
                .iter()
                .filter(|n| !expected.contains(n))
                .map(|n| n.to_string())
                .collect();
            return Err(DbnError::FeatureSetMismatch {
                expected: self.feature_set.name().to_string(),
                got: fv.feature_set().name().to_string(),
                missing,
                extra,
            });
        }
        Ok(self.predict_slice(fv.values()))
    }

    /// Forward pass over an already-assembled input row.
    pub fn predict_slice(&self, inputs: &[f64]) -> f64 {
        debug_assert_eq!(inputs.len(), self.input_width());
        let x = ArrayView1::from(inputs);
        let h1 = (x.dot(&self.layers[0].weights) + &self.layers[0].hidden_bias).mapv(sigmoid);
        let h2 = (h1.dot(&self.layers[1].weights) + &self.layers[1].hidden_bias).mapv(sigmoid);
        sigmoid(h2.dot(&self.output_weights) + self.output_bias)
    }

    /// Canonical serialized payload (header excluded).
    pub fn payload_json(&self) -> String {
        serde_json::to_string(self).expect("model serializes")
    }

    /// Hex SHA-256 of the canonical payload; used in the file header and as
    /// a compact identity for reproducibility checks.
    pub fn checksum(&self) -> String {
        sha256_hex(self.payload_json().as_bytes())
    }

    pub fn save(&self, path: &Path) -> Result<(), DbnError> {
        let payload = self.payload_json();
        let header = ModelHeader {
            magic: MODEL_MAGIC.to_string(),
            version: MODEL_FORMAT_VERSION,
            sha256: sha256_hex(payload.as_bytes()),
        };
        let text = format!(
            "{}\n{}\n",
            serde_json::to_string(&header).expect("header serializes"),
            payload
        );
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<DbnModel, DbnError> {
        let text = std::fs::read_to_string(path)?;
        let (header_line, rest) = text
            .split_once('\n')
            .ok_or_else(|| DbnError::Malformed("missing header line".into()))?;
        let header: ModelHeader = serde_json::from_str(header_line)
            .map_err(|e| DbnError::Malformed(format!("bad header: {e}")))?;
        if header.magic != MODEL_MAGIC {
            return Err(DbnError::Malformed(format!(
                "unexpected magic '{}'",
                header.magic
            )));
        }
        if header.version > MODEL_FORMAT_VERSION {
            return Err(DbnError::VersionMismatch {
                found: header.version,
                supported: MODEL_FORMAT_VERSION,
            });
        }
        let payload = rest.strip_suffix('\n').unwrap_or(rest);
        if sha256_hex(payload.as_bytes()) != header.sha256 {
            return Err(DbnError::ChecksumMismatch);
        }
        serde_json::from_str(payload).map_err(|e| DbnError::Malformed(format!("bad payload: {e}")))
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}
