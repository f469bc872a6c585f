//! Deep belief network: two stacked RBMs pretrained with contrastive
//! divergence, topped by a sigmoid regression node, fine-tuned end to end by
//! minimizing mean squared error with limited-memory BFGS.

mod lbfgs;
mod model;
pub mod network;
mod rbm;

pub use lbfgs::{minimize, LbfgsOptions, LbfgsOutcome};
pub use model::{DbnModel, TrainingMetadata, MODEL_FORMAT_VERSION, MODEL_MAGIC};
pub use network::{fine_tune, FineTuneOutcome};
pub use rbm::{cd_gradient, pretrain, rbm_cd_update, reconstruction_error, RbmDelta, RbmLayer};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DbnError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("training diverged: non-finite weights")]
    Divergence,
    #[error("input values must lie in [0,1] (found {0})")]
    InputOutOfRange(f64),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error(
        "feature set mismatch: model expects {expected}, got {got} (missing: {missing:?}, extra: {extra:?})"
    )]
    FeatureSetMismatch {
        expected: String,
        got: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("model io: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file is not valid: {0}")]
    Malformed(String),
    #[error("model format version {found} is newer than supported version {supported}")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("model file checksum mismatch")]
    ChecksumMismatch,
}

/// Training hyperparameters. Defaults are the tuned values: 20/10 hidden
/// units, learning rate 1e-4, weight cost 0.007, momentum stepping from 0.5
/// to 0.9.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DbnHyperparams {
    /// Hidden units in the first RBM.
    pub n1: usize,
    /// Hidden units in the second RBM.
    pub n2: usize,
    /// Contrastive-divergence learning rate ε.
    pub learning_rate: f64,
    /// Weight cost ω, applied to weights only.
    pub weight_cost: f64,
    pub momentum_start: f64,
    pub momentum_end: f64,
    /// Epoch at which momentum steps from start to end.
    pub momentum_switch_epoch: usize,
    /// Gibbs steps per contrastive-divergence update.
    pub cd_k: usize,
    pub pretrain_epochs: usize,
    pub finetune_max_iters: usize,
    pub batch_size: usize,
    pub rng_seed: u64,
}

impl Default for DbnHyperparams {
    fn default() -> Self {
        DbnHyperparams {
            n1: 20,
            n2: 10,
            learning_rate: 1e-4,
            weight_cost: 0.007,
            momentum_start: 0.5,
            momentum_end: 0.9,
            momentum_switch_epoch: 5,
            cd_k: 1,
            pretrain_epochs: 100,
            finetune_max_iters: 500,
            batch_size: 64,
            rng_seed: 42,
        }
    }
}

impl DbnHyperparams {
    pub fn validate(&self) -> Result<(), DbnError> {
        let fail = |msg: &str| Err(DbnError::InvalidHyperparams(msg.to_string()));
        if self.n1 < 1 || self.n2 < 1 {
            return fail("hidden layer sizes must be at least 1");
        }
        if !(self.learning_rate > 0.0) {
            return fail("learning rate must be positive");
        }
        if self.weight_cost < 0.0 {
            return fail("weight cost must be non-negative");
        }
        for nu in [self.momentum_start, self.momentum_end] {
            if !(0.0..1.0).contains(&nu) {
                return fail("momentum must lie in [0,1)");
            }
        }
        if self.cd_k < 1 {
            return fail("cd_k must be at least 1");
        }
        if self.batch_size < 1 {
            return fail("batch size must be at least 1");
        }
        Ok(())
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_tuned_values() {
        let hp = DbnHyperparams::default();
        assert_eq!(hp.n1, 20);
        assert_eq!(hp.n2, 10);
        assert_eq!(hp.learning_rate, 1e-4);
        assert_eq!(hp.weight_cost, 0.007);
        assert_eq!(hp.momentum_start, 0.5);
        assert_eq!(hp.momentum_end, 0.9);
        assert!(hp.validate().is_ok());
    }

    #[test]
    fn validation_rejects_bad_settings() {
        let mut hp = DbnHyperparams::default();
        hp.n1 = 0;
        assert!(hp.validate().is_err());
        let mut hp = DbnHyperparams::default();
        hp.learning_rate = 0.0;
        assert!(hp.validate().is_err());
        let mut hp = DbnHyperparams::default();
        hp.momentum_end = 1.0;
        assert!(hp.validate().is_err());
        let mut hp = DbnHyperparams::default();
        hp.cd_k = 0;
        assert!(hp.validate().is_err());
    }
}
