//! Single-model protein structure quality assessment.
//!
//! Given a pool of candidate 3D models (decoys) for a protein target, this
//! crate extracts per-model quality features, trains a deep belief network
//! (two stacked RBMs plus a sigmoid regression head) against GDT-TS labels,
//! and ranks and evaluates decoy pools with per-target correlation, loss and
//! selection metrics.
//!
//! Module map:
//! - [`structcore`]: PDB parsing, Kabsch superposition, RMSD / TM-score / GDT-TS
//! - [`biofeatures`]: solvent accessibility, secondary structure, the
//!   physio-chemical feature set, external score ingestion and normalization
//! - [`dbn`]: RBM pretraining by contrastive divergence, L-BFGS fine-tuning,
//!   model serialization
//! - [`qapipeline`]: dataset assembly, five-fold cross-validation, final training
//! - [`evalrank`]: decoy ranking and evaluation reports
//! - [`cli`]: command-line entry points

pub mod biofeatures;
pub mod cli;
pub mod dbn;
pub mod evalrank;
pub mod qapipeline;
pub mod structcore;

#[cfg(test)]
pub(crate) mod testutil;
