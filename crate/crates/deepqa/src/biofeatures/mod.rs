//! Per-model quality features.
//!
//! Seven physio-chemical scores are computed natively from the model
//! geometry (solvent accessibility, secondary structure agreement, chain
//! compactness); nine external potential/QA scores are ingested as raw
//! numeric columns and min-max normalized into [0,1] with fixed
//! orientations. Missing features are substituted with 0.5.

mod features;
mod sasa;
mod secondary;
pub mod tables;

pub use features::{
    assemble_feature_vector, fit_normalization, physchem_features, physchem_from_parts, Feature,
    FeatureBounds, FeatureSet, FeatureVector, NormalizationBounds, Orientation, RawFeatures,
    SequencePredictions, EXPOSURE_THRESHOLD, MISSING_FEATURE_VALUE, NONPOLAR_RESIDUES,
};
pub use sasa::{
    compute_sasa, sasa_of_spheres, SasaResult, DEFAULT_PROBE_RADIUS, DEFAULT_SPHERE_POINTS,
};
pub use secondary::assign_secondary_structure;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("empty model: no atoms")]
    EmptyModel,
    #[error("unknown feature name '{0}'")]
    UnknownFeature(String),
    #[error("malformed prediction file: {0}")]
    MalformedPrediction(String),
}
