//! The sixteen-feature panel, normalization bounds and feature vectors.

use serde::{Deserialize, Serialize};

use super::sasa::{compute_sasa, SasaResult, DEFAULT_PROBE_RADIUS, DEFAULT_SPHERE_POINTS};
use super::secondary::assign_secondary_structure;
use super::tables::{max_sasa, residue_mass, DEFAULT_MAX_SASA, DEFAULT_RESIDUE_MASS};
use super::FeatureError;
use crate::structcore::ProteinModel;

/// Relative-SASA cutoff separating exposed from buried residues.
pub const EXPOSURE_THRESHOLD: f64 = 0.25;
/// Substituted when a feature is missing or could not be computed.
pub const MISSING_FEATURE_VALUE: f64 = 0.5;
/// One-letter codes treated as nonpolar for the surface score.
pub const NONPOLAR_RESIDUES: [char; 10] = ['A', 'V', 'L', 'I', 'P', 'F', 'M', 'W', 'G', 'C'];

/// Expected mean Cα–Cα step (Å) used by the compactness score.
const CA_STEP: f64 = 3.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Feature {
    #[serde(rename = "SU")]
    Surface,
    #[serde(rename = "EM")]
    ExposedMass,
    #[serde(rename = "ES")]
    ExposedSurface,
    #[serde(rename = "SA")]
    SolventAccessibility,
    #[serde(rename = "RF_CB_SRS_OD")]
    RfCbSrsOd,
    #[serde(rename = "DFIRE2")]
    Dfire2,
    #[serde(rename = "Dope")]
    Dope,
    #[serde(rename = "GOAP")]
    Goap,
    #[serde(rename = "OPUS")]
    Opus,
    #[serde(rename = "ProQ2")]
    ProQ2,
    #[serde(rename = "RWplus")]
    RwPlus,
    #[serde(rename = "ModelEvaluator")]
    ModelEvaluator,
    #[serde(rename = "SS")]
    SecondaryStructureSimilarity,
    #[serde(rename = "SP")]
    SecondaryStructurePenalty,
    #[serde(rename = "EC")]
    EuclideanCompactness,
    #[serde(rename = "Qprob")]
    Qprob,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "higher_better")]
    HigherBetter,
    #[serde(rename = "lower_better")]
    LowerBetter,
}

impl Feature {
    pub const ALL: [Feature; 16] = [
        Feature::Surface,
        Feature::ExposedMass,
        Feature::ExposedSurface,
        Feature::SolventAccessibility,
        Feature::RfCbSrsOd,
        Feature::Dfire2,
        Feature::Dope,
        Feature::Goap,
        Feature::Opus,
        Feature::ProQ2,
        Feature::RwPlus,
        Feature::ModelEvaluator,
        Feature::SecondaryStructureSimilarity,
        Feature::SecondaryStructurePenalty,
        Feature::EuclideanCompactness,
        Feature::Qprob,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Surface => "SU",
            Feature::ExposedMass => "EM",
            Feature::ExposedSurface => "ES",
            Feature::SolventAccessibility => "SA",
            Feature::RfCbSrsOd => "RF_CB_SRS_OD",
            Feature::Dfire2 => "DFIRE2",
            Feature::Dope => "Dope",
            Feature::Goap => "GOAP",
            Feature::Opus => "OPUS",
            Feature::ProQ2 => "ProQ2",
            Feature::RwPlus => "RWplus",
            Feature::ModelEvaluator => "ModelEvaluator",
            Feature::SecondaryStructureSimilarity => "SS",
            Feature::SecondaryStructurePenalty => "SP",
            Feature::EuclideanCompactness => "EC",
            Feature::Qprob => "Qprob",
        }
    }

    pub fn parse(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }

    pub(crate) fn index(self) -> usize {
        Feature::ALL.iter().position(|&f| f == self).expect("feature in ALL")
    }

    /// External potentials and QA scores are ingested; the rest are computed
    /// natively from the model.
    pub fn is_external(self) -> bool {
        matches!(
            self,
            Feature::RfCbSrsOd
                | Feature::Dfire2
                | Feature::Dope
                | Feature::Goap
                | Feature::Opus
                | Feature::ProQ2
                | Feature::RwPlus
                | Feature::ModelEvaluator
                | Feature::Qprob
        )
    }

    /// Normalization orientation for external features; energies are
    /// lower-better, QA scores higher-better. Native features have none.
    pub fn orientation(self) -> Option<Orientation> {
        if !self.is_external() {
            return None;
        }
        Some(match self {
            Feature::ModelEvaluator | Feature::ProQ2 | Feature::Qprob => Orientation::HigherBetter,
            _ => Orientation::LowerBetter,
        })
    }
}

impl std::fmt::Display for Feature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const SELECTED9: [Feature; 9] = [
    Feature::Surface,
    Feature::Dope,
    Feature::Goap,
    Feature::Opus,
    Feature::RwPlus,
    Feature::ModelEvaluator,
    Feature::SecondaryStructurePenalty,
    Feature::EuclideanCompactness,
    Feature::Qprob,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureSet {
    #[serde(rename = "all16")]
    All16,
    #[serde(rename = "selected9")]
    Selected9,
}

impl FeatureSet {
    pub fn features(self) -> &'static [Feature] {
        match self {
            FeatureSet::All16 => &Feature::ALL,
            FeatureSet::Selected9 => &SELECTED9,
        }
    }

    pub fn width(self) -> usize {
        self.features().len()
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureSet::All16 => "all16",
            FeatureSet::Selected9 => "selected9",
        }
    }

    pub fn parse(name: &str) -> Option<FeatureSet> {
        match name {
            "all16" => Some(FeatureSet::All16),
            "selected9" => Some(FeatureSet::Selected9),
            _ => None,
        }
    }
}

impl std::fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Raw feature values before normalization; `None` marks a missing feature.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawFeatures {
    values: [Option<f64>; 16],
}

impl RawFeatures {
    pub fn get(&self, feature: Feature) -> Option<f64> {
        self.values[feature.index()]
    }

    pub fn set(&mut self, feature: Feature, value: f64) {
        self.values[feature.index()] = Some(value);
    }

    pub fn clear(&mut self, feature: Feature) {
        self.values[feature.index()] = None;
    }

    pub fn iter(&self) -> impl Iterator<Item = (Feature, Option<f64>)> + '_ {
        Feature::ALL.into_iter().map(|f| (f, self.get(f)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureBounds {
    pub feature: Feature,
    pub min: f64,
    pub max: f64,
    pub orientation: Orientation,
}

/// Min/max bounds learned from training rows for the external features.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormalizationBounds {
    pub entries: Vec<FeatureBounds>,
}

impl NormalizationBounds {
    pub fn get(&self, feature: Feature) -> Option<&FeatureBounds> {
        self.entries.iter().find(|b| b.feature == feature)
    }

    /// Min-max scales a raw external value, inverting lower-better features
    /// and clamping to [0,1]. `None` when the feature carries no bounds.
    pub fn normalize(&self, feature: Feature, raw: f64) -> Option<f64> {
        let bounds = self.get(feature)?;
        let scaled = (raw - bounds.min) / (bounds.max - bounds.min);
        let oriented = match bounds.orientation {
            Orientation::HigherBetter => scaled,
            Orientation::LowerBetter => 1.0 - scaled,
        };
        Some(oriented.clamp(0.0, 1.0))
    }
}

/// Fits per-feature min/max over the training rows. Constant columns are
/// dropped and returned separately; columns with no values produce no entry.
pub fn fit_normalization<'a, I>(rows: I) -> (NormalizationBounds, Vec<Feature>)
where
    I: IntoIterator<Item = &'a RawFeatures>,
    I::IntoIter: Clone,
{
    let rows = rows.into_iter();
    let mut entries = Vec::new();
    let mut dropped = Vec::new();
    for feature in Feature::ALL {
        let Some(orientation) = feature.orientation() else {
            continue;
        };
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut seen = false;
        for row in rows.clone() {
            if let Some(v) = row.get(feature) {
                min = min.min(v);
                max = max.max(v);
                seen = true;
            }
        }
        if !seen {
            continue;
        }
        if min == max {
            log::warn!("feature {feature} is constant in training data; dropped");
            dropped.push(feature);
            continue;
        }
        entries.push(FeatureBounds {
            feature,
            min,
            max,
            orientation,
        });
    }
    (NormalizationBounds { entries }, dropped)
}

/// A normalized feature row restricted to one feature set. Every value lies
/// in [0,1]; absent features carry 0.5 and `present = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    feature_set: FeatureSet,
    values: Vec<f64>,
    present: Vec<bool>,
}

impl FeatureVector {
    pub fn feature_set(&self) -> FeatureSet {
        self.feature_set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn present(&self) -> &[bool] {
        &self.present
    }

    pub fn value(&self, feature: Feature) -> Option<f64> {
        let pos = self
            .feature_set
            .features()
            .iter()
            .position(|&f| f == feature)?;
        Some(self.values[pos])
    }

    pub fn is_present(&self, feature: Feature) -> bool {
        self.feature_set
            .features()
            .iter()
            .position(|&f| f == feature)
            .map(|pos| self.present[pos])
            .unwrap_or(false)
    }
}

/// Builds the normalized vector for `feature_set`: externals are min-max
/// scaled through `bounds`, native features clamped to [0,1], and anything
/// missing becomes 0.5 with its presence flag cleared.
pub fn assemble_feature_vector(
    raw: &RawFeatures,
    bounds: &NormalizationBounds,
    feature_set: FeatureSet,
) -> FeatureVector {
    let features = feature_set.features();
    let mut values = Vec::with_capacity(features.len());
    let mut present = Vec::with_capacity(features.len());
    for &feature in features {
        let value = if feature.is_external() {
            raw.get(feature)
                .and_then(|v| bounds.normalize(feature, v))
        } else {
            raw.get(feature).map(|v| v.clamp(0.0, 1.0))
        };
        match value {
            Some(v) => {
                values.push(v);
                present.push(true);
            }
            None => {
                values.push(MISSING_FEATURE_VALUE);
                present.push(false);
            }
        }
    }
    FeatureVector {
        feature_set,
        values,
        present,
    }
}

/// Per-target sequence-based predictions ingested from `<target>.ss` /
/// `<target>.acc` files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePredictions {
    /// Three-state string over H/E/C.
    pub ss: String,
    /// Per-residue exposed (true) / buried flags.
    pub exposed: Vec<bool>,
}

impl SequencePredictions {
    pub fn from_text(ss_text: &str, acc_text: &str) -> Result<Self, FeatureError> {
        let ss: String = ss_text.trim().to_string();
        if ss.chars().any(|c| !matches!(c, 'H' | 'E' | 'C')) {
            return Err(FeatureError::MalformedPrediction(
                "secondary structure line must contain only H/E/C".into(),
            ));
        }
        let acc = acc_text.trim();
        let mut exposed = Vec::with_capacity(acc.len());
        for c in acc.chars() {
            match c {
                'e' | 'E' => exposed.push(true),
                'b' | 'B' => exposed.push(false),
                _ => {
                    return Err(FeatureError::MalformedPrediction(
                        "accessibility line must contain only e/b".into(),
                    ))
                }
            }
        }
        if ss.len() != exposed.len() {
            return Err(FeatureError::MalformedPrediction(format!(
                "prediction lengths differ ({} vs {})",
                ss.len(),
                exposed.len()
            )));
        }
        Ok(SequencePredictions { ss, exposed })
    }
}

/// Fraction of positions where the predicted three-state label matches.
fn ss_similarity(assigned: &str, predicted: &str) -> f64 {
    let n = assigned.len();
    let matches = assigned
        .chars()
        .zip(predicted.chars())
        .filter(|(a, p)| a == p)
        .count();
    matches as f64 / n as f64
}

/// Match fraction over positions predicted H or E; 1.0 when none are.
fn ss_penalty(assigned: &str, predicted: &str) -> f64 {
    let mut considered = 0usize;
    let mut matches = 0usize;
    for (a, p) in assigned.chars().zip(predicted.chars()) {
        if p == 'H' || p == 'E' {
            considered += 1;
            if a == p {
                matches += 1;
            }
        }
    }
    if considered == 0 {
        1.0
    } else {
        matches as f64 / considered as f64
    }
}

/// Computes the seven native physio-chemical features of a model, degrading
/// the prediction-dependent ones (SA/SS/SP) to missing when no usable
/// predictions are supplied.
pub fn physchem_features(
    model: &ProteinModel,
    predictions: Option<&SequencePredictions>,
) -> Result<RawFeatures, FeatureError> {
    let sasa = compute_sasa(model, DEFAULT_PROBE_RADIUS, DEFAULT_SPHERE_POINTS)?;
    let assigned = assign_secondary_structure(model);
    physchem_from_parts(model, &sasa, &assigned, predictions)
}

/// Same as [`physchem_features`] but reusing precomputed SASA and secondary
/// structure.
pub fn physchem_from_parts(
    model: &ProteinModel,
    sasa: &SasaResult,
    assigned_ss: &str,
    predictions: Option<&SequencePredictions>,
) -> Result<RawFeatures, FeatureError> {
    let n = model.residues.len();
    if n == 0 {
        return Err(FeatureError::EmptyModel);
    }
    let seq: Vec<char> = model.sequence.chars().collect();

    let max_areas: Vec<f64> = seq
        .iter()
        .map(|&aa| max_sasa(aa).unwrap_or(DEFAULT_MAX_SASA))
        .collect();
    let masses: Vec<f64> = seq
        .iter()
        .map(|&aa| residue_mass(aa).unwrap_or(DEFAULT_RESIDUE_MASS))
        .collect();
    let exposed: Vec<bool> = sasa
        .per_residue
        .iter()
        .zip(max_areas.iter())
        .map(|(area, max)| area / max > EXPOSURE_THRESHOLD)
        .collect();

    let mut raw = RawFeatures::default();

    let total_sasa: f64 = sasa.per_residue.iter().sum();
    if total_sasa > 0.0 {
        let nonpolar: f64 = sasa
            .per_residue
            .iter()
            .zip(seq.iter())
            .filter(|(_, aa)| NONPOLAR_RESIDUES.contains(aa))
            .map(|(area, _)| area)
            .sum();
        raw.set(Feature::Surface, (nonpolar / total_sasa).clamp(0.0, 1.0));
    }

    let total_mass: f64 = masses.iter().sum();
    let exposed_mass: f64 = masses
        .iter()
        .zip(exposed.iter())
        .filter(|(_, &e)| e)
        .map(|(m, _)| m)
        .sum();
    raw.set(Feature::ExposedMass, (exposed_mass / total_mass).clamp(0.0, 1.0));

    let total_max: f64 = max_areas.iter().sum();
    raw.set(Feature::ExposedSurface, (total_sasa / total_max).clamp(0.0, 1.0));

    // Compactness: mean pairwise Cα distance against the fully extended
    // scale 3.8·N; compact chains score near 1.
    let cas = model.ca_coords();
    let mean_pairwise = if n < 2 {
        0.0
    } else {
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                sum += (cas[i] - cas[j]).norm();
            }
        }
        sum / (n * (n - 1) / 2) as f64
    };
    let ec = 1.0 - (mean_pairwise / (CA_STEP * n as f64)).clamp(0.0, 1.0);
    raw.set(Feature::EuclideanCompactness, ec.clamp(0.0, 1.0));

    let usable_preds = predictions.filter(|p| {
        if p.ss.len() == n {
            true
        } else {
            log::warn!(
                "prediction length {} does not match residue count {n}; SA/SS/SP left missing",
                p.ss.len()
            );
            false
        }
    });
    if let Some(preds) = usable_preds {
        raw.set(
            Feature::SecondaryStructureSimilarity,
            ss_similarity(assigned_ss, &preds.ss).clamp(0.0, 1.0),
        );
        raw.set(
            Feature::SecondaryStructurePenalty,
            ss_penalty(assigned_ss, &preds.ss).clamp(0.0, 1.0),
        );
        let agree = preds
            .exposed
            .iter()
            .zip(exposed.iter())
            .filter(|(p, m)| p == m)
            .count();
        raw.set(
            Feature::SolventAccessibility,
            (agree as f64 / n as f64).clamp(0.0, 1.0),
        );
    }

    Ok(raw)
}
