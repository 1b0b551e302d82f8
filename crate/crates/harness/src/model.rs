//! Fitting roster methods and serialising fitted models.

use std::path::Path;

use serde::{Deserialize, Serialize};

use rpens_core::classifier::{LdaClassifier, QdaClassifier, DEFAULT_K};
use rpens_core::sketch::{default_sketch_dim, fit_sketched_lda, LdaEnsembleModel, SketchedLdaModel, DEFAULT_ENSEMBLE_SIZE};
use rpens_core::{
    train_rp_ensemble, AlphaMode, BaseClassifierSpec, Classifier, Label, LabeledDataset, RngSeed, RpEnsembleConfig,
    RpEnsembleModel,
};

use crate::config::{MethodId, MethodSpec};
use crate::error::{HarnessError, Result};

pub const MODEL_FORMAT: &str = "rpens-model";
pub const MODEL_VERSION: u32 = 1;

/// Ensemble defaults: `d = 5`, `B1 = 500`, `B2 = 50`.
pub const RP_DEFAULT_D: usize = 5;
pub const RP_DEFAULT_B1: usize = 500;
pub const RP_DEFAULT_B2: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FittedModel {
    Lda(LdaClassifier),
    Qda(QdaClassifier),
    LdaEnsemble(LdaEnsembleModel),
    SketchedLda(SketchedLdaModel),
    RpEnsemble(RpEnsembleModel),
    Constant { label: Label, dim: usize },
}

impl Classifier for FittedModel {
    fn dim(&self) -> usize {
        match self {
            FittedModel::Lda(m) => m.dim(),
            FittedModel::Qda(m) => m.dim(),
            FittedModel::LdaEnsemble(m) => m.dim(),
            FittedModel::SketchedLda(m) => m.dim(),
            FittedModel::RpEnsemble(m) => m.dim(),
            FittedModel::Constant { dim, .. } => *dim,
        }
    }

    fn classify(&self, x: &[f64]) -> Label {
        match self {
            FittedModel::Lda(m) => m.classify(x),
            FittedModel::Qda(m) => m.classify(x),
            FittedModel::LdaEnsemble(m) => m.classify(x),
            FittedModel::SketchedLda(m) => m.classify(x),
            FittedModel::RpEnsemble(m) => m.classify(x),
            FittedModel::Constant { label, .. } => *label,
        }
    }

    fn predict_dataset(&self, data: &LabeledDataset) -> rpens_core::Result<Vec<Label>> {
        match self {
            FittedModel::RpEnsemble(m) => m.predict_dataset(data),
            other => {
                if data.dim() != other.dim() {
                    return Err(rpens_core::Error::DimMismatch { expected: other.dim(), found: data.dim() });
                }
                Ok(data.rows().map(|x| other.classify(x)).collect())
            }
        }
    }
}

/// The ensemble configuration a roster entry resolves to.
pub fn rp_config(spec: &MethodSpec, p: usize, seed: RngSeed) -> Result<RpEnsembleConfig> {
    let base = match spec.id()? {
        MethodId::RpLda => BaseClassifierSpec::lda(),
        MethodId::RpQda => BaseClassifierSpec::qda(),
        MethodId::RpKnn => BaseClassifierSpec::knn(spec.k.unwrap_or(DEFAULT_K)),
        other => return Err(HarnessError::Config(format!("{other} is not a projection ensemble"))),
    };
    Ok(RpEnsembleConfig {
        d: spec.d.unwrap_or(RP_DEFAULT_D.min(p)),
        b1: spec.b1.unwrap_or(RP_DEFAULT_B1),
        b2: spec.b2.unwrap_or(RP_DEFAULT_B2),
        base,
        estimator: spec.estimator,
        family: spec.family.unwrap_or_default(),
        alpha: spec.alpha.map_or(AlphaMode::DataDriven, AlphaMode::Fixed),
        seed,
        keep_candidates: false,
    })
}

/// Fit one roster method on `train`; all randomness comes from `seed`.
pub fn fit_method(spec: &MethodSpec, train: &LabeledDataset, seed: RngSeed) -> Result<FittedModel> {
    spec.validate()?;
    let (n, p) = (train.n(), train.dim());
    let family = spec.family.unwrap_or_default();
    let sketch_d = spec.d.unwrap_or_else(|| default_sketch_dim(n, p));
    let model = match spec.id()? {
        MethodId::Lda => FittedModel::Lda(LdaClassifier::fit(train)?),
        MethodId::Qda => FittedModel::Qda(QdaClassifier::fit(train)?),
        MethodId::Lda1 => FittedModel::LdaEnsemble(LdaEnsembleModel::fit(train, sketch_d, spec.b.unwrap_or(1), family, seed)?),
        MethodId::Lda1000 => FittedModel::LdaEnsemble(LdaEnsembleModel::fit(
            train,
            sketch_d,
            spec.b.unwrap_or(DEFAULT_ENSEMBLE_SIZE),
            family,
            seed,
        )?),
        MethodId::SketchLda => FittedModel::SketchedLda(fit_sketched_lda(train, sketch_d, family, seed)?),
        MethodId::RpLda | MethodId::RpQda | MethodId::RpKnn => {
            FittedModel::RpEnsemble(train_rp_ensemble(train, &rp_config(spec, p, seed)?)?)
        }
        MethodId::Constant => FittedModel::Constant { label: spec.label.unwrap_or(0), dim: p },
    };
    Ok(model)
}

/// A fitted model on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    pub method: MethodSpec,
    pub seed: RngSeed,
    pub model: FittedModel,
}

impl ModelFile {
    pub fn new(method: MethodSpec, seed: RngSeed, model: FittedModel) -> Self {
        Self { format: MODEL_FORMAT.into(), version: MODEL_VERSION, method, seed, model }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let file: Self = serde_json::from_str(&text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(HarnessError::Config(format!(
                "{}: unsupported model format {} v{}",
                path.display(),
                file.format,
                file.version
            )));
        }
        Ok(file)
    }
}
