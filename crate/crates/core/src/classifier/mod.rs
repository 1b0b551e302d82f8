//! Base classifiers used on projected data, and the shared [`Classifier`] trait.

mod gaussian;
mod knn;

pub use gaussian::{
    bayes_lda_classify, bayes_lda_risk, bayes_risk, delta_for_risk, fit_gaussian_model, predict_lda, predict_qda,
    GaussianModelFit, GaussianPopulation, LdaClassifier, LinearRule, QdaClassifier,
};
pub use knn::{knn_loo_predictions, predict_knn, KnnClassifier, DEFAULT_K};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// A fitted binary classifier on `R^dim`.
pub trait Classifier: Sync {
    fn dim(&self) -> usize;

    /// Classify a point already known to have length [`Classifier::dim`].
    fn classify(&self, x: &[f64]) -> Label;

    fn predict(&self, x: &[f64]) -> Result<Label> {
        if x.len() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: x.len() });
        }
        Ok(self.classify(x))
    }

    fn predict_dataset(&self, data: &LabeledDataset) -> Result<Vec<Label>> {
        if data.dim() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: data.dim() });
        }
        Ok(par_classify_rows(self, data))
    }
}

/// Fraction of misclassified observations in `test`.
pub fn test_error<C: Classifier + ?Sized>(classifier: &C, test: &LabeledDataset) -> Result<f64> {
    let predictions = classifier.predict_dataset(test)?;
    Ok(misclassification_rate(&predictions, test.labels()))
}

pub fn misclassification_rate(predictions: &[Label], labels: &[Label]) -> f64 {
    let wrong = predictions.iter().zip(labels).filter(|(p, y)| p != y).count();
    wrong as f64 / labels.len() as f64
}

/// Predict every row in parallel.
pub(crate) fn par_classify_rows<C: Classifier + ?Sized>(classifier: &C, data: &LabeledDataset) -> Vec<Label> {
    (0..data.n()).into_par_iter().map(|i| classifier.classify(data.row(i))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Lda,
    Qda,
    Knn,
}

/// Which base classifier to fit on projected data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseClassifierSpec {
    pub kind: BaseKind,
    #[serde(default = "default_k")]
    pub knn_k: usize,
}

fn default_k() -> usize {
    DEFAULT_K
}

impl BaseClassifierSpec {
    pub fn lda() -> Self {
        Self { kind: BaseKind::Lda, knn_k: DEFAULT_K }
    }

    pub fn qda() -> Self {
        Self { kind: BaseKind::Qda, knn_k: DEFAULT_K }
    }

    pub fn knn(k: usize) -> Self {
        Self { kind: BaseKind::Knn, knn_k: k }
    }

    pub fn fit(&self, data: &LabeledDataset) -> Result<FittedBase> {
        Ok(match self.kind {
            BaseKind::Lda => FittedBase::Lda(LdaClassifier::fit(data)?),
            BaseKind::Qda => FittedBase::Qda(QdaClassifier::fit(data)?),
            BaseKind::Knn => FittedBase::Knn(KnnClassifier::new(data.clone(), self.knn_k)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FittedBase {
    Lda(LdaClassifier),
    Qda(QdaClassifier),
    Knn(KnnClassifier),
}

impl Classifier for FittedBase {
    fn dim(&self) -> usize {
        match self {
            FittedBase::Lda(c) => c.dim(),
            FittedBase::Qda(c) => c.dim(),
            FittedBase::Knn(c) => c.dim(),
        }
    }

    fn classify(&self, x: &[f64]) -> Label {
        match self {
            FittedBase::Lda(c) => c.classify(x),
            FittedBase::Qda(c) => c.classify(x),
            FittedBase::Knn(c) => c.classify(x),
        }
    }
}
