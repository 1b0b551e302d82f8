//! Test-error estimates computed from a (projected) training set.

use serde::{Deserialize, Serialize};

use crate::classifier::{knn_loo_predictions, BaseClassifierSpec, BaseKind, Classifier};
use crate::data::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorEstimatorSpec {
    TrainingError,
    LeaveOneOut,
}

impl ErrorEstimatorSpec {
    /// Training error for LDA/QDA, leave-one-out for kNN.
    pub fn default_for(kind: BaseKind) -> Self {
        match kind {
            BaseKind::Lda | BaseKind::Qda => ErrorEstimatorSpec::TrainingError,
            BaseKind::Knn => ErrorEstimatorSpec::LeaveOneOut,
        }
    }

    pub fn estimate(&self, base: &BaseClassifierSpec, data: &LabeledDataset) -> Result<ErrorEstimate> {
        match self {
            ErrorEstimatorSpec::TrainingError => training_error(base, data),
            ErrorEstimatorSpec::LeaveOneOut => leave_one_out_error(base, data),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEstimate {
    pub value: f64,
    pub estimator: ErrorEstimatorSpec,
    pub n_evaluated: usize,
    pub mistakes: usize,
}

impl ErrorEstimate {
    fn from_counts(mistakes: usize, n: usize, estimator: ErrorEstimatorSpec) -> Self {
        Self { value: mistakes as f64 / n as f64, estimator, n_evaluated: n, mistakes }
    }
}

pub fn training_error(base: &BaseClassifierSpec, data: &LabeledDataset) -> Result<ErrorEstimate> {
    let fitted = base.fit(data)?;
    let mistakes = data.rows().zip(data.labels()).filter(|(x, &y)| fitted.classify(x) != y).count();
    Ok(ErrorEstimate::from_counts(mistakes, data.n(), ErrorEstimatorSpec::TrainingError))
}

pub fn leave_one_out_error(base: &BaseClassifierSpec, data: &LabeledDataset) -> Result<ErrorEstimate> {
    let n = data.n();
    if n < 2 {
        return Err(Error::InsufficientData(format!("leave-one-out needs n >= 2, have {n}")));
    }
    let mistakes = match base.kind {
        BaseKind::Knn => knn_loo_predictions(data, base.knn_k)?
            .iter()
            .zip(data.labels())
            .filter(|(p, y)| p != y)
            .count(),
        BaseKind::Lda | BaseKind::Qda => {
            let counts = data.class_counts();
            let mut mistakes = 0;
            for i in 0..n {
                if counts[data.label(i) as usize] == 1 {
                    return Err(Error::FoldDegenerate { index: i });
                }
                let fitted = base.fit(&data.without(i))?;
                if fitted.classify(data.row(i)) != data.label(i) {
                    mistakes += 1;
                }
            }
            mistakes
        }
    };
    Ok(ErrorEstimate::from_counts(mistakes, n, ErrorEstimatorSpec::LeaveOneOut))
}
