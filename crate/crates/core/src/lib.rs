//! Random-projection methods for high-dimensional binary classification.
//!
//! - [`projection`]: Gaussian, Haar, axis-aligned and sparse projections, plus
//!   Johnson-Lindenstrauss bounds and distortion checks.
//! - [`classifier`]: LDA, QDA and kNN base classifiers and the Gaussian Bayes rule.
//! - [`estimation`]: training-error and leave-one-out error estimates.
//! - [`rp_ensemble`]: the random-projection ensemble classifier.
//! - [`sketch`]: LDA with an averaged projected precision matrix, and sketched LDA.

pub mod classifier;
pub mod data;
pub mod error;
pub mod estimation;
pub mod linalg;
pub mod projection;
pub mod rng;
pub mod rp_ensemble;
pub mod sketch;

pub use classifier::{test_error, BaseClassifierSpec, BaseKind, Classifier};
pub use data::{Label, LabeledDataset};
pub use error::{Error, Result};
pub use projection::{project, Projection, ProjectionFamily};
pub use rng::RngSeed;
pub use rp_ensemble::{train_rp_ensemble, AlphaMode, RpEnsembleConfig, RpEnsembleModel};
