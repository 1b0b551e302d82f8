//! LDA with projected precision matrices.
//!
//! [`precision_ensemble`] averages `A_b^T (A_b S A_b^T)^{-1} A_b` over `B`
//! random projections as a surrogate for `S^{-1}`, which stays well defined
//! when the sample covariance `S` is singular. [`fit_sketched_lda`] uses a
//! single projection.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{fit_gaussian_model, Classifier, GaussianModelFit, LinearRule};
use crate::data::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, symmetrize};
use crate::projection::{Projection, ProjectionFamily};
use crate::rng::{streams, RngSeed};

/// Above this ambient dimension the ensemble direction is accumulated per
/// projection instead of materialising the `p x p` precision estimate.
pub const MATERIALIZE_MAX_DIM: usize = 2000;

/// Default ensemble size.
pub const DEFAULT_ENSEMBLE_SIZE: usize = 1000;

// summands are added within fixed-size chunks, then chunk totals in order
const CHUNK: usize = 16;

/// `floor(min(n - 2, p) / 2)`, at least 1.
pub fn default_sketch_dim(n: usize, p: usize) -> usize {
    (n.saturating_sub(2).min(p) / 2).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecisionEnsembleEstimate {
    pub matrix: DMatrix<f64>,
    pub b: usize,
    pub d: usize,
    pub family: ProjectionFamily,
    pub seed: RngSeed,
}

fn check_square(sigma: &DMatrix<f64>) -> Result<usize> {
    let p = sigma.nrows();
    if sigma.ncols() != p {
        return Err(Error::DimMismatch { expected: p, found: sigma.ncols() });
    }
    Ok(p)
}

/// Draw projection `index` of the ensemble addressed by `seed`.
pub fn ensemble_projection(
    family: ProjectionFamily,
    d: usize,
    p: usize,
    seed: RngSeed,
    index: usize,
) -> Result<Projection> {
    family.sample(d, p, seed.derive(&[streams::PRECISION_SUMMAND, index as u64]))
}

/// `(A S A^T)^{-1}` for one projection, or `SingularSketch` carrying `index`.
fn sketch_inverse(a: &DMatrix<f64>, sigma: &DMatrix<f64>, index: usize) -> Result<DMatrix<f64>> {
    let mut m = a * sigma * a.transpose();
    symmetrize(&mut m);
    spd_inverse(&m).map(|inv| inv.inverse).ok_or(Error::SingularSketch { index })
}

/// `A^T (A S A^T)^{-1} A`.
pub fn sketch_summand(a: &Projection, sigma: &DMatrix<f64>, index: usize) -> Result<DMatrix<f64>> {
    let am = a.matrix();
    let inv = sketch_inverse(&am, sigma, index)?;
    let mut s = am.transpose() * inv * am;
    symmetrize(&mut s);
    Ok(s)
}

fn ordered_chunked_sum<T, F>(b: usize, zero: T, term: F) -> Result<T>
where
    T: Send + Sync + Clone + std::ops::AddAssign,
    F: Fn(usize) -> Result<T> + Sync,
{
    let chunk_sums = (0..b.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = zero.clone();
            for i in (c * CHUNK)..((c + 1) * CHUNK).min(b) {
                acc += term(i)?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = zero;
    for s in chunk_sums {
        total += s;
    }
    Ok(total)
}

fn validate(d: usize, p: usize, b: usize) -> Result<()> {
    if d < 1 || d > p {
        return Err(Error::InvalidDims { d, p });
    }
    if b < 1 {
        return Err(Error::InvalidConfig("ensemble needs at least one projection".into()));
    }
    Ok(())
}

/// `(1/B) sum_b A_b^T (A_b S A_b^T)^{-1} A_b`.
pub fn precision_ensemble(
    sigma_hat: &DMatrix<f64>,
    d: usize,
    b: usize,
    family: ProjectionFamily,
    seed: RngSeed,
) -> Result<PrecisionEnsembleEstimate> {
    let p = check_square(sigma_hat)?;
    validate(d, p, b)?;
    let total = ordered_chunked_sum(b, DMatrix::zeros(p, p), |i| {
        let a = ensemble_projection(family, d, p, seed, i)?;
        sketch_summand(&a, sigma_hat, i)
    })?;
    let mut matrix = total / b as f64;
    symmetrize(&mut matrix);
    Ok(PrecisionEnsembleEstimate { matrix, b, d, family, seed })
}

/// `(1/B) sum_b A_b^T (A_b S A_b^T)^{-1} A_b v` without forming any `p x p` product.
pub fn precision_ensemble_apply(
    sigma_hat: &DMatrix<f64>,
    v: &DVector<f64>,
    d: usize,
    b: usize,
    family: ProjectionFamily,
    seed: RngSeed,
) -> Result<DVector<f64>> {
    let p = check_square(sigma_hat)?;
    if v.len() != p {
        return Err(Error::DimMismatch { expected: p, found: v.len() });
    }
    validate(d, p, b)?;
    let total = ordered_chunked_sum(b, DVector::zeros(p), |i| {
        let a = ensemble_projection(family, d, p, seed, i)?.matrix();
        let inv = sketch_inverse(&a, sigma_hat, i)?;
        Ok(a.transpose() * (inv * (&a * v)))
    })?;
    Ok(total / b as f64)
}

fn linear_rule(fit: &GaussianModelFit, direction: DVector<f64>) -> LinearRule {
    LinearRule { log_prior_ratio: fit.log_prior_ratio(), midpoint: fit.midpoint(), direction }
}

pub fn predict_lda_ensemble(fit: &GaussianModelFit, prec: &PrecisionEnsembleEstimate, x: &[f64]) -> Result<Label> {
    let p = fit.dim();
    if prec.matrix.nrows() != p {
        return Err(Error::DimMismatch { expected: p, found: prec.matrix.nrows() });
    }
    if x.len() != p {
        return Err(Error::DimMismatch { expected: p, found: x.len() });
    }
    Ok(linear_rule(fit, &prec.matrix * fit.mean_difference()).classify(x))
}

/// LDA using the projected-precision ensemble in place of `S^{-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaEnsembleModel {
    rule: LinearRule,
    pub b: usize,
    pub d: usize,
    pub family: ProjectionFamily,
    pub seed: RngSeed,
    #[serde(skip)]
    precision: Option<PrecisionEnsembleEstimate>,
}

impl LdaEnsembleModel {
    pub fn from_fit(fit: &GaussianModelFit, d: usize, b: usize, family: ProjectionFamily, seed: RngSeed) -> Result<Self> {
        let sigma = fit.pooled()?;
        let delta = fit.mean_difference();
        let (direction, precision) = if fit.dim() <= MATERIALIZE_MAX_DIM {
            let prec = precision_ensemble(sigma, d, b, family, seed)?;
            (&prec.matrix * &delta, Some(prec))
        } else {
            (precision_ensemble_apply(sigma, &delta, d, b, family, seed)?, None)
        };
        Ok(Self { rule: linear_rule(fit, direction), b, d, family, seed, precision })
    }

    pub fn fit(data: &LabeledDataset, d: usize, b: usize, family: ProjectionFamily, seed: RngSeed) -> Result<Self> {
        Self::from_fit(&fit_gaussian_model(data, true)?, d, b, family, seed)
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        self.rule.discriminant(x)
    }

    /// The materialised precision estimate, when it was formed during fitting.
    pub fn precision(&self) -> Option<&PrecisionEnsembleEstimate> {
        self.precision.as_ref()
    }
}

impl Classifier for LdaEnsembleModel {
    fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn classify(&self, x: &[f64]) -> Label {
        self.rule.classify(x)
    }
}

/// LDA through a single random projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SketchedLdaModel {
    pub fit: GaussianModelFit,
    pub projection: Projection,
    rule: LinearRule,
}

impl SketchedLdaModel {
    /// Build from an ambient fit and an explicit projection.
    pub fn from_parts(fit: GaussianModelFit, projection: Projection) -> Result<Self> {
        if projection.cols() != fit.dim() {
            return Err(Error::DimMismatch { expected: fit.dim(), found: projection.cols() });
        }
        let summand = sketch_summand(&projection, fit.pooled()?, 0)?;
        let direction = summand * fit.mean_difference();
        let rule = linear_rule(&fit, direction);
        Ok(Self { fit, projection, rule })
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        self.rule.discriminant(x)
    }
}

impl Classifier for SketchedLdaModel {
    fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn classify(&self, x: &[f64]) -> Label {
        self.rule.classify(x)
    }
}

pub fn fit_sketched_lda(
    data: &LabeledDataset,
    d: usize,
    family: ProjectionFamily,
    seed: RngSeed,
) -> Result<SketchedLdaModel> {
    let fit = fit_gaussian_model(data, true)?;
    let projection = family.sample(d, data.dim(), seed.derive(&[streams::SKETCH]))?;
    SketchedLdaModel::from_parts(fit, projection)
}

pub fn predict_sketched_lda(model: &SketchedLdaModel, x: &[f64]) -> Result<Label> {
    model.predict(x)
}
