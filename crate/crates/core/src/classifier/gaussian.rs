//! Gaussian-model plug-in rules: LDA, QDA, and the population Bayes classifier.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::data::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::linalg::{quad_form, spd_inverse, symmetrize};

/// Plug-in estimates of the class-conditional Gaussian model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianModelFit {
    pub pi_hat: [f64; 2],
    pub mu_hat: [DVector<f64>; 2],
    /// Pooled covariance, normalised by `n - 2`.
    pub sigma_hat: Option<DMatrix<f64>>,
    /// Per-class covariances, normalised by `n_r - 1`.
    pub class_sigma_hat: Option<[DMatrix<f64>; 2]>,
}

impl GaussianModelFit {
    pub fn dim(&self) -> usize {
        self.mu_hat[0].len()
    }

    pub fn log_prior_ratio(&self) -> f64 {
        (self.pi_hat[1] / self.pi_hat[0]).ln()
    }

    pub fn mean_difference(&self) -> DVector<f64> {
        &self.mu_hat[1] - &self.mu_hat[0]
    }

    pub fn midpoint(&self) -> DVector<f64> {
        (&self.mu_hat[1] + &self.mu_hat[0]) * 0.5
    }

    pub fn pooled(&self) -> Result<&DMatrix<f64>> {
        self.sigma_hat
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("fit has no pooled covariance".into()))
    }
}

fn class_means(data: &LabeledDataset, counts: [usize; 2]) -> [DVector<f64>; 2] {
    let p = data.dim();
    let mut sums = [DVector::zeros(p), DVector::zeros(p)];
    for (x, &y) in data.rows().zip(data.labels()) {
        let s = &mut sums[y as usize];
        for (acc, v) in s.iter_mut().zip(x) {
            *acc += v;
        }
    }
    let [s0, s1] = sums;
    [s0 / counts[0] as f64, s1 / counts[1] as f64]
}

/// Scatter matrix `C C^T` of the centred observations selected by `keep`.
fn scatter(data: &LabeledDataset, means: &[DVector<f64>; 2], keep: impl Fn(Label) -> bool) -> DMatrix<f64> {
    let p = data.dim();
    let cols: Vec<usize> = (0..data.n()).filter(|&i| keep(data.label(i))).collect();
    let mut centred = DMatrix::<f64>::zeros(p, cols.len());
    for (c, &i) in cols.iter().enumerate() {
        let mu = &means[data.label(i) as usize];
        for (j, v) in data.row(i).iter().enumerate() {
            centred[(j, c)] = v - mu[j];
        }
    }
    let mut s = &centred * centred.transpose();
    symmetrize(&mut s);
    s
}

/// Estimate priors, class means and either the pooled covariance (`pooled = true`)
/// or the two per-class covariances.
pub fn fit_gaussian_model(data: &LabeledDataset, pooled: bool) -> Result<GaussianModelFit> {
    let counts = data.class_counts();
    for r in 0..2u8 {
        if counts[r as usize] == 0 {
            return Err(Error::MissingClass(r));
        }
    }
    let n = data.n();
    let mu_hat = class_means(data, counts);
    let pi_hat = [counts[0] as f64 / n as f64, counts[1] as f64 / n as f64];
    let (sigma_hat, class_sigma_hat) = if pooled {
        if n < 3 {
            return Err(Error::InsufficientData(format!("pooled covariance needs n >= 3, have {n}")));
        }
        (Some(scatter(data, &mu_hat, |_| true) / (n - 2) as f64), None)
    } else {
        if let Some(r) = (0..2).find(|&r| counts[r] < 2) {
            return Err(Error::InsufficientData(format!(
                "class {r} covariance needs at least 2 observations, have {}",
                counts[r]
            )));
        }
        let s0 = scatter(data, &mu_hat, |y| y == 0) / (counts[0] - 1) as f64;
        let s1 = scatter(data, &mu_hat, |y| y == 1) / (counts[1] - 1) as f64;
        (None, Some([s0, s1]))
    };
    Ok(GaussianModelFit { pi_hat, mu_hat, sigma_hat, class_sigma_hat })
}

/// Linear discriminant `log(pi_1/pi_0) + (x - midpoint)^T w` with `w` precomputed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearRule {
    pub log_prior_ratio: f64,
    pub midpoint: DVector<f64>,
    pub direction: DVector<f64>,
}

impl LinearRule {
    pub fn discriminant(&self, x: &[f64]) -> f64 {
        let dot: f64 = x
            .iter()
            .zip(self.midpoint.iter())
            .zip(self.direction.iter())
            .map(|((xi, m), w)| (xi - m) * w)
            .sum();
        self.log_prior_ratio + dot
    }

    pub fn classify(&self, x: &[f64]) -> Label {
        u8::from(self.discriminant(x) >= 0.0)
    }

    pub fn dim(&self) -> usize {
        self.direction.len()
    }
}

/// Fitted LDA classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LdaClassifier {
    rule: LinearRule,
}

impl LdaClassifier {
    pub fn from_fit(fit: &GaussianModelFit) -> Result<Self> {
        let inv = spd_inverse(fit.pooled()?).ok_or(Error::SingularCovariance { class: None })?;
        let direction = &inv.inverse * fit.mean_difference();
        Ok(Self {
            rule: LinearRule { log_prior_ratio: fit.log_prior_ratio(), midpoint: fit.midpoint(), direction },
        })
    }

    pub fn fit(data: &LabeledDataset) -> Result<Self> {
        Self::from_fit(&fit_gaussian_model(data, true)?)
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        self.rule.discriminant(x)
    }

    pub fn rule(&self) -> &LinearRule {
        &self.rule
    }
}

impl Classifier for LdaClassifier {
    fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn classify(&self, x: &[f64]) -> Label {
        self.rule.classify(x)
    }
}

pub fn predict_lda(fit: &GaussianModelFit, x: &[f64]) -> Result<Label> {
    LdaClassifier::from_fit(fit)?.predict(x)
}

/// Fitted QDA classifier with per-class precision matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QdaClassifier {
    log_prior_ratio: f64,
    mu: [DVector<f64>; 2],
    precision: [DMatrix<f64>; 2],
    log_det: [f64; 2],
}

impl QdaClassifier {
    pub fn from_fit(fit: &GaussianModelFit) -> Result<Self> {
        let sigmas = fit
            .class_sigma_hat
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("fit has no per-class covariances".into()))?;
        let inv0 = spd_inverse(&sigmas[0]).ok_or(Error::SingularCovariance { class: Some(0) })?;
        let inv1 = spd_inverse(&sigmas[1]).ok_or(Error::SingularCovariance { class: Some(1) })?;
        Ok(Self {
            log_prior_ratio: fit.log_prior_ratio(),
            mu: fit.mu_hat.clone(),
            precision: [inv0.inverse, inv1.inverse],
            log_det: [inv0.log_det, inv1.log_det],
        })
    }

    pub fn fit(data: &LabeledDataset) -> Result<Self> {
        Self::from_fit(&fit_gaussian_model(data, false)?)
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        let x = DVector::from_column_slice(x);
        let q1 = quad_form(&self.precision[1], &(&x - &self.mu[1]));
        let q0 = quad_form(&self.precision[0], &(&x - &self.mu[0]));
        self.log_prior_ratio - 0.5 * (self.log_det[1] - self.log_det[0]) - 0.5 * (q1 - q0)
    }
}

impl Classifier for QdaClassifier {
    fn dim(&self) -> usize {
        self.mu[0].len()
    }

    fn classify(&self, x: &[f64]) -> Label {
        u8::from(self.discriminant(x) >= 0.0)
    }
}

pub fn predict_qda(fit: &GaussianModelFit, x: &[f64]) -> Result<Label> {
    QdaClassifier::from_fit(fit)?.predict(x)
}

/// Two-class Gaussian population with a common covariance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPopulation {
    pi: [f64; 2],
    mu: [DVector<f64>; 2],
    sigma: DMatrix<f64>,
    delta: f64,
    rule: LinearRule,
}

impl GaussianPopulation {
    pub fn new(pi_0: f64, mu_0: DVector<f64>, mu_1: DVector<f64>, sigma: DMatrix<f64>) -> Result<Self> {
        if !(0.0..=1.0).contains(&pi_0) {
            return Err(Error::InvalidConfig(format!("prior pi_0={pi_0} outside [0, 1]")));
        }
        let p = sigma.nrows();
        if sigma.ncols() != p || mu_0.len() != p || mu_1.len() != p {
            return Err(Error::DimMismatch { expected: p, found: mu_0.len().max(mu_1.len()) });
        }
        if (&sigma - sigma.transpose()).amax() > 1e-12 * sigma.amax().max(1.0) {
            return Err(Error::InvalidConfig("population covariance is not symmetric".into()));
        }
        let inv = spd_inverse(&sigma)
            .ok_or_else(|| Error::InvalidConfig("population covariance is not positive definite".into()))?;
        let diff = &mu_1 - &mu_0;
        let direction = &inv.inverse * &diff;
        let delta = diff.dot(&direction).max(0.0).sqrt();
        let pi = [pi_0, 1.0 - pi_0];
        let rule = LinearRule {
            log_prior_ratio: (pi[1] / pi[0]).ln(),
            midpoint: (&mu_0 + &mu_1) * 0.5,
            direction,
        };
        Ok(Self { pi, mu: [mu_0, mu_1], sigma, delta, rule })
    }

    pub fn pi(&self) -> [f64; 2] {
        self.pi
    }

    pub fn mu(&self) -> &[DVector<f64>; 2] {
        &self.mu
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    /// Mahalanobis distance between the class means.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn discriminant(&self, x: &[f64]) -> f64 {
        self.rule.discriminant(x)
    }
}

pub fn bayes_lda_classify(pop: &GaussianPopulation, x: &[f64]) -> Label {
    pop.rule.classify(x)
}

impl Classifier for GaussianPopulation {
    fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    fn classify(&self, x: &[f64]) -> Label {
        bayes_lda_classify(self, x)
    }
}

fn std_normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Bayes risk of the common-covariance Gaussian model for priors `(pi_0, 1 - pi_0)`
/// and Mahalanobis separation `delta`.
pub fn bayes_risk(pi_0: f64, delta: f64) -> Result<f64> {
    let pi_1 = 1.0 - pi_0;
    if pi_0 <= 0.0 || pi_1 <= 0.0 {
        return Ok(0.0);
    }
    if !(delta > 0.0) {
        return Err(Error::DegenerateSeparation);
    }
    let l = (pi_1 / pi_0).ln();
    Ok(pi_0 * std_normal_cdf(l / delta - delta / 2.0) + pi_1 * std_normal_cdf(-l / delta - delta / 2.0))
}

pub fn bayes_lda_risk(pop: &GaussianPopulation) -> Result<f64> {
    bayes_risk(pop.pi[0], pop.delta)
}

/// Separation `delta` at which the Bayes risk equals `risk`, found by bisection.
pub fn delta_for_risk(pi_0: f64, risk: f64) -> Result<f64> {
    let floor = pi_0.min(1.0 - pi_0);
    if !(risk > 0.0 && risk < floor) {
        return Err(Error::InvalidConfig(format!(
            "target risk {risk} must lie in (0, {floor}) for pi_0={pi_0}"
        )));
    }
    let (mut lo, mut hi) = (1e-9, 1.0);
    while bayes_risk(pi_0, hi)? > risk {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bayes_risk(pi_0, mid)? > risk {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
