//! Synthetic two-class Gaussian data.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use rpens_core::classifier::{delta_for_risk, GaussianPopulation};
use rpens_core::{LabeledDataset, RngSeed};

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticModel {
    /// Mean difference proportional to the all-ones vector.
    GaussianCommonCov,
    /// Bayes direction supported on the first `support` coordinates.
    SparseLinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovarianceSpec {
    #[default]
    Identity,
    Equicorrelated { rho: f64 },
    Ar1 { rho: f64 },
}

impl CovarianceSpec {
    pub fn matrix(&self, p: usize) -> DMatrix<f64> {
        match *self {
            CovarianceSpec::Identity => DMatrix::identity(p, p),
            CovarianceSpec::Equicorrelated { rho } => {
                DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { rho })
            }
            CovarianceSpec::Ar1 { rho } => {
                DMatrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
            }
        }
    }
}

/// Parameters of a synthetic population. Exactly one of `delta` and
/// `bayes_risk` fixes the class separation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub model: SyntheticModel,
    pub p: usize,
    pub pi_0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bayes_risk: Option<f64>,
    #[serde(default = "default_support")]
    pub support: usize,
    #[serde(default)]
    pub covariance: CovarianceSpec,
}

fn default_support() -> usize {
    3
}

impl SyntheticSpec {
    pub fn separation(&self) -> Result<f64> {
        match (self.delta, self.bayes_risk) {
            (Some(d), None) if d >= 0.0 => Ok(d),
            (None, Some(r)) => Ok(delta_for_risk(self.pi_0, r)?),
            _ => Err(HarnessError::Config(
                "synthetic spec needs exactly one of a non-negative `delta` or `bayes_risk`".into(),
            )),
        }
    }

    pub fn population(&self) -> Result<GaussianPopulation> {
        let p = self.p;
        if p == 0 {
            return Err(HarnessError::Config("synthetic dimension must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.pi_0) {
            return Err(HarnessError::Config(format!("pi_0={} outside [0, 1]", self.pi_0)));
        }
        let sigma = self.covariance.matrix(p);
        let delta = self.separation()?;
        let mean_diff = match self.model {
            SyntheticModel::GaussianCommonCov => {
                // the all-ones vector has Mahalanobis length sqrt(1^T Sigma^{-1} 1)
                let ones = DVector::from_element(p, 1.0);
                let chol = sigma
                    .clone()
                    .cholesky()
                    .ok_or_else(|| HarnessError::Config("covariance is not positive definite".into()))?;
                let scale = ones.dot(&chol.solve(&ones)).sqrt();
                ones * (delta / scale)
            }
            SyntheticModel::SparseLinear => {
                if self.support == 0 || self.support > p {
                    return Err(HarnessError::Config(format!(
                        "sparse support {} must lie in 1..={p}",
                        self.support
                    )));
                }
                let beta = DVector::from_fn(p, |i, _| if i < self.support { 1.0 } else { 0.0 });
                let sb = &sigma * &beta;
                let scale = beta.dot(&sb).sqrt();
                sb * (delta / scale)
            }
        };
        Ok(GaussianPopulation::new(self.pi_0, DVector::zeros(p), mean_diff, sigma)?)
    }
}

/// Draw `n` labelled observations: `Y ~ Bernoulli(1 - pi_0)`, `X | Y=r ~ N(mu_r, Sigma)`.
pub fn generate_synthetic(spec: &SyntheticSpec, n: usize, seed: RngSeed) -> Result<LabeledDataset> {
    let pop = spec.population()?;
    sample_population(&pop, n, seed)
}

pub fn sample_population(pop: &GaussianPopulation, n: usize, seed: RngSeed) -> Result<LabeledDataset> {
    let p = pop.dim();
    let l = pop
        .sigma()
        .clone()
        .cholesky()
        .ok_or_else(|| HarnessError::Config("covariance is not positive definite".into()))?
        .unpack();
    let pi_1 = pop.pi()[1];
    let mut rng = seed.rng();
    let mut features = Vec::with_capacity(n * p);
    let mut labels = Vec::with_capacity(n);
    let mut z = DVector::<f64>::zeros(p);
    for _ in 0..n {
        let y = u8::from(rng.random::<f64>() < pi_1);
        for v in z.iter_mut() {
            *v = rng.sample(StandardNormal);
        }
        let x = &pop.mu()[y as usize] + &l * &z;
        features.extend(x.iter());
        labels.push(y);
    }
    Ok(LabeledDataset::new(features, p, labels)?)
}
