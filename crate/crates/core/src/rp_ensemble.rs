//! The random-projection ensemble classifier.
//!
//! For each of `b1` groups, `b2` candidate projections are drawn, the data are
//! projected, and the test error of the base classifier on each projected
//! training set is estimated. The candidate with the smallest estimate (lowest
//! index on ties) is kept and its base classifier refitted. A point is
//! assigned to class 1 when the fraction of the `b1` kept classifiers voting 1
//! reaches the threshold `alpha`.
//!
//! Candidate `(g, c)` draws its projection from the stream
//! `seed.derive([RP_CANDIDATE, g, c])`, so results do not depend on thread
//! scheduling or on the number of groups trained alongside it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{BaseClassifierSpec, Classifier, FittedBase};
use crate::data::{Label, LabeledDataset};
use crate::error::{Error, Result};
use crate::estimation::ErrorEstimatorSpec;
use crate::projection::{project, Projection, ProjectionFamily};
use crate::rng::{streams, RngSeed};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaMode {
    Fixed(f64),
    DataDriven,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpEnsembleConfig {
    pub d: usize,
    pub b1: usize,
    pub b2: usize,
    pub base: BaseClassifierSpec,
    /// `None` selects the default estimator for the base classifier.
    #[serde(default)]
    pub estimator: Option<ErrorEstimatorSpec>,
    #[serde(default)]
    pub family: ProjectionFamily,
    pub alpha: AlphaMode,
    pub seed: RngSeed,
    /// Retain every candidate's error estimate in the model.
    #[serde(default)]
    pub keep_candidates: bool,
}

impl Default for RpEnsembleConfig {
    fn default() -> Self {
        Self {
            d: 5,
            b1: 500,
            b2: 50,
            base: BaseClassifierSpec::lda(),
            estimator: None,
            family: ProjectionFamily::Gaussian,
            alpha: AlphaMode::DataDriven,
            seed: RngSeed(0),
            keep_candidates: false,
        }
    }
}

impl RpEnsembleConfig {
    pub fn estimator(&self) -> ErrorEstimatorSpec {
        self.estimator.unwrap_or_else(|| ErrorEstimatorSpec::default_for(self.base.kind))
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if self.d < 1 || self.d > p {
            return Err(Error::InvalidDims { d: self.d, p });
        }
        if self.b1 < 1 || self.b2 < 1 {
            return Err(Error::InvalidConfig(format!("b1={} and b2={} must be positive", self.b1, self.b2)));
        }
        if let AlphaMode::Fixed(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::InvalidConfig(format!("alpha={a} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

/// `nu = votes / b1`, the fraction of ensemble members voting for class 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoteFraction {
    pub votes: usize,
    pub b1: usize,
}

impl VoteFraction {
    pub fn nu(&self) -> f64 {
        fraction(self.votes, self.b1)
    }
}

fn fraction(votes: usize, b1: usize) -> f64 {
    votes as f64 / b1 as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RpEnsembleModel {
    config: RpEnsembleConfig,
    dim: usize,
    projections: Vec<Projection>,
    bases: Vec<FittedBase>,
    alpha: f64,
    selected_estimates: Vec<f64>,
    selected_candidates: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    candidate_estimates: Option<Vec<Vec<f64>>>,
}

struct GroupOutcome {
    projection: Projection,
    base: FittedBase,
    estimate: f64,
    winner: usize,
    all_estimates: Vec<f64>,
}

fn run_group(data: &LabeledDataset, config: &RpEnsembleConfig, group: usize) -> Result<GroupOutcome> {
    let estimator = config.estimator();
    let p = data.dim();
    let candidates = (0..config.b2)
        .into_par_iter()
        .map(|c| {
            let seed = config.seed.derive(&[streams::RP_CANDIDATE, group as u64, c as u64]);
            let a = config.family.sample(config.d, p, seed)?;
            let projected = project(&a, data)?;
            let estimate = estimator.estimate(&config.base, &projected).ok().map(|e| e.value);
            Ok((a, projected, estimate))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best: Option<(usize, f64)> = None;
    for (c, (_, _, est)) in candidates.iter().enumerate() {
        if let Some(v) = *est {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((c, v));
            }
        }
    }
    let (winner, estimate) = best.ok_or(Error::UntrainableEnsemble { group })?;
    let all_estimates = candidates.iter().map(|(_, _, e)| e.unwrap_or(1.0)).collect();
    let (projection, projected, _) = candidates.into_iter().nth(winner).expect("winner index in range");
    let base = config.base.fit(&projected)?;
    Ok(GroupOutcome { projection, base, estimate, winner, all_estimates })
}

pub fn train_rp_ensemble(data: &LabeledDataset, config: &RpEnsembleConfig) -> Result<RpEnsembleModel> {
    config.validate(data.dim())?;
    let counts = data.class_counts();
    for r in 0..2u8 {
        if counts[r as usize] == 0 {
            return Err(Error::MissingClass(r));
        }
    }
    let groups = (0..config.b1)
        .into_par_iter()
        .map(|g| run_group(data, config, g))
        .collect::<Result<Vec<_>>>()?;

    let mut model = RpEnsembleModel {
        config: config.clone(),
        dim: data.dim(),
        projections: Vec::with_capacity(config.b1),
        bases: Vec::with_capacity(config.b1),
        alpha: 0.5,
        selected_estimates: Vec::with_capacity(config.b1),
        selected_candidates: Vec::with_capacity(config.b1),
        candidate_estimates: config.keep_candidates.then(Vec::new),
    };
    for g in groups {
        model.projections.push(g.projection);
        model.bases.push(g.base);
        model.selected_estimates.push(g.estimate);
        model.selected_candidates.push(g.winner);
        if let Some(all) = model.candidate_estimates.as_mut() {
            all.push(g.all_estimates);
        }
    }
    model.alpha = match config.alpha {
        AlphaMode::Fixed(a) => a,
        AlphaMode::DataDriven => {
            let votes = model.vote_counts(data)?;
            select_alpha(&votes, config.b1, data.labels())?
        }
    };
    Ok(model)
}

impl RpEnsembleModel {
    /// Assemble a model from already-fitted members. Each base classifier must
    /// act on the output space of the matching projection.
    pub fn from_members(
        config: RpEnsembleConfig,
        projections: Vec<Projection>,
        bases: Vec<FittedBase>,
        alpha: f64,
    ) -> Result<Self> {
        let b1 = projections.len();
        if b1 == 0 || bases.len() != b1 {
            return Err(Error::InvalidConfig(format!(
                "{} projections and {} base classifiers",
                b1,
                bases.len()
            )));
        }
        let dim = projections[0].cols();
        for (a, b) in projections.iter().zip(&bases) {
            if a.cols() != dim || a.rows() != b.dim() {
                return Err(Error::DimMismatch { expected: a.rows(), found: b.dim() });
            }
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!("alpha={alpha} outside [0, 1]")));
        }
        let config = RpEnsembleConfig { b1, ..config };
        Ok(Self {
            config,
            dim,
            projections,
            bases,
            alpha,
            selected_estimates: vec![f64::NAN; b1],
            selected_candidates: vec![0; b1],
            candidate_estimates: None,
        })
    }

    pub fn config(&self) -> &RpEnsembleConfig {
        &self.config
    }

    pub fn b1(&self) -> usize {
        self.projections.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidConfig(format!("alpha={alpha} outside [0, 1]")));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn projections(&self) -> &[Projection] {
        &self.projections
    }

    pub fn bases(&self) -> &[FittedBase] {
        &self.bases
    }

    pub fn selected_estimates(&self) -> &[f64] {
        &self.selected_estimates
    }

    /// Index `b2*` of the kept candidate in each group.
    pub fn selected_candidates(&self) -> &[usize] {
        &self.selected_candidates
    }

    pub fn candidate_estimates(&self) -> Option<&[Vec<f64>]> {
        self.candidate_estimates.as_deref()
    }

    fn member_vote(&self, member: usize, x: &[f64]) -> bool {
        let a = &self.projections[member];
        let z: Vec<f64> = a
            .entries()
            .chunks_exact(a.cols())
            .map(|row| row.iter().zip(x).map(|(u, v)| u * v).sum())
            .collect();
        self.bases[member].classify(&z) == 1
    }

    pub fn vote_fraction(&self, x: &[f64]) -> Result<VoteFraction> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: x.len() });
        }
        let votes = (0..self.b1()).filter(|&b| self.member_vote(b, x)).count();
        Ok(VoteFraction { votes, b1: self.b1() })
    }

    /// Votes for class 1 at every observation of `data`.
    pub fn vote_counts(&self, data: &LabeledDataset) -> Result<Vec<usize>> {
        if data.dim() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: data.dim() });
        }
        let per_member: Vec<Vec<Label>> = self
            .projections
            .par_iter()
            .zip(self.bases.par_iter())
            .map(|(a, base)| {
                let projected = project(a, data).expect("dimensions checked above");
                projected.rows().map(|z| base.classify(z)).collect()
            })
            .collect();
        let mut votes = vec![0usize; data.n()];
        for member in &per_member {
            for (v, &y) in votes.iter_mut().zip(member) {
                *v += y as usize;
            }
        }
        Ok(votes)
    }

    fn decide(&self, votes: usize) -> Label {
        u8::from(fraction(votes, self.b1()) >= self.alpha)
    }
}

impl Classifier for RpEnsembleModel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn classify(&self, x: &[f64]) -> Label {
        let votes = (0..self.b1()).filter(|&b| self.member_vote(b, x)).count();
        self.decide(votes)
    }

    fn predict_dataset(&self, data: &LabeledDataset) -> Result<Vec<Label>> {
        Ok(self.vote_counts(data)?.into_iter().map(|v| self.decide(v)).collect())
    }
}

pub fn vote_fraction(model: &RpEnsembleModel, x: &[f64]) -> Result<VoteFraction> {
    model.vote_fraction(x)
}

pub fn predict_rp_ensemble(model: &RpEnsembleModel, x: &[f64]) -> Result<Label> {
    model.predict(x)
}

/// Choose the voting threshold minimising the training misclassification
/// count over the candidates `{0, nu_i, nu_i + 1/(2 b1), 1}`.
///
/// Ties go to the candidate closest to the class-1 proportion, then to the
/// smaller threshold.
pub fn select_alpha(votes: &[usize], b1: usize, labels: &[Label]) -> Result<f64> {
    if votes.len() != labels.len() {
        return Err(Error::DimMismatch { expected: labels.len(), found: votes.len() });
    }
    let n1 = labels.iter().filter(|&&y| y == 1).count();
    if n1 == 0 {
        return Err(Error::MissingClass(1));
    }
    if n1 == labels.len() {
        return Err(Error::MissingClass(0));
    }
    let pi1 = n1 as f64 / labels.len() as f64;
    let nus: Vec<f64> = votes.iter().map(|&v| fraction(v, b1)).collect();
    let half_step = 0.5 / b1 as f64;
    let mut candidates = vec![0.0, 1.0];
    for &nu in &nus {
        candidates.push(nu);
        if nu + half_step <= 1.0 {
            candidates.push(nu + half_step);
        }
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mistakes = |alpha: f64| {
        nus.iter()
            .zip(labels)
            .filter(|(&nu, &y)| (nu >= alpha) != (y == 1))
            .count()
    };
    let mut best = (usize::MAX, f64::INFINITY, f64::INFINITY);
    for alpha in candidates {
        let key = (mistakes(alpha), (alpha - pi1).abs(), alpha);
        if key.0 < best.0 || (key.0 == best.0 && (key.1 < best.1 || (key.1 == best.1 && key.2 < best.2))) {
            best = key;
        }
    }
    Ok(best.2)
}
