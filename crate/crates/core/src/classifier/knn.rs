//! k-nearest-neighbour rule.
//!
//! Neighbours are ranked by squared Euclidean distance, ties going to the
//! lower training index. A tied vote goes to the class with more training
//! observations, and to class 0 when those counts are equal too.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Classifier;
use crate::data::{Label, LabeledDataset};
use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 5;

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Votes for class 1 among the `k` smallest `(distance, index)` pairs.
fn votes_among_nearest(mut candidates: Vec<(f64, usize)>, k: usize, labels: &[Label]) -> usize {
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, by_distance_then_index);
        candidates.truncate(k);
    }
    candidates.iter().filter(|&&(_, i)| labels[i] == 1).count()
}

fn decide(ones: usize, k: usize, counts: [usize; 2]) -> Label {
    let zeros = k - ones;
    match ones.cmp(&zeros) {
        Ordering::Greater => 1,
        Ordering::Less => 0,
        Ordering::Equal => u8::from(counts[1] > counts[0]),
    }
}

/// kNN classifier holding its (projected) training set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnClassifier {
    train: LabeledDataset,
    k: usize,
}

impl KnnClassifier {
    pub fn new(train: LabeledDataset, k: usize) -> Result<Self> {
        if k < 1 || k > train.n() {
            return Err(Error::InvalidK { k, n: train.n() });
        }
        Ok(Self { train, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn train(&self) -> &LabeledDataset {
        &self.train
    }
}

impl Classifier for KnnClassifier {
    fn dim(&self) -> usize {
        self.train.dim()
    }

    fn classify(&self, x: &[f64]) -> Label {
        let candidates = self.train.rows().enumerate().map(|(i, r)| (sq_dist(r, x), i)).collect();
        let ones = votes_among_nearest(candidates, self.k, self.train.labels());
        decide(ones, self.k, self.train.class_counts())
    }
}

pub fn predict_knn(train: &LabeledDataset, k: usize, x: &[f64]) -> Result<Label> {
    KnnClassifier::new(train.clone(), k)?.predict(x)
}

/// Leave-one-out predictions: observation `i` is classified by the rule
/// trained on the other `n - 1` points, by excluding it from its own
/// neighbour search.
pub fn knn_loo_predictions(data: &LabeledDataset, k: usize) -> Result<Vec<Label>> {
    let n = data.n();
    if k < 1 || k + 1 > n {
        return Err(Error::InvalidK { k, n: n.saturating_sub(1) });
    }
    let counts = data.class_counts();
    let labels = data.labels();
    Ok((0..n)
        .map(|i| {
            let xi = data.row(i);
            let candidates = (0..n)
                .filter(|&j| j != i)
                .map(|j| (sq_dist(data.row(j), xi), j))
                .collect();
            let ones = votes_among_nearest(candidates, k, labels);
            let mut fold_counts = counts;
            fold_counts[labels[i] as usize] -= 1;
            decide(ones, k, fold_counts)
        })
        .collect())
}
