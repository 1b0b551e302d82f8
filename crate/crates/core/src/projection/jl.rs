//! Johnson-Lindenstrauss dimension bound and empirical distortion checks.

use serde::{Deserialize, Serialize};

use super::Projection;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JlParams {
    epsilon: f64,
    delta: f64,
    n_points: usize,
}

impl JlParams {
    pub fn new(epsilon: f64, delta: f64, n_points: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidJlParams(format!("epsilon={epsilon} must lie in (0, 1)")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidJlParams(format!("delta={delta} must lie in (0, 1)")));
        }
        if n_points < 2 {
            return Err(Error::InvalidJlParams(format!("n_points={n_points} must be at least 2")));
        }
        Ok(Self { epsilon, delta, n_points })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }
}

/// `16 ln(n / delta) / epsilon^2`, before rounding.
pub fn jl_bound_value(params: &JlParams) -> f64 {
    16.0 * (params.n_points as f64 / params.delta).ln() / (params.epsilon * params.epsilon)
}

/// Projected dimension satisfying the strict lower bound: `ceil(bound) + 1`.
pub fn jl_dimension_bound(params: &JlParams) -> usize {
    jl_bound_value(params).ceil() as usize + 1
}

/// Extremes of `|Ax_i - Ax_j|^2 / |x_i - x_j|^2` over all pairs `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pairs: usize,
}

impl DistortionReport {
    /// Whether every ratio lies strictly inside `(1 - eps, 1 + eps)`.
    pub fn within(&self, epsilon: f64) -> bool {
        self.min_ratio > 1.0 - epsilon && self.max_ratio < 1.0 + epsilon
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn check_distortion(a: &Projection, points: &[Vec<f64>]) -> Result<DistortionReport> {
    if points.len() < 2 {
        return Err(Error::InvalidData("distortion check needs at least two points".into()));
    }
    let projected = points.iter().map(|x| a.apply(x)).collect::<Result<Vec<_>>>()?;
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut pairs = 0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let original = sq_dist(&points[i], &points[j]);
            if original == 0.0 {
                return Err(Error::DuplicatePoints { i, j });
            }
            let ratio = sq_dist(&projected[i], &projected[j]) / original;
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            pairs += 1;
        }
    }
    Ok(DistortionReport { min_ratio, max_ratio, pairs })
}
