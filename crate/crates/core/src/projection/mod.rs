//! Random projection matrices and their application to data.
//!
//! A [`Projection`] is a `d x p` matrix mapping `x` in `R^p` to `Ax` in `R^d`.
//! Four families are provided:
//!
//! - Gaussian: i.i.d. `N(0, 1/p)` entries.
//! - Haar: uniform on `{A : A A^T = I_d}`, via sign-corrected QR.
//! - Axis-aligned: `d` distinct coordinates chosen without replacement.
//! - Sparse: i.i.d. three-point entries `+-sqrt(s/p)` with probability `1/(2s)` each, else 0.
//!
//! Every sampler is a pure function of `(d, p, family parameters, seed)`.

mod jl;

pub use jl::{check_distortion, jl_bound_value, jl_dimension_bound, DistortionReport, JlParams};

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DMatrixView};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProjectionFamily {
    #[default]
    Gaussian,
    Haar,
    AxisAligned,
    /// Very sparse projections; `s = None` means `s = sqrt(p)`.
    Sparse { s: Option<f64> },
}

impl ProjectionFamily {
    pub fn sample(&self, d: usize, p: usize, seed: RngSeed) -> Result<Projection> {
        match *self {
            ProjectionFamily::Gaussian => sample_gaussian(d, p, seed),
            ProjectionFamily::Haar => sample_haar(d, p, seed),
            ProjectionFamily::AxisAligned => sample_axis_aligned(d, p, seed),
            ProjectionFamily::Sparse { s } => sample_sparse(d, p, s.unwrap_or((p as f64).sqrt()).max(1.0), seed),
        }
    }
}

impl fmt::Display for ProjectionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProjectionFamily::Gaussian => write!(f, "gaussian"),
            ProjectionFamily::Haar => write!(f, "haar"),
            ProjectionFamily::AxisAligned => write!(f, "axis-aligned"),
            ProjectionFamily::Sparse { s: None } => write!(f, "sparse"),
            ProjectionFamily::Sparse { s: Some(s) } => write!(f, "sparse:{s}"),
        }
    }
}

impl FromStr for ProjectionFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "gaussian" => Ok(Self::Gaussian),
            "haar" => Ok(Self::Haar),
            "axis" | "axis-aligned" | "axis_aligned" => Ok(Self::AxisAligned),
            "sparse" => Ok(Self::Sparse { s: None }),
            other => match other.strip_prefix("sparse:") {
                Some(v) => {
                    let s: f64 = v
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad sparsity in family '{s}'")))?;
                    if !(s >= 1.0) {
                        return Err(Error::InvalidSparsity(s));
                    }
                    Ok(Self::Sparse { s: Some(s) })
                }
                None => Err(Error::InvalidConfig(format!("unknown projection family '{s}'"))),
            },
        }
    }
}

/// A `d x p` projection matrix, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    /// `None` for matrices supplied by the caller rather than sampled.
    family: Option<ProjectionFamily>,
}

fn check_dims(d: usize, p: usize) -> Result<()> {
    if d < 1 || d > p {
        return Err(Error::InvalidDims { d, p });
    }
    Ok(())
}

impl Projection {
    /// Wrap an explicit row-major `rows x cols` matrix.
    pub fn from_row_major(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch { expected: rows * cols, found: entries.len() });
        }
        Ok(Self { rows, cols, entries, family: None })
    }

    pub fn identity(p: usize) -> Result<Self> {
        let m = DMatrix::<f64>::identity(p, p);
        Self::from_row_major(p, p, m.as_slice().to_vec())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn family(&self) -> Option<ProjectionFamily> {
        self.family
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    /// The matrix as an owned `d x p` nalgebra matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.entries)
    }

    /// `A^T` as a zero-copy `p x d` column-major view.
    pub fn transpose_view(&self) -> DMatrixView<'_, f64> {
        DMatrixView::from_slice(&self.entries, self.cols, self.rows)
    }

    /// `Ax` for a single point.
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimMismatch { expected: self.cols, found: x.len() });
        }
        Ok(self
            .entries
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `A X^T` for row-major `points` of width `p`; returns row-major `n x d`.
    pub(crate) fn apply_rows(&self, points: &[f64]) -> Vec<f64> {
        let n = points.len() / self.cols;
        let xt = DMatrixView::from_slice(points, self.cols, n);
        let projected = self.matrix() * xt;
        // column-major d x n is row-major n x d
        projected.as_slice().to_vec()
    }
}

pub fn sample_gaussian(d: usize, p: usize, seed: RngSeed) -> Result<Projection> {
    check_dims(d, p)?;
    let mut rng = seed.rng();
    let scale = 1.0 / (p as f64).sqrt();
    let entries = (0..d * p)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * scale)
        .collect();
    Ok(Projection { rows: d, cols: p, entries, family: Some(ProjectionFamily::Gaussian) })
}

pub fn sample_haar(d: usize, p: usize, seed: RngSeed) -> Result<Projection> {
    check_dims(d, p)?;
    let mut rng = seed.rng();
    let g = DMatrix::<f64>::from_fn(p, d, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    // rows of A are the columns of Q, contiguous in column-major storage
    let entries = q.as_slice().to_vec();
    Ok(Projection { rows: d, cols: p, entries, family: Some(ProjectionFamily::Haar) })
}

pub fn sample_axis_aligned(d: usize, p: usize, seed: RngSeed) -> Result<Projection> {
    check_dims(d, p)?;
    let mut rng = seed.rng();
    let chosen = rand::seq::index::sample(&mut rng, p, d);
    let mut entries = vec![0.0; d * p];
    for (row, coord) in chosen.iter().enumerate() {
        entries[row * p + coord] = 1.0;
    }
    Ok(Projection { rows: d, cols: p, entries, family: Some(ProjectionFamily::AxisAligned) })
}

pub fn sample_sparse(d: usize, p: usize, s: f64, seed: RngSeed) -> Result<Projection> {
    check_dims(d, p)?;
    if !(s >= 1.0) {
        return Err(Error::InvalidSparsity(s));
    }
    let mut rng = seed.rng();
    let magnitude = (s / p as f64).sqrt();
    let half = 0.5 / s;
    let entries = (0..d * p)
        .map(|_| {
            let u: f64 = rng.random();
            if u < half {
                magnitude
            } else if u < 2.0 * half {
                -magnitude
            } else {
                0.0
            }
        })
        .collect();
    Ok(Projection { rows: d, cols: p, entries, family: Some(ProjectionFamily::Sparse { s: Some(s) }) })
}

/// Project every observation, keeping labels and order.
pub fn project(a: &Projection, data: &LabeledDataset) -> Result<LabeledDataset> {
    if a.cols != data.dim() {
        return Err(Error::DimMismatch { expected: a.cols, found: data.dim() });
    }
    Ok(data.with_features(a.apply_rows(data.features()), a.rows))
}
