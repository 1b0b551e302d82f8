//! Small dense linear-algebra helpers shared by the discriminant rules.

use nalgebra::{DMatrix, DVector};

/// Reciprocal condition number below which a covariance solve is refused.
pub const RCOND_THRESHOLD: f64 = 1e-12;

/// Inverse of a symmetric positive definite matrix together with its log-determinant.
#[derive(Debug, Clone)]
pub struct SpdInverse {
    pub inverse: DMatrix<f64>,
    pub log_det: f64,
}

pub fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Reciprocal 2-norm condition number of a symmetric matrix, `lambda_min / lambda_max`.
/// Returns 0 for matrices that are not positive definite.
pub fn reciprocal_condition(m: &DMatrix<f64>) -> f64 {
    let eig = m.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || !(min > 0.0) {
        return 0.0;
    }
    min / max
}

/// Invert a symmetric matrix after checking its conditioning.
///
/// Returns `None` when the reciprocal condition number is below
/// [`RCOND_THRESHOLD`] or the Cholesky factorisation breaks down.
pub fn spd_inverse(m: &DMatrix<f64>) -> Option<SpdInverse> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return None;
    }
    if reciprocal_condition(m) < RCOND_THRESHOLD {
        return None;
    }
    let chol = m.clone().cholesky()?;
    let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>();
    let mut inverse = chol.inverse();
    symmetrize(&mut inverse);
    Some(SpdInverse { inverse, log_det })
}

pub fn quad_form(prec: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(prec * v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_log_det() {
        let m = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 1.0, 3.0]);
        let inv = spd_inverse(&m).unwrap();
        let id = &m * &inv.inverse;
        assert!((id - DMatrix::identity(2, 2)).norm() < 1e-14);
        assert!((inv.log_det - 11f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn singular_is_refused() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(spd_inverse(&m).is_none());
        assert!(spd_inverse(&DMatrix::zeros(3, 3)).is_none());
        let near = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1e-13]));
        assert!(spd_inverse(&near).is_none());
    }
}
