//! Least squares and small dense-matrix helpers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative size below which a diagonal entry of `R` marks rank deficiency.
const RANK_TOL: f64 = 1e-10;

/// Minimiser of `‖z − Xβ‖²` via Householder QR.
pub fn least_squares(x: &DMatrix<f64>, z: &[f64]) -> Result<DVector<f64>> {
    let (n, p) = x.shape();
    if z.len() != n {
        return Err(Error::InvalidInput(format!(
            "design has {n} rows but response has {} entries",
            z.len()
        )));
    }
    if p == 0 || n < p {
        return Err(Error::InvalidInput(format!("need n >= p >= 1, got n = {n}, p = {p}")));
    }
    if z.iter().any(|v| !v.is_finite()) || x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value in least squares input".into()));
    }

    let qr = x.clone().qr();
    let r = qr.r();
    let scale = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if scale == 0.0 || (0..p).any(|i| r[(i, i)].abs() <= RANK_TOL * scale) {
        return Err(Error::SingularDesign);
    }

    let mut rhs = DVector::from_column_slice(z);
    qr.q_tr_mul(&mut rhs);
    let mut beta = rhs.rows(0, p).into_owned();
    if !r.solve_upper_triangular_mut(&mut beta) {
        return Err(Error::SingularDesign);
    }
    Ok(beta)
}

/// Validates symmetry and positive definiteness, returning the lower
/// Cholesky factor.
pub fn cholesky_lower(sigma: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (r, c) = sigma.shape();
    if r != c || r == 0 {
        return Err(Error::InvalidInput(format!("covariance must be square, got {r}x{c}")));
    }
    let scale = sigma.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..r {
        for j in 0..i {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::InvalidInput("covariance must be symmetric".into()));
            }
        }
    }
    sigma
        .clone()
        .cholesky()
        .map(|c| c.l())
        .ok_or(Error::NotPositiveDefinite)
}

pub(crate) fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    let p = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != p) {
        return Err(Error::InvalidInput("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
}
