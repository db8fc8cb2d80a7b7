//! Gaussian quantile regression (plain and truncated) and the OLS baseline.

use super::{Dataset, DirectionEstimate, Method};
use crate::error::{Error, Result};
use crate::gaussian::{quantile_unchecked, truncation_level};
use crate::linalg::least_squares;

pub(crate) fn regress(
    method: Method,
    data: &Dataset,
    pseudo_response: &[f64],
) -> Result<DirectionEstimate> {
    let coef = least_squares(&data.design(), pseudo_response)?;
    let (slopes, intercept) = data.split_coefficients(coef.as_slice());
    DirectionEstimate::from_raw(method, slopes, intercept)
}

/// Least squares of `Φ⁻¹(R_n(Y_i)/(n+1))` on the covariates.
///
/// Under Gaussian covariates and errors the slopes converge to `σ*β₀`.
pub fn gqr_fit(data: &Dataset) -> Result<DirectionEstimate> {
    let z: Vec<f64> = data.hstar().into_iter().map(quantile_unchecked).collect();
    regress(Method::Gqr, data, &z)
}

/// [`gqr_fit`] with the quantile clamped at `±√(½ log n)`.
pub fn tgqr_fit(data: &Dataset) -> Result<DirectionEstimate> {
    let trunc = truncation_level(data.n())?;
    let z: Vec<f64> = data
        .hstar()
        .into_iter()
        .map(|h| trunc.quantile_unchecked(h))
        .collect();
    regress(Method::Tgqr, data, &z)
}

/// Ordinary least squares on the raw responses.
pub fn ols_fit(data: &Dataset) -> Result<DirectionEstimate> {
    let y = data.responses().ok_or(Error::MissingResponses)?;
    regress(Method::Ols, data, y)
}
