//! Rank-based direction estimators and their population constants.
//!
//! Every estimator returns a [`DirectionEstimate`]. The linear parameter is
//! only identified up to a positive scalar, so the quantity of interest is
//! `beta_unit` (or, for two covariates, the angle `arctan(β₂/β₁)`).
//! An intercept, when requested, is fitted but never enters the normalised
//! direction.

mod dataset;
mod eqr;
mod quantile;
mod simplex;
mod spearmax;
mod truth;

use std::fmt;
use std::str::FromStr;

pub use dataset::Dataset;
pub use eqr::{eqr_fit, EqrOptions};
pub use quantile::{gqr_fit, ols_fit, tgqr_fit};
pub use simplex::{nelder_mead, NelderMeadOptions, NelderMeadResult};
pub use spearmax::{
    rank_product_sum, spearman_objective, spearmax_fit, SpearmaxOptions, SpearmaxSearch,
};
pub use truth::{dispersion_matrix_a, rank_dispersion_matrix, sigma_star, ModelTruth};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gqr,
    Tgqr,
    Eqr,
    Spearmax,
    Ols,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Gqr,
        Method::Tgqr,
        Method::Eqr,
        Method::Spearmax,
        Method::Ols,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gqr => "gqr",
            Method::Tgqr => "tgqr",
            Method::Eqr => "eqr",
            Method::Spearmax => "spearmax",
            Method::Ols => "ols",
        }
    }

    /// Whether the estimator only sees the responses through their ranks.
    pub fn rank_based(self) -> bool {
        !matches!(self, Method::Ols)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gqr" => Ok(Method::Gqr),
            "tgqr" => Ok(Method::Tgqr),
            "eqr" => Ok(Method::Eqr),
            "spearmax" => Ok(Method::Spearmax),
            "ols" => Ok(Method::Ols),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

impl serde::Serialize for Method {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> serde::Deserialize<'de> for Method {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionEstimate {
    pub method: Method,
    /// Slope coefficients as fitted, intercept excluded.
    pub beta_raw: Vec<f64>,
    pub intercept: Option<f64>,
    pub beta_unit: Vec<f64>,
    /// `arctan(β₂/β₁)` when there are exactly two covariates and `β₁ ≠ 0`.
    pub angle_rad: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Spearman correlation for Spearmax, last step length for EQR.
    pub objective: Option<f64>,
}

impl DirectionEstimate {
    pub(crate) fn from_raw(
        method: Method,
        beta_raw: Vec<f64>,
        intercept: Option<f64>,
    ) -> Result<Self> {
        let beta_unit = normalize_direction(&beta_raw)?;
        let angle_rad = if beta_unit.len() == 2 {
            direction_angle(&beta_unit).ok()
        } else {
            None
        };
        Ok(Self {
            method,
            beta_raw,
            intercept,
            beta_unit,
            angle_rad,
            iterations: 0,
            converged: true,
            objective: None,
        })
    }
}

/// Tuning for [`fit`]; each estimator only reads its own section.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitOptions {
    pub eqr: EqrOptions,
    pub spearmax: SpearmaxOptions,
}

impl FitOptions {
    /// Same options with the Spearmax restart seed replaced.
    pub fn with_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        out.spearmax.seed = seed;
        out
    }
}

/// Dispatches to the estimator named by `method`.
pub fn fit(method: Method, data: &Dataset, options: &FitOptions) -> Result<DirectionEstimate> {
    match method {
        Method::Gqr => gqr_fit(data),
        Method::Tgqr => tgqr_fit(data),
        Method::Eqr => eqr_fit(data, &options.eqr),
        Method::Spearmax => spearmax_fit(data, &options.spearmax),
        Method::Ols => ols_fit(data),
    }
}

/// `β / ‖β‖₂`.
pub fn normalize_direction(beta: &[f64]) -> Result<Vec<f64>> {
    let norm = beta.iter().map(|b| b * b).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(beta.iter().map(|b| b / norm).collect())
}

/// `arctan(β₂/β₁)` in `(−π/2, π/2)`.
pub fn direction_angle(beta: &[f64]) -> Result<f64> {
    if beta.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "angle needs exactly two coefficients, got {}",
            beta.len()
        )));
    }
    if beta[0] == 0.0 || !beta[0].is_finite() || !beta[1].is_finite() {
        return Err(Error::AngleUndefined);
    }
    Ok((beta[1] / beta[0]).atan())
}
