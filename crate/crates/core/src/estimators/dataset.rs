use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::matrix_from_rows;
use crate::ranks::rank_vector;

/// Covariates plus the (ranked) response.
///
/// Rows must be complete; missing data is dropped before a `Dataset` is
/// built. `ranks` are always present, raw `responses` are optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    covariates: DMatrix<f64>,
    responses: Option<Vec<f64>>,
    ranks: Vec<f64>,
    intercept: bool,
}

impl Dataset {
    /// Builds a dataset from raw responses; ranks are derived from them.
    pub fn new(covariates: DMatrix<f64>, responses: Vec<f64>) -> Result<Self> {
        check_shape(&covariates, responses.len())?;
        if responses.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("responses must be finite".into()));
        }
        let ranks = rank_vector(&responses)?;
        Ok(Self {
            covariates,
            responses: Some(responses),
            ranks,
            intercept: true,
        })
    }

    /// Builds a dataset when only the ranks of the responses are known.
    /// Any finite ordinal scores are accepted; they are re-ranked.
    pub fn from_ranks(covariates: DMatrix<f64>, ranks: Vec<f64>) -> Result<Self> {
        check_shape(&covariates, ranks.len())?;
        if ranks.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("ranks must be finite".into()));
        }
        let ranks = rank_vector(&ranks)?;
        Ok(Self {
            covariates,
            responses: None,
            ranks,
            intercept: true,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>], responses: Vec<f64>) -> Result<Self> {
        Self::new(matrix_from_rows(rows)?, responses)
    }

    /// Whether an intercept column is fitted alongside the covariates.
    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    pub fn n(&self) -> usize {
        self.covariates.nrows()
    }

    pub fn p(&self) -> usize {
        self.covariates.ncols()
    }

    pub fn covariates(&self) -> &DMatrix<f64> {
        &self.covariates
    }

    pub fn responses(&self) -> Option<&[f64]> {
        self.responses.as_deref()
    }

    pub fn ranks(&self) -> &[f64] {
        &self.ranks
    }

    pub fn intercept(&self) -> bool {
        self.intercept
    }

    /// Drops the raw responses, keeping only their ranks.
    pub fn ranks_only(mut self) -> Self {
        self.responses = None;
        self
    }

    /// `H_n^*(Y_i) = R_n(Y_i)/(n+1)`.
    pub fn hstar(&self) -> Vec<f64> {
        let denom = (self.n() + 1) as f64;
        self.ranks.iter().map(|r| r / denom).collect()
    }

    /// Design matrix used for least squares, with a leading column of ones
    /// when an intercept is fitted.
    pub(crate) fn design(&self) -> DMatrix<f64> {
        if !self.intercept {
            return self.covariates.clone();
        }
        let (n, p) = self.covariates.shape();
        DMatrix::from_fn(n, p + 1, |i, j| {
            if j == 0 {
                1.0
            } else {
                self.covariates[(i, j - 1)]
            }
        })
    }

    /// Splits least-squares coefficients into (slopes, intercept).
    pub(crate) fn split_coefficients(&self, coef: &[f64]) -> (Vec<f64>, Option<f64>) {
        if self.intercept {
            (coef[1..].to_vec(), Some(coef[0]))
        } else {
            (coef.to_vec(), None)
        }
    }

    /// Rows `idx` (repeats allowed) with the response re-ranked inside the
    /// new sample.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let p = self.p();
        let covariates = DMatrix::from_fn(idx.len(), p, |i, j| self.covariates[(idx[i], j)]);
        let out = match &self.responses {
            Some(y) => Self::new(covariates, idx.iter().map(|&i| y[i]).collect())?,
            None => Self::from_ranks(covariates, idx.iter().map(|&i| self.ranks[i]).collect())?,
        };
        Ok(out.with_intercept(self.intercept))
    }

    /// The dataset with row `i` removed and ranks recomputed on the rest.
    pub fn leave_one_out(&self, i: usize) -> Result<Self> {
        let idx: Vec<usize> = (0..self.n()).filter(|&k| k != i).collect();
        self.subset(&idx)
    }

    /// Same covariates with a different response.
    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        Ok(Self::new(self.covariates.clone(), responses)?.with_intercept(self.intercept))
    }
}

fn check_shape(x: &DMatrix<f64>, len: usize) -> Result<()> {
    let (n, p) = x.shape();
    if len == 0 {
        return Err(Error::EmptyInput);
    }
    if n != len {
        return Err(Error::InvalidInput(format!(
            "covariates have {n} rows but the response has {len} entries"
        )));
    }
    // a square system (n = p, no intercept) is still solvable
    if p == 0 || n < p {
        return Err(Error::InvalidInput(format!("need n >= p >= 1, got n = {n}, p = {p}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("covariates must be finite".into()));
    }
    Ok(())
}
