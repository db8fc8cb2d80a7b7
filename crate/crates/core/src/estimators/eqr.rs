//! Empirical quantile regression: a fixed-point variant of GQR in which the
//! Gaussian quantile is replaced by the empirical quantile function of the
//! current fitted index.

use super::quantile::regress;
use super::{normalize_direction, Dataset, DirectionEstimate, Method};
use crate::error::Result;
use crate::gaussian::truncation_level;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqrOptions {
    pub tol: f64,
    pub maxiter: usize,
    /// Clamp the quantile levels at `1 − α_n` and `α_n`.
    pub truncate: bool,
}

impl Default for EqrOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            maxiter: 100,
            truncate: false,
        }
    }
}

/// Inverse of the empirical CDF of `sorted`, linearly interpolated between
/// the knots `(k/n, sorted[k-1])` and constant outside `[1/n, 1]`.
pub(crate) fn empirical_quantile(sorted: &[f64], u: f64) -> f64 {
    let n = sorted.len();
    let t = u * n as f64 - 1.0;
    if t <= 0.0 {
        return sorted[0];
    }
    if t >= (n - 1) as f64 {
        return sorted[n - 1];
    }
    let k = t.floor() as usize;
    let frac = t - k as f64;
    sorted[k] + frac * (sorted[k + 1] - sorted[k])
}

fn fitted_index(data: &Dataset, beta_unit: &[f64]) -> Vec<f64> {
    let x = data.covariates();
    (0..data.n())
        .map(|i| (0..data.p()).map(|j| x[(i, j)] * beta_unit[j]).sum())
        .collect()
}

/// Fixed-point iteration starting from least squares on `R/(n+1)`.
///
/// Each step maps the levels `R/(n+1)` through the empirical quantile
/// function of the current index `Xβ`, refits, and renormalises `β` to the
/// unit sphere. Stops once successive directions differ by less than `tol`
/// in Euclidean norm; hitting `maxiter` is reported through `converged`.
pub fn eqr_fit(data: &Dataset, options: &EqrOptions) -> Result<DirectionEstimate> {
    let levels = data.hstar();
    let clamp = if options.truncate {
        let t = truncation_level(data.n())?;
        Some((t.lower_level(), t.alpha_n))
    } else {
        None
    };
    let levels: Vec<f64> = match clamp {
        Some((lo, hi)) => levels.into_iter().map(|u| u.clamp(lo, hi)).collect(),
        None => levels,
    };

    let mut est = regress(Method::Eqr, data, &levels)?;
    let mut beta = est.beta_unit.clone();
    let mut converged = false;
    let mut iterations = 0;
    let mut step = f64::INFINITY;

    let mut pseudo = vec![0.0; data.n()];
    while iterations < options.maxiter {
        iterations += 1;
        let mut index = fitted_index(data, &beta);
        index.sort_unstable_by(f64::total_cmp);
        for (z, &u) in pseudo.iter_mut().zip(&levels) {
            *z = empirical_quantile(&index, u);
        }
        est = regress(Method::Eqr, data, &pseudo)?;
        let next = normalize_direction(&est.beta_raw)?;
        step = next
            .iter()
            .zip(&beta)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        beta = next;
        if step < options.tol {
            converged = true;
            break;
        }
    }

    est.iterations = iterations;
    est.converged = converged;
    est.objective = Some(step);
    Ok(est)
}
