//! Resampling intervals for the fitted direction and a normality diagnostic.
//!
//! The jackknife formulas follow the leave-one-out construction: the `i`-th
//! subsample drops row `i` and re-ranks the remaining responses. Angles are
//! `arctan(β₂/β₁)`, which has period `π`; resampled angles are shifted by
//! multiples of `π` towards the full-sample estimate before any averaging.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimators::{direction_angle, fit, Dataset, FitOptions, Method};
use crate::gaussian::{std_normal_cdf, std_normal_quantile};
use crate::parallel::map_indexed;

/// Largest `n` accepted by [`studentized_ci`]; the nested jackknife costs
/// `O(n²)` refits.
pub const STUDENTIZED_CAP: usize = 200;

/// Largest tolerated share of failed bootstrap refits.
pub const MAX_FAILURE_RATE: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CiMethod {
    BootstrapPercentile,
    JackknifeNormal,
    JackknifeBiasCorrected,
    PercentileJackknife,
    Studentized,
}

impl CiMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CiMethod::BootstrapPercentile => "bootstrap_percentile",
            CiMethod::JackknifeNormal => "jackknife_normal",
            CiMethod::JackknifeBiasCorrected => "jackknife_bias_corrected",
            CiMethod::PercentileJackknife => "percentile_jackknife",
            CiMethod::Studentized => "studentized",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalEstimate {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub method: CiMethod,
    pub replicates: usize,
    pub bias_estimate: Option<f64>,
    pub variance_estimate: Option<f64>,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    /// Whether zero lies outside the interval.
    pub fn excludes_zero(&self) -> bool {
        !self.contains(0.0)
    }
}

/// Bootstrap output: one interval per unit coefficient, plus the angle when
/// there are two covariates.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapResult {
    pub coefficients: Vec<IntervalEstimate>,
    pub angle: Option<IntervalEstimate>,
    pub failures: usize,
    pub requested: usize,
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("confidence level {level} is not in (0, 1)")))
    }
}

/// `z = Φ⁻¹(1 − (1 − level)/2)`.
pub fn normal_critical_value(level: f64) -> Result<f64> {
    check_level(level)?;
    std_normal_quantile(1.0 - (1.0 - level) / 2.0)
}

/// Shifts `theta` by a multiple of `π` to the representative closest to
/// `center`.
pub fn unwrap_angle(theta: f64, center: f64) -> f64 {
    theta - PI * ((theta - center) / PI).round()
}

/// One-based order-statistic indices `(k₁, k₂)` of a percentile interval
/// from `b` sorted replicates: `k₁ = ⌊b(1−level)/2⌋` (at least 1) and
/// `k₂ = ⌊b(1−(1−level)/2)⌋ + 1` (at most `b`).
pub fn percentile_indices(b: usize, level: f64) -> Result<(usize, usize)> {
    check_level(level)?;
    if b == 0 {
        return Err(Error::InvalidInput("no replicates".into()));
    }
    let alpha = 1.0 - level;
    let bf = b as f64;
    // guard the floor against representation error, e.g. 1000 × 0.975
    let floor = |x: f64| (x + 1e-9).floor() as usize;
    let k1 = floor(bf * alpha / 2.0).max(1);
    let k2 = (floor(bf * (1.0 - alpha / 2.0)) + 1).min(b);
    Ok((k1.min(k2), k2))
}

fn percentile_bounds(values: &mut [f64], level: f64) -> Result<(f64, f64)> {
    values.sort_by(f64::total_cmp);
    let (k1, k2) = percentile_indices(values.len(), level)?;
    Ok((values[k1 - 1], values[k2 - 1]))
}

fn replicate_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Pairs bootstrap: resample rows with replacement, re-rank, refit.
///
/// Replicate `b` uses its own random stream derived from `(seed, b)`, so the
/// result does not depend on the number of worker threads. Failed refits are
/// dropped; more than 20% failures is an error.
pub fn bootstrap_ci(
    data: &Dataset,
    method: Method,
    options: &FitOptions,
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapResult> {
    check_level(level)?;
    if replicates < 2 {
        return Err(Error::InvalidInput("bootstrap needs at least 2 replicates".into()));
    }
    let full = fit(method, data, options)?;
    let n = data.n();
    let fits = map_indexed(replicates, |b| {
        let mut rng = replicate_rng(seed, b);
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        data.subset(&idx).and_then(|d| fit(method, &d, options))
    });
    let ok: Vec<_> = fits.into_iter().filter_map(|r| r.ok()).collect();
    let failures = replicates - ok.len();
    if ok.len() < 2 || failures as f64 > MAX_FAILURE_RATE * replicates as f64 {
        return Err(Error::TooManyFailures {
            failed: failures,
            total: replicates,
        });
    }

    let mut coefficients = Vec::with_capacity(data.p());
    for j in 0..data.p() {
        let mut vals: Vec<f64> = ok.iter().map(|e| e.beta_unit[j]).collect();
        let (lower, upper) = percentile_bounds(&mut vals, level)?;
        coefficients.push(IntervalEstimate {
            point: full.beta_unit[j],
            lower,
            upper,
            level,
            method: CiMethod::BootstrapPercentile,
            replicates: ok.len(),
            bias_estimate: None,
            variance_estimate: None,
        });
    }

    let angle = match full.angle_rad {
        Some(theta) => {
            let mut vals: Vec<f64> = ok
                .iter()
                .filter_map(|e| e.angle_rad)
                .map(|a| unwrap_angle(a, theta))
                .collect();
            if vals.len() < 2 {
                None
            } else {
                let used = vals.len();
                let (lower, upper) = percentile_bounds(&mut vals, level)?;
                Some(IntervalEstimate {
                    point: theta,
                    lower,
                    upper,
                    level,
                    method: CiMethod::BootstrapPercentile,
                    replicates: used,
                    bias_estimate: None,
                    variance_estimate: None,
                })
            }
        }
        None => None,
    };

    Ok(BootstrapResult {
        coefficients,
        angle,
        failures,
        requested: replicates,
    })
}

fn loo_angles(data: &Dataset, method: Method, options: &FitOptions) -> Vec<Result<f64>> {
    map_indexed(data.n(), |i| {
        let est = data
            .leave_one_out(i)
            .and_then(|d| fit(method, &d, options))
            .map_err(|e| Error::LeaveOutFailed {
                index: i,
                reason: e.to_string(),
            })?;
        direction_angle(&est.beta_unit).map_err(|e| Error::LeaveOutFailed {
            index: i,
            reason: e.to_string(),
        })
    })
}

/// Angle of the estimate refitted without row `i`, for every `i`.
pub fn jackknife_angles(data: &Dataset, method: Method, options: &FitOptions) -> Result<Vec<f64>> {
    if data.n() < 3 || data.p() != 2 {
        return Err(Error::InvalidInput(format!(
            "jackknife angles need n >= 3 and p = 2, got n = {}, p = {}",
            data.n(),
            data.p()
        )));
    }
    loo_angles(data, method, options).into_iter().collect()
}

/// `n⁻¹Σθᵢ² − (n⁻¹Σθᵢ)²`, computed on values shifted by `θ₁` so that a
/// constant vector gives exactly zero.
pub fn jackknife_variance(angles: &[f64]) -> f64 {
    let Some(&shift) = angles.first() else {
        return 0.0;
    };
    let n = angles.len() as f64;
    let (s, ss) = angles.iter().fold((0.0, 0.0), |(s, ss), a| {
        let d = a - shift;
        (s + d, ss + d * d)
    });
    let m = s / n;
    (ss / n - m * m).max(0.0)
}

/// Normal-theory interval `θ̂ ∓ zσ̃`, optionally shifted by `−μ̃`.
///
/// `σ̃² = (n−1)·jackknife_variance`, the usual jackknife inflation: the
/// leave-one-out angles vary roughly `n−1` times less than `θ̂` itself.
/// With `bias_correct` the interval is `[θ̂ − μ̃ − zσ̃, θ̂ − μ̃ + zσ̃]` where
/// `μ̃` is the mean leave-one-out angle; this subtracts the mean, not the
/// bias `μ̃ − θ̂`, and is kept exactly as written.
pub fn jackknife_normal_ci(
    theta_hat: f64,
    angles: &[f64],
    level: f64,
    bias_correct: bool,
) -> Result<IntervalEstimate> {
    let z = normal_critical_value(level)?;
    if angles.len() < 2 {
        return Err(Error::InvalidInput("jackknife needs at least 2 angles".into()));
    }
    let angles: Vec<f64> = angles.iter().map(|a| unwrap_angle(*a, theta_hat)).collect();
    let n = angles.len() as f64;
    let mu = angles.iter().sum::<f64>() / n;
    let var = (n - 1.0) * jackknife_variance(&angles);
    let sd = var.sqrt();
    let (center, method) = if bias_correct {
        (theta_hat - mu, CiMethod::JackknifeBiasCorrected)
    } else {
        (theta_hat, CiMethod::JackknifeNormal)
    };
    Ok(IntervalEstimate {
        point: theta_hat,
        lower: center - z * sd,
        upper: center + z * sd,
        level,
        method,
        replicates: angles.len(),
        bias_estimate: Some(mu),
        variance_estimate: Some(var),
    })
}

/// `[θ*₍k₁₎, θ*₍k₂₎]` from the sorted leave-one-out angles; see
/// [`percentile_indices`]. The point is the mean leave-one-out angle.
///
/// The percentile argument is justified for the known-covariance setting;
/// for other estimators it is a heuristic.
pub fn percentile_jackknife_ci(angles: &[f64], level: f64) -> Result<IntervalEstimate> {
    check_level(level)?;
    if angles.len() < 4 {
        return Err(Error::InvalidInput("percentile jackknife needs at least 4 angles".into()));
    }
    let mut sorted = angles.to_vec();
    let (lower, upper) = percentile_bounds(&mut sorted, level)?;
    let mu = angles.iter().sum::<f64>() / angles.len() as f64;
    Ok(IntervalEstimate {
        point: mu,
        lower,
        upper,
        level,
        method: CiMethod::PercentileJackknife,
        replicates: angles.len(),
        bias_estimate: None,
        variance_estimate: Some(jackknife_variance(angles)),
    })
}

/// Jackknife-t interval.
///
/// For each leave-one-out angle `θ*ᵢ`, an inner jackknife over the remaining
/// `n−1` rows gives `vᵢ`, the leave-one-out variance of `θ*ᵢ`. The
/// statistics `tᵢ = (θ*ᵢ − θ̂)/√vᵢ` have the spread of a standardised
/// estimate, so their order statistics are rescaled by the outer `σ̃` of
/// [`jackknife_normal_ci`]: `[θ̂ − t₍k₂₎σ̃, θ̂ − t₍k₁₎σ̃]`.
pub fn studentized_ci(
    data: &Dataset,
    method: Method,
    options: &FitOptions,
    level: f64,
    cap: usize,
) -> Result<IntervalEstimate> {
    check_level(level)?;
    let n = data.n();
    if n > cap {
        return Err(Error::SampleTooLarge { n, cap });
    }
    if n < 10 || data.p() != 2 {
        return Err(Error::InvalidInput(format!(
            "studentized interval needs n >= 10 and p = 2, got n = {n}, p = {}",
            data.p()
        )));
    }
    let theta_hat = direction_angle(&fit(method, data, options)?.beta_unit)?;

    let outer = map_indexed(n, |i| -> Result<(f64, f64)> {
        let fail = |e: Error| Error::LeaveOutFailed {
            index: i,
            reason: e.to_string(),
        };
        let sub = data.leave_one_out(i).map_err(fail)?;
        let est = fit(method, &sub, options).map_err(fail)?;
        let theta_i = unwrap_angle(direction_angle(&est.beta_unit).map_err(fail)?, theta_hat);
        let mut inner = Vec::with_capacity(n - 1);
        for j in 0..sub.n() {
            let e = sub
                .leave_one_out(j)
                .and_then(|d| fit(method, &d, options))
                .and_then(|e| direction_angle(&e.beta_unit))
                .map_err(fail)?;
            inner.push(unwrap_angle(e, theta_i));
        }
        Ok((theta_i, jackknife_variance(&inner)))
    });
    let outer: Vec<(f64, f64)> = outer.into_iter().collect::<Result<_>>()?;

    let thetas: Vec<f64> = outer.iter().map(|o| o.0).collect();
    let mut t: Vec<f64> = outer
        .iter()
        .map(|&(th, v)| {
            let d = th - theta_hat;
            if d == 0.0 {
                0.0
            } else {
                d / v.sqrt()
            }
        })
        .collect();
    let sd = ((n as f64 - 1.0) * jackknife_variance(&thetas)).sqrt();
    let (t1, t2) = percentile_bounds(&mut t, level)?;
    let (lower, upper) = if sd == 0.0 {
        (theta_hat, theta_hat)
    } else {
        (theta_hat - t2 * sd, theta_hat - t1 * sd)
    };
    Ok(IntervalEstimate {
        point: theta_hat,
        lower,
        upper,
        level,
        method: CiMethod::Studentized,
        replicates: n,
        bias_estimate: None,
        variance_estimate: Some(sd * sd),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AndersonDarling {
    /// Small-sample corrected statistic `A² (1 + 0.75/n + 2.25/n²)`.
    pub statistic: f64,
    /// Uncorrected `A²`.
    pub raw: f64,
    pub p_value: f64,
    pub reject_at_001: bool,
}

/// Anderson–Darling test of normality with mean and variance estimated from
/// the sample. The p-value uses the D'Agostino–Stephens approximation for
/// the corrected statistic; rejection at 0.001 means `p < 0.001`.
pub fn anderson_darling_normality(values: &[f64]) -> Result<AndersonDarling> {
    let n = values.len();
    if n < 8 {
        return Err(Error::InvalidInput(format!(
            "Anderson-Darling needs at least 8 values, got {n}"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite value".into()));
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0);
    if var == 0.0 {
        return Err(Error::InvalidInput("constant input".into()));
    }
    let sd = var.sqrt();
    let mut z: Vec<f64> = values.iter().map(|v| (v - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let mut s = 0.0;
    for i in 0..n {
        let lo = std_normal_cdf(z[i]).ln();
        // ln(1 − Φ(z)) = ln Φ(−z), which keeps precision in the upper tail
        let hi = std_normal_cdf(-z[n - 1 - i]).ln();
        s += (2 * i + 1) as f64 * (lo + hi);
    }
    let raw = -nf - s / nf;
    let statistic = raw * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p_value = ad_p_value(statistic);
    Ok(AndersonDarling {
        statistic,
        raw,
        p_value,
        reject_at_001: p_value < 0.001,
    })
}

fn ad_p_value(a: f64) -> f64 {
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    p.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::quantile_unchecked;
    use proptest::prelude::*;
    use rand_distr::{Distribution, StandardNormal};
    use rand::Rng;

    fn scenario(seed: u64, n: usize) -> Dataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                vec![a, 2f64.sqrt() * b]
            })
            .collect();
        let y: Vec<f64> = rows
            .iter()
            .map(|r| {
                let e: f64 = StandardNormal.sample(&mut rng);
                2.0 * r[0] + r[1] + e
            })
            .collect();
        Dataset::from_rows(&rows, y).unwrap()
    }

    #[test]
    fn percentile_index_formula() {
        assert_eq!(percentile_indices(1000, 0.95).unwrap(), (25, 976));
        assert_eq!(percentile_indices(2, 0.95).unwrap(), (1, 2));
        assert_eq!(percentile_indices(20, 0.999_999).unwrap(), (1, 20));
        assert!(percentile_indices(10, 1.0).is_err());
    }

    #[test]
    fn jackknife_variance_examples() {
        assert_eq!(jackknife_variance(&[0.7; 5]), 0.0);
        let v = jackknife_variance(&[0.0, PI / 2.0]);
        assert!((v - PI * PI / 16.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn jackknife_variance_matches_textbook(v in prop::collection::vec(-3.0f64..3.0, 2..50)) {
            let n = v.len() as f64;
            let m = v.iter().sum::<f64>() / n;
            let oracle = v.iter().map(|a| a * a).sum::<f64>() / n - m * m;
            let got = jackknife_variance(&v);
            prop_assert!(got >= 0.0);
            prop_assert!((got - oracle).abs() < 1e-12);
        }

        #[test]
        fn normal_ci_width_grows_with_level(
            v in prop::collection::vec(-1.0f64..1.0, 3..30),
            l1 in 0.01f64..0.98,
            dl in 0.0f64..0.01,
        ) {
            let a = jackknife_normal_ci(0.1, &v, l1, false).unwrap();
            let b = jackknife_normal_ci(0.1, &v, l1 + dl, false).unwrap();
            prop_assert!(a.lower <= a.upper);
            prop_assert!(b.width() >= a.width());
            let pa = percentile_jackknife_ci(&v.iter().chain(&v).copied().collect::<Vec<_>>(), l1).unwrap();
            let pb = percentile_jackknife_ci(&v.iter().chain(&v).copied().collect::<Vec<_>>(), l1 + dl).unwrap();
            prop_assert!(pb.width() >= pa.width());
        }

        #[test]
        fn ad_is_location_scale_invariant(
            v in prop::collection::vec(-5.0f64..5.0, 8..40),
            shift in -100.0f64..100.0,
            scale in 0.01f64..100.0,
        ) {
            prop_assume!(v.iter().any(|x| (x - v[0]).abs() > 1e-3));
            let a = anderson_darling_normality(&v).unwrap();
            let w: Vec<f64> = v.iter().map(|x| shift + scale * x).collect();
            let b = anderson_darling_normality(&w).unwrap();
            prop_assert!((a.statistic - b.statistic).abs() < 1e-8 * a.statistic.max(1.0));
        }
    }

    #[test]
    fn normal_ci_examples() {
        let ci = jackknife_normal_ci(0.4, &[0.4; 10], 0.95, false).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.4, 0.4));
        assert!((normal_critical_value(0.95).unwrap() - 1.959963984540054).abs() < 1e-12);
        let bc = jackknife_normal_ci(0.4, &[0.3, 0.5, 0.4, 0.4], 0.95, true).unwrap();
        assert!(((bc.lower + bc.upper) / 2.0).abs() < 1e-15);
        assert_eq!(bc.bias_estimate, Some(0.4));
        // σ̃² = (n−1)·variance = 3 · 0.005
        assert!((bc.variance_estimate.unwrap() - 0.015).abs() < 1e-15);
        assert!(jackknife_normal_ci(0.0, &[0.1, 0.2], 1.5, false).is_err());
    }

    #[test]
    fn angles_are_unwrapped_towards_the_estimate() {
        let half = PI / 2.0;
        assert!((unwrap_angle(-half + 0.01, half - 0.02) - (half + 0.01)).abs() < 1e-15);
        assert_eq!(unwrap_angle(0.3, 0.2), 0.3);
        let ci = jackknife_normal_ci(half - 0.01, &[half - 0.02, -half + 0.01], 0.9, false).unwrap();
        assert!(ci.width() < 0.2);
    }

    #[test]
    fn percentile_jackknife_examples() {
        let ci = percentile_jackknife_ci(&[0.2; 6], 0.95).unwrap();
        assert_eq!((ci.lower, ci.upper), (0.2, 0.2));
        let v = [0.5, -0.1, 0.3, 0.9, 0.0, 0.2];
        let ci = percentile_jackknife_ci(&v, 0.999_999).unwrap();
        assert_eq!((ci.lower, ci.upper), (-0.1, 0.9));
        assert!(percentile_jackknife_ci(&v[..3], 0.9).is_err());
    }

    #[test]
    fn bootstrap_b2_and_determinism() {
        let d = scenario(1, 40);
        let opts = FitOptions::default();
        let a = bootstrap_ci(&d, Method::Gqr, &opts, 2, 0.95, 9).unwrap();
        let b = bootstrap_ci(&d, Method::Gqr, &opts, 2, 0.95, 9).unwrap();
        assert_eq!(a, b);
        // recompute the two replicates by hand
        let n = d.n();
        let reps: Vec<f64> = (0..2)
            .map(|k| {
                let mut rng = replicate_rng(9, k);
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                fit(Method::Gqr, &d.subset(&idx).unwrap(), &opts).unwrap().beta_unit[0]
            })
            .collect();
        let c = &a.coefficients[0];
        assert_eq!(c.lower, reps[0].min(reps[1]));
        assert_eq!(c.upper, reps[0].max(reps[1]));
        assert_eq!(a.failures, 0);
        assert!(a.angle.is_some());
    }

    #[test]
    fn bootstrap_noiseless_covers_truth() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                vec![a, 2f64.sqrt() * b]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| (2.0 * r[0] + r[1]).powi(3)).collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let res = bootstrap_ci(&d, Method::Spearmax, &FitOptions::default(), 200, 0.95, 3).unwrap();
        let s5 = 5f64.sqrt();
        assert!(res.coefficients[0].contains(2.0 / s5), "{:?}", res.coefficients[0]);
        assert!(res.coefficients[1].contains(1.0 / s5), "{:?}", res.coefficients[1]);
        assert!(res.coefficients.iter().all(|c| c.excludes_zero()));
    }

    #[test]
    fn bootstrap_rejects_mostly_failing_estimator() {
        // responses are only known as ranks, so OLS fails on every resample
        let d = scenario(2, 30).ranks_only();
        assert!(bootstrap_ci(&d, Method::Ols, &FitOptions::default(), 10, 0.9, 1).is_err());
    }

    #[test]
    fn jackknife_angles_length_and_errors() {
        let d = scenario(3, 25);
        let a = jackknife_angles(&d, Method::Tgqr, &FitOptions::default()).unwrap();
        assert_eq!(a.len(), 25);
        let one = d.leave_one_out(7).unwrap();
        let e = fit(Method::Tgqr, &one, &FitOptions::default()).unwrap();
        assert_eq!(a[7], e.angle_rad.unwrap());

        let err = jackknife_angles(&d.clone().ranks_only(), Method::Ols, &FitOptions::default());
        assert!(matches!(err, Err(Error::LeaveOutFailed { index: 0, .. })));
    }

    #[test]
    fn symmetric_design_gives_constant_angles() {
        // Y depends on x₁ only and rows are arranged so that every
        // leave-one-out fit returns the first axis
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| {
                let v = i as f64 - 5.5;
                vec![v, if i % 2 == 0 { 1.0 } else { -1.0 }]
            })
            .collect();
        let y: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let d = Dataset::from_rows(&rows, y).unwrap();
        let a = jackknife_angles(&d, Method::Ols, &FitOptions::default()).unwrap();
        assert!(a.iter().all(|t| t.abs() < 1e-12));
        let ci = studentized_ci(&d, Method::Ols, &FitOptions::default(), 0.95, 200).unwrap();
        assert!(ci.width().abs() < 1e-12);
    }

    #[test]
    fn studentized_cap_and_shape() {
        let d = scenario(4, 30);
        assert_eq!(
            studentized_ci(&d, Method::Gqr, &FitOptions::default(), 0.95, 20),
            Err(Error::SampleTooLarge { n: 30, cap: 20 })
        );
        let ci = studentized_ci(&d, Method::Gqr, &FitOptions::default(), 0.95, 200).unwrap();
        assert!(ci.lower < ci.point && ci.point < ci.upper, "{ci:?}");
        let narrow = studentized_ci(&d, Method::Gqr, &FitOptions::default(), 0.5, 200).unwrap();
        assert!(narrow.width() <= ci.width());
    }

    #[test]
    fn anderson_darling_examples() {
        let n = 100;
        let scores: Vec<f64> = (1..=n).map(|i| quantile_unchecked(i as f64 / (n + 1) as f64)).collect();
        let a = anderson_darling_normality(&scores).unwrap();
        // scipy.stats.anderson: A² = 0.023610180208493148
        assert!((a.raw - 0.023610180208493148).abs() < 1e-9);
        assert!(a.statistic < 0.3 && !a.reject_at_001);

        let unif: Vec<f64> = (1..=n).map(|i| i as f64 / (n + 1) as f64).collect();
        let a = anderson_darling_normality(&unif).unwrap();
        assert!((a.raw - 1.0837094127385285).abs() < 1e-9);
        assert!(a.statistic > 1.0);

        let x = [0.3, -1.2, 2.5, 0.8, -0.4, 1.9, -2.2, 0.05, 1.1, -0.7, 3.4, 0.6];
        assert!((anderson_darling_normality(&x).unwrap().raw - 0.1100105955459636).abs() < 1e-9);

        let y = [0.1, 0.2, 0.15, 0.3, 5.0, 0.12, 0.22, 0.18, 0.11, 0.25];
        let a = anderson_darling_normality(&y).unwrap();
        assert!((a.raw - 2.9049515929129655).abs() < 1e-9);
        assert!((a.p_value - 5.485434034346873e-08).abs() < 1e-12);
        assert!(a.reject_at_001);

        assert!(anderson_darling_normality(&[1.0; 10]).is_err());
        assert!(anderson_darling_normality(&[1.0, 2.0, 3.0]).is_err());
    }
}
