//! Numerical checks of the finite-sample lemmas and the limiting covariance.
//!
//! Every check is deterministic in its arguments. `perturb` multiplies the
//! quantity under test (1.0 leaves it alone); running with 1.1 is the
//! negative control for the harness.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::estimators::{dispersion_matrix_a, rank_dispersion_matrix, sigma_star, ModelTruth};
use crate::gaussian::{
    quantile_slope_bound, quantile_unchecked, std_normal_cdf, std_normal_pdf, truncation_level,
};
use crate::inference::anderson_darling_normality;
use crate::linalg::least_squares;
use crate::parallel::map_indexed;
use crate::ranks::rank_vector;
use crate::simulate::sample_mvn;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub passed: bool,
    pub n_used: usize,
    pub replicates: usize,
    pub detail: String,
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `Φ⁻¹(Φ(z))`, evaluated through the lower tail on both sides so that no
/// precision is lost to `1 − Φ(z)` rounding.
fn normal_round_trip(z: f64) -> f64 {
    if z <= 0.0 {
        quantile_unchecked(std_normal_cdf(z))
    } else {
        -quantile_unchecked(std_normal_cdf(-z))
    }
}

/// `max_i |Φ⁻¹(H(Y_i)) − σ*(x_i'β₀ + ε_i)|` with `H` the exact CDF of
/// `Y = x'β₀ + ε`, i.e. `N(0, β₀'Σβ₀ + σ²)`. Passes below `1e-8`.
pub fn check_lemma1(truth: &ModelTruth, n: usize, seed: u64, perturb: f64) -> CheckReport {
    let s = sigma_star(truth);
    let mut rng = stream(seed, 0);
    let x = sample_mvn(&truth.sigma, n, &mut rng).expect("validated covariance");
    let sd = truth.sigma_sq.sqrt();
    let mut worst = 0.0f64;
    for i in 0..n {
        let index: f64 = (0..truth.p()).map(|j| x[(i, j)] * truth.beta0[j]).sum();
        let y = index + sd * normal(&mut rng);
        let lhs = normal_round_trip(s * y);
        worst = worst.max((lhs - perturb * s * y).abs());
    }
    let threshold = 1e-8;
    CheckReport {
        name: "lemma1".into(),
        statistic: worst,
        threshold,
        passed: worst < threshold,
        n_used: n,
        replicates: 1,
        detail: format!("sigma_star = {s:.12}"),
    }
}

/// `n⁻¹ Σ_{k=1..n} Φ⁻¹(k/(n+1))⁴`; passes when at most 6.
pub fn check_lemma4(n: usize, perturb: f64) -> CheckReport {
    let stat = lemma4_mean(n, perturb);
    CheckReport {
        name: format!("lemma4_n{n}"),
        statistic: stat,
        threshold: 6.0,
        passed: stat <= 6.0,
        n_used: n,
        replicates: 1,
        detail: "normal fourth moment is 3".into(),
    }
}

/// Exact discrete mean `n⁻¹ Σ Φ⁻¹(k/(n+1))⁴`.
pub fn lemma4_mean(n: usize, perturb: f64) -> f64 {
    let d = (n + 1) as f64;
    (1..=n)
        .map(|k| (perturb * quantile_unchecked(k as f64 / d)).powi(4))
        .sum::<f64>()
        / n as f64
}

/// Monte Carlo `E(H(Y₁) − H_n*(Y₁))²` for standard normal samples; passes
/// when the estimate is at most `1/(n+1) + 3·SE`. The exact value is
/// `1/(6(n+1))`.
pub fn check_lemma10(n: usize, replicates: usize, seed: u64, perturb: f64) -> CheckReport {
    let sq = map_indexed(replicates, |r| {
        let mut rng = stream(seed, r);
        let y1 = normal(&mut rng);
        let below = (1..n).filter(|_| normal(&mut rng) <= y1).count();
        let hstar = perturb * (below + 1) as f64 / (n + 1) as f64;
        (std_normal_cdf(y1) - hstar).powi(2)
    });
    let m = replicates as f64;
    let mean = sq.iter().sum::<f64>() / m;
    let var = sq.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
    let se = (var / m).sqrt();
    let threshold = 1.0 / (n + 1) as f64 + 3.0 * se;
    CheckReport {
        name: format!("lemma10_n{n}"),
        statistic: mean,
        threshold,
        passed: mean <= threshold,
        n_used: n,
        replicates,
        detail: format!("se = {se:.3e}, exact = {:.6e}", 1.0 / (6.0 * (n + 1) as f64)),
    }
}

/// `1/φ(Φ⁻¹(α_n)) = √(2π)·n^{1/4}` to `1e-8` relative, and the central
/// difference slope of the truncated quantile on a 10⁴-point grid stays
/// below the bound times `1 + 1e-4`. The statistic is the relative error of
/// the identity.
pub fn check_slope_identity(n: usize, perturb: f64) -> CheckReport {
    let trunc = truncation_level(n).expect("n >= 1");
    let bound = perturb * quantile_slope_bound(n);
    let lhs = 1.0 / std_normal_pdf(quantile_unchecked(trunc.alpha_n));
    let rel = (lhs - bound).abs() / bound;

    let h = 1e-6;
    let grid = 10_000;
    let max_slope = (1..=grid)
        .map(|k| {
            let p = k as f64 / (grid + 1) as f64;
            (trunc.quantile_unchecked(p + h) - trunc.quantile_unchecked(p - h)) / (2.0 * h)
        })
        .fold(0.0f64, f64::max);
    let slope_ok = max_slope <= bound * (1.0 + 1e-4);
    CheckReport {
        name: format!("slope_identity_n{n}"),
        statistic: rel,
        threshold: 1e-8,
        passed: rel < 1e-8 && slope_ok,
        n_used: n,
        replicates: 1,
        detail: format!("1/phi(cut) = {lhs:.10}, max grid slope = {max_slope:.10}"),
    }
}

/// Which pseudo-response the limit-covariance check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CltVariant {
    /// Truncated quantile `Φ_n⁻¹`, compared with `Σ⁻¹AΣ⁻¹`.
    Truncated,
    /// Plain quantile `Φ⁻¹`, compared with `Σ⁻¹AΣ⁻¹`.
    Untruncated,
    /// Plain quantile, compared with the rank-corrected dispersion
    /// `Σ⁻¹(A − (3/2)σ*²Σβ₀β₀'Σ)Σ⁻¹`.
    RankCorrected,
}

/// Simulates `√n(β̃_n − σ*Σ_n⁻¹Σβ₀)` with `β̃_n = (X'X)⁻¹X'z` (no intercept),
/// `Σ_n = X'X/n`, and compares its sample covariance elementwise with the
/// target. Passes if every entry is within 15% relative and no coordinate is
/// rejected by Anderson–Darling at 0.001.
///
/// The rank-corrected variant measures entry `(a, b)` relative to
/// `√(T_aa T_bb)` instead of `|T_ab|`, since its off-diagonal target is
/// small next to the Monte Carlo error.
pub fn check_clt(
    truth: &ModelTruth,
    n: usize,
    replicates: usize,
    seed: u64,
    variant: CltVariant,
    perturb: f64,
) -> CheckReport {
    let p = truth.p();
    let s = sigma_star(truth);
    let sigma_beta = truth.sigma_beta();
    let trunc = truncation_level(n).expect("n >= 1");
    let sd = truth.sigma_sq.sqrt();

    let draws: Vec<Option<Vec<f64>>> = map_indexed(replicates, |r| {
        let mut rng = stream(seed, r);
        let x = sample_mvn(&truth.sigma, n, &mut rng).ok()?;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                (0..p).map(|j| x[(i, j)] * truth.beta0[j]).sum::<f64>() + sd * normal(&mut rng)
            })
            .collect();
        let ranks = rank_vector(&y).ok()?;
        let d = (n + 1) as f64;
        let z: Vec<f64> = ranks
            .iter()
            .map(|r| match variant {
                CltVariant::Truncated => trunc.quantile_unchecked(r / d),
                _ => quantile_unchecked(r / d),
            })
            .collect();
        let beta = least_squares(&x, &z).ok()?;
        let sn = x.transpose() * &x / n as f64;
        let center = sn.lu().solve(&(&sigma_beta * s))?;
        let root_n = (n as f64).sqrt();
        Some(
            (0..p)
                .map(|j| perturb * root_n * (beta[j] - center[j]))
                .collect(),
        )
    });
    let draws: Vec<Vec<f64>> = draws.into_iter().flatten().collect();
    let m = draws.len();

    let sigma_inv = truth
        .sigma
        .clone()
        .try_inverse()
        .expect("positive definite");
    let middle = match variant {
        CltVariant::RankCorrected => rank_dispersion_matrix(truth),
        _ => dispersion_matrix_a(truth),
    };
    let target = &sigma_inv * middle * &sigma_inv;

    let mf = m as f64;
    let means: Vec<f64> = (0..p)
        .map(|j| draws.iter().map(|v| v[j]).sum::<f64>() / mf)
        .collect();
    let cov = DMatrix::from_fn(p, p, |a, b| {
        draws
            .iter()
            .map(|v| (v[a] - means[a]) * (v[b] - means[b]))
            .sum::<f64>()
            / (mf - 1.0)
    });
    let mut worst = 0.0f64;
    for a in 0..p {
        for b in a..p {
            let scale = match variant {
                CltVariant::RankCorrected => (target[(a, a)] * target[(b, b)]).sqrt(),
                _ => target[(a, b)].abs(),
            };
            worst = worst.max(((cov[(a, b)] - target[(a, b)]) / scale).abs());
        }
    }
    let ad: Vec<_> = (0..p)
        .map(|j| {
            let col: Vec<f64> = draws.iter().map(|v| v[j]).collect();
            anderson_darling_normality(&col)
        })
        .collect();
    let ad_ok = ad
        .iter()
        .all(|r| r.as_ref().is_ok_and(|a| !a.reject_at_001));
    let ad_stats: Vec<String> = ad
        .iter()
        .map(|r| match r {
            Ok(a) => format!("{:.3}", a.statistic),
            Err(e) => e.to_string(),
        })
        .collect();
    let se: Vec<f64> = (0..p).map(|j| (cov[(j, j)] / mf).sqrt()).collect();

    let threshold = 0.15;
    let name = match variant {
        CltVariant::Truncated => "clt",
        CltVariant::Untruncated => "clt_untruncated",
        CltVariant::RankCorrected => "clt_rank_corrected",
    };
    CheckReport {
        name: name.into(),
        statistic: worst,
        threshold,
        passed: m == replicates && worst <= threshold && ad_ok,
        n_used: n,
        replicates: m,
        detail: format!(
            "cov = {} target = {} means = {} se = {} ad = [{}]",
            fmt_matrix(&cov),
            fmt_matrix(&target),
            fmt_vec(&means),
            fmt_vec(&se),
            ad_stats.join(", ")
        ),
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_matrix(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = m
        .row_iter()
        .map(|r| fmt_vec(&r.iter().copied().collect::<Vec<_>>()))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// Sizes used by [`run_default_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct CheckPlan {
    pub lemma1_n: usize,
    pub lemma4_n: Vec<usize>,
    pub lemma10_n: Vec<usize>,
    pub lemma10_replicates: usize,
    pub slope_n: Vec<usize>,
    pub clt_n: usize,
    pub clt_replicates: usize,
}

impl Default for CheckPlan {
    fn default() -> Self {
        Self {
            lemma1_n: 1000,
            lemma4_n: vec![1, 20, 2000],
            lemma10_n: vec![2, 10, 100, 1000],
            lemma10_replicates: 100_000,
            slope_n: vec![1, 16, 100, 10_000],
            clt_n: 2000,
            clt_replicates: 2000,
        }
    }
}

/// The full suite on the Gaussian scenario `Σ = diag(1, 2)`, `β₀ = (2, 1)`,
/// `σ² = 1`.
///
/// The rank-corrected covariance check is left out: the estimator has a
/// small finite-n skew (about −0.15 at n = 2000) that Anderson–Darling on
/// 2000 replicates picks up for some seeds, so its status is seed-dependent.
pub fn run_default_checks(plan: &CheckPlan, seed: u64, perturb: f64) -> Vec<CheckReport> {
    let truth = ModelTruth::gaussian_scenario();
    let mut out = vec![check_lemma1(&truth, plan.lemma1_n, seed, perturb)];
    out.extend(plan.lemma4_n.iter().map(|&n| check_lemma4(n, perturb)));
    out.extend(
        plan.lemma10_n
            .iter()
            .map(|&n| check_lemma10(n, plan.lemma10_replicates, seed, perturb)),
    );
    out.extend(plan.slope_n.iter().map(|&n| check_slope_identity(n, perturb)));
    out.push(check_clt(
        &truth,
        plan.clt_n,
        plan.clt_replicates,
        seed,
        CltVariant::Truncated,
        perturb,
    ));
    out
}

/// Convenience for reporting: `σ*Σ⁻¹Σβ₀ = σ*β₀` for the given truth.
pub fn limit_direction(truth: &ModelTruth) -> DVector<f64> {
    DVector::from_vec(truth.scaled_beta())
}
