//! Monte Carlo scenarios: random covariates and errors, repeated fits, and
//! bias/SD summaries of the estimated angle.
//!
//! Trial `t` of sweep point `s` draws from a ChaCha8 stream selected by
//! `(s << 32) | t` under the scenario seed, so results are identical however
//! trials are scheduled across threads.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{direction_angle, fit, Dataset, FitOptions, Method};
use crate::linalg::{cholesky_lower, matrix_from_rows};
use crate::parallel::map_indexed;

/// Stable law in the `S1` parameterisation: `α ∈ (0, 2]`, `β ∈ [−1, 1]`.
/// With `α = 2` it is `N(location, 2·scale²)` whatever `β` is.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub location: f64,
}

fn one() -> f64 {
    1.0
}

impl StableParams {
    pub fn new(alpha: f64, beta: f64, scale: f64, location: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            scale,
            location,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit scale, zero location.
    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::Domain(format!("stability {} not in (0, 2]", self.alpha)));
        }
        if !(-1.0..=1.0).contains(&self.beta) {
            return Err(Error::Domain(format!("skewness {} not in [-1, 1]", self.beta)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Domain(format!("scale {} must be positive", self.scale)));
        }
        if !self.location.is_finite() {
            return Err(Error::Domain("location must be finite".into()));
        }
        Ok(())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let v = PI * (rng.random::<f64>() - 0.5);
        let w: f64 = Exp1.sample(rng);
        let (a, b) = (self.alpha, self.beta);
        if a == 1.0 {
            let t = FRAC_PI_2 + b * v;
            let x = (t * v.tan() - b * (FRAC_PI_2 * w * v.cos() / t).ln()) / FRAC_PI_2;
            self.scale * x + b * self.scale * self.scale.ln() / FRAC_PI_2 + self.location
        } else {
            let tan = (PI * a / 2.0).tan();
            let shift = (b * tan).atan() / a;
            let s = (1.0 + b * b * tan * tan).powf(1.0 / (2.0 * a));
            let x = s * (a * (v + shift)).sin() / v.cos().powf(1.0 / a)
                * ((v - a * (v + shift)).cos() / w).powf((1.0 - a) / a);
            self.scale * x + self.location
        }
    }
}

/// `n` i.i.d. rows from `N_p(0, Σ)` as `Z L'` with `Σ = LL'`.
pub fn sample_mvn<R: Rng + ?Sized>(sigma: &DMatrix<f64>, n: usize, rng: &mut R) -> Result<DMatrix<f64>> {
    let l = cholesky_lower(sigma)?;
    let p = sigma.nrows();
    let z = DMatrix::<f64>::from_fn(n, p, |_, _| StandardNormal.sample(rng));
    Ok(z * l.transpose())
}

/// `n` i.i.d. stable draws by the Chambers–Mallows–Stuck transform.
pub fn sample_stable<R: Rng + ?Sized>(params: &StableParams, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    params.validate()?;
    Ok((0..n).map(|_| params.draw(rng)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CovariateDist {
    /// `N_p(0, Σ)`, `Σ` given row by row.
    Gaussian { sigma: Vec<Vec<f64>> },
    /// Independent columns with identical stable marginals.
    Stable {
        #[serde(flatten)]
        params: StableParams,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorDist {
    Gaussian {
        variance: f64,
    },
    Stable {
        #[serde(flatten)]
        params: StableParams,
    },
    /// Noiseless responses.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    SampleSize,
    /// Stable skewness `β`, applied to covariates and errors alike.
    Skewness,
    /// Stable index `α`, applied to covariates and errors alike.
    Stability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub kind: SweepKind,
    pub values: Vec<f64>,
}

fn default_methods() -> Vec<Method> {
    vec![Method::Ols, Method::Tgqr, Method::Eqr, Method::Spearmax]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub covariates: CovariateDist,
    pub errors: ErrorDist,
    pub beta0: Vec<f64>,
    /// Sample size, unless swept.
    pub n: usize,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default)]
    pub sweep: Option<Sweep>,
}

/// Covariate and error laws for one sweep point.
#[derive(Debug, Clone, PartialEq)]
struct PointSpec {
    n: usize,
    covariates: CovariateDist,
    errors: ErrorDist,
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    /// The true angle `arctan(β₂/β₁)`; requires two covariates.
    pub fn theta0(&self) -> Result<f64> {
        direction_angle(&self.beta0)
    }

    pub fn sweep_values(&self) -> Vec<f64> {
        match &self.sweep {
            Some(s) => s.values.clone(),
            None => vec![self.n as f64],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        let p = self.beta0.len();
        if p == 0 || self.beta0.iter().any(|b| !b.is_finite()) {
            return bad("beta0 must be a non-empty finite vector".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return bad("sweep has no values".into());
            }
            if s.kind != SweepKind::SampleSize
                && !matches!(self.covariates, CovariateDist::Stable { .. })
                && !matches!(self.errors, ErrorDist::Stable { .. })
            {
                return bad("skewness and stability sweeps need stable distributions".into());
            }
        }
        for k in 0..self.sweep_values().len() {
            let spec = self.point(k)?;
            if spec.n <= p + 1 {
                return bad(format!("sample size {} is too small for p = {p}", spec.n));
            }
            match &spec.covariates {
                CovariateDist::Gaussian { sigma } => {
                    if sigma.len() != p {
                        return bad(format!("sigma must be {p}x{p}"));
                    }
                    cholesky_lower(&matrix_from_rows(sigma)?)
                        .map_err(|e| Error::InvalidConfig(format!("sigma: {e}")))?;
                }
                CovariateDist::Stable { params } => params
                    .validate()
                    .map_err(|e| Error::InvalidConfig(format!("covariates: {e}")))?,
            }
            match &spec.errors {
                ErrorDist::Gaussian { variance } if variance.is_nan() || *variance < 0.0 => {
                    return bad("error variance must be >= 0".into())
                }
                ErrorDist::Stable { params } => params
                    .validate()
                    .map_err(|e| Error::InvalidConfig(format!("errors: {e}")))?,
                _ => {}
            }
        }
        Ok(())
    }

    fn point(&self, k: usize) -> Result<PointSpec> {
        let mut spec = PointSpec {
            n: self.n,
            covariates: self.covariates.clone(),
            errors: self.errors.clone(),
        };
        let Some(sweep) = &self.sweep else {
            return Ok(spec);
        };
        let v = sweep.values[k];
        let set = |p: &mut StableParams| match sweep.kind {
            SweepKind::Skewness => p.beta = v,
            SweepKind::Stability => p.alpha = v,
            SweepKind::SampleSize => {}
        };
        match sweep.kind {
            SweepKind::SampleSize => {
                if !(v >= 1.0 && v.fract() == 0.0) {
                    return Err(Error::InvalidConfig(format!("sample size {v} is not a positive integer")));
                }
                spec.n = v as usize;
            }
            _ => {
                if let CovariateDist::Stable { params } = &mut spec.covariates {
                    set(params);
                }
                if let ErrorDist::Stable { params } = &mut spec.errors {
                    set(params);
                }
            }
        }
        Ok(spec)
    }
}

/// Outcome of one method on one simulated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub method: Method,
    pub sweep_index: usize,
    pub sweep_value: f64,
    pub trial: usize,
    /// `arctan(β₂/β₁)` of the fitted direction (two covariates only).
    pub theta_hat: Option<f64>,
    pub beta_unit: Option<Vec<f64>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSummary {
    pub method: Method,
    pub sweep_value: f64,
    pub bias_deg: f64,
    pub sd_deg: f64,
    pub trials_completed: usize,
    pub trials: usize,
}

/// Random stream for trial `trial` of sweep point `sweep`.
pub fn trial_rng(seed: u64, sweep: usize, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((sweep as u64) << 32) | trial as u64);
    rng
}

fn draw_sample(spec: &PointSpec, beta0: &[f64], rng: &mut ChaCha8Rng) -> Result<Dataset> {
    let p = beta0.len();
    let n = spec.n;
    let x = match &spec.covariates {
        CovariateDist::Gaussian { sigma } => sample_mvn(&matrix_from_rows(sigma)?, n, rng)?,
        CovariateDist::Stable { params } => {
            let cols: Vec<Vec<f64>> = (0..p)
                .map(|_| sample_stable(params, n, rng))
                .collect::<Result<_>>()?;
            DMatrix::from_fn(n, p, |i, j| cols[j][i])
        }
    };
    let eps = match &spec.errors {
        ErrorDist::Gaussian { variance } => {
            let sd = variance.sqrt();
            (0..n)
                .map(|_| sd * Distribution::<f64>::sample(&StandardNormal, rng))
                .collect()
        }
        ErrorDist::Stable { params } => sample_stable(params, n, rng)?,
        ErrorDist::None => vec![0.0; n],
    };
    let y: Vec<f64> = (0..n)
        .map(|i| (0..p).map(|j| x[(i, j)] * beta0[j]).sum::<f64>() + eps[i])
        .collect();
    Dataset::new(x, y)
}

/// Runs every method on every trial of every sweep point.
///
/// Records are ordered by (sweep point, trial, method). Failures are kept
/// as records with `error` set.
pub fn run_scenario(config: &ScenarioConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let values = config.sweep_values();
    let specs: Vec<PointSpec> = (0..values.len()).map(|k| config.point(k)).collect::<Result<_>>()?;
    let trials = config.trials;
    let jobs = values.len() * trials;

    let per_job = map_indexed(jobs, |job| {
        let (s, t) = (job / trials, job % trials);
        let mut rng = trial_rng(config.seed, s, t);
        let sample = draw_sample(&specs[s], &config.beta0, &mut rng);
        let options = FitOptions::default().with_seed(config.seed ^ (((s as u64) << 32) | t as u64));
        config
            .methods
            .iter()
            .map(|&m| {
                let res = sample.as_ref().map_err(Clone::clone).and_then(|d| fit(m, d, &options));
                let (theta_hat, beta_unit, error) = match res {
                    Ok(e) => (e.angle_rad, Some(e.beta_unit), None),
                    Err(e) => (None, None, Some(e.to_string())),
                };
                TrialRecord {
                    method: m,
                    sweep_index: s,
                    sweep_value: values[s],
                    trial: t,
                    theta_hat,
                    beta_unit,
                    error,
                }
            })
            .collect::<Vec<_>>()
    });
    Ok(per_job.into_iter().flatten().collect())
}

/// Bias and sample SD (divisor `m − 1`) in degrees of the estimated angle
/// for each (method, sweep point), in first-appearance order.
///
/// Trials that failed, or whose fitted `β₁ ≤ 0`, are left out and show up
/// as `trials_completed < trials`.
pub fn summarize_trials(records: &[TrialRecord], theta0: f64) -> Vec<TrialSummary> {
    let mut keys: Vec<(Method, usize, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|k| k.0 == r.method && k.1 == r.sweep_index) {
            keys.push((r.method, r.sweep_index, r.sweep_value));
        }
    }
    keys.into_iter()
        .map(|(method, sweep_index, sweep_value)| {
            let group: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.method == method && r.sweep_index == sweep_index)
                .collect();
            let thetas: Vec<f64> = group
                .iter()
                .filter(|r| r.beta_unit.as_ref().is_some_and(|b| b[0] > 0.0))
                .filter_map(|r| r.theta_hat)
                .collect();
            let (bias_deg, sd_deg) = bias_and_sd_deg(&thetas, theta0);
            TrialSummary {
                method,
                sweep_value,
                bias_deg,
                sd_deg,
                trials_completed: thetas.len(),
                trials: group.len(),
            }
        })
        .collect()
}

fn bias_and_sd_deg(thetas: &[f64], theta0: f64) -> (f64, f64) {
    let m = thetas.len();
    if m == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = thetas.iter().sum::<f64>() / m as f64;
    let sd = if m < 2 {
        0.0
    } else {
        (thetas.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (m - 1) as f64).sqrt()
    };
    ((mean - theta0).to_degrees(), sd.to_degrees())
}

/// Desk-scale trial count used by the presets.
pub const DESK_TRIALS: usize = 1000;

fn stable_scenario(name: &str, kind: SweepKind, values: Vec<f64>, alpha: f64, beta: f64) -> ScenarioConfig {
    let params = StableParams {
        alpha,
        beta,
        scale: 1.0,
        location: 0.0,
    };
    ScenarioConfig {
        name: name.into(),
        covariates: CovariateDist::Stable { params },
        errors: ErrorDist::Stable { params },
        beta0: vec![2.0, 1.0],
        n: 500,
        trials: DESK_TRIALS,
        seed: 1,
        methods: default_methods(),
        sweep: Some(Sweep { kind, values }),
    }
}

/// `gaussian_grid`, `skew_sweep` and `stability_sweep`.
pub fn preset_scenarios() -> Vec<ScenarioConfig> {
    vec![
        ScenarioConfig {
            name: "gaussian_grid".into(),
            covariates: CovariateDist::Gaussian {
                sigma: vec![vec![1.0, 0.0], vec![0.0, 2.0]],
            },
            errors: ErrorDist::Gaussian { variance: 1.0 },
            beta0: vec![2.0, 1.0],
            n: 500,
            trials: DESK_TRIALS,
            seed: 1,
            methods: default_methods(),
            sweep: Some(Sweep {
                kind: SweepKind::SampleSize,
                values: vec![25.0, 50.0, 100.0, 250.0, 500.0, 1000.0, 3000.0],
            }),
        },
        stable_scenario(
            "skew_sweep",
            SweepKind::Skewness,
            vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            1.0,
            0.0,
        ),
        stable_scenario(
            "stability_sweep",
            SweepKind::Stability,
            vec![0.2, 0.5, 1.0, 1.5, 2.0],
            2.0,
            0.0,
        ),
    ]
}

pub fn preset(name: &str) -> Option<ScenarioConfig> {
    preset_scenarios().into_iter().find(|s| s.name == name)
}
