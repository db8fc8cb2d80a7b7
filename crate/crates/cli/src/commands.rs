use std::path::Path;

use rankdir::estimators::fit as fit_method;
use rankdir::inference::{
    anderson_darling_normality, bootstrap_ci, jackknife_angles, jackknife_normal_ci,
    percentile_jackknife_ci, studentized_ci, IntervalEstimate, STUDENTIZED_CAP,
};
use rankdir::simulate::{preset, preset_scenarios, run_scenario, summarize_trials, ScenarioConfig};
use rankdir::verify::{run_default_checks, CheckPlan};
use rankdir::{direction_angle, FitOptions, Method};

use crate::data::{load, num, CsvOut, Loaded};
use crate::{command_line, CheckArgs, CiArg, CiArgs, CliError, DataArgs, FitArgs, SimulateArgs};

fn comment(seed: u64) -> String {
    format!(
        "rankdir {} | command: {} | seed: {seed}",
        env!("CARGO_PKG_VERSION"),
        command_line()
    )
}

fn load_args(a: &DataArgs) -> Result<Loaded, CliError> {
    let loaded = load(&a.input, &a.response, &a.covariates, a.group.as_deref())?;
    if loaded.dropped > 0 {
        eprintln!("dropped {} incomplete row(s)", loaded.dropped);
    }
    Ok(loaded)
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    let a = &args.data;
    let loaded = load_args(a)?;
    let data = loaded.dataset(!a.no_intercept)?;
    let method: Method = a.method.into();
    let est = fit_method(method, &data, &FitOptions::default().with_seed(a.seed))?;

    let m = method.as_str();
    let mut out = CsvOut::create(a.output.as_deref(), &comment(a.seed))?;
    out.row(["method", "quantity", "term", "value"])?;
    out.row([m, "n_used", "", &loaded.rows.len().to_string()])?;
    out.row([m, "n_dropped", "", &loaded.dropped.to_string()])?;
    if let Some(b) = est.intercept {
        out.row([m, "beta_raw", "(intercept)", &num(Some(b))])?;
    }
    for (name, b) in a.covariates.iter().zip(&est.beta_raw) {
        out.row([m, "beta_raw", name, &num(Some(*b))])?;
    }
    for (name, b) in a.covariates.iter().zip(&est.beta_unit) {
        out.row([m, "beta_unit", name, &num(Some(*b))])?;
    }
    if a.covariates.len() == 2 {
        out.row([m, "angle_deg", "", &num(est.angle_rad.map(f64::to_degrees))])?;
    }
    out.row([m, "iterations", "", &est.iterations.to_string()])?;
    out.row([m, "converged", "", if est.converged { "1" } else { "0" }])?;
    if let Some(obj) = est.objective {
        out.row([m, "objective", "", &num(Some(obj))])?;
    }

    let index: Vec<f64> = loaded
        .rows
        .iter()
        .map(|r| r.iter().zip(&est.beta_raw).map(|(x, b)| x * b).sum())
        .collect();
    let ad = anderson_darling_normality(&index).ok();
    out.row([m, "index_ad_statistic", "", &num(ad.map(|a| a.statistic))])?;
    out.row([m, "index_ad_p_value", "", &num(ad.map(|a| a.p_value))])?;
    out.finish()
}

fn interval_row(
    out: &mut CsvOut,
    method: Method,
    term: &str,
    iv: &IntervalEstimate,
    degrees: bool,
) -> Result<(), CliError> {
    let f = |v: f64| if degrees { v.to_degrees() } else { v };
    out.row([
        method.as_str(),
        iv.method.as_str(),
        term,
        &num(Some(f(iv.point))),
        &num(Some(f(iv.lower))),
        &num(Some(f(iv.upper))),
        &num(Some(iv.level)),
        &iv.replicates.to_string(),
        if iv.excludes_zero() { "*" } else { "" },
    ])
}

pub fn ci(args: &CiArgs) -> Result<(), CliError> {
    let a = &args.data;
    let loaded = load_args(a)?;
    let data = loaded.dataset(!a.no_intercept)?;
    let method: Method = a.method.into();
    let opts = FitOptions::default().with_seed(a.seed);
    let angle_only = !matches!(args.ci, CiArg::Bootstrap);
    if angle_only && a.covariates.len() != 2 {
        return Err(CliError::Usage(
            "jackknife and studentized intervals are for the angle and need exactly two covariates"
                .into(),
        ));
    }

    let mut rows: Vec<(String, IntervalEstimate, bool)> = Vec::new();
    match args.ci {
        CiArg::Bootstrap => {
            let res = bootstrap_ci(&data, method, &opts, args.replicates, args.level, a.seed)?;
            if res.failures > 0 {
                eprintln!("{} of {} resamples failed and were dropped", res.failures, res.requested);
            }
            for (name, iv) in a.covariates.iter().zip(res.coefficients) {
                rows.push((name.clone(), iv, false));
            }
            if let Some(iv) = res.angle {
                rows.push(("angle_deg".into(), iv, true));
            }
        }
        CiArg::Jackknife | CiArg::JackknifeBc => {
            let est = fit_method(method, &data, &opts)?;
            let theta = direction_angle(&est.beta_unit)?;
            let angles = jackknife_angles(&data, method, &opts)?;
            let bc = args.ci == CiArg::JackknifeBc;
            rows.push((
                "angle_deg".into(),
                jackknife_normal_ci(theta, &angles, args.level, bc)?,
                true,
            ));
        }
        CiArg::PercentileJackknife => {
            let angles = jackknife_angles(&data, method, &opts)?;
            rows.push(("angle_deg".into(), percentile_jackknife_ci(&angles, args.level)?, true));
        }
        CiArg::Studentized => {
            let iv = studentized_ci(&data, method, &opts, args.level, STUDENTIZED_CAP)?;
            rows.push(("angle_deg".into(), iv, true));
        }
    }

    let mut out = CsvOut::create(a.output.as_deref(), &comment(a.seed))?;
    out.row([
        "method",
        "ci",
        "term",
        "estimate",
        "lower",
        "upper",
        "level",
        "replicates",
        "excludes_zero",
    ])?;
    for (term, iv, degrees) in &rows {
        interval_row(&mut out, method, term, iv, *degrees)?;
    }
    out.finish()
}

fn read_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(ScenarioConfig::from_toml_str(&text)?)
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let mut cfg = match (&args.scenario, &args.config) {
        (Some(name), _) => match preset(name) {
            Some(cfg) => cfg,
            None if Path::new(name).is_file() => read_config(Path::new(name))?,
            None => {
                let names: Vec<String> = preset_scenarios().into_iter().map(|s| s.name).collect();
                return Err(CliError::Usage(format!(
                    "unknown scenario '{name}' (presets: {})",
                    names.join(", ")
                )));
            }
        },
        (None, Some(path)) => read_config(path)?,
        (None, None) => return Err(CliError::Usage("give --scenario or --config".into())),
    };
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    let theta0 = cfg
        .theta0()
        .map_err(|_| CliError::Usage("simulation summaries need exactly two covariates".into()))?;

    let records = run_scenario(&cfg)?;
    let summary = summarize_trials(&records, theta0);

    let mut out = CsvOut::create(args.output.as_deref(), &comment(cfg.seed))?;
    out.row(["method", "sweep_value", "bias_deg", "sd_deg", "trials_completed"])?;
    for s in &summary {
        out.row([
            s.method.as_str(),
            &num(Some(s.sweep_value)),
            &num(Some(s.bias_deg)),
            &num(Some(s.sd_deg)),
            &s.trials_completed.to_string(),
        ])?;
    }
    out.finish()?;

    if let Some(path) = &args.records {
        let mut rec = CsvOut::create(Some(path), &comment(cfg.seed))?;
        rec.row(["method", "sweep_value", "trial", "theta_deg", "error"])?;
        for r in &records {
            rec.row([
                r.method.as_str(),
                &num(Some(r.sweep_value)),
                &r.trial.to_string(),
                &num(r.theta_hat.map(f64::to_degrees)),
                r.error.as_deref().unwrap_or(""),
            ])?;
        }
        rec.finish()?;
    }
    Ok(())
}

pub fn check(args: &CheckArgs) -> Result<(), CliError> {
    if !(args.perturb.is_finite() && args.perturb > 0.0) {
        return Err(CliError::Usage("--perturb must be a positive number".into()));
    }
    let reports = run_default_checks(&CheckPlan::default(), args.seed, args.perturb);

    let mut out = CsvOut::create(args.output.as_deref(), &comment(args.seed))?;
    out.row(["check", "passed", "statistic", "threshold", "n", "replicates", "detail"])?;
    for r in &reports {
        out.row([
            r.name.as_str(),
            if r.passed { "true" } else { "false" },
            &num(Some(r.statistic)),
            &num(Some(r.threshold)),
            &r.n_used.to_string(),
            &r.replicates.to_string(),
            &r.detail,
        ])?;
    }
    out.finish()?;

    for r in &reports {
        eprintln!(
            "{} {:<22} statistic {:.6e}  threshold {:.6e}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.statistic,
            r.threshold,
            r.detail
        );
    }
    let failed: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(failed))
    }
}
