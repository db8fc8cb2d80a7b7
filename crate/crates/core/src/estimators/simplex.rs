//! Nelder–Mead simplex minimisation.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial simplex, relative to `max(1, |x₀|_∞)`.
    pub initial_step: f64,
    /// Stop once the spread of function values across the simplex falls
    /// below this.
    pub ftol: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub xtol: f64,
    pub max_evals: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.1,
            ftol: 1e-10,
            xtol: 1e-8,
            max_evals: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimises `f` from `x0` with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½).
pub fn nelder_mead<F>(mut f: F, x0: &[f64], options: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let d = x0.len();
    let scale = x0.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let step = options.initial_step * scale;

    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(d + 1);
    pts.push(x0.to_vec());
    for k in 0..d {
        let mut p = x0.to_vec();
        p[k] += step;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| eval(p, &mut evals)).collect();

    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[d] - vals[0];
        let size = pts[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&pts[0])
                    .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            })
            .fold(0.0f64, f64::max);
        if (spread.is_finite() && spread <= options.ftol) || size <= options.xtol {
            converged = true;
            break;
        }
        if evals >= options.max_evals {
            break;
        }

        let centroid: Vec<f64> = (0..d)
            .map(|j| pts[..d].iter().map(|p| p[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[d])
                .map(|(c, w)| c + t * (w - c))
                .collect()
        };

        let xr = along(-1.0);
        let fr = eval(&xr, &mut evals);
        if fr < vals[0] {
            let xe = along(-2.0);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                pts[d] = xe;
                vals[d] = fe;
            } else {
                pts[d] = xr;
                vals[d] = fr;
            }
            continue;
        }
        if fr < vals[d - 1] {
            pts[d] = xr;
            vals[d] = fr;
            continue;
        }
        let (xc, fc) = if fr < vals[d] {
            let xc = along(-0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = along(0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < vals[d].min(fr) {
            pts[d] = xc;
            vals[d] = fc;
            continue;
        }
        for k in 1..=d {
            let shrunk: Vec<f64> = pts[k]
                .iter()
                .zip(&pts[0])
                .map(|(p, b)| b + 0.5 * (p - b))
                .collect();
            vals[k] = eval(&shrunk, &mut evals);
            pts[k] = shrunk;
        }
    }

    NelderMeadResult {
        x: pts[0].clone(),
        value: vals[0],
        evaluations: evals,
        converged,
    }
}
