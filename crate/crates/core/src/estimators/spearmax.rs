//! Spearmax: the direction maximising Spearman's correlation between the
//! response ranks and the ranks of the fitted index `x'β`.
//!
//! The objective is piecewise constant in `β`; it only changes when two
//! index values swap order. For two covariates the search is over the angle
//! `θ` with `β = (cos θ, sin θ)`; elsewhere a restarted simplex search is
//! used.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::simplex::{nelder_mead, NelderMeadOptions};
use super::{normalize_direction, Dataset, DirectionEstimate, Method};
use crate::error::{Error, Result};
use crate::ranks::assign_midranks;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpearmaxSearch {
    /// Angle grid when `p = 2`, simplex search otherwise.
    #[default]
    Auto,
    AngleGrid,
    NelderMead,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpearmaxOptions {
    pub search: SpearmaxSearch,
    /// Number of equally spaced angles on `[0, 2π)`.
    pub grid_points: usize,
    /// Simplex restarts; `None` means `2p`.
    pub restarts: Option<usize>,
    /// Seed for the random simplex starting points.
    pub seed: u64,
    pub simplex: NelderMeadOptions,
}

impl Default for SpearmaxOptions {
    fn default() -> Self {
        Self {
            search: SpearmaxSearch::Auto,
            grid_points: 3600,
            restarts: None,
            seed: 0,
            simplex: NelderMeadOptions::default(),
        }
    }
}

/// Evaluates the objective for a fixed response-rank vector.
struct Scorer<'a> {
    x: &'a DMatrix<f64>,
    centered: Vec<f64>,
    norm_sq: f64,
    index: Vec<f64>,
    order: Vec<usize>,
    ranks: Vec<f64>,
}

impl<'a> Scorer<'a> {
    fn new(data: &'a Dataset) -> Result<Self> {
        let n = data.n();
        let mean = (n + 1) as f64 / 2.0;
        let centered: Vec<f64> = data.ranks().iter().map(|r| r - mean).collect();
        let norm_sq: f64 = centered.iter().map(|c| c * c).sum();
        if norm_sq == 0.0 {
            return Err(Error::DegenerateRanks);
        }
        Ok(Self {
            x: data.covariates(),
            centered,
            norm_sq,
            index: vec![0.0; n],
            order: (0..n).collect(),
            ranks: vec![0.0; n],
        })
    }

    fn set_index(&mut self, beta: &[f64]) {
        let (n, p) = self.x.shape();
        for i in 0..n {
            self.index[i] = (0..p).map(|j| self.x[(i, j)] * beta[j]).sum();
        }
    }

    /// Re-sorts `order` by the current index. Insertion sort, which is
    /// linear when successive calls only move the index slightly.
    fn sort_incremental(&mut self) {
        let idx = &self.index;
        let order = &mut self.order;
        for k in 1..order.len() {
            let cur = order[k];
            let v = idx[cur];
            let mut j = k;
            while j > 0 && idx[order[j - 1]] > v {
                order[j] = order[j - 1];
                j -= 1;
            }
            order[j] = cur;
        }
    }

    fn correlation(&mut self) -> Result<f64> {
        let idx = &self.index;
        assign_midranks(&self.order, |i| idx[i], &mut self.ranks);
        let mean = (self.ranks.len() + 1) as f64 / 2.0;
        let mut cross = 0.0;
        let mut ss = 0.0;
        for (c, r) in self.centered.iter().zip(&self.ranks) {
            let d = r - mean;
            cross += c * d;
            ss += d * d;
        }
        if ss == 0.0 {
            return Err(Error::DegenerateRanks);
        }
        Ok(cross / (self.norm_sq * ss).sqrt())
    }

    fn score(&mut self, beta: &[f64]) -> Result<f64> {
        if beta.iter().all(|b| *b == 0.0) {
            return Err(Error::ZeroVector);
        }
        self.set_index(beta);
        self.sort_incremental();
        self.correlation()
    }

    fn score_angle(&mut self, theta: f64) -> Result<f64> {
        self.score(&[theta.cos(), theta.sin()])
    }
}

fn index_ranks(data: &Dataset, beta: &[f64]) -> Result<Vec<f64>> {
    if beta.len() != data.p() {
        return Err(Error::InvalidInput(format!(
            "beta has {} entries, expected {}",
            beta.len(),
            data.p()
        )));
    }
    let mut s = Scorer::new(data)?;
    if beta.iter().all(|b| *b == 0.0) {
        return Err(Error::ZeroVector);
    }
    s.set_index(beta);
    s.order.sort_unstable_by(|&a, &b| s.index[a].total_cmp(&s.index[b]));
    let idx = &s.index;
    assign_midranks(&s.order, |i| idx[i], &mut s.ranks);
    if s.ranks.iter().all(|r| *r == s.ranks[0]) {
        return Err(Error::DegenerateRanks);
    }
    Ok(s.ranks)
}

/// Spearman correlation between `R(Y)` and `R(Xβ)`; intercept-free.
pub fn spearman_objective(data: &Dataset, beta: &[f64]) -> Result<f64> {
    if beta.len() != data.p() {
        return Err(Error::InvalidInput(format!(
            "beta has {} entries, expected {}",
            beta.len(),
            data.p()
        )));
    }
    let mut s = Scorer::new(data)?;
    s.score(beta)
}

/// `Σ R(Y_i) R(x_i'β)`, an increasing affine function of
/// [`spearman_objective`] when there are no ties.
pub fn rank_product_sum(data: &Dataset, beta: &[f64]) -> Result<f64> {
    let r = index_ranks(data, beta)?;
    Ok(data.ranks().iter().zip(&r).map(|(a, b)| a * b).sum())
}

fn check_inputs(data: &Dataset) -> Result<()> {
    let x = data.covariates();
    for j in 0..data.p() {
        let first = x[(0, j)];
        if x.column(j).iter().all(|v| *v == first) {
            return Err(Error::ConstantCovariate { column: j });
        }
    }
    let r0 = data.ranks()[0];
    if data.ranks().iter().all(|r| *r == r0) {
        return Err(Error::DegenerateRanks);
    }
    Ok(())
}

/// Maximises [`spearman_objective`] over directions.
pub fn spearmax_fit(data: &Dataset, options: &SpearmaxOptions) -> Result<DirectionEstimate> {
    check_inputs(data)?;
    let search = match options.search {
        SpearmaxSearch::Auto if data.p() == 2 => SpearmaxSearch::AngleGrid,
        SpearmaxSearch::Auto => SpearmaxSearch::NelderMead,
        s => s,
    };
    match search {
        SpearmaxSearch::AngleGrid => {
            if data.p() != 2 {
                return Err(Error::InvalidInput(format!(
                    "angle search needs exactly two covariates, got {}",
                    data.p()
                )));
            }
            angle_search(data, options.grid_points)
        }
        _ => simplex_search(data, options),
    }
}

const EDGE_TOL: f64 = 1e-12;
/// Arcs narrower than this are treated as a single swap point.
const ARC_TOL: f64 = 1e-13;

/// Angles in `[a, a + width)` at which two index values swap order.
fn swap_angles(x: &DMatrix<f64>, a: f64, width: f64) -> Vec<f64> {
    let n = x.nrows();
    let mut out = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (d0, d1) = (x[(i, 0)] - x[(j, 0)], x[(i, 1)] - x[(j, 1)]);
            if d0 == 0.0 && d1 == 0.0 {
                continue;
            }
            let t = d0.atan2(-d1);
            for u in [t, t + PI] {
                let off = (u - a).rem_euclid(TAU);
                if off < width {
                    out.push(a + off);
                }
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Scans every constant arc of the objective in `[a, b]` and returns the
/// best value with the ends of its plateau.
fn scan_window(s: &mut Scorer, a: f64, b: f64, evals: &mut usize) -> Option<(f64, f64, f64)> {
    let mut bounds = vec![a];
    bounds.extend(swap_angles(s.x, a, b - a));
    bounds.push(b);
    let mut arcs: Vec<(f64, f64, f64)> = Vec::new();
    for w in bounds.windows(2) {
        if w[1] - w[0] <= ARC_TOL {
            continue;
        }
        *evals += 1;
        let v = s.score_angle(0.5 * (w[0] + w[1])).unwrap_or(f64::NEG_INFINITY);
        match arcs.last_mut() {
            Some(last) if last.2 == v => last.1 = w[1],
            _ => arcs.push((w[0], w[1], v)),
        }
    }
    arcs.into_iter()
        .fold(None, |acc: Option<(f64, f64, f64)>, arc| match acc {
            Some(best) if best.2 >= arc.2 => Some(best),
            _ => Some(arc),
        })
        .map(|(lo, hi, v)| (v, lo, hi))
}

fn angle_search(data: &Dataset, grid_points: usize) -> Result<DirectionEstimate> {
    if grid_points < 3 {
        return Err(Error::InvalidInput("angle grid needs at least 3 points".into()));
    }
    let mut s = Scorer::new(data)?;
    let h = TAU / grid_points as f64;
    let mut evals = 0;

    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    let mut grid = Vec::with_capacity(grid_points);
    for k in 0..grid_points {
        // an all-tied index can only happen on a measure-zero set of angles
        let v = s.score_angle(k as f64 * h).unwrap_or(f64::NEG_INFINITY);
        evals += 1;
        grid.push(v);
        if v > best {
            best = v;
            best_k = k;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::DegenerateRanks);
    }
    let mut theta = best_k as f64 * h;

    // Exact refinement: the run of grid points holding the best value,
    // widened by one cell on each side, is cut at every swap angle and each
    // arc is scored once.
    let run = |dir: isize| {
        let mut walked = 0;
        while walked + 1 < grid_points {
            let k = (best_k as isize + dir * (walked as isize + 1))
                .rem_euclid(grid_points as isize) as usize;
            if grid[k] != best {
                break;
            }
            walked += 1;
        }
        walked
    };
    let (left, right) = (run(-1), run(1));
    if left + right + 3 < grid_points {
        let a = theta - (left + 1) as f64 * h;
        let b = theta + (right + 1) as f64 * h;
        if let Some((v, lo, hi)) = scan_window(&mut s, a, b, &mut evals) {
            if v > best {
                // a plateau missed by the grid lies strictly inside the window
                let theta = (0.5 * (lo + hi)).rem_euclid(TAU);
                let mut est = DirectionEstimate::from_raw(
                    Method::Spearmax,
                    vec![theta.cos(), theta.sin()],
                    None,
                )?;
                est.iterations = evals;
                est.converged = true;
                est.objective = Some(v);
                return Ok(est);
            }
        }
    }

    // Locate both ends of the plateau holding the best grid point: walk
    // along the grid while the value persists, then bisect the crossing.
    let edge = |dir: f64, s: &mut Scorer, evals: &mut usize| -> f64 {
        let walked = if dir > 0.0 { right } else { left } + 1;
        let mut inside = theta + dir * (walked - 1) as f64 * h;
        let mut outside = theta + dir * walked as f64 * h;
        while (outside - inside).abs() > EDGE_TOL {
            let mid = 0.5 * (inside + outside);
            *evals += 1;
            if s.score_angle(mid).unwrap_or(f64::NEG_INFINITY) == best {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let lo = edge(-1.0, &mut s, &mut evals);
    let hi = edge(1.0, &mut s, &mut evals);
    let mid = 0.5 * (lo + hi);
    evals += 1;
    if hi - lo < TAU && s.score_angle(mid).unwrap_or(f64::NEG_INFINITY) == best {
        theta = mid;
    }

    let theta = theta.rem_euclid(TAU);
    let mut est =
        DirectionEstimate::from_raw(Method::Spearmax, vec![theta.cos(), theta.sin()], None)?;
    est.iterations = evals;
    est.converged = true;
    est.objective = Some(best);
    Ok(est)
}

fn simplex_search(data: &Dataset, options: &SpearmaxOptions) -> Result<DirectionEstimate> {
    let p = data.p();
    let restarts = options.restarts.unwrap_or(2 * p).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut s = Scorer::new(data)?;

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut evals = 0;
    let mut all_converged = true;
    for _ in 0..restarts {
        let start = loop {
            let z: Vec<f64> = (0..p).map(|_| StandardNormal.sample(&mut rng)).collect();
            if let Ok(u) = normalize_direction(&z) {
                break u;
            }
        };
        let res = nelder_mead(
            |b| s.score(b).map(|v| -v).unwrap_or(f64::INFINITY),
            &start,
            &options.simplex,
        );
        evals += res.evaluations;
        all_converged &= res.converged;
        let value = -res.value;
        if best.as_ref().is_none_or(|(_, v)| value > *v) {
            best = Some((res.x, value));
        }
    }
    let (beta, value) = best.expect("at least one restart");
    if !value.is_finite() {
        return Err(Error::DegenerateRanks);
    }
    let beta = normalize_direction(&beta)?;
    let mut est = DirectionEstimate::from_raw(Method::Spearmax, beta, None)?;
    est.iterations = evals;
    est.converged = all_converged;
    est.objective = Some(value);
    Ok(est)
}
