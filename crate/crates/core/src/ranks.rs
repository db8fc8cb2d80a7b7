//! Rank and empirical-distribution transforms of response vectors.
//!
//! Missing observations are encoded as `NaN`. They are excluded from the
//! ranking and reported back as `NaN`, so the effective sample size is the
//! number of finite entries.

use std::collections::HashMap;
use std::fmt::Display;
use std::hash::Hash;

use crate::error::{Error, Result};

/// A response vector together with its midranks.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedResponse {
    pub values: Vec<f64>,
    pub ranks: Vec<f64>,
    pub n_effective: usize,
}

impl RankedResponse {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let ranks = rank_vector(&values)?;
        let n_effective = ranks.iter().filter(|r| !r.is_nan()).count();
        Ok(Self {
            values,
            ranks,
            n_effective,
        })
    }

    /// `R_n(Y_i) / (n_effective + 1)`.
    pub fn hstar(&self) -> Vec<f64> {
        let denom = (self.n_effective + 1) as f64;
        self.ranks.iter().map(|r| r / denom).collect()
    }
}

/// Midranks of `values`; `NaN` entries are skipped and stay `NaN`.
///
/// Without ties the rank of an entry is the number of entries `<=` it.
pub fn rank_vector(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut order: Vec<usize> = (0..values.len()).filter(|&i| !values[i].is_nan()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![f64::NAN; values.len()];
    assign_midranks(&order, |i| values[i], &mut ranks);
    Ok(ranks)
}

/// Writes midranks for indices already sorted by `key`.
pub(crate) fn assign_midranks<F>(sorted: &[usize], key: F, ranks: &mut [f64])
where
    F: Fn(usize) -> f64,
{
    let mut start = 0;
    while start < sorted.len() {
        let v = key(sorted[start]);
        let mut end = start + 1;
        // -0.0 and 0.0 compare equal here, which is the behaviour we want for ties
        while end < sorted.len() && key(sorted[end]) == v {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        for &idx in &sorted[start..end] {
            ranks[idx] = midrank;
        }
        start = end;
    }
}

/// `H_n^*(Y_i) = R_n(Y_i) / (n + 1)` for every entry.
pub fn hstar_transform(values: &[f64]) -> Result<Vec<f64>> {
    let ranked = RankedResponse::new(values.to_vec())?;
    if ranked.n_effective == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(ranked.hstar())
}

/// Right-continuous empirical distribution function `y ↦ #{values ≤ y} / n`.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn eval(&self, y: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= y);
        count as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

pub fn empirical_cdf(values: &[f64]) -> Result<EmpiricalCdf> {
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(EmpiricalCdf { sorted })
}

/// Applies [`hstar_transform`] separately within each group, preserving the
/// original order. Used to remove batch (plate) effects before fitting.
pub fn grouped_rank_transform<L>(values: &[f64], groups: &[L]) -> Result<Vec<f64>>
where
    L: Eq + Hash + Display,
{
    if values.len() != groups.len() {
        return Err(Error::InvalidInput(format!(
            "{} values but {} group labels",
            values.len(),
            groups.len()
        )));
    }
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }

    // members in first-appearance order keeps error reporting deterministic
    let mut members: Vec<(&L, Vec<usize>)> = Vec::new();
    let mut slot: HashMap<&L, usize> = HashMap::new();
    for (i, g) in groups.iter().enumerate() {
        let k = *slot.entry(g).or_insert_with(|| {
            members.push((g, Vec::new()));
            members.len() - 1
        });
        members[k].1.push(i);
    }

    let mut out = vec![f64::NAN; values.len()];
    for (label, idx) in &members {
        let sub: Vec<f64> = idx.iter().map(|&i| values[i]).collect();
        let present = sub.iter().filter(|v| !v.is_nan()).count();
        if present < 2 {
            return Err(Error::GroupTooSmall {
                group: label.to_string(),
                size: present,
            });
        }
        let h = hstar_transform(&sub)?;
        for (&i, v) in idx.iter().zip(h) {
            out[i] = v;
        }
    }
    Ok(out)
}
