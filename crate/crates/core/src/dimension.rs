//! Hausdorff dimension of limit sets.
//!
//! Three independent estimators:
//!
//! * [`exponent_of_convergence`] — growth rate of word shells of the orbital
//!   Poincaré series `Σ exp(-s·d(o, γo))`.
//! * [`transfer_dimension`] — zero of the pressure of a transfer matrix built
//!   on the depth-`k` disk cover.
//! * [`box_counting`] — slope of `log N(ε)` against `log(1/ε)`, an oracle on
//!   limit-set samples.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{Complex, Moebius};
use crate::schottky::{inverse_letter, GroupError, SchottkyGroup, Word};

/// Bisection tolerance on the exponent.
pub const EXPONENT_TOL: f64 = 1e-3;
/// Spectral radius must be within this of one.
pub const TRANSFER_TOL: f64 = 1e-4;
pub const POWER_MAX_ITER: usize = 10_000;
pub const POWER_TOL: f64 = 1e-10;
/// Band for the ratio test at `s = 1`.
pub const PROXY_DELTA: f64 = 0.05;
/// Largest relative change of shell ratios between depths before the
/// exponent is declared unstable.
pub const RATIO_OSCILLATION: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error("{what} did not converge: {detail}")]
    NonConverged { what: &'static str, detail: String },
    #[error("transfer operator needs a circle pairing")]
    NoPairing,
    #[error("box counting fit is degenerate: all points coincide")]
    DegenerateFit,
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("depth {depth} below the minimum {min}")]
    DepthTooSmall { depth: usize, min: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exponent,
    Transfer,
    #[value(name = "boxcount")]
    #[serde(rename = "boxcount")]
    BoxCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    pub method: Method,
    pub value: f64,
    pub depth: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTruncation {
    pub s: f64,
    pub depth: usize,
    pub partial_sum: f64,
    pub last_shell: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rectifiability {
    ConvergesLikely,
    DivergesLikely,
    Inconclusive,
}

/// Base-point displacements of all nontrivial reduced words, grouped by
/// word length. Shell `j` (index `j - 1`) holds words of length `j` in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct Shells {
    shells: Vec<Vec<f64>>,
}

impl Shells {
    pub fn compute(group: &SchottkyGroup, depth: usize) -> Shells {
        let g = group.rank();
        // Subtrees under each first letter are independent; collecting them in
        // letter order keeps every shell in lexicographic order.
        let per_letter: Vec<Vec<Vec<f64>>> = (0..2 * g)
            .into_par_iter()
            .map(|first| {
                let mut shells = vec![Vec::new(); depth];
                let root = group.letter_map(first);
                shells[0].push(root.base_displacement());
                if depth > 1 {
                    let sub = subtree(group, first, depth);
                    for (j, shell) in sub.into_iter().enumerate() {
                        shells[j + 1] = shell;
                    }
                }
                shells
            })
            .collect();
        let mut shells = vec![Vec::new(); depth];
        for part in per_letter {
            for (j, s) in part.into_iter().enumerate() {
                shells[j].extend(s);
            }
        }
        Shells { shells }
    }

    pub fn depth(&self) -> usize {
        self.shells.len()
    }

    pub fn shell(&self, length: usize) -> &[f64] {
        &self.shells[length - 1]
    }

    /// `ln Σ_{|w| = length} exp(-s d(w))`.
    pub fn log_shell_sum(&self, length: usize, s: f64) -> f64 {
        log_sum_exp(self.shell(length), s)
    }

    pub fn shell_sum(&self, length: usize, s: f64) -> f64 {
        self.shell(length).iter().map(|d| (-s * d).exp()).sum()
    }

    /// `ln(S_j(s) / S_{j-1}(s))` for `j ≥ 2`.
    pub fn log_ratio(&self, length: usize, s: f64) -> f64 {
        self.log_shell_sum(length, s) - self.log_shell_sum(length - 1, s)
    }

    pub fn truncation(&self, s: f64) -> SeriesTruncation {
        let mut partial = 0.0;
        let mut last = 0.0;
        for j in 1..=self.depth() {
            last = self.shell_sum(j, s);
            partial += last;
        }
        SeriesTruncation {
            s,
            depth: self.depth(),
            partial_sum: partial,
            last_shell: last,
        }
    }
}

// Words of length 2..=depth starting with `first`, as shells indexed from 0.
fn subtree(group: &SchottkyGroup, first: usize, depth: usize) -> Vec<Vec<f64>> {
    let g = group.rank();
    let letters: Vec<_> = (0..2 * g).map(|l| group.letter_map(l)).collect();
    let mut order = Vec::new();
    collect_ordered(&letters, g, letters[first], first, 1, depth, &mut order);
    let mut shells = vec![Vec::new(); depth - 1];
    for (len, d) in order {
        shells[len - 2].push(d);
    }
    shells
}

fn collect_ordered(
    letters: &[Moebius],
    g: usize,
    map: Moebius,
    last: usize,
    len: usize,
    depth: usize,
    out: &mut Vec<(usize, f64)>,
) {
    if len == depth {
        return;
    }
    let banned = inverse_letter(last, g);
    for l in 0..2 * g {
        if l == banned {
            continue;
        }
        let next = map.compose(&letters[l]);
        out.push((len + 1, next.base_displacement()));
        collect_ordered(letters, g, next, l, len + 1, depth, out);
    }
}

fn log_sum_exp(displacements: &[f64], s: f64) -> f64 {
    if displacements.is_empty() {
        return f64::NEG_INFINITY;
    }
    let max = displacements.iter().map(|d| -s * d).fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = displacements.iter().map(|d| (-s * d - max).exp()).sum();
    max + sum.ln()
}

/// Partial sum of `Σ exp(-s·d(o, γo))` over reduced words of length `1..=depth`.
pub fn poincare_partial_sum(group: &SchottkyGroup, s: f64, depth: usize) -> SeriesTruncation {
    Shells::compute(group, depth.max(1)).truncation(s)
}

/// Exponent of convergence from the growth rate of the last shell.
pub fn exponent_of_convergence(group: &SchottkyGroup, depth: usize) -> Result<DimensionEstimate, DimensionError> {
    if depth < 4 {
        return Err(DimensionError::DepthTooSmall { depth, min: 4 });
    }
    let shells = Shells::compute(group, depth);
    exponent_from_shells(&shells)
}

pub fn exponent_from_shells(shells: &Shells) -> Result<DimensionEstimate, DimensionError> {
    let k = shells.depth();
    let f = |s: f64| shells.log_ratio(k, s);
    let value = bisect_decreasing(f, 0.0, 2.0, EXPONENT_TOL);
    let residual = f(value).abs();
    let current = f(value).exp();
    let previous = shells.log_ratio(k - 1, value).exp();
    let change = (current - previous).abs() / current.max(previous);
    if change > RATIO_OSCILLATION {
        return Err(DimensionError::NonConverged {
            what: "shell ratio",
            detail: format!("ratios {previous:.4} → {current:.4} at s = {value:.4}"),
        });
    }
    Ok(DimensionEstimate {
        method: Method::Exponent,
        value,
        depth: k,
        residual,
    })
}

/// Root of a decreasing function on `[lo, hi]`; clamps to the bracket ends.
fn bisect_decreasing<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if f(lo) <= 0.0 {
        return lo;
    }
    if f(hi) >= 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sparse nonnegative matrix `T(s)` on the depth-`k` cover. Column `w` feeds
/// row `(l·w)` truncated to `k` letters with weight `|γ_l'(z_w)|^s`, `z_w`
/// the center of the cover disk of `w`.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    size: usize,
    /// `(row, column, ln |γ'|)`
    entries: Vec<(usize, usize, f64)>,
}

impl TransferOperator {
    pub fn build(group: &SchottkyGroup, depth: usize) -> Result<TransferOperator, DimensionError> {
        if group.pairing().is_none() {
            return Err(DimensionError::NoPairing);
        }
        let g = group.rank();
        let cover = group.cover(depth)?;
        let index: HashMap<&Word, usize> = cover.iter().enumerate().map(|(i, (w, _))| (w, i)).collect();
        let mut entries = Vec::with_capacity(cover.len() * (2 * g - 1));
        for (col, (word, disk)) in cover.iter().enumerate() {
            let first = word.letters()[0];
            for l in 0..2 * g {
                if l == inverse_letter(first, g) {
                    continue;
                }
                let mut target = Vec::with_capacity(depth);
                target.push(l);
                target.extend_from_slice(&word.letters()[..depth - 1]);
                let row = index[&Word::new(target)];
                let deriv = group.letter_map(l).derivative_modulus(disk.center).map_err(|e| {
                    DimensionError::NonConverged {
                        what: "transfer weights",
                        detail: e.to_string(),
                    }
                })?;
                entries.push((row, col, deriv.ln()));
            }
        }
        Ok(TransferOperator {
            size: cover.len(),
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Spectral radius of `T(s)` by power iteration on the positive cone.
    pub fn spectral_radius(&self, s: f64) -> Result<f64, DimensionError> {
        let weights: Vec<f64> = self.entries.iter().map(|&(_, _, lw)| (s * lw).exp()).collect();
        let mut v = vec![1.0 / self.size as f64; self.size];
        let mut next = vec![0.0; self.size];
        let mut estimate = f64::NAN;
        for _ in 0..POWER_MAX_ITER {
            next.iter_mut().for_each(|x| *x = 0.0);
            for (&(row, col, _), w) in self.entries.iter().zip(&weights) {
                next[row] += w * v[col];
            }
            let norm: f64 = next.iter().sum();
            if norm <= 0.0 || !norm.is_finite() {
                return Err(DimensionError::NonConverged {
                    what: "power iteration",
                    detail: format!("norm {norm} at s = {s}"),
                });
            }
            next.iter_mut().for_each(|x| *x /= norm);
            let delta: f64 = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut v, &mut next);
            let converged = (norm - estimate).abs() <= POWER_TOL * norm && delta <= POWER_TOL.sqrt();
            estimate = norm;
            if converged {
                return Ok(estimate);
            }
        }
        Err(DimensionError::NonConverged {
            what: "power iteration",
            detail: format!("{POWER_MAX_ITER} iterations at s = {s}"),
        })
    }
}

/// Zero of `ln ρ(T(s))` on `[0, 2]`.
pub fn transfer_dimension(group: &SchottkyGroup, depth: usize) -> Result<DimensionEstimate, DimensionError> {
    let op = TransferOperator::build(group, depth.max(1))?;
    let log_rho = |s: f64| op.spectral_radius(s).map(f64::ln);
    let (mut lo, mut hi) = (0.0, 2.0);
    let at_lo = log_rho(lo)?;
    let finish = |value: f64, lr: f64| DimensionEstimate {
        method: Method::Transfer,
        value,
        depth,
        residual: (lr.exp() - 1.0).abs(),
    };
    if at_lo <= TRANSFER_TOL {
        return Ok(finish(0.0, at_lo));
    }
    let at_hi = log_rho(hi)?;
    if at_hi >= 0.0 {
        return Ok(finish(2.0, at_hi));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let lr = log_rho(mid)?;
        if (lr.exp() - 1.0).abs() <= TRANSFER_TOL || hi - lo < 1e-9 {
            return Ok(finish(mid, lr));
        }
        if lr > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Least-squares slope of `ln N(ε)` against `ln(1/ε)`.
///
/// `N(ε)` is the smallest occupied-cell count over four offset grids.
pub fn box_counting(points: &[Complex], scales: &[f64]) -> Result<DimensionEstimate, DimensionError> {
    if points.len() < 2 {
        return Err(DimensionError::InsufficientData(format!("{} points", points.len())));
    }
    let first = points[0];
    if points.iter().all(|p| *p == first) {
        return Err(DimensionError::DegenerateFit);
    }
    if scales.len() < 4 || scales.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(DimensionError::InsufficientData(format!("{} scales", scales.len())));
    }
    let max = scales.iter().copied().fold(f64::MIN, f64::max);
    let min = scales.iter().copied().fold(f64::MAX, f64::min);
    if max / min < 100.0 - 1e-9 {
        return Err(DimensionError::InsufficientData(format!(
            "scales span {:.2} decades, need 2",
            (max / min).log10()
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &eps in scales {
        xs.push((1.0 / eps).ln());
        ys.push((occupied_cells(points, eps) as f64).ln());
    }
    let (slope, rms) = least_squares(&xs, &ys);
    Ok(DimensionEstimate {
        method: Method::BoxCount,
        value: slope.clamp(0.0, 2.0),
        depth: 0,
        residual: rms,
    })
}

pub fn occupied_cells(points: &[Complex], eps: f64) -> usize {
    const OFFSETS: [(f64, f64); 4] = [(0.0, 0.0), (0.5, 0.5), (0.25, 0.75), (0.75, 0.25)];
    OFFSETS
        .iter()
        .map(|&(ox, oy)| {
            points
                .iter()
                .map(|p| ((p.re / eps + ox).floor() as i64, (p.im / eps + oy).floor() as i64))
                .collect::<HashSet<_>>()
                .len()
        })
        .min()
        .unwrap_or(0)
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (my + slope * (x - mx));
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    (slope, rms)
}

/// Box-counting dimension of the depth-`k` limit-set samples of a group.
///
/// Scales halve from a quarter of the sample diameter down to the finest
/// scale the sampling resolves: twice the largest depth-`k` disk radius when
/// a pairing exists, and no finer than where boxes start to hold single
/// samples.
pub fn box_dimension(group: &SchottkyGroup, depth: usize) -> Result<DimensionEstimate, DimensionError> {
    let points: Vec<Complex> = group.sample_limit_set(depth)?.into_iter().map(|s| s.point).collect();
    let scales = auto_scales(group, &points, depth)?;
    let mut estimate = box_counting(&points, &scales)?;
    estimate.depth = depth;
    Ok(estimate)
}

fn auto_scales(group: &SchottkyGroup, points: &[Complex], depth: usize) -> Result<Vec<f64>, DimensionError> {
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in points {
        lo_x = lo_x.min(p.re);
        hi_x = hi_x.max(p.re);
        lo_y = lo_y.min(p.im);
        hi_y = hi_y.max(p.im);
    }
    let diameter = (hi_x - lo_x).max(hi_y - lo_y);
    if diameter <= 0.0 {
        return Err(DimensionError::DegenerateFit);
    }
    let floor = match group.pairing() {
        Some(_) => 2.0 * group.max_cover_radius(depth)?,
        None => 0.0,
    };
    let saturation = points.len() as f64 / 4.0;
    let mut scales = Vec::new();
    let mut eps = diameter / 4.0;
    while eps > floor && eps > diameter * 1e-9 {
        if !scales.is_empty() && occupied_cells(points, eps) as f64 > saturation {
            break;
        }
        scales.push(eps);
        eps /= 2.0;
    }
    if scales.len() < 4 || scales[0] / scales[scales.len() - 1] < 100.0 {
        // Too few resolved scales; extend to two decades regardless.
        let top = diameter / 4.0;
        scales = (0..8).map(|j| top / 2f64.powi(j)).collect();
    }
    Ok(scales)
}

/// Ratio test at `s = 1` on the last three shells.
pub fn rectifiability_proxy(group: &SchottkyGroup, depth: usize) -> Result<Rectifiability, DimensionError> {
    if depth < 4 {
        return Err(DimensionError::DepthTooSmall { depth, min: 4 });
    }
    Ok(proxy_from_shells(&Shells::compute(group, depth)))
}

pub fn proxy_from_shells(shells: &Shells) -> Rectifiability {
    let k = shells.depth();
    let ratios: Vec<f64> = (k - 2..=k).map(|j| shells.log_ratio(j, 1.0).exp()).collect();
    if ratios.iter().all(|&r| r < 1.0 - PROXY_DELTA) {
        Rectifiability::ConvergesLikely
    } else if ratios.iter().all(|&r| r > 1.0 + PROXY_DELTA) {
        Rectifiability::DivergesLikely
    } else {
        Rectifiability::Inconclusive
    }
}

/// Dispatches to one estimator.
pub fn estimate(group: &SchottkyGroup, method: Method, depth: usize) -> Result<DimensionEstimate, DimensionError> {
    match method {
        Method::Exponent => exponent_of_convergence(group, depth),
        Method::Transfer => transfer_dimension(group, depth),
        Method::BoxCount => box_dimension(group, depth),
    }
}
