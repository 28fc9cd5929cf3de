use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::PolyCurve;
use crate::moebius::Complex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetOptions {
    /// Spacing of arc-length-uniform samples; `None` samples segments at
    /// their endpoints and arcs at eight points.
    pub resolution: Option<f64>,
    /// Add `|ℓ₁ − ℓ₂|`. Off gives the classical discrete Fréchet distance.
    pub length_term: bool,
}

impl Default for FrechetOptions {
    fn default() -> Self {
        FrechetOptions {
            resolution: None,
            length_term: true,
        }
    }
}

/// Discrete Fréchet distance between closed sample sequences `a` (anchored)
/// and `b` read from `offset` in direction `step`, both closed back to their
/// first point. Rows whose minimum already exceeds `bound` abort early.
fn anchored(a: &[Complex], b: &[Complex], offset: usize, forward: bool, bound: f64) -> f64 {
    let (n, m) = (a.len(), b.len());
    let bj = |j: usize| {
        let k = j % m;
        if forward {
            b[(offset + k) % m]
        } else {
            b[(offset + m - k) % m]
        }
    };
    let ai = |i: usize| a[i % n];
    let mut prev = vec![0.0f64; m + 1];
    let mut cur = vec![0.0f64; m + 1];
    for i in 0..=n {
        let p = ai(i);
        let mut row_min = f64::INFINITY;
        for j in 0..=m {
            let d = (p - bj(j)).norm();
            let best = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = d.max(best);
            row_min = row_min.min(cur[j]);
        }
        if row_min > bound {
            return f64::INFINITY;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Minimum over cyclic couplings of the sampled curves, orientation
/// reversal included.
fn cyclic_frechet(a: &[Complex], b: &[Complex]) -> f64 {
    // Every cyclic coupling passes through some pair (a[0], b[k]), so
    // anchoring one curve and rotating the other covers all of them. The
    // shorter sequence is rotated.
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let starts: Vec<(usize, bool)> = (0..b.len()).flat_map(|k| [(k, true), (k, false)]).collect();
    // A cheap upper bound lets most rotations stop early.
    let seed = anchored(a, b, 0, true, f64::INFINITY).min(anchored(a, b, 0, false, f64::INFINITY));
    starts
        .par_iter()
        .map(|&(k, fwd)| anchored(a, b, k, fwd, seed))
        .reduce(|| seed, f64::min)
}

/// Fréchet distance with the length term: the discrete Fréchet distance over
/// cyclic reparameterizations of the sampled curves plus `|ℓ₁ − ℓ₂|`.
pub fn frechet_distance(c1: &PolyCurve, c2: &PolyCurve, options: FrechetOptions) -> f64 {
    let sample = |c: &PolyCurve| match options.resolution {
        Some(r) => c.sample_uniform(((c.length() / r).ceil() as usize).max(3)),
        None => c.sample(None),
    };
    let (a, b) = (sample(c1), sample(c2));
    let sup = cyclic_frechet(&a, &b);
    if options.length_term {
        sup + (c1.length() - c2.length()).abs()
    } else {
        sup
    }
}
