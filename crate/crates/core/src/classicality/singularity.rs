use serde::{Deserialize, Serialize};

use super::ClassicalityError;
use crate::moebius::Complex;
use crate::schottky::{complex_pair, Circle};

/// Relative threshold under which an extrapolated quantity counts as zero.
pub const VANISHING_TOL: f64 = 1e-6;

/// One boundary component of a domain in a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DomainEntry {
    Circle(Circle),
    Point {
        #[serde(with = "complex_pair")]
        point: Complex,
    },
}

impl DomainEntry {
    fn center(&self) -> Complex {
        match self {
            DomainEntry::Circle(c) => c.center,
            DomainEntry::Point { point } => *point,
        }
    }

    fn radius(&self) -> f64 {
        match self {
            DomainEntry::Circle(c) => c.radius,
            DomainEntry::Point { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainSequence {
    pub steps: Vec<Vec<DomainEntry>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SingularityKind {
    None,
    Tangency {
        pair: (usize, usize),
        #[serde(with = "complex_pair")]
        point: Complex,
    },
    Degeneration {
        index: usize,
        #[serde(with = "complex_pair")]
        point: Complex,
    },
    Collapsing {
        pair: (usize, usize),
        circle: Circle,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularityReport {
    pub kind: SingularityKind,
    /// First step of the final monotone approach (zero based).
    pub onset: usize,
    /// Extrapolated value of the vanishing quantity.
    pub witness: f64,
}

/// Limit of a sequence sampled at steps `1..=n`, from its last three terms.
///
/// Two models are fitted: geometric `L + aρⁿ` (Aitken) and power law
/// `L + a n^{-p}`. The smaller-magnitude limit wins, which errs toward
/// reporting a singularity only when some model drives the quantity to zero.
fn extrapolate(values: &[f64]) -> f64 {
    let n = values.len();
    let (x0, x1, x2) = (values[n - 3], values[n - 2], values[n - 1]);
    let (d1, d2) = (x1 - x0, x2 - x1);
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() || d2.abs() >= d1.abs() {
        return x2;
    }
    let aitken = x2 - d2 * d2 / (d2 - d1);
    let power = power_law_limit(n as f64, x0, x1, x2).unwrap_or(x2);
    if aitken.abs() < power.abs() {
        aitken
    } else {
        power
    }
}

fn power_law_limit(n: f64, x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let target = (x0 - x1) / (x1 - x2);
    let ratio = |p: f64| ((n - 2.0).powf(-p) - (n - 1.0).powf(-p)) / ((n - 1.0).powf(-p) - n.powf(-p));
    let (mut lo, mut hi) = (1e-3, 20.0);
    if !(ratio(lo) <= target && target <= ratio(hi)) {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let p = 0.5 * (lo + hi);
    let a = (x1 - x2) / ((n - 1.0).powf(-p) - n.powf(-p));
    Some(x2 - a * n.powf(-p))
}

fn onset_of_decrease(values: &[f64]) -> usize {
    let mut start = values.len() - 1;
    while start > 0 && values[start - 1] > values[start] {
        start -= 1;
    }
    start
}

fn vanishes(values: &[f64], scale: f64) -> Option<(f64, usize)> {
    let limit = extrapolate(values);
    let last = *values.last().unwrap();
    let tol = VANISHING_TOL * scale;
    if last.abs() <= tol || (limit.abs() <= tol && last < values[0]) {
        Some((limit.abs().min(last.abs()), onset_of_decrease(values)))
    } else {
        None
    }
}

fn separation(a: &DomainEntry, b: &DomainEntry) -> f64 {
    let d = (a.center() - b.center()).norm();
    let external = d - a.radius() - b.radius();
    let internal = (a.radius() - b.radius()).abs() - d;
    external.max(internal)
}

/// Labels the limiting singularity of a sequence of domain configurations.
/// Priority when several apply: collapsing, then degeneration, then
/// tangency. Circles squeezed between a collapsing pair shrink to points
/// as well; the pair is the singularity.
pub fn classify_domain_sequence(seq: &DomainSequence) -> Result<SingularityReport, ClassicalityError> {
    let steps = &seq.steps;
    if steps.len() < 3 {
        return Err(ClassicalityError::InconsistentSequence(format!(
            "{} steps, need at least 3",
            steps.len()
        )));
    }
    let count = steps[0].len();
    if let Some((i, s)) = steps.iter().enumerate().find(|(_, s)| s.len() != count) {
        return Err(ClassicalityError::InconsistentSequence(format!(
            "step {i} has {} entries, step 0 has {count}",
            s.len()
        )));
    }
    let series = |f: &dyn Fn(&[DomainEntry]) -> f64| steps.iter().map(|s| f(s)).collect::<Vec<f64>>();
    let last = steps.last().unwrap();
    let initial_radius: Vec<f64> = steps[0].iter().map(DomainEntry::radius).collect();
    let mean_radius = {
        let rs: Vec<f64> = initial_radius.iter().copied().filter(|r| *r > 0.0).collect();
        if rs.is_empty() {
            1.0
        } else {
            rs.iter().sum::<f64>() / rs.len() as f64
        }
    };

    let radii: Vec<Vec<f64>> = (0..count).map(|i| series(&|s| s[i].radius())).collect();
    let degenerate: Vec<bool> = (0..count)
        .map(|i| {
            matches!(last[i], DomainEntry::Point { .. })
                || vanishes(&radii[i], initial_radius[i].max(f64::MIN_POSITIVE)).is_some()
        })
        .collect();

    for i in 0..count {
        for j in i + 1..count {
            if degenerate[i] || degenerate[j] {
                continue;
            }
            let center_gap = series(&|s| (s[i].center() - s[j].center()).norm());
            let radius_gap = series(&|s| (s[i].radius() - s[j].radius()).abs());
            let scale = mean_radius;
            let centers_meet = vanishes(&center_gap, scale).is_some();
            if let (true, Some((witness, onset))) = (centers_meet, vanishes(&radius_gap, scale)) {
                let circle = match last[j] {
                    DomainEntry::Circle(c) => c,
                    DomainEntry::Point { .. } => continue,
                };
                return Ok(SingularityReport {
                    kind: SingularityKind::Collapsing { pair: (i, j), circle },
                    onset,
                    witness,
                });
            }
        }
    }

    for i in 0..count {
        if degenerate[i] {
            let (witness, onset) = vanishes(&radii[i], initial_radius[i].max(f64::MIN_POSITIVE))
                .unwrap_or((0.0, onset_of_decrease(&radii[i])));
            return Ok(SingularityReport {
                kind: SingularityKind::Degeneration {
                    index: i,
                    point: last[i].center(),
                },
                onset,
                witness,
            });
        }
    }

    for i in 0..count {
        for j in i + 1..count {
            let gap = series(&|s| separation(&s[i], &s[j]));
            if let Some((witness, onset)) = vanishes(&gap, mean_radius) {
                let (a, b) = (last[i], last[j]);
                let dir = b.center() - a.center();
                let point = if dir.norm() > 0.0 {
                    let d = (b.center() - a.center()).norm();
                    let external = d - a.radius() - b.radius();
                    let internal = (a.radius() - b.radius()).abs() - d;
                    let unit = dir / dir.norm();
                    // Internal tangency with `a` inside `b` touches on the far side.
                    if external < internal && a.radius() < b.radius() {
                        a.center() - unit * a.radius()
                    } else {
                        a.center() + unit * a.radius()
                    }
                } else {
                    a.center() + Complex::new(a.radius(), 0.0)
                };
                return Ok(SingularityReport {
                    kind: SingularityKind::Tangency { pair: (i, j), point },
                    onset,
                    witness,
                });
            }
        }
    }

    Ok(SingularityReport {
        kind: SingularityKind::None,
        onset: steps.len(),
        witness: 0.0,
    })
}
