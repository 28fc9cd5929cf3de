//! Desk-scale check that random rank-2 groups of small dimension are
//! classical: sample, filter by the dimension estimate, search.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::document::GroupDocument;
use super::sampler::{random_rank2_group, GeneratorDraw};
use crate::classicality::{search_classical_generators, FailureReport, SearchOptions, SearchOutcome};
use crate::dimension::{estimate, Method};

/// Draws allowed per requested sample before the filter gives up.
pub const DRAWS_PER_SAMPLE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheckOptions {
    /// Groups to keep after filtering.
    pub samples: usize,
    pub threshold: f64,
    pub budget: usize,
    pub seed: u64,
    pub method: Method,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleRecord {
    /// Position in the draw sequence (0-based).
    pub draw: usize,
    pub draws: Vec<GeneratorDraw>,
    pub group: GroupDocument,
    pub dimension: f64,
    pub certified: bool,
    pub visited: usize,
    /// Nielsen moves from the drawn generators to the certified ones.
    pub nielsen_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TheoremReport {
    pub options: TheoremCheckOptions,
    pub draws: usize,
    /// Draws whose estimator failed.
    pub rejected_estimator: usize,
    /// Draws at or above the threshold.
    pub rejected_threshold: usize,
    pub kept: usize,
    pub successes: usize,
    /// `None` when no draw passed the filter.
    pub success_fraction: Option<f64>,
    pub budgets_used: Vec<usize>,
    pub records: Vec<SampleRecord>,
    /// Indices into `records` of the failures.
    pub failures: Vec<usize>,
}

impl TheoremReport {
    pub fn all_certified(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Kept {
    draw: usize,
    draws: Vec<GeneratorDraw>,
    group: crate::schottky::SchottkyGroup,
    dimension: f64,
}

pub fn theorem_check(options: TheoremCheckOptions) -> TheoremReport {
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let max_draws = options.samples * DRAWS_PER_SAMPLE;
    let mut kept = Vec::new();
    let (mut draws, mut rejected_estimator, mut rejected_threshold) = (0, 0, 0);
    while kept.len() < options.samples && draws < max_draws {
        let (gen_draws, group) = random_rank2_group(&mut rng);
        draws += 1;
        match estimate(&group, options.method, options.depth) {
            Err(_) => rejected_estimator += 1,
            Ok(e) if e.value.is_finite() && e.value < options.threshold => kept.push(Kept {
                draw: draws - 1,
                draws: gen_draws,
                group,
                dimension: e.value,
            }),
            Ok(_) => rejected_threshold += 1,
        }
    }

    let search = SearchOptions {
        budget: options.budget,
        ..SearchOptions::default()
    };
    let records: Vec<SampleRecord> = kept
        .par_iter()
        .map(|k| {
            let mut record = SampleRecord {
                draw: k.draw,
                draws: k.draws.clone(),
                group: GroupDocument::from_group(&k.group, Some(&format!("draw-{}", k.draw))),
                dimension: k.dimension,
                certified: false,
                visited: 0,
                nielsen_depth: None,
                failure: None,
                error: None,
            };
            match search_classical_generators(&k.group, search) {
                Ok(SearchOutcome::Certified { depth, visited, .. }) => {
                    record.certified = true;
                    record.visited = visited;
                    record.nielsen_depth = Some(depth);
                }
                Ok(SearchOutcome::Exhausted(report)) => {
                    record.visited = report.visited;
                    record.failure = Some(report);
                }
                Err(err) => record.error = Some(err.to_string()),
            }
            record
        })
        .collect();

    let successes = records.iter().filter(|r| r.certified).count();
    let failures = records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.certified)
        .map(|(i, _)| i)
        .collect();
    TheoremReport {
        options,
        draws,
        rejected_estimator,
        rejected_threshold,
        kept: records.len(),
        successes,
        success_fraction: (!records.is_empty()).then(|| successes as f64 / records.len() as f64),
        budgets_used: records.iter().map(|r| r.visited).collect(),
        records,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options(samples: usize, threshold: f64) -> TheoremCheckOptions {
        TheoremCheckOptions {
            samples,
            threshold,
            budget: 2_000,
            seed: 11,
            method: Method::Exponent,
            depth: 8,
        }
    }

    #[test]
    fn zero_threshold_keeps_nothing() {
        let report = theorem_check(options(2, 0.0));
        assert_eq!(report.kept, 0);
        assert!(report.records.is_empty());
        assert_eq!(report.success_fraction, None);
        assert_eq!(report.draws, 2 * DRAWS_PER_SAMPLE);
    }

    #[test]
    fn seeded_reports_repeat() {
        let a = serde_json::to_string(&theorem_check(options(2, 0.6))).unwrap();
        let b = serde_json::to_string(&theorem_check(options(2, 0.6))).unwrap();
        assert_eq!(a, b);
    }
}
