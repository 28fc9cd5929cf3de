//! Multiplier-inflation path: every generator keeps its fixed points while
//! its multiplier `k` (with `|k| < 1`) is divided by a growing factor. The
//! dimension estimate is recorded at every step so monotonicity is observed
//! rather than assumed.

use serde::{Deserialize, Serialize};

use super::search::{search_classical_generators, SearchOptions, SearchOutcome};
use super::ClassicalCertificate;
use crate::dimension::{estimate, DimensionError, DimensionEstimate, Method};
use crate::moebius::{Complex, Moebius};
use crate::schottky::SchottkyGroup;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeformOptions {
    pub steps: usize,
    pub method: Method,
    pub depth: usize,
    /// Initial per-step growth of `1/|k|`.
    pub epsilon: f64,
    /// Largest allowed change of the estimate between steps.
    pub max_step_change: f64,
    /// Stop as soon as a certificate with at least `margin_threshold` exists.
    pub stop_on_certificate: bool,
    pub margin_threshold: f64,
    pub search: SearchOptions,
}

impl Default for DeformOptions {
    fn default() -> Self {
        DeformOptions {
            steps: 20,
            method: Method::Exponent,
            depth: 8,
            epsilon: 0.1,
            max_step_change: 0.05,
            stop_on_certificate: true,
            margin_threshold: 0.1,
            search: SearchOptions {
                budget: 10_000,
                extra_frames: 6,
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformStep {
    pub step: usize,
    /// Accumulated factor applied to every `1/|k|`.
    pub inflation: f64,
    /// `|1/k|` per generator.
    pub multipliers: Vec<f64>,
    pub generators: Vec<Moebius>,
    pub estimate: DimensionEstimate,
    pub certified: bool,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeformTrace {
    pub steps: Vec<DeformStep>,
    pub certificate: Option<ClassicalCertificate>,
    pub warning: Option<String>,
}

impl DeformTrace {
    /// Largest increase of the estimate between consecutive steps.
    pub fn max_increase(&self) -> f64 {
        self.steps
            .windows(2)
            .map(|w| w[1].estimate.value - w[0].estimate.value)
            .fold(0.0, f64::max)
    }
}

struct FixedPointForm {
    attracting: Complex,
    repelling: Complex,
    multiplier: Complex,
}

fn decompose(f: &Moebius) -> Option<FixedPointForm> {
    let (p, q, _) = f.fixed_points().ok()?;
    Some(FixedPointForm {
        attracting: p.finite()?,
        repelling: q.finite()?,
        multiplier: f.multiplier(),
    })
}

fn inflate(forms: &[FixedPointForm], factor: f64, fallback: &[Moebius]) -> Vec<Moebius> {
    forms
        .iter()
        .zip(fallback)
        .map(|(form, f)| {
            Moebius::from_fixed_points(form.attracting, form.repelling, form.multiplier / factor).unwrap_or(*f)
        })
        .collect()
}

fn certify(group: &SchottkyGroup, options: &DeformOptions) -> Option<ClassicalCertificate> {
    match search_classical_generators(group, options.search) {
        Ok(SearchOutcome::Certified { certificate, .. }) => Some(certificate),
        _ => None,
    }
}

/// Runs the path for at most `options.steps` steps.
pub fn deform_toward_classical(
    group: &SchottkyGroup,
    options: &DeformOptions,
) -> Result<DeformTrace, DimensionError> {
    let start = group.without_pairing();
    let base = estimate(&start, options.method, options.depth)?;
    let warning = (base.value >= 1.0).then(|| format!("initial dimension estimate {:.4} is not below 1", base.value));

    let forms: Option<Vec<FixedPointForm>> = start.generators().iter().map(decompose).collect();
    // Generators fixing infinity are moved off it first; the path is the same
    // up to conjugation.
    let (work, conj) = match forms {
        Some(f) => (f, Moebius::IDENTITY),
        None => {
            let h = Moebius::real(1.0, 0.0, 0.37, 1.0).expect("shift");
            let moved = start.conjugated(&h);
            let forms = moved
                .generators()
                .iter()
                .map(decompose)
                .collect::<Option<Vec<_>>>()
                .expect("conjugated fixed points are finite");
            (forms, h.inverse())
        }
    };
    let conj_gens: Vec<Moebius> = start.generators().iter().map(|f| f.conjugate_by(&conj.inverse())).collect();

    let record = |step: usize, factor: f64, g: &SchottkyGroup, est: DimensionEstimate, options: &DeformOptions| {
        let cert = certify(g, options);
        let step = DeformStep {
            step,
            inflation: factor,
            multipliers: g.generators().iter().map(|f| 1.0 / f.multiplier().norm()).collect(),
            generators: g.generators().to_vec(),
            estimate: est,
            certified: cert.is_some(),
            margin: cert.as_ref().map(|c| c.margin),
        };
        (step, cert)
    };

    let (first, mut certificate) = record(0, 1.0, &start, base, options);
    let mut steps = vec![first];
    let done = |cert: &Option<ClassicalCertificate>| {
        options.stop_on_certificate && cert.as_ref().is_some_and(|c| c.margin > options.margin_threshold)
    };
    if done(&certificate) {
        return Ok(DeformTrace {
            steps,
            certificate,
            warning,
        });
    }

    let mut factor = 1.0;
    let mut epsilon = options.epsilon;
    let mut previous = base.value;
    for step in 1..=options.steps {
        let (group_t, est) = loop {
            let trial = factor * (1.0 + epsilon);
            let gens: Vec<Moebius> = inflate(&work, trial, &conj_gens)
                .iter()
                .map(|f| f.conjugate_by(&conj))
                .collect();
            let group_t = SchottkyGroup::new(gens).map_err(DimensionError::Group)?;
            let est = estimate(&group_t, options.method, options.depth)?;
            if (est.value - previous).abs() <= options.max_step_change || epsilon < 1e-4 {
                factor = trial;
                break (group_t, est);
            }
            epsilon /= 2.0;
        };
        previous = est.value;
        let (entry, cert) = record(step, factor, &group_t, est, options);
        steps.push(entry);
        if cert.is_some() {
            certificate = cert;
        }
        if done(&certificate) {
            break;
        }
    }
    Ok(DeformTrace {
        steps,
        certificate,
        warning,
    })
}
