//! Classical fundamental domains: verification, singularity classification
//! of domain sequences, search for classical generators and the deformation
//! path toward classical groups.

mod deform;
mod search;
mod singularity;

pub use deform::{deform_toward_classical, DeformOptions, DeformStep, DeformTrace};
pub use search::{
    nielsen_scramble, search_classical_generators, witnesses_match, FailureReport, NielsenMove, SearchOutcome,
    SearchOptions,
};
pub use singularity::{classify_domain_sequence, DomainEntry, DomainSequence, SingularityKind, SingularityReport};

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{Complex, Moebius};
use crate::schottky::{CirclePairing, Word};

/// Center tolerance when comparing the image of circle `i` to circle `i + g`.
pub const PAIRING_CENTER_TOL: f64 = 1e-8;
/// Relative radius tolerance for the same comparison.
pub const PAIRING_RADIUS_TOL: f64 = 1e-8;
/// Boundary samples per generator in the orientation test.
pub const ORIENTATION_SAMPLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalityError {
    #[error("closed disks {0} and {1} intersect (gap {2:.3e})")]
    DisjointnessViolation(usize, usize, f64),
    #[error("generator {0} does not map circle {0} onto circle {1}")]
    PairingViolation(usize, usize),
    #[error("generator {0} does not map the exterior of circle {0} into disk {1}")]
    OrientationViolation(usize, usize),
    #[error("expected {expected} circles for {generators} generators, got {found}")]
    Shape {
        generators: usize,
        expected: usize,
        found: usize,
    },
    #[error("domain sequence is inconsistent: {0}")]
    InconsistentSequence(String),
    #[error("generator {0} is not loxodromic")]
    NonLoxodromic(usize),
}

/// Generators together with a verified classical pairing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicalCertificate {
    pub generators: Vec<Moebius>,
    pub circles: CirclePairing,
    /// Minimum gap between the closed disks.
    pub margin: f64,
    /// Each generator as a word in the generators it was derived from
    /// (one-based letters, inverse of `i` is `i + g`).
    #[serde(default)]
    pub witness_words: Vec<Vec<usize>>,
}

impl ClassicalCertificate {
    pub fn witness(&self) -> Vec<Word> {
        self.witness_words
            .iter()
            .map(|w| Word::from_one_based(w).unwrap_or_default())
            .collect()
    }
}

/// Checks that the circles bound a classical Schottky domain for the
/// generators: disjoint closed disks, `γ_i(C_i) = C_{i+g}`, and `γ_i` maps
/// the exterior of `C_i` into the disk bounded by `C_{i+g}`.
///
/// Indices in errors are one based.
pub fn verify_classical_domain(
    generators: &[Moebius],
    pairing: &CirclePairing,
) -> Result<ClassicalCertificate, ClassicalityError> {
    let g = generators.len();
    let circles = &pairing.circles;
    if circles.len() != 2 * g || g == 0 {
        return Err(ClassicalityError::Shape {
            generators: g,
            expected: 2 * g,
            found: circles.len(),
        });
    }
    let mut margin = f64::INFINITY;
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let gap = circles[i].gap(&circles[j]);
            if gap <= 0.0 {
                return Err(ClassicalityError::DisjointnessViolation(i + 1, j + 1, gap));
            }
            margin = margin.min(gap);
        }
    }
    for (i, f) in generators.iter().enumerate() {
        let (source, target) = (&circles[i], &circles[i + g]);
        let image = match source.image(f) {
            Some(c) => c,
            None => return Err(ClassicalityError::PairingViolation(i + 1, i + g + 1)),
        };
        if (image.center - target.center).norm() > PAIRING_CENTER_TOL * (1.0 + target.center.norm())
            || (image.radius - target.radius).abs() > PAIRING_RADIUS_TOL * target.radius
        {
            return Err(ClassicalityError::PairingViolation(i + 1, i + g + 1));
        }
        let inside = |w: Option<Complex>| w.is_some_and(|w| target.signed_distance(w) < 0.0);
        if !inside(f.apply(crate::moebius::Point::Infinity).finite()) {
            return Err(ClassicalityError::OrientationViolation(i + 1, i + g + 1));
        }
        for k in 0..ORIENTATION_SAMPLES {
            let theta = (k as f64 + 0.5) * TAU / ORIENTATION_SAMPLES as f64;
            for scale in [1.0 + 1e-6, 2.0] {
                let z = source.center + Complex::from_polar(source.radius * scale, theta);
                if !inside(f.apply_finite(z)) {
                    return Err(ClassicalityError::OrientationViolation(i + 1, i + g + 1));
                }
            }
        }
    }
    Ok(ClassicalCertificate {
        generators: generators.to_vec(),
        circles: pairing.clone(),
        margin,
        witness_words: (0..g).map(|i| vec![i + 1]).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::schottky::{Circle, SchottkyGroup};

    #[test]
    fn rank_one_certificate() {
        let f = Moebius::real(3.0, 10.0, 1.0, 3.0).unwrap();
        let pairing = CirclePairing::new(vec![
            Circle::new(Complex::new(-3.0, 0.0), 1.0).unwrap(),
            Circle::new(Complex::new(3.0, 0.0), 1.0).unwrap(),
        ])
        .unwrap();
        let cert = verify_classical_domain(&[f], &pairing).unwrap();
        assert!((cert.margin - 4.0).abs() < 1e-12);
    }

    #[test]
    fn four_circle_margin() {
        let group = fixtures::four_circle_group();
        let cert = verify_classical_domain(group.generators(), group.pairing().unwrap()).unwrap();
        assert!((cert.margin - (3.0 * 2f64.sqrt() - 2.0)).abs() < 1e-12);
    }

    #[test]
    fn overlapping_radii_rejected() {
        let group = fixtures::four_circle_group();
        let circles: Vec<Circle> = group
            .pairing()
            .unwrap()
            .circles
            .iter()
            .map(|c| Circle::new(c.center, 2.2).unwrap())
            .collect();
        let err = verify_classical_domain(group.generators(), &CirclePairing::new(circles).unwrap()).unwrap_err();
        assert!(matches!(err, ClassicalityError::DisjointnessViolation(1, 2, _)));
    }

    #[test]
    fn wrong_pairing_and_orientation() {
        let group = fixtures::four_circle_group();
        let mut circles = group.pairing().unwrap().circles.clone();
        circles.swap(2, 3);
        let err = verify_classical_domain(group.generators(), &CirclePairing::new(circles).unwrap()).unwrap_err();
        assert_eq!(err, ClassicalityError::PairingViolation(1, 3));

        // The inverse maps circle 3 onto circle 1, so swapping roles flips
        // the orientation.
        let circles = fixtures::cyclic_group().pairing().unwrap().circles.clone();
        let inv = fixtures::cyclic_group().generators()[0].inverse();
        let swapped = CirclePairing::new(vec![circles[0], circles[1]]).unwrap();
        let err = verify_classical_domain(&[inv], &swapped).unwrap_err();
        assert_eq!(err, ClassicalityError::PairingViolation(1, 2));
        // z ↦ 3 + (z + 3) maps circle 1 onto circle 2 preserving exteriors.
        let translation = Moebius::real(1.0, 6.0, 0.0, 1.0).unwrap();
        let err = verify_classical_domain(&[translation], &swapped).unwrap_err();
        assert_eq!(err, ClassicalityError::OrientationViolation(1, 2));
        let _ = SchottkyGroup::new(vec![inv]).unwrap();
    }
}
