//! Seeded random rank-2 groups for the theorem check.
//!
//! Each generator has its fixed points drawn uniformly from the disk of
//! radius 5, an expansion factor `1/|k|` log-uniform in `[1.5, 20]` and a
//! uniform rotation `arg k`. Draws with non-loxodromic generators are
//! rejected.

use std::f64::consts::TAU;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::moebius::{Complex, Moebius};
use crate::schottky::SchottkyGroup;

pub const FIXED_POINT_RADIUS: f64 = 5.0;
pub const MIN_EXPANSION: f64 = 1.5;
pub const MAX_EXPANSION: f64 = 20.0;
/// Fixed points closer than this are redrawn.
const MIN_FIXED_POINT_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorDraw {
    #[serde(with = "crate::schottky::complex_pair")]
    pub attracting: Complex,
    #[serde(with = "crate::schottky::complex_pair")]
    pub repelling: Complex,
    #[serde(with = "crate::schottky::complex_pair")]
    pub multiplier: Complex,
}

impl GeneratorDraw {
    pub fn to_map(&self) -> Option<Moebius> {
        Moebius::from_fixed_points(self.attracting, self.repelling, self.multiplier).ok()
    }
}

fn point_in_disk(rng: &mut ChaCha8Rng) -> Complex {
    let r = FIXED_POINT_RADIUS * rng.gen::<f64>().sqrt();
    Complex::from_polar(r, rng.gen_range(0.0..TAU))
}

pub fn draw_generator(rng: &mut ChaCha8Rng) -> GeneratorDraw {
    let attracting = point_in_disk(rng);
    let mut repelling = point_in_disk(rng);
    while (repelling - attracting).norm() < MIN_FIXED_POINT_GAP {
        repelling = point_in_disk(rng);
    }
    let expansion = rng.gen_range(MIN_EXPANSION.ln()..MAX_EXPANSION.ln()).exp();
    let multiplier = Complex::from_polar(1.0 / expansion, rng.gen_range(0.0..TAU));
    GeneratorDraw {
        attracting,
        repelling,
        multiplier,
    }
}

/// Draws until both generators are loxodromic; returns the draws with the
/// group.
pub fn random_rank2_group(rng: &mut ChaCha8Rng) -> (Vec<GeneratorDraw>, SchottkyGroup) {
    loop {
        let draws = vec![draw_generator(rng), draw_generator(rng)];
        let maps: Option<Vec<Moebius>> = draws.iter().map(GeneratorDraw::to_map).collect();
        if let Some(group) = maps.and_then(|m| SchottkyGroup::new(m).ok()) {
            return (draws, group);
        }
    }
}
