//! Reference groups used by tests, the acceptance suite and the CLI.

use crate::moebius::{Complex, Moebius};
use crate::schottky::{Circle, SchottkyGroup};

fn circle(re: f64, im: f64, r: f64) -> Circle {
    Circle::new(Complex::new(re, im), r).expect("fixture circle")
}

/// Rank one: `γ(z) = 3 + 1/(z + 3)` pairing `|z + 3| = 1` with `|z - 3| = 1`.
pub fn cyclic_group() -> SchottkyGroup {
    SchottkyGroup::from_circles(vec![circle(-3.0, 0.0, 1.0), circle(3.0, 0.0, 1.0)], &[])
        .expect("cyclic fixture is classical")
}

/// `⟨diag(2, 1/2)⟩`, no pairing.
pub fn diagonal_cyclic_group() -> SchottkyGroup {
    SchottkyGroup::new(vec![Moebius::diagonal(Complex::new(2.0, 0.0))]).expect("loxodromic")
}

/// Four circles centered at `-3, -3i, 3, 3i` with a common radius, paired
/// `-3 ↔ 3` and `-3i ↔ 3i` by `z ↦ c' + r²/(z - c)`.
pub fn four_circle_group_with_radius(r: f64) -> SchottkyGroup {
    SchottkyGroup::from_circles(
        vec![
            circle(-3.0, 0.0, r),
            circle(0.0, -3.0, r),
            circle(3.0, 0.0, r),
            circle(0.0, 3.0, r),
        ],
        &[],
    )
    .expect("four-circle fixture is classical")
}

/// Radius-one four-circle group: `γ₁(z) = 3 + 1/(z+3)`, `γ₂(z) = 3i + 1/(z+3i)`.
pub fn four_circle_group() -> SchottkyGroup {
    four_circle_group_with_radius(1.0)
}

/// Radius 1.9: adjacent disks nearly touch.
pub fn near_touching_four_circle_group() -> SchottkyGroup {
    four_circle_group_with_radius(1.9)
}
