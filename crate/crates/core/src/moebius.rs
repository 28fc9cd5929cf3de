//! Möbius transformations of the Riemann sphere, stored as normalized
//! `SL(2, C)` matrices.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::schottky::Circle;

pub type Complex = Complex64;

/// Tolerance used for projective equality of matrices.
pub const PROJECTIVE_TOL: f64 = 1e-9;
/// `tr^2` tolerance for the parabolic test.
pub const PARABOLIC_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MoebiusError {
    #[error("point {0} is the pole of the map")]
    Pole(Complex),
    #[error("the identity has no isolated fixed points")]
    Identity,
    #[error("map fixes infinity (c = 0), isometric circle undefined")]
    CIsZero,
    #[error("singular matrix (determinant {0})")]
    Singular(Complex),
    #[error("non-finite matrix entry")]
    NonFinite,
}

/// A point of the extended complex plane. Infinity is its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Point {
    Finite(Complex),
    Infinity,
}

impl Point {
    pub fn finite(self) -> Option<Complex> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Point::Infinity)
    }

    /// Chordal distance on the Riemann sphere (range [0, 2]).
    pub fn chordal_distance(self, other: Point) -> f64 {
        match (self, other) {
            (Point::Infinity, Point::Infinity) => 0.0,
            (Point::Finite(z), Point::Infinity) | (Point::Infinity, Point::Finite(z)) => {
                2.0 / (1.0 + z.norm_sqr()).sqrt()
            }
            (Point::Finite(z), Point::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt())
            }
        }
    }
}

impl From<Complex> for Point {
    fn from(z: Complex) -> Self {
        Point::Finite(z)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{z}"),
            Point::Infinity => write!(f, "∞"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapClass {
    Identity,
    Parabolic,
    Elliptic,
    Loxodromic,
}

/// `z ↦ (az + b) / (cz + d)` with `ad - bc = 1`.
///
/// The matrix and its negation are the same transformation; `PartialEq` is
/// not derived, use [`Moebius::projective_eq`].
#[derive(Debug, Clone, Copy)]
pub struct Moebius {
    pub a: Complex,
    pub b: Complex,
    pub c: Complex,
    pub d: Complex,
}

impl Moebius {
    pub const IDENTITY: Moebius = Moebius {
        a: Complex::new(1.0, 0.0),
        b: Complex::new(0.0, 0.0),
        c: Complex::new(0.0, 0.0),
        d: Complex::new(1.0, 0.0),
    };

    /// Builds a map from arbitrary entries, scaling to determinant one.
    pub fn new(a: Complex, b: Complex, c: Complex, d: Complex) -> Result<Self, MoebiusError> {
        let m = Moebius { a, b, c, d };
        if ![a, b, c, d].iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(MoebiusError::NonFinite);
        }
        let det = m.det();
        let scale = [a, b, c, d].iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
        if det.norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(MoebiusError::Singular(det));
        }
        Ok(m.scaled(det))
    }

    /// Real-entry convenience constructor.
    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    /// `diag(λ, 1/λ)`, i.e. `z ↦ λ² z`.
    pub fn diagonal(lambda: Complex) -> Self {
        Moebius {
            a: lambda,
            b: Complex::new(0.0, 0.0),
            c: Complex::new(0.0, 0.0),
            d: lambda.inv(),
        }
    }

    /// The loxodromic map with attracting fixed point `attracting`, repelling
    /// fixed point `repelling` and multiplier `k` (`|k| < 1`): the cross ratio
    /// form `(f(z) - p) / (f(z) - q) = k (z - p) / (z - q)`.
    pub fn from_fixed_points(attracting: Complex, repelling: Complex, k: Complex) -> Result<Self, MoebiusError> {
        // f = h⁻¹ ∘ (w ↦ k w) ∘ h with h(z) = (z - p) / (z - q).
        let (p, q) = (attracting, repelling);
        let one = Complex::new(1.0, 0.0);
        let h = Moebius::new(one, -p, one, -q)?;
        let lambda = k.sqrt();
        Ok(h.inverse().compose(&Moebius::diagonal(lambda)).compose(&h))
    }

    pub fn det(&self) -> Complex {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> Complex {
        self.a + self.d
    }

    fn scaled(self, det: Complex) -> Self {
        let k = det.sqrt().inv();
        Moebius {
            a: self.a * k,
            b: self.b * k,
            c: self.c * k,
            d: self.d * k,
        }
    }

    /// Rescales to determinant one; applied after every composition.
    ///
    /// Skipped when the determinant cannot be computed more accurately than
    /// its deviation from one: for large entries `ad - bc` is dominated by
    /// cancellation and rescaling by it would only inject error.
    #[must_use]
    pub fn renormalized(self) -> Self {
        let det = self.det();
        let noise = 4.0 * f64::EPSILON * (self.a.norm() * self.d.norm() + self.b.norm() * self.c.norm());
        if noise > 1e-6 || (det - 1.0).norm() <= noise {
            self
        } else {
            self.scaled(det)
        }
    }

    /// `self ∘ other`.
    #[must_use]
    pub fn compose(&self, other: &Moebius) -> Moebius {
        Moebius {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .renormalized()
    }

    #[must_use]
    pub fn inverse(&self) -> Moebius {
        Moebius {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    #[must_use]
    pub fn conjugate_by(&self, h: &Moebius) -> Moebius {
        h.compose(self).compose(&h.inverse())
    }

    pub fn apply(&self, z: Point) -> Point {
        match z {
            Point::Infinity => {
                if self.c == Complex::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite(self.a / self.c)
                }
            }
            Point::Finite(z) => {
                let den = self.c * z + self.d;
                if den == Complex::new(0.0, 0.0) {
                    Point::Infinity
                } else {
                    Point::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Applies to a finite point; `None` at the pole.
    pub fn apply_finite(&self, z: Complex) -> Option<Complex> {
        self.apply(Point::Finite(z)).finite()
    }

    pub fn pole(&self) -> Point {
        if self.c == Complex::new(0.0, 0.0) {
            Point::Infinity
        } else {
            Point::Finite(-self.d / self.c)
        }
    }

    /// `|f'(z)| = 1 / |cz + d|²`.
    pub fn derivative_modulus(&self, z: Complex) -> Result<f64, MoebiusError> {
        let den = (self.c * z + self.d).norm_sqr();
        if den == 0.0 {
            return Err(MoebiusError::Pole(z));
        }
        Ok(1.0 / den)
    }

    pub fn trace_squared(&self) -> Complex {
        let t = self.trace();
        t * t
    }

    pub fn is_identity(&self) -> bool {
        self.projective_eq(&Moebius::IDENTITY, PROJECTIVE_TOL)
    }

    pub fn classify(&self) -> MapClass {
        if self.is_identity() {
            return MapClass::Identity;
        }
        let t2 = self.trace_squared();
        if (t2 - 4.0).norm() <= PARABOLIC_TOL {
            MapClass::Parabolic
        } else if t2.im.abs() <= PARABOLIC_TOL && (0.0..4.0).contains(&t2.re) {
            MapClass::Elliptic
        } else {
            MapClass::Loxodromic
        }
    }

    pub fn is_loxodromic(&self) -> bool {
        self.classify() == MapClass::Loxodromic
    }

    /// Fixed points, attracting one first for loxodromic maps.
    ///
    /// The boolean is `true` when the order carries meaning (loxodromic).
    pub fn fixed_points(&self) -> Result<(Point, Point, bool), MoebiusError> {
        if self.is_identity() {
            return Err(MoebiusError::Identity);
        }
        let eig = self.eigenvalues();
        let ordered = eig.0.norm() > eig.1.norm() + 1e-12;
        let zero = Complex::new(0.0, 0.0);
        // Eigenvector (x, y) of eigenvalue λ gives the fixed point x / y.
        let fixed_for = |lambda: Complex| -> Point {
            let (x, y) = if (self.a - lambda).norm() + self.b.norm() >= (self.d - lambda).norm() + self.c.norm() {
                (self.b, lambda - self.a)
            } else {
                (lambda - self.d, self.c)
            };
            if y == zero || y.norm() <= 1e-15 * x.norm() {
                Point::Infinity
            } else {
                Point::Finite(x / y)
            }
        };
        Ok((fixed_for(eig.0), fixed_for(eig.1), ordered))
    }

    /// Eigenvalues sorted by decreasing modulus. Their product is 1.
    pub fn eigenvalues(&self) -> (Complex, Complex) {
        let t = self.trace();
        let disc = (t * t - 4.0).sqrt();
        let l1 = (t + disc) / 2.0;
        let l2 = (t - disc) / 2.0;
        if l1.norm() >= l2.norm() {
            (l1, l2)
        } else {
            (l2, l1)
        }
    }

    /// Multiplier `k = λ₂ / λ₁` with `|k| ≤ 1`.
    pub fn multiplier(&self) -> Complex {
        let (l1, l2) = self.eigenvalues();
        l2 / l1
    }

    /// Translation length along the axis, `2 ln |λ₁|`.
    pub fn translation_length(&self) -> f64 {
        2.0 * self.eigenvalues().0.norm().ln()
    }

    /// The circle `|cz + d| = 1` on which the map is a Euclidean isometry.
    pub fn isometric_circle(&self) -> Result<Circle, MoebiusError> {
        if self.c.norm() == 0.0 {
            return Err(MoebiusError::CIsZero);
        }
        Circle::new(-self.d / self.c, 1.0 / self.c.norm()).map_err(|_| MoebiusError::NonFinite)
    }

    /// Hyperbolic distance in `H³` between the base point `(0, 0, 1)` and
    /// its image: `arccosh(‖M‖² / 2)`.
    pub fn base_displacement(&self) -> f64 {
        let n = self.a.norm_sqr() + self.b.norm_sqr() + self.c.norm_sqr() + self.d.norm_sqr();
        (n / 2.0).max(1.0).acosh()
    }

    /// Equality up to sign, per entry.
    pub fn projective_eq(&self, other: &Moebius, tol: f64) -> bool {
        let close = |s: f64| {
            (self.a - other.a * s).norm() <= tol
                && (self.b - other.b * s).norm() <= tol
                && (self.c - other.c * s).norm() <= tol
                && (self.d - other.d * s).norm() <= tol
        };
        close(1.0) || close(-1.0)
    }

    /// Sign-normalized entries: the first entry with non-negligible modulus
    /// has positive real part (or positive imaginary part when purely imaginary).
    pub fn canonical_entries(&self) -> [Complex; 4] {
        let e = [self.a, self.b, self.c, self.d];
        let pivot = e.iter().copied().find(|z| z.norm() > 1e-9).unwrap_or(e[0]);
        let flip = pivot.re < -1e-12 || (pivot.re.abs() <= 1e-12 && pivot.im < 0.0);
        if flip {
            e.map(|z| -z)
        } else {
            e
        }
    }

    /// Row-major `[[re, im]; 4]` layout.
    pub fn to_rows(&self) -> [[f64; 2]; 4] {
        [self.a, self.b, self.c, self.d].map(|z| [z.re, z.im])
    }

    pub fn from_rows(rows: [[f64; 2]; 4]) -> Result<Self, MoebiusError> {
        let [a, b, c, d] = rows.map(|[re, im]| Complex::new(re, im));
        Moebius::new(a, b, c, d)
    }
}

impl Default for Moebius {
    fn default() -> Self {
        Moebius::IDENTITY
    }
}

impl Serialize for Moebius {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Moebius {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = <[[f64; 2]; 4]>::deserialize(deserializer)?;
        Moebius::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
