//! Closed curves made of line segments and circular arcs: generating
//! curves, truncated quasi-circles, geometric predicates and the Fréchet
//! metric with a length term.

mod frechet;
mod generating;
mod predicates;
mod quasicircle;

pub use frechet::{frechet_distance, FrechetOptions};
pub use generating::{default_generating_curve, GeneratingCurve};
pub use predicates::{
    classify_quasicircle, crossing_angles, is_invariant, is_simple, self_intersection, CurveFlags, ORTHOGONALITY_TOL, PARALLEL_TOL,
};
pub use quasicircle::{
    build_quasicircle, expected_piece_count, quasicircle_length_estimate, words_up_to, LengthEstimate,
};

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::moebius::{Complex, Moebius};
use crate::schottky::{complex_pair, Circle, GroupError};

/// Closure tolerance between consecutive pieces, relative to curve size.
const STRAIGHT_TOL: f64 = 1e-9;

pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("curve needs at least 3 pieces, got {0}")]
    TooFewPieces(usize),
    #[error("piece {0} does not start where piece {1} ends (gap {2:.3e})")]
    NotClosed(usize, usize, f64),
    #[error("generating arcs are not disjoint or enter a disk: {0}")]
    Disjointness(String),
    #[error("refinement broke the cyclic order: {0}")]
    Ordering(String),
    #[error("invalid generating curve: {0}")]
    InvalidGeneratingCurve(String),
    #[error("witness is {0:.3e} away from the curve")]
    WitnessOffCurve(f64),
    #[error("group has no circle pairing")]
    NoPairing,
    #[error("piece maps through the pole of a group element")]
    Pole,
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PieceTag {
    LineSegment,
    CircularArc,
}

/// A segment or circular arc stored as start, an interior point, and end.
/// The interior point fixes which of the two arcs of the circle is meant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    #[serde(with = "complex_pair")]
    pub start: Complex,
    #[serde(with = "complex_pair")]
    pub mid: Complex,
    #[serde(with = "complex_pair")]
    pub end: Complex,
}

/// Orientation of the turn `a → b → c` (twice the signed triangle area).
pub(crate) fn cross(u: Complex, v: Complex) -> f64 {
    u.re * v.im - u.im * v.re
}

pub(crate) fn dot(u: Complex, v: Complex) -> f64 {
    u.re * v.re + u.im * v.im
}

impl Piece {
    pub fn segment(start: Complex, end: Complex) -> Piece {
        Piece {
            start,
            mid: (start + end) / 2.0,
            end,
        }
    }

    pub fn arc(start: Complex, mid: Complex, end: Complex) -> Piece {
        Piece { start, mid, end }
    }

    /// Arc of `circle` from angle `from` to angle `to` (counterclockwise when
    /// `to > from`).
    pub fn circle_arc(circle: &Circle, from: f64, to: f64) -> Piece {
        Piece {
            start: circle.point_at(from),
            mid: circle.point_at(0.5 * (from + to)),
            end: circle.point_at(to),
        }
    }

    /// Interior angle at the middle point, in `[0, π]`.
    fn inscribed_angle(&self) -> f64 {
        let (u, v) = (self.start - self.mid, self.end - self.mid);
        cross(u, v).abs().atan2(dot(u, v))
    }

    /// Arcs whose midpoint sits within about `1e-9` chord lengths of the
    /// chord, or within coordinate round-off of it, are treated as segments;
    /// their centres are not reliable.
    pub fn tag(&self) -> PieceTag {
        let chord = self.end - self.start;
        let len = chord.norm();
        if len == 0.0 {
            return PieceTag::CircularArc;
        }
        let sagitta = cross(self.mid - self.start, chord).abs() / len;
        let noise = 64.0 * f64::EPSILON * (1.0 + self.mid.norm());
        if sagitta <= STRAIGHT_TOL * len || sagitta <= noise {
            PieceTag::LineSegment
        } else {
            PieceTag::CircularArc
        }
    }

    /// Supporting circle of an arc.
    pub fn circle(&self) -> Option<Circle> {
        match self.tag() {
            PieceTag::LineSegment => None,
            PieceTag::CircularArc => Circle::through(self.start, self.mid, self.end),
        }
    }

    /// Counterclockwise sweep of an arc (false means clockwise).
    pub fn is_ccw(&self) -> bool {
        cross(self.mid - self.start, self.end - self.mid) > 0.0
    }

    /// Sweep angle of the arc, `0` for a segment.
    pub fn sweep(&self) -> f64 {
        2.0 * (PI - self.inscribed_angle())
    }

    pub fn length(&self) -> f64 {
        let chord = (self.end - self.start).norm();
        let phi = self.inscribed_angle();
        let half_sweep = PI - phi;
        if half_sweep <= 1e-12 {
            chord
        } else if phi <= 1e-12 {
            // Full circle through coincident endpoints is not representable;
            // fall back to the two half chords.
            (self.mid - self.start).norm() + (self.end - self.mid).norm()
        } else {
            chord * half_sweep / phi.sin()
        }
    }

    /// Point at arc-length fraction `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Complex {
        match self.circle() {
            None => self.start + (self.end - self.start) * t,
            Some(c) => {
                let a0 = c.angle_of(self.start);
                let sign = if self.is_ccw() { 1.0 } else { -1.0 };
                c.point_at(a0 + sign * t * self.sweep())
            }
        }
    }

    /// Unit tangent at fraction `t`, in the direction of travel.
    pub fn tangent_at(&self, t: f64) -> Complex {
        match self.circle() {
            None => {
                let d = self.end - self.start;
                d / d.norm()
            }
            Some(c) => {
                let p = self.point_at(t);
                let radial = (p - c.center) / c.radius;
                let perp = Complex::new(-radial.im, radial.re);
                if self.is_ccw() {
                    perp
                } else {
                    -perp
                }
            }
        }
    }

    pub fn reversed(&self) -> Piece {
        Piece {
            start: self.end,
            mid: self.mid,
            end: self.start,
        }
    }

    /// Image under a Möbius map; `None` if the piece meets the pole.
    pub fn map(&self, f: &Moebius) -> Option<Piece> {
        let start = f.apply_finite(self.start)?;
        let end = f.apply_finite(self.end)?;
        // Image of the arc midpoint keeps the interior point well inside.
        let mid = f.apply_finite(self.point_at(0.5))?;
        let image = Piece { start, mid, end };
        if !(image.length().is_finite()) {
            return None;
        }
        Some(image)
    }

    /// Axis-aligned bounding box `(min, max)`.
    pub fn bbox(&self) -> (Complex, Complex) {
        let mut lo = Complex::new(self.start.re.min(self.end.re), self.start.im.min(self.end.im));
        let mut hi = Complex::new(self.start.re.max(self.end.re), self.start.im.max(self.end.im));
        if let Some(c) = self.circle() {
            for k in 0..4 {
                let extreme = c.center + Complex::from_polar(c.radius, k as f64 * PI / 2.0);
                if self.contains_circle_point(&c, extreme) {
                    lo = Complex::new(lo.re.min(extreme.re), lo.im.min(extreme.im));
                    hi = Complex::new(hi.re.max(extreme.re), hi.im.max(extreme.im));
                }
            }
        }
        (lo, hi)
    }

    /// For a point on the supporting circle: whether it lies on this arc, i.e.
    /// on the same side of the chord as the interior point.
    pub(crate) fn contains_circle_point(&self, _c: &Circle, p: Complex) -> bool {
        let chord = self.end - self.start;
        let side_mid = cross(chord, self.mid - self.start);
        let side_p = cross(chord, p - self.start);
        let scale = chord.norm() * (p - self.start).norm().max(chord.norm());
        side_mid * side_p > 0.0 || side_p.abs() <= 1e-12 * scale
    }

    /// Euclidean distance from a point to the piece.
    pub fn distance_to(&self, p: Complex) -> f64 {
        match self.circle() {
            None => {
                let d = self.end - self.start;
                let len2 = d.norm_sqr();
                let t = if len2 > 0.0 { (dot(p - self.start, d) / len2).clamp(0.0, 1.0) } else { 0.0 };
                (self.start + d * t - p).norm()
            }
            Some(c) => {
                let r = p - c.center;
                let end_dist = (p - self.start).norm().min((p - self.end).norm());
                if r.norm() == 0.0 {
                    return c.radius;
                }
                let q = c.center + r * (c.radius / r.norm());
                if self.contains_circle_point(&c, q) {
                    (r.norm() - c.radius).abs().min(end_dist)
                } else {
                    end_dist
                }
            }
        }
    }
}

/// A closed chain of pieces; each piece starts where the previous ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCurve {
    pieces: Vec<Piece>,
    length: f64,
    /// Set when the curve was produced by approximating a non-linear source.
    #[serde(default)]
    approximated: bool,
}

impl PolyCurve {
    pub fn new(pieces: Vec<Piece>) -> Result<PolyCurve, CurveError> {
        if pieces.len() < 3 {
            return Err(CurveError::TooFewPieces(pieces.len()));
        }
        let scale = pieces
            .iter()
            .map(|p| p.start.norm())
            .fold(1.0, f64::max);
        for i in 0..pieces.len() {
            let j = (i + 1) % pieces.len();
            let gap = (pieces[i].end - pieces[j].start).norm();
            if gap > CLOSURE_TOL * scale {
                return Err(CurveError::NotClosed(j, i, gap));
            }
        }
        let length = pieces.iter().map(Piece::length).sum();
        Ok(PolyCurve {
            pieces,
            length,
            approximated: false,
        })
    }

    /// Closed polygon through the vertices.
    pub fn polygon(vertices: &[Complex]) -> Result<PolyCurve, CurveError> {
        let n = vertices.len();
        PolyCurve::new((0..n).map(|i| Piece::segment(vertices[i], vertices[(i + 1) % n])).collect())
    }

    /// Circle as four quarter arcs, counterclockwise from angle 0.
    pub fn circle(circle: &Circle) -> PolyCurve {
        let q = PI / 2.0;
        PolyCurve::new((0..4).map(|k| Piece::circle_arc(circle, k as f64 * q, (k + 1) as f64 * q)).collect())
            .expect("four arcs close")
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn vertices(&self) -> Vec<Complex> {
        self.pieces.iter().map(|p| p.start).collect()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_approximated(&self) -> bool {
        self.approximated
    }

    pub fn mark_approximated(mut self) -> Self {
        self.approximated = true;
        self
    }

    /// Image under a Möbius map with a pole off the curve.
    pub fn map(&self, f: &Moebius) -> Result<PolyCurve, CurveError> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| p.map(f).ok_or(CurveError::Pole))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = PolyCurve::new(pieces)?;
        out.approximated = self.approximated;
        Ok(out)
    }

    /// Same curve starting at piece `k`.
    pub fn rotated(&self, k: usize) -> PolyCurve {
        let mut pieces = self.pieces.clone();
        let n = pieces.len();
        pieces.rotate_left(k % n);
        PolyCurve {
            pieces,
            length: self.length,
            approximated: self.approximated,
        }
    }

    /// Points along the curve: every piece start, plus interior points on
    /// pieces longer than `resolution`.
    pub fn sample(&self, resolution: Option<f64>) -> Vec<Complex> {
        let mut out = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            let n = match (resolution, p.tag()) {
                (Some(r), _) => (p.length() / r).ceil().max(1.0) as usize,
                (None, PieceTag::LineSegment) => 1,
                (None, PieceTag::CircularArc) => 8,
            };
            out.push(p.start);
            for k in 1..n {
                out.push(p.point_at(k as f64 / n as f64));
            }
        }
        out
    }

    /// `count` points equally spaced in arc length.
    pub fn sample_uniform(&self, count: usize) -> Vec<Complex> {
        let mut out = Vec::with_capacity(count);
        let step = self.length / count as f64;
        let mut target = 0.0;
        let mut acc = 0.0;
        for p in &self.pieces {
            let len = p.length();
            while target < acc + len && out.len() < count {
                let t = if len > 0.0 { (target - acc) / len } else { 0.0 };
                out.push(p.point_at(t));
                target += step;
            }
            acc += len;
        }
        out
    }

    /// Smallest distance from a point to the curve.
    pub fn distance_to(&self, p: Complex) -> f64 {
        self.pieces
            .iter()
            .map(|piece| piece.distance_to(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Whether some piece comes within `tol` of the point (bounding-box
    /// prefilter first).
    pub fn is_within(&self, p: Complex, tol: f64, boxes: &[(Complex, Complex)]) -> bool {
        self.pieces.iter().zip(boxes).any(|(piece, (lo, hi))| {
            p.re >= lo.re - tol
                && p.re <= hi.re + tol
                && p.im >= lo.im - tol
                && p.im <= hi.im + tol
                && piece.distance_to(p) <= tol
        })
    }

    pub fn bboxes(&self) -> Vec<(Complex, Complex)> {
        self.pieces.iter().map(Piece::bbox).collect()
    }

    /// `piece_index,tag,x0,y0,x1,y1[,cx,cy,r]`, one row per piece.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("piece_index,tag,x0,y0,x1,y1,cx,cy,r\n");
        for (i, p) in self.pieces.iter().enumerate() {
            match p.circle() {
                None => {
                    let _ = writeln!(
                        out,
                        "{i},segment,{},{},{},{}",
                        p.start.re, p.start.im, p.end.re, p.end.im
                    );
                }
                Some(c) => {
                    let _ = writeln!(
                        out,
                        "{i},arc,{},{},{},{},{},{},{}",
                        p.start.re, p.start.im, p.end.re, p.end.im, c.center.re, c.center.im, c.radius
                    );
                }
            }
        }
        out
    }
}

/// A curve in the space of bounded-length closed curves, with a point where
/// it meets the compact anchor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpaceElement {
    pub curve: PolyCurve,
    #[serde(with = "complex_pair")]
    pub witness: Complex,
}

impl CurveSpaceElement {
    pub fn new(curve: PolyCurve, witness: Complex) -> Result<Self, CurveError> {
        let d = curve.distance_to(witness);
        if d > CLOSURE_TOL * (1.0 + witness.norm()) {
            return Err(CurveError::WitnessOffCurve(d));
        }
        Ok(CurveSpaceElement { curve, witness })
    }
}
