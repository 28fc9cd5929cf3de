use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross, dot, Piece, PolyCurve};
use crate::moebius::Complex;
use crate::schottky::{Circle, CirclePairing, SampleSource, SchottkyGroup};

/// Angle tolerance for right angles.
pub const ORTHOGONALITY_TOL: f64 = 1e-6;
/// Tolerance for a piece lying on a pairing circle.
pub const PARALLEL_TOL: f64 = 1e-9;
/// Curve points sampled per generator in the invariance test.
pub const INVARIANCE_SAMPLES: usize = 256;
/// Depth of the limit-set samples in the invariance test.
pub const INVARIANCE_LIMIT_DEPTH: usize = 4;

const PARAM_SLACK: f64 = 1e-12;

fn line_circle(p: Complex, d: Complex, c: &Circle) -> Vec<f64> {
    // |p + t d - center|² = r²
    let f = p - c.center;
    let a = d.norm_sqr();
    let b = 2.0 * dot(f, d);
    let cc = f.norm_sqr() - c.radius * c.radius;
    let disc = b * b - 4.0 * a * cc;
    if a == 0.0 || disc < 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    // Stable quadratic roots.
    let q = -0.5 * (b + b.signum() * sq);
    let mut roots = Vec::with_capacity(2);
    if q != 0.0 {
        roots.push(q / a);
        roots.push(cc / q);
    } else {
        roots.push(0.0);
    }
    roots
}

fn circle_circle(a: &Circle, b: &Circle) -> Vec<Complex> {
    let d = b.center - a.center;
    let dist = d.norm();
    if dist == 0.0 || dist > a.radius + b.radius || dist < (a.radius - b.radius).abs() {
        return Vec::new();
    }
    let x = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
    let h = (a.radius * a.radius - x * x).max(0.0).sqrt();
    let u = d / dist;
    let base = a.center + u * x;
    let perp = Complex::new(-u.im, u.re);
    vec![base + perp * h, base - perp * h]
}

fn same_circle(a: &Circle, b: &Circle) -> bool {
    let scale = a.radius.max(b.radius);
    (a.center - b.center).norm() <= PARALLEL_TOL * scale && (a.radius - b.radius).abs() <= PARALLEL_TOL * scale
}

fn on_segment(p: &Piece, t: f64) -> bool {
    (-PARAM_SLACK..=1.0 + PARAM_SLACK).contains(&t) && p.start != p.end
}

/// Intersection points of two pieces (overlapping collinear or co-circular
/// pieces report the endpoints of the overlap).
pub(crate) fn intersections(a: &Piece, b: &Piece) -> Vec<Complex> {
    match (a.circle(), b.circle()) {
        (None, None) => segment_segment(a, b),
        (Some(c), None) => segment_arc(b, a, &c),
        (None, Some(c)) => segment_arc(a, b, &c),
        (Some(ca), Some(cb)) => {
            if same_circle(&ca, &cb) {
                let mut out: Vec<Complex> = [b.start, b.end]
                    .into_iter()
                    .filter(|z| a.contains_circle_point(&ca, *z))
                    .collect();
                out.extend([a.start, a.end].into_iter().filter(|z| b.contains_circle_point(&cb, *z)));
                return out;
            }
            circle_circle(&ca, &cb)
                .into_iter()
                .filter(|z| a.contains_circle_point(&ca, *z) && b.contains_circle_point(&cb, *z))
                .collect()
        }
    }
}

fn segment_segment(a: &Piece, b: &Piece) -> Vec<Complex> {
    let (p, r) = (a.start, a.end - a.start);
    let (q, s) = (b.start, b.end - b.start);
    let denom = cross(r, s);
    let qp = q - p;
    let scale = r.norm() * s.norm();
    if denom.abs() <= 1e-14 * scale {
        // Parallel: intersect only if collinear and overlapping.
        if cross(qp, r).abs() > 1e-12 * r.norm() * (qp.norm() + r.norm()) {
            return Vec::new();
        }
        let rr = r.norm_sqr();
        let mut out = Vec::new();
        for (z, t) in [(b.start, dot(b.start - p, r) / rr), (b.end, dot(b.end - p, r) / rr)] {
            if (0.0..=1.0).contains(&t) {
                out.push(z);
            }
        }
        let ss = s.norm_sqr();
        for (z, u) in [(a.start, dot(a.start - q, s) / ss), (a.end, dot(a.end - q, s) / ss)] {
            if (0.0..=1.0).contains(&u) {
                out.push(z);
            }
        }
        return out;
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    if on_segment(a, t) && on_segment(b, u) {
        vec![p + r * t]
    } else {
        Vec::new()
    }
}

fn segment_arc(seg: &Piece, arc: &Piece, c: &Circle) -> Vec<Complex> {
    let d = seg.end - seg.start;
    line_circle(seg.start, d, c)
        .into_iter()
        .filter(|t| on_segment(seg, *t))
        .map(|t| seg.start + d * t)
        .filter(|z| arc.contains_circle_point(c, *z))
        .collect()
}

fn boxes_overlap(a: &(Complex, Complex), b: &(Complex, Complex), slack: f64) -> bool {
    a.0.re <= b.1.re + slack && b.0.re <= a.1.re + slack && a.0.im <= b.1.im + slack && b.0.im <= a.1.im + slack
}

/// First pair of pieces `(i, j)` that meet illegally, with a meeting point:
/// non-adjacent pieces must not meet at all, adjacent ones only at their
/// shared endpoint.
///
/// Candidate pairs come from a sweep over bounding boxes sorted by their left
/// edge; each candidate is then intersected exactly.
pub fn self_intersection(curve: &PolyCurve) -> Option<(usize, usize, Complex)> {
    let pieces = curve.pieces();
    let n = pieces.len();
    let boxes = curve.bboxes();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| boxes[a].0.re.total_cmp(&boxes[b].0.re));

    let mut candidates = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let left = boxes[i].0.re;
        active.retain(|&j| boxes[j].1.re >= left);
        for &j in &active {
            if boxes_overlap(&boxes[i], &boxes[j], 0.0) {
                candidates.push((i.min(j), i.max(j)));
            }
        }
        active.push(i);
    }

    candidates.par_iter().find_map_any(|&(i, j)| {
        let points = intersections(&pieces[i], &pieces[j]);
        let adjacent_forward = j == i + 1;
        let adjacent_wrap = i == 0 && j == n - 1;
        if !adjacent_forward && !adjacent_wrap {
            return points.first().map(|z| (i, j, *z));
        }
        let shared = if adjacent_forward { pieces[i].end } else { pieces[j].end };
        let scale = pieces[i].length().min(pieces[j].length());
        // Tiny adjacent pieces need a floor above coordinate round-off.
        let tol = (1e-7 * scale).max(1e-12 * (1.0 + shared.norm()));
        points.into_iter().find(|z| (z - shared).norm() > tol).map(|z| (i, j, z))
    })
}

/// True iff the curve has no self-intersection.
pub fn is_simple(curve: &PolyCurve) -> bool {
    self_intersection(curve).is_none()
}

/// Curve is invariant up to `tol`: images of 256 curve samples under every
/// generator and inverse lie within `tol` of the curve, and so does every
/// depth-4 limit point (attracting fixed points of reduced words).
pub fn is_invariant(group: &SchottkyGroup, curve: &PolyCurve, tol: f64) -> bool {
    let boxes = curve.bboxes();
    let samples = curve.sample_uniform(INVARIANCE_SAMPLES);
    let g = group.rank();
    let images_ok = (0..2 * g).into_par_iter().all(|letter| {
        let f = group.letter_map(letter);
        samples.iter().all(|z| match f.apply_finite(*z) {
            Some(w) => curve.is_within(w, tol, &boxes),
            None => false,
        })
    });
    if !images_ok {
        return false;
    }
    let limit = match group.without_pairing().sample_limit_set(INVARIANCE_LIMIT_DEPTH) {
        Ok(s) => s,
        Err(_) => return false,
    };
    limit
        .par_iter()
        .filter(|s| s.source == SampleSource::FixedPoint)
        .all(|s| curve.is_within(s.point, tol, &boxes))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveFlags {
    /// Every piece is a segment or a circular arc.
    pub linear: bool,
    /// The curve came from approximating a non-linear source.
    pub approximated: bool,
    pub right_angled: bool,
    pub transverse: bool,
    pub parallel: bool,
}

fn angle_between(u: Complex, v: Complex) -> f64 {
    cross(u, v).abs().atan2(dot(u, v))
}

fn lies_on(piece: &Piece, circle: &Circle) -> bool {
    let tol = PARALLEL_TOL * circle.radius.max(1.0);
    (0..=4).all(|k| circle.signed_distance(piece.point_at(k as f64 / 4.0)).abs() <= tol)
}

/// Angles (radians, in `[0, π/2]`) at every point where the curve meets a
/// pairing circle.
pub fn crossing_angles(curve: &PolyCurve, pairing: &CirclePairing) -> Vec<f64> {
    let mut out = Vec::new();
    for piece in curve.pieces() {
        for circle in &pairing.circles {
            if lies_on(piece, circle) {
                continue;
            }
            let (lo, hi) = piece.bbox();
            let r = circle.radius;
            if hi.re < circle.center.re - r
                || lo.re > circle.center.re + r
                || hi.im < circle.center.im - r
                || lo.im > circle.center.im + r
            {
                continue;
            }
            let hits = match piece.circle() {
                None => {
                    let d = piece.end - piece.start;
                    line_circle(piece.start, d, circle)
                        .into_iter()
                        .filter(|t| on_segment(piece, *t))
                        .map(|t| (piece.start + d * t, d))
                        .collect::<Vec<_>>()
                }
                Some(own) => {
                    let points = if same_circle(&own, circle) {
                        Vec::new()
                    } else {
                        circle_circle(&own, circle)
                    };
                    points
                        .into_iter()
                        .filter(|z| piece.contains_circle_point(&own, *z))
                        .map(|z| {
                            let radial = z - own.center;
                            (z, Complex::new(-radial.im, radial.re))
                        })
                        .collect()
                }
            };
            for (z, tangent) in hits {
                let radial = z - circle.center;
                let circle_tangent = Complex::new(-radial.im, radial.re);
                let a = angle_between(tangent, circle_tangent);
                out.push(a.min(PI - a));
            }
        }
    }
    out
}

/// Linear / right-angled / transverse / parallel flags of a curve relative
/// to a pairing.
pub fn classify_quasicircle(_group: &SchottkyGroup, curve: &PolyCurve, pairing: &CirclePairing) -> CurveFlags {
    let pieces = curve.pieces();
    let n = pieces.len();
    let right_angled = (0..n).all(|i| {
        let (a, b) = (&pieces[i], &pieces[(i + 1) % n]);
        let turn = angle_between(a.tangent_at(1.0), b.tangent_at(0.0));
        (turn - PI / 2.0).abs() <= ORTHOGONALITY_TOL
    });
    let parallel = pieces.iter().any(|p| pairing.circles.iter().any(|c| lies_on(p, c)));
    let crossings_orthogonal = crossing_angles(curve, pairing)
        .iter()
        .all(|a| (a - PI / 2.0).abs() <= ORTHOGONALITY_TOL);
    CurveFlags {
        linear: true,
        approximated: curve.is_approximated(),
        right_angled,
        transverse: crossings_orthogonal && !parallel,
        parallel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn convex_polygon_is_simple() {
        let square = PolyCurve::polygon(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        assert!(is_simple(&square));
        assert!(is_simple(&PolyCurve::circle(&Circle::new(c(0.0, 0.0), 1.0).unwrap())));
    }

    #[test]
    fn figure_eight_is_not_simple() {
        let eight = PolyCurve::polygon(&[c(0.0, 0.0), c(1.0, 1.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(!is_simple(&eight));
    }

    #[test]
    fn arc_intersections() {
        let unit = Circle::new(c(0.0, 0.0), 1.0).unwrap();
        let upper = Piece::circle_arc(&unit, 0.0, PI);
        let lower = Piece::circle_arc(&unit, PI, 2.0 * PI);
        let vertical = Piece::segment(c(0.0, -2.0), c(0.0, 2.0));
        assert_eq!(intersections(&upper, &vertical).len(), 1);
        assert!((intersections(&lower, &vertical)[0] - c(0.0, -1.0)).norm() < 1e-12);
        let shifted = Piece::circle_arc(&Circle::new(c(1.0, 0.0), 1.0).unwrap(), PI / 2.0, 1.5 * PI);
        let hits = intersections(&upper, &shifted);
        assert_eq!(hits.len(), 1);
        assert!((hits[0] - c(0.5, 0.75f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn tangent_arcs_touch_once() {
        let a = Piece::circle_arc(&Circle::new(c(0.0, 0.0), 1.0).unwrap(), -1.0, 1.0);
        let b = Piece::circle_arc(&Circle::new(c(2.0, 0.0), 1.0).unwrap(), PI - 1.0, PI + 1.0);
        assert!(!intersections(&a, &b).is_empty());
    }

    #[test]
    fn parallel_and_transverse_exclusive() {
        let unit = Circle::new(c(-3.0, 0.0), 1.0).unwrap();
        let other = Circle::new(c(3.0, 0.0), 1.0).unwrap();
        let pairing = CirclePairing::new(vec![unit, other]).unwrap();
        let group = crate::fixtures::cyclic_group();
        // Quarter of circle 1 closed by two segments.
        let arc = Piece::circle_arc(&unit, 0.0, PI / 2.0);
        let curve = PolyCurve::new(vec![
            arc,
            Piece::segment(arc.end, c(-3.0, 3.0)),
            Piece::segment(c(-3.0, 3.0), arc.start),
        ])
        .unwrap();
        let flags = classify_quasicircle(&group, &curve, &pairing);
        assert!(flags.parallel);
        assert!(!flags.transverse);
    }

    #[test]
    fn right_angled_square() {
        let square = PolyCurve::polygon(&[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(0.0, 1.0)]).unwrap();
        let group = crate::fixtures::cyclic_group();
        let flags = classify_quasicircle(&group, &square, group.pairing().unwrap());
        assert!(flags.right_angled);
        assert!(flags.linear);
    }

    #[test]
    fn random_circle_is_not_invariant() {
        let group = crate::fixtures::four_circle_group();
        let curve = PolyCurve::circle(&Circle::new(c(0.3, 0.2), 0.5).unwrap());
        assert!(!is_invariant(&group, &curve, 1e-3));
    }
}
