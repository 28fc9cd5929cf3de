//! Generating curves: a closed tour through the 2g pairing disks, outside
//! every disk, whose two crossing points on circle `i + g` are the images of
//! the two crossing points on circle `i`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::predicates::intersections;
use super::{CurveError, Piece};
use crate::moebius::Complex;
use crate::schottky::{complex_pair, Circle, SchottkyGroup};

/// Distance tolerance for endpoints on circles and matched ports.
pub const ENDPOINT_TOL: f64 = 1e-9;
const PORT_DIRECTIONS: usize = 24;
const CANDIDATES_PER_GENERATOR: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ports {
    /// Where the tour enters the disk.
    #[serde(with = "complex_pair")]
    pub entry: Complex,
    /// Where the tour leaves it.
    #[serde(with = "complex_pair")]
    pub exit: Complex,
}

/// Arcs outside the pairing disks. Arc `k` runs from the exit port of disk
/// `tour[k]` to the entry port of disk `tour[k + 1]` (cyclically).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingCurve {
    pub tour: Vec<usize>,
    pub ports: Vec<Ports>,
    pub arcs: Vec<Vec<Piece>>,
}

fn same_point(a: Complex, b: Complex) -> bool {
    (a - b).norm() <= ENDPOINT_TOL * (1.0 + a.norm())
}

impl GeneratingCurve {
    /// Validates a user supplied curve against the group's pairing.
    pub fn new(
        group: &SchottkyGroup,
        tour: Vec<usize>,
        ports: Vec<Ports>,
        arcs: Vec<Vec<Piece>>,
    ) -> Result<GeneratingCurve, CurveError> {
        let pairing = group.pairing().ok_or(CurveError::NoPairing)?;
        let n = pairing.circles.len();
        let bad = |msg: String| Err(CurveError::InvalidGeneratingCurve(msg));
        let mut seen = tour.clone();
        seen.sort_unstable();
        if seen != (0..n).collect::<Vec<_>>() {
            return bad(format!("tour must visit each of the {n} disks once"));
        }
        if ports.len() != n || arcs.len() != n {
            return bad(format!("expected {n} port pairs and {n} arcs"));
        }
        for (j, (p, c)) in ports.iter().zip(&pairing.circles).enumerate() {
            for z in [p.entry, p.exit] {
                if c.signed_distance(z).abs() > ENDPOINT_TOL * (1.0 + c.radius) {
                    return bad(format!("port of disk {} is off its circle", j + 1));
                }
            }
        }
        let g = group.rank();
        for i in 0..g {
            let f = &group.generators()[i];
            let image: Vec<Complex> = [ports[i].entry, ports[i].exit]
                .iter()
                .map(|z| f.apply_finite(*z).unwrap_or(Complex::new(f64::NAN, f64::NAN)))
                .collect();
            let target = [ports[i + g].entry, ports[i + g].exit];
            let direct = same_point(image[0], target[0]) && same_point(image[1], target[1]);
            let swapped = same_point(image[0], target[1]) && same_point(image[1], target[0]);
            if !(direct || swapped) {
                return bad(format!("ports of disk {} are not images of ports of disk {}", i + g + 1, i + 1));
            }
        }
        for (k, arc) in arcs.iter().enumerate() {
            let (from, to) = (tour[k], tour[(k + 1) % n]);
            let (Some(first), Some(last)) = (arc.first(), arc.last()) else {
                return bad(format!("arc {k} is empty"));
            };
            if !same_point(first.start, ports[from].exit) || !same_point(last.end, ports[to].entry) {
                return bad(format!("arc {k} does not join disk {} to disk {}", from + 1, to + 1));
            }
            for w in arc.windows(2) {
                if !same_point(w[0].end, w[1].start) {
                    return bad(format!("arc {k} is not connected"));
                }
            }
        }
        check_outside(&arcs, &pairing.circles)?;
        check_disjoint(&arcs)?;
        Ok(GeneratingCurve { tour, ports, arcs })
    }

    pub fn piece_count(&self) -> usize {
        self.arcs.iter().map(Vec::len).sum()
    }

    pub fn length(&self) -> f64 {
        self.arcs.iter().flatten().map(Piece::length).sum()
    }

    pub fn pieces(&self) -> impl Iterator<Item = &Piece> {
        self.arcs.iter().flatten()
    }
}

/// No piece may enter an open disk; touching the boundary is allowed.
fn check_outside(arcs: &[Vec<Piece>], circles: &[Circle]) -> Result<(), CurveError> {
    for (k, piece) in arcs.iter().enumerate().flat_map(|(k, a)| a.iter().map(move |p| (k, p))) {
        for (j, c) in circles.iter().enumerate() {
            let inside = (0..=32).any(|s| c.signed_distance(piece.point_at(s as f64 / 32.0)) < -ENDPOINT_TOL * c.radius);
            if inside {
                return Err(CurveError::Disjointness(format!("arc {k} enters disk {}", j + 1)));
            }
        }
    }
    Ok(())
}

fn check_disjoint(arcs: &[Vec<Piece>]) -> Result<(), CurveError> {
    for a in 0..arcs.len() {
        for b in a + 1..arcs.len() {
            for p in &arcs[a] {
                for q in &arcs[b] {
                    if !intersections(p, q).is_empty() {
                        return Err(CurveError::Disjointness(format!("arcs {a} and {b} cross")));
                    }
                }
            }
        }
    }
    Ok(())
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Mismatch between two ports and two wanted directions on one circle.
fn mismatch(ports: [f64; 2], wanted: [f64; 2]) -> f64 {
    let direct = angle_gap(ports[0], wanted[0]) + angle_gap(ports[1], wanted[1]);
    let crossed = angle_gap(ports[0], wanted[1]) + angle_gap(ports[1], wanted[0]);
    direct.min(crossed)
}

/// Directions from a disk toward its predecessor and successor on the tour.
/// When both coincide (two disks only) they are spread by ±60°.
fn wanted_directions(circles: &[Circle], tour: &[usize], j: usize) -> [f64; 2] {
    let n = tour.len();
    let pos = tour.iter().position(|&t| t == j).expect("disk on tour");
    let c = circles[j].center;
    let dir = |k: usize| {
        let d = circles[k].center - c;
        d.im.atan2(d.re)
    };
    let (a, b) = (dir(tour[(pos + n - 1) % n]), dir(tour[(pos + 1) % n]));
    if angle_gap(a, b) < PI / 6.0 {
        let mid = a + 0.5 * (b - a + PI).rem_euclid(TAU) - PI / 2.0;
        [mid - PI / 3.0, mid + PI / 3.0]
    } else {
        [a, b]
    }
}

/// Radial stub, straight connector, radial stub. Collinear pieces merge into
/// a single segment.
fn connector(from: &Circle, p: Complex, to: &Circle, q: Complex, stub: f64) -> Vec<Piece> {
    let np = (p - from.center) / from.radius;
    let nq = (q - to.center) / to.radius;
    let d = q - p;
    let aligned = |n: Complex| (n.re * d.im - n.im * d.re).abs() <= 1e-12 * d.norm();
    if aligned(np) && aligned(nq) && (np.re * d.re + np.im * d.im) > 0.0 {
        return vec![Piece::segment(p, q)];
    }
    let (p1, q1) = (p + np * stub, q + nq * stub);
    vec![Piece::segment(p, p1), Piece::segment(p1, q1), Piece::segment(q1, q)]
}

/// Tour order: disks sorted by angle about the centroid of their centers.
fn tour_order(circles: &[Circle]) -> Vec<usize> {
    let n = circles.len() as f64;
    let centroid = circles.iter().map(|c| c.center).sum::<Complex>() / n;
    let mut tour: Vec<usize> = (0..circles.len()).collect();
    let angle = |j: usize| {
        let d = circles[j].center - centroid;
        d.im.atan2(d.re)
    };
    tour.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
    tour
}

/// Candidate port angle pairs on circle `i`, ranked by how well they and
/// their images face the tour neighbours.
fn port_candidates(group: &SchottkyGroup, circles: &[Circle], tour: &[usize], i: usize) -> Vec<(f64, [Complex; 4])> {
    let g = group.rank();
    let f = &group.generators()[i];
    let (src, dst) = (&circles[i], &circles[i + g]);
    let want_src = wanted_directions(circles, tour, i);
    let want_dst = wanted_directions(circles, tour, i + g);
    let step = TAU / PORT_DIRECTIONS as f64;
    let mut out = Vec::new();
    for a in 0..PORT_DIRECTIONS {
        for b in a + 1..PORT_DIRECTIONS {
            let (ta, tb) = (a as f64 * step, b as f64 * step);
            let (pa, pb) = (src.point_at(ta), src.point_at(tb));
            let (Some(qa), Some(qb)) = (f.apply_finite(pa), f.apply_finite(pb)) else {
                continue;
            };
            let cost = mismatch([ta, tb], want_src) + mismatch([dst.angle_of(qa), dst.angle_of(qb)], want_dst);
            out.push((cost, [pa, pb, qa, qb]));
        }
    }
    out.sort_by(|x, y| x.0.total_cmp(&y.0));
    out.truncate(CANDIDATES_PER_GENERATOR);
    out
}

/// Tries to realize a tour for fixed port sets: for each disk, which port is
/// the entry. Returns the first valid assignment.
fn realize(circles: &[Circle], tour: &[usize], port_sets: &[[Complex; 2]], stub: f64) -> Option<GeneratingCurve> {
    let n = circles.len();
    // Prefer the assignment where ports face their tour neighbours.
    let facing = |j: usize, swap: bool| {
        let pos = tour.iter().position(|&t| t == j).unwrap();
        let prev = circles[tour[(pos + n - 1) % n]].center;
        let next = circles[tour[(pos + 1) % n]].center;
        let (entry, exit) = if swap {
            (port_sets[j][1], port_sets[j][0])
        } else {
            (port_sets[j][0], port_sets[j][1])
        };
        (entry - prev).norm() + (exit - next).norm()
    };
    let mut base: Vec<bool> = (0..n).map(|j| facing(j, true) < facing(j, false)).collect();
    let flips: Vec<usize> = if n <= 8 { (0..1usize << n).collect() } else { vec![0] };
    for mask in flips {
        for (j, b) in base.iter_mut().enumerate() {
            *b ^= mask >> j & 1 == 1;
        }
        let ports: Vec<Ports> = (0..n)
            .map(|j| {
                let [x, y] = port_sets[j];
                if base[j] {
                    Ports { entry: y, exit: x }
                } else {
                    Ports { entry: x, exit: y }
                }
            })
            .collect();
        let arcs: Vec<Vec<Piece>> = (0..n)
            .map(|k| {
                let (a, b) = (tour[k], tour[(k + 1) % n]);
                connector(&circles[a], ports[a].exit, &circles[b], ports[b].entry, stub)
            })
            .collect();
        if check_outside(&arcs, circles).is_ok() && check_disjoint(&arcs).is_ok() {
            return Some(GeneratingCurve {
                tour: tour.to_vec(),
                ports,
                arcs,
            });
        }
        for (j, b) in base.iter_mut().enumerate() {
            *b ^= mask >> j & 1 == 1;
        }
    }
    None
}

/// Builds a generating curve from radial stubs and straight connectors.
///
/// Port pairs are searched on a grid of directions; the first configuration
/// whose arcs stay outside all disks and do not cross is returned.
pub fn default_generating_curve(group: &SchottkyGroup) -> Result<GeneratingCurve, CurveError> {
    let pairing = group.pairing().ok_or(CurveError::NoPairing)?;
    let circles = &pairing.circles;
    let g = group.rank();
    let tour = tour_order(circles);
    let min_radius = circles.iter().map(|c| c.radius).fold(f64::INFINITY, f64::min);
    let stub = 0.25 * min_radius.min(pairing.margin());

    let candidates: Vec<Vec<(f64, [Complex; 4])>> =
        (0..g).map(|i| port_candidates(group, circles, &tour, i)).collect();
    // Combinations in order of total cost; the product is small for the
    // ranks this lab handles, larger ranks only try each generator's list
    // with the others at their best.
    let mut combos: Vec<(f64, Vec<usize>)> = Vec::new();
    let per = CANDIDATES_PER_GENERATOR.min(candidates.iter().map(Vec::len).min().unwrap_or(0));
    if per == 0 {
        return Err(CurveError::Disjointness("no admissible ports".into()));
    }
    if per.checked_pow(g as u32).is_some_and(|n| n <= 4096) {
        let total = per.pow(g as u32);
        for mut code in 0..total {
            let mut pick = Vec::with_capacity(g);
            for _ in 0..g {
                pick.push(code % per);
                code /= per;
            }
            let cost = pick.iter().enumerate().map(|(i, &c)| candidates[i][c].0).sum();
            combos.push((cost, pick));
        }
    } else {
        for (i, list) in candidates.iter().enumerate() {
            for (c, &(cost, _)) in list.iter().take(per).enumerate() {
                let mut pick = vec![0; g];
                pick[i] = c;
                combos.push((cost, pick));
            }
        }
    }
    combos.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (_, pick) in combos {
        let mut port_sets = vec![[Complex::new(0.0, 0.0); 2]; 2 * g];
        for (i, &c) in pick.iter().enumerate() {
            let [pa, pb, qa, qb] = candidates[i][c].1;
            port_sets[i] = [pa, pb];
            port_sets[i + g] = [qa, qb];
        }
        if let Some(curve) = realize(circles, &tour, &port_sets, stub) {
            return Ok(curve);
        }
    }
    Err(CurveError::Disjointness(
        "no radial-stub tour avoids the disks; supply custom arcs".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn check_valid(group: &SchottkyGroup, curve: &GeneratingCurve) {
        GeneratingCurve::new(group, curve.tour.clone(), curve.ports.clone(), curve.arcs.clone()).unwrap();
    }

    #[test]
    fn cyclic_group_curve() {
        let group = fixtures::cyclic_group();
        let curve = default_generating_curve(&group).unwrap();
        assert_eq!(curve.arcs.len(), 2);
        check_valid(&group, &curve);
    }

    #[test]
    fn four_circle_curve() {
        let group = fixtures::four_circle_group();
        let curve = default_generating_curve(&group).unwrap();
        assert_eq!(curve.arcs.len(), 4);
        check_valid(&group, &curve);
    }

    #[test]
    fn stubs_meet_circles_orthogonally() {
        let group = fixtures::four_circle_group();
        let circles = &group.pairing().unwrap().circles;
        let curve = default_generating_curve(&group).unwrap();
        for (k, arc) in curve.arcs.iter().enumerate() {
            let from = &circles[curve.tour[k]];
            let to = &circles[curve.tour[(k + 1) % curve.tour.len()]];
            let first = arc.first().unwrap();
            let last = arc.last().unwrap();
            let radial = (first.start - from.center) / from.radius;
            let tangent = first.tangent_at(0.0);
            assert!((radial.re * tangent.im - radial.im * tangent.re).abs() < 1e-6);
            let radial = (last.end - to.center) / to.radius;
            let tangent = last.tangent_at(1.0);
            assert!((radial.re * tangent.im - radial.im * tangent.re).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_mismatched_ports() {
        let group = fixtures::four_circle_group();
        let curve = default_generating_curve(&group).unwrap();
        let mut ports = curve.ports.clone();
        ports[2].entry = group.pairing().unwrap().circles[2].point_at(0.123);
        assert!(matches!(
            GeneratingCurve::new(&group, curve.tour.clone(), ports, curve.arcs.clone()),
            Err(CurveError::InvalidGeneratingCurve(_))
        ));
    }

    #[test]
    fn rejects_arcs_through_disks() {
        let group = fixtures::cyclic_group();
        let curve = default_generating_curve(&group).unwrap();
        let mut arcs = curve.arcs.clone();
        // Straight through the middle of disk 2 and back out.
        let k = 0;
        let start = arcs[k].first().unwrap().start;
        let end = arcs[k].last().unwrap().end;
        let through = Complex::new(3.0, 0.0);
        arcs[k] = vec![Piece::segment(start, through), Piece::segment(through, end)];
        assert!(matches!(
            GeneratingCurve::new(&group, curve.tour.clone(), curve.ports.clone(), arcs),
            Err(CurveError::Disjointness(_))
        ));
    }
}
