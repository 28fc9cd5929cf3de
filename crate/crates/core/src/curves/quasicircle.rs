use serde::{Deserialize, Serialize};

use super::{CurveError, GeneratingCurve, Piece, PolyCurve, CLOSURE_TOL};
use crate::dimension::poincare_partial_sum;
use crate::schottky::{inverse_letter, word_count, SchottkyGroup};

/// Number of reduced words of length at most `k`, the identity included.
pub fn words_up_to(rank: usize, k: usize) -> usize {
    (0..=k).map(|j| word_count(rank, j)).sum()
}

/// Pieces in the depth-`k` truncated curve: one copy of every generating
/// piece per reduced word of length ≤ k, plus one chord per depth-`k + 1`
/// disk, i.e. `2g(2g-1)^k`.
pub fn expected_piece_count(rank: usize, generating_pieces: usize, k: usize) -> usize {
    generating_pieces * words_up_to(rank, k) + word_count(rank, k + 1)
}

fn reverse(path: &[Piece]) -> Vec<Piece> {
    path.iter().rev().map(Piece::reversed).collect()
}

fn close(a: crate::moebius::Complex, b: crate::moebius::Complex) -> bool {
    (a - b).norm() <= 1e3 * CLOSURE_TOL * (1.0 + a.norm())
}

/// Truncated quasi-circle of depth `k`.
///
/// At depth 0 every disk is crossed by a chord between its two ports. Going
/// one level deeper replaces the path inside disk `j` by the image, under the
/// letter mapping the outside of disk `inverse(j)` into disk `j`, of the
/// previous curve with its own path through that disk removed.
pub fn build_quasicircle(group: &SchottkyGroup, zeta: &GeneratingCurve, depth: usize) -> Result<PolyCurve, CurveError> {
    let n = zeta.tour.len();
    let g = group.rank();
    if n != 2 * g {
        return Err(CurveError::InvalidGeneratingCurve(format!(
            "generating curve visits {n} disks, group has {}",
            2 * g
        )));
    }
    let position: Vec<usize> = {
        let mut pos = vec![0; n];
        for (k, &j) in zeta.tour.iter().enumerate() {
            pos[j] = k;
        }
        pos
    };
    let mut inner: Vec<Vec<Piece>> = zeta
        .ports
        .iter()
        .map(|p| vec![Piece::segment(p.entry, p.exit)])
        .collect();

    for level in 1..=depth {
        let mut next = Vec::with_capacity(n);
        for j in 0..n {
            let l = inverse_letter(j, g);
            // Path from the exit of disk l around to its entry.
            let mut outside = Vec::new();
            for step in 0..n {
                let k = (position[l] + step) % n;
                outside.extend_from_slice(&zeta.arcs[k]);
                let to = zeta.tour[(k + 1) % n];
                if to != l {
                    outside.extend_from_slice(&inner[to]);
                }
            }
            let f = group.letter_map(l);
            let mapped = outside
                .iter()
                .map(|p| p.map(&f).ok_or(CurveError::Pole))
                .collect::<Result<Vec<_>, _>>()?;
            let (first, last) = (mapped[0].start, mapped[mapped.len() - 1].end);
            let ports = &zeta.ports[j];
            let path = if close(first, ports.entry) && close(last, ports.exit) {
                mapped
            } else if close(first, ports.exit) && close(last, ports.entry) {
                reverse(&mapped)
            } else {
                return Err(CurveError::Ordering(format!(
                    "level {level}: image path in disk {} does not join its ports",
                    j + 1
                )));
            };
            next.push(path);
        }
        inner = next;
    }

    let mut pieces = Vec::with_capacity(expected_piece_count(g, zeta.piece_count(), depth));
    for k in 0..n {
        pieces.extend_from_slice(&zeta.arcs[k]);
        pieces.extend_from_slice(&inner[zeta.tour[(k + 1) % n]]);
    }
    // Snap endpoints so consecutive pieces share vertices exactly.
    for i in 0..pieces.len() {
        let j = (i + 1) % pieces.len();
        let (end, start) = (pieces[i].end, pieces[j].start);
        if !close(end, start) {
            return Err(CurveError::Ordering(format!("pieces {i} and {j} do not meet")));
        }
        pieces[j].start = end;
    }
    PolyCurve::new(pieces)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub depth: usize,
    pub generating_length: f64,
    /// Poincaré partial sum at `s = 1` over words of length `1..=depth`.
    pub partial_sum: f64,
    /// `generating_length · (1 + partial_sum)`.
    pub estimate: f64,
    /// Length of the truncated curve at the same depth.
    pub direct: f64,
}

impl LengthEstimate {
    pub fn ratio(&self) -> f64 {
        self.direct / self.estimate
    }
}

pub fn quasicircle_length_estimate(
    group: &SchottkyGroup,
    zeta: &GeneratingCurve,
    depth: usize,
) -> Result<LengthEstimate, CurveError> {
    let generating_length = zeta.length();
    let partial_sum = if depth == 0 {
        0.0
    } else {
        poincare_partial_sum(group, 1.0, depth).partial_sum
    };
    let direct = build_quasicircle(group, zeta, depth)?.length();
    Ok(LengthEstimate {
        depth,
        generating_length,
        partial_sum,
        estimate: generating_length * (1.0 + partial_sum),
        direct,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::{default_generating_curve, is_simple};
    use crate::fixtures;

    #[test]
    fn piece_counts_match_word_counts() {
        for group in [fixtures::cyclic_group(), fixtures::four_circle_group()] {
            let zeta = default_generating_curve(&group).unwrap();
            for k in 0..=3 {
                let curve = build_quasicircle(&group, &zeta, k).unwrap();
                assert_eq!(
                    curve.pieces().len(),
                    expected_piece_count(group.rank(), zeta.piece_count(), k)
                );
            }
        }
    }

    #[test]
    fn depth_zero_is_generating_curve_plus_chords() {
        let group = fixtures::cyclic_group();
        let zeta = default_generating_curve(&group).unwrap();
        let curve = build_quasicircle(&group, &zeta, 0).unwrap();
        assert_eq!(curve.pieces().len(), zeta.piece_count() + 2);
        assert!(is_simple(&curve));
    }

    #[test]
    fn direct_length_grows_with_depth() {
        let group = fixtures::four_circle_group();
        let zeta = default_generating_curve(&group).unwrap();
        let lengths: Vec<f64> = (0..=4)
            .map(|k| build_quasicircle(&group, &zeta, k).unwrap().length())
            .collect();
        for w in lengths.windows(2) {
            assert!(w[1] >= w[0] - 1e-9);
        }
    }

    #[test]
    fn cyclic_estimate_is_bounded() {
        let group = fixtures::cyclic_group();
        let zeta = default_generating_curve(&group).unwrap();
        let a = quasicircle_length_estimate(&group, &zeta, 8).unwrap();
        let b = quasicircle_length_estimate(&group, &zeta, 12).unwrap();
        assert!((b.estimate - a.estimate).abs() < 1e-2 * a.estimate);
        assert!(b.estimate < 2.0 * zeta.length());
    }
}
