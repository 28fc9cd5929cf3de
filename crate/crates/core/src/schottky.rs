//! Schottky group data: circles, circle pairings, reduced words, nested disk
//! covers and limit-set samples.
//!
//! Letters are zero based. For a group of rank `g`, letter `i < g` is the
//! generator `γ_i` and letter `i + g` is its inverse, so the inverse of a
//! letter `l` is `(l + g) mod 2g`. The same indices name the pairing circles:
//! `γ_i` maps the exterior of circle `i` onto the interior of circle `i + g`,
//! and in general letter `l` maps the exterior of circle `l` onto the interior
//! of circle `inverse(l)`.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classicality::{verify_classical_domain, ClassicalityError};
use crate::moebius::{Complex, MapClass, Moebius, Point};

/// Radius below which a mapped circle is reported as degenerate.
pub const MIN_IMAGE_RADIUS: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("rank must be at least 1")]
    EmptyRank,
    #[error("generator {index} is {class:?}, expected loxodromic")]
    NotLoxodromic { index: usize, class: MapClass },
    #[error("pairing has {found} circles, expected {expected}")]
    PairingSize { expected: usize, found: usize },
    #[error("invalid circle: center {center}, radius {radius}")]
    InvalidCircle { center: Complex, radius: f64 },
    #[error("word {0} is not reduced")]
    NotReduced(Word),
    #[error("word {word} is not admissible for disk {disk}")]
    NotAdmissible { word: Word, disk: usize },
    #[error("group has no circle pairing")]
    NoPairing,
    #[error("image of disk under {word} degenerated (radius {radius:e})")]
    DegenerateImage { word: Word, radius: f64 },
    #[error(transparent)]
    Classicality(#[from] ClassicalityError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    #[serde(with = "complex_pair")]
    pub center: Complex,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex, radius: f64) -> Result<Self, GroupError> {
        if !(radius.is_finite() && radius > 0.0 && center.re.is_finite() && center.im.is_finite()) {
            return Err(GroupError::InvalidCircle { center, radius });
        }
        Ok(Circle { center, radius })
    }

    pub fn point_at(&self, theta: f64) -> Complex {
        self.center + Complex::from_polar(self.radius, theta)
    }

    pub fn angle_of(&self, z: Complex) -> f64 {
        (z - self.center).arg()
    }

    /// Closed-disk membership with a small slack.
    pub fn contains(&self, z: Complex, slack: f64) -> bool {
        (z - self.center).norm() <= self.radius + slack
    }

    /// Signed gap between the closed disks (negative when they overlap).
    pub fn gap(&self, other: &Circle) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }

    /// Whether `inner` lies in this closed disk.
    pub fn contains_circle(&self, inner: &Circle, slack: f64) -> bool {
        (inner.center - self.center).norm() + inner.radius <= self.radius + slack
    }

    /// Signed distance from `z` to the circle (negative inside).
    pub fn signed_distance(&self, z: Complex) -> f64 {
        (z - self.center).norm() - self.radius
    }

    /// Circle through three points, `None` when they are (nearly) collinear.
    pub fn through(p1: Complex, p2: Complex, p3: Complex) -> Option<Circle> {
        let (b, c) = (p2 - p1, p3 - p1);
        let d = 2.0 * (b.re * c.im - b.im * c.re);
        if d == 0.0 || d.abs() <= 2e-12 * b.norm() * c.norm() {
            return None;
        }
        let (bb, cc) = (b.norm_sqr(), c.norm_sqr());
        let ux = (c.im * bb - b.im * cc) / d;
        let uy = (b.re * cc - c.re * bb) / d;
        let u = Complex::new(ux, uy);
        let center = p1 + u;
        Some(Circle {
            center,
            radius: u.norm(),
        })
    }

    /// Image under a Möbius map, computed from three mapped boundary points.
    /// `None` if the image is a line (the circle passes through the pole).
    pub fn image(&self, f: &Moebius) -> Option<Circle> {
        let pts: Vec<Complex> = (0..3)
            .map(|k| f.apply_finite(self.point_at(k as f64 * TAU / 3.0)))
            .collect::<Option<_>>()?;
        Circle::through(pts[0], pts[1], pts[2])
    }
}

pub(crate) mod complex_pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::moebius::Complex;

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex::new(re, im))
    }
}

/// `2g` circles; circle `i` is paired with circle `i + g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CirclePairing {
    pub circles: Vec<Circle>,
}

impl CirclePairing {
    pub fn new(circles: Vec<Circle>) -> Result<Self, GroupError> {
        if circles.is_empty() || !circles.len().is_multiple_of(2) {
            return Err(GroupError::PairingSize {
                expected: 2 * (circles.len() / 2).max(1),
                found: circles.len(),
            });
        }
        Ok(CirclePairing { circles })
    }

    pub fn rank(&self) -> usize {
        self.circles.len() / 2
    }

    /// The classical generator pairing circle `from` to circle `to`,
    /// `z ↦ c' + r r' u / (z - c)` with `|u| = 1`. It maps the exterior of
    /// `from` onto the interior of `to`.
    pub fn pairing_map(from: &Circle, to: &Circle, rotation: Complex) -> Moebius {
        let u = rotation / rotation.norm();
        let k = u * from.radius * to.radius;
        Moebius::new(to.center, k - to.center * from.center, Complex::new(1.0, 0.0), -from.center)
            .expect("pairing map is never singular for a positive radius")
    }

    /// Minimum signed gap over all pairs of closed disks.
    pub fn margin(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.circles.len() {
            for j in i + 1..self.circles.len() {
                m = m.min(self.circles[i].gap(&self.circles[j]));
            }
        }
        m
    }
}

/// A finitely generated free group given by `g` loxodromic generators and,
/// when known, a classical circle pairing for them.
#[derive(Debug, Clone)]
pub struct SchottkyGroup {
    generators: Vec<Moebius>,
    pairing: Option<CirclePairing>,
}

impl SchottkyGroup {
    /// Group without a fundamental domain.
    pub fn new(generators: Vec<Moebius>) -> Result<Self, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::EmptyRank);
        }
        for (index, f) in generators.iter().enumerate() {
            let class = f.classify();
            if class != MapClass::Loxodromic {
                return Err(GroupError::NotLoxodromic { index, class });
            }
        }
        Ok(SchottkyGroup {
            generators,
            pairing: None,
        })
    }

    /// Group with a circle pairing, which must pass the classical domain check.
    pub fn with_pairing(generators: Vec<Moebius>, pairing: CirclePairing) -> Result<Self, GroupError> {
        let mut group = SchottkyGroup::new(generators)?;
        if pairing.circles.len() != 2 * group.rank() {
            return Err(GroupError::PairingSize {
                expected: 2 * group.rank(),
                found: pairing.circles.len(),
            });
        }
        verify_classical_domain(&group.generators, &pairing)?;
        group.pairing = Some(pairing);
        Ok(group)
    }

    /// Classical group from circles alone: generator `i` is the pairing map
    /// of circle `i` onto circle `i + g` with the given rotations.
    pub fn from_circles(circles: Vec<Circle>, rotations: &[Complex]) -> Result<Self, GroupError> {
        let pairing = CirclePairing::new(circles)?;
        let g = pairing.rank();
        let generators = (0..g)
            .map(|i| {
                let u = rotations.get(i).copied().unwrap_or(Complex::new(1.0, 0.0));
                CirclePairing::pairing_map(&pairing.circles[i], &pairing.circles[i + g], u)
            })
            .collect();
        SchottkyGroup::with_pairing(generators, pairing)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Moebius] {
        &self.generators
    }

    pub fn pairing(&self) -> Option<&CirclePairing> {
        self.pairing.as_ref()
    }

    pub fn without_pairing(&self) -> SchottkyGroup {
        SchottkyGroup {
            generators: self.generators.clone(),
            pairing: None,
        }
    }

    /// Conjugates generators (and the pairing, when its image stays a set of
    /// bounded disks) by `h`: the new group is `h Γ h⁻¹`.
    pub fn conjugated(&self, h: &Moebius) -> SchottkyGroup {
        let generators: Vec<Moebius> = self.generators.iter().map(|f| f.conjugate_by(h)).collect();
        let pairing = self.pairing.as_ref().and_then(|p| {
            let pole = h.pole();
            let circles = p
                .circles
                .iter()
                .map(|c| {
                    // The pole must stay outside every disk, else the image
                    // disk would contain infinity.
                    if let Point::Finite(z) = pole {
                        if c.contains(z, 0.0) {
                            return None;
                        }
                    }
                    c.image(h)
                })
                .collect::<Option<Vec<_>>>()?;
            let pairing = CirclePairing { circles };
            verify_classical_domain(&generators, &pairing).ok()?;
            Some(pairing)
        });
        SchottkyGroup { generators, pairing }
    }

    /// The map for a single letter.
    pub fn letter_map(&self, letter: usize) -> Moebius {
        let g = self.rank();
        if letter < g {
            self.generators[letter]
        } else {
            self.generators[letter - g].inverse()
        }
    }

    /// Left-to-right product `γ_{l1} ∘ γ_{l2} ∘ … ∘ γ_{lk}`.
    pub fn word_to_map(&self, word: &Word) -> Result<Moebius, GroupError> {
        if !word.is_reduced(self.rank()) {
            return Err(GroupError::NotReduced(word.clone()));
        }
        Ok(word
            .letters()
            .iter()
            .fold(Moebius::IDENTITY, |acc, &l| acc.compose(&self.letter_map(l))))
    }

    /// Image of pairing circle `disk` under the word. The word must be
    /// admissible for the disk so the image nests inside the cover.
    pub fn nested_disk(&self, word: &Word, disk: usize) -> Result<Circle, GroupError> {
        let pairing = self.pairing.as_ref().ok_or(GroupError::NoPairing)?;
        let g = self.rank();
        if !word.is_reduced(g) {
            return Err(GroupError::NotReduced(word.clone()));
        }
        if !is_admissible_for_disk(word, disk) || disk >= 2 * g {
            return Err(GroupError::NotAdmissible {
                word: word.clone(),
                disk,
            });
        }
        let f = self.word_to_map(word)?;
        image_disk(&pairing.circles[disk], &f, word)
    }

    /// The depth-`|w|` cover disk of a nonempty reduced word `w = u·l`:
    /// circle `inverse(l)` mapped by `u`.
    pub fn cover_disk(&self, word: &Word) -> Result<Circle, GroupError> {
        let g = self.rank();
        let (prefix, last) = word.split_last().ok_or(GroupError::NotAdmissible {
            word: word.clone(),
            disk: 0,
        })?;
        self.nested_disk(&prefix, inverse_letter(last, g))
    }

    /// All cover disks of depth `k` in lexicographic word order.
    pub fn cover(&self, depth: usize) -> Result<Vec<(Word, Circle)>, GroupError> {
        let pairing = self.pairing.as_ref().ok_or(GroupError::NoPairing)?;
        let g = self.rank();
        let mut out: Vec<(Word, Result<Circle, GroupError>)> = Vec::with_capacity(word_count(g, depth));
        if depth == 0 {
            return Ok(Vec::new());
        }
        visit_words(self, depth - 1, |letters, f| {
            if letters.len() != depth - 1 {
                return;
            }
            let prefix_last = letters.last().copied();
            for l in 0..2 * g {
                if prefix_last == Some(inverse_letter(l, g)) {
                    continue;
                }
                let mut w = letters.to_vec();
                w.push(l);
                let word = Word::new(w);
                out.push((word, image_disk(&pairing.circles[inverse_letter(l, g)], f, &Word::new(letters.to_vec()))));
            }
        });
        out.into_iter().map(|(w, c)| c.map(|c| (w, c))).collect()
    }

    /// Largest cover-disk radius at a depth (`k ≥ 1`).
    pub fn max_cover_radius(&self, depth: usize) -> Result<f64, GroupError> {
        Ok(self
            .cover(depth)?
            .iter()
            .map(|(_, c)| c.radius)
            .fold(0.0, f64::max))
    }

    /// One point per reduced word of length `k`: the cover-disk center when a
    /// pairing exists, otherwise the attracting fixed point of the word.
    pub fn sample_limit_set(&self, depth: usize) -> Result<Vec<LimitSample>, GroupError> {
        let depth = depth.max(1);
        if self.pairing.is_some() {
            return Ok(self
                .cover(depth)?
                .into_iter()
                .map(|(word, c)| LimitSample {
                    point: c.center,
                    word,
                    source: SampleSource::DiskCenter,
                })
                .collect());
        }
        let mut out = Vec::with_capacity(word_count(self.rank(), depth));
        visit_words(self, depth, |letters, f| {
            if letters.len() != depth {
                return;
            }
            let point = match f.fixed_points() {
                Ok((Point::Finite(p), _, _)) => p,
                // A fixed point at infinity cannot be plotted; the orbit of a
                // finite point is a reasonable stand-in.
                _ => f.apply_finite(Complex::new(0.0, 0.0)).unwrap_or_default(),
            };
            out.push(LimitSample {
                point,
                word: Word::new(letters.to_vec()),
                source: SampleSource::FixedPoint,
            });
        });
        Ok(out)
    }
}

fn image_disk(circle: &Circle, f: &Moebius, word: &Word) -> Result<Circle, GroupError> {
    match circle.image(f) {
        Some(c) if c.radius >= MIN_IMAGE_RADIUS && c.radius.is_finite() => Ok(c),
        Some(c) => Err(GroupError::DegenerateImage {
            word: word.clone(),
            radius: c.radius,
        }),
        None => Err(GroupError::DegenerateImage {
            word: word.clone(),
            radius: 0.0,
        }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SampleSource {
    DiskCenter,
    FixedPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitSample {
    pub point: Complex,
    pub word: Word,
    pub source: SampleSource,
}

pub fn inverse_letter(letter: usize, rank: usize) -> usize {
    (letter + rank) % (2 * rank)
}

/// Number of reduced words of length exactly `k`.
pub fn word_count(rank: usize, k: usize) -> usize {
    if k == 0 {
        1
    } else {
        2 * rank * (2 * rank - 1).pow(k as u32 - 1)
    }
}

/// A word in the generators, as zero-based letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    pub fn split_last(&self) -> Option<(Word, usize)> {
        let (&last, rest) = self.0.split_last()?;
        Some((Word(rest.to_vec()), last))
    }

    pub fn is_reduced(&self, rank: usize) -> bool {
        self.0.iter().all(|&l| l < 2 * rank)
            && self.0.windows(2).all(|p| p[1] != inverse_letter(p[0], rank))
    }

    /// Concatenation followed by free reduction.
    pub fn concat_reduced(&self, other: &Word, rank: usize) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&inverse_letter(l, rank)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn inverse(&self, rank: usize) -> Word {
        Word(self.0.iter().rev().map(|&l| inverse_letter(l, rank)).collect())
    }

    /// One-based letters, the external convention.
    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|l| l + 1).collect()
    }

    pub fn from_one_based(letters: &[usize]) -> Option<Word> {
        letters
            .iter()
            .map(|&l| l.checked_sub(1))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let parts: Vec<String> = self.0.iter().map(|l| (l + 1).to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// True iff the word's last letter differs from `disk`, so the word's map
/// sends disk `disk` strictly inside the cover. The empty word is admissible
/// for every disk.
pub fn is_admissible_for_disk(word: &Word, disk: usize) -> bool {
    word.last() != Some(disk)
}

/// Lexicographic stream of the reduced words of one length.
#[derive(Debug, Clone)]
pub struct ReducedWords {
    rank: usize,
    current: Option<Vec<usize>>,
    started: bool,
}

pub fn enumerate_reduced_words(rank: usize, length: usize) -> ReducedWords {
    assert!(rank >= 1, "rank must be positive");
    let mut first = Vec::with_capacity(length);
    for i in 0..length {
        let banned = if i == 0 { None } else { Some(inverse_letter(first[i - 1], rank)) };
        first.push(smallest_letter(banned));
    }
    ReducedWords {
        rank,
        current: Some(first),
        started: false,
    }
}

fn smallest_letter(banned: Option<usize>) -> usize {
    if banned == Some(0) {
        1
    } else {
        0
    }
}

impl Iterator for ReducedWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if !self.started {
            self.started = true;
            return self.current.clone().map(Word);
        }
        let rank = self.rank;
        let cur = self.current.as_mut()?;
        // Odometer: bump the rightmost position that can still grow, then
        // refill the tail with the smallest admissible letters.
        let mut pos = cur.len();
        loop {
            if pos == 0 {
                self.current = None;
                return None;
            }
            pos -= 1;
            let banned = if pos == 0 { None } else { Some(inverse_letter(cur[pos - 1], rank)) };
            let mut next = cur[pos] + 1;
            if Some(next) == banned {
                next += 1;
            }
            if next < 2 * rank {
                cur[pos] = next;
                break;
            }
        }
        for i in pos + 1..cur.len() {
            cur[i] = smallest_letter(Some(inverse_letter(cur[i - 1], rank)));
        }
        Some(Word(cur.clone()))
    }
}

/// Depth-first traversal of reduced words of length `1..=max_len` in
/// lexicographic pre-order, handing each word with its map.
pub fn visit_words<F>(group: &SchottkyGroup, max_len: usize, mut visit: F)
where
    F: FnMut(&[usize], &Moebius),
{
    let g = group.rank();
    let letters: Vec<Moebius> = (0..2 * g).map(|l| group.letter_map(l)).collect();
    let mut word = Vec::with_capacity(max_len);
    let mut maps = vec![Moebius::IDENTITY];
    fn rec<F: FnMut(&[usize], &Moebius)>(
        g: usize,
        max_len: usize,
        letters: &[Moebius],
        word: &mut Vec<usize>,
        maps: &mut Vec<Moebius>,
        visit: &mut F,
    ) {
        let top = *maps.last().unwrap();
        if !word.is_empty() {
            visit(word, &top);
        }
        if word.len() == max_len {
            return;
        }
        let banned = word.last().map(|&l| inverse_letter(l, g));
        for l in 0..2 * g {
            if Some(l) == banned {
                continue;
            }
            word.push(l);
            maps.push(top.compose(&letters[l]));
            rec(g, max_len, letters, word, maps, visit);
            maps.pop();
            word.pop();
        }
    }
    if max_len == 0 {
        visit(&[], &Moebius::IDENTITY);
        return;
    }
    rec(g, max_len, &letters, &mut word, &mut maps, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn word_counts() {
        assert_eq!(enumerate_reduced_words(2, 1).count(), 4);
        assert_eq!(enumerate_reduced_words(2, 3).count(), 36);
        assert_eq!(enumerate_reduced_words(3, 0).collect::<Vec<_>>(), vec![Word::empty()]);
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for g in 1..=3 {
            for k in 0..=5usize {
                let n: usize = 2 * g;
                let mut brute = Vec::new();
                for code in 0..n.pow(k as u32) {
                    let mut letters = Vec::with_capacity(k);
                    let mut c = code;
                    for _ in 0..k {
                        letters.push(c % n);
                        c /= n;
                    }
                    letters.reverse();
                    let w = Word::new(letters);
                    if w.is_reduced(g) {
                        brute.push(w);
                    }
                }
                let listed: Vec<Word> = enumerate_reduced_words(g, k).collect();
                assert_eq!(listed, brute, "g={g} k={k}");
            }
        }
        for k in 1..=8 {
            assert_eq!(enumerate_reduced_words(2, k).count(), word_count(2, k));
        }
    }

    #[test]
    fn enumeration_is_prefix_stable() {
        let shorter: Vec<Word> = enumerate_reduced_words(2, 3).collect();
        let longer: Vec<Word> = enumerate_reduced_words(2, 4).collect();
        let prefixes: Vec<Word> = longer
            .iter()
            .map(|w| Word::new(w.letters()[..3].to_vec()))
            .collect::<Vec<_>>();
        let mut dedup = prefixes.clone();
        dedup.dedup();
        assert_eq!(dedup, shorter);
        assert_eq!(longer.len(), 3 * shorter.len());
    }

    #[test]
    fn admissibility() {
        assert!(!is_admissible_for_disk(&Word::new(vec![0]), 0));
        assert!(is_admissible_for_disk(&Word::new(vec![1]), 0));
        let count = enumerate_reduced_words(2, 2)
            .filter(|w| is_admissible_for_disk(w, 0))
            .count();
        assert_eq!(count, 9);
    }

    #[test]
    fn word_maps() {
        let group = fixtures::four_circle_group();
        assert!(group.word_to_map(&Word::empty()).unwrap().is_identity());
        assert!(matches!(
            group.word_to_map(&Word::new(vec![0, 2])),
            Err(GroupError::NotReduced(_))
        ));
        let w1 = Word::new(vec![0, 1]);
        let w2 = Word::new(vec![1, 2, 3]);
        let joined = Word::new(vec![0, 1, 1, 2, 3]);
        let lhs = group.word_to_map(&joined).unwrap();
        let rhs = group.word_to_map(&w1).unwrap().compose(&group.word_to_map(&w2).unwrap());
        assert!(lhs.projective_eq(&rhs, 1e-9));
    }

    #[test]
    fn nested_disks_nest_and_shrink() {
        let group = fixtures::four_circle_group();
        let pairing = group.pairing().unwrap().clone();
        assert_eq!(group.nested_disk(&Word::empty(), 2).unwrap(), pairing.circles[2]);
        let mut prev_max = 1.0;
        for k in 2..=5 {
            let cover = group.cover(k).unwrap();
            assert_eq!(cover.len(), word_count(2, k));
            for (w, c) in &cover {
                let (prefix, last) = w.split_last().unwrap();
                let parent = group.cover_disk(&Word::new(w.letters()[..k - 1].to_vec())).unwrap();
                assert!(parent.contains_circle(c, 1e-12), "{w} not inside parent");
                let _ = (prefix, last);
            }
            let max = cover.iter().map(|(_, c)| c.radius).fold(0.0, f64::max);
            assert!(max < 0.2 * prev_max, "radii at depth {k} do not decay: {max}");
            prev_max = max;
        }
        assert!(matches!(
            group.nested_disk(&Word::new(vec![0]), 0),
            Err(GroupError::NotAdmissible { .. })
        ));
    }

    #[test]
    fn ping_pong_on_boundary_samples() {
        let group = fixtures::four_circle_group();
        let p = group.pairing().unwrap();
        let g = group.rank();
        for l in 0..2 * g {
            let f = group.letter_map(l);
            let target = p.circles[inverse_letter(l, g)];
            let source = p.circles[l];
            for k in 0..64 {
                let z = source.center + Complex::from_polar(source.radius * 1.0001, k as f64 * TAU / 64.0);
                let w = f.apply_finite(z).unwrap();
                assert!(target.signed_distance(w) < 0.0);
            }
        }
    }

    #[test]
    fn cyclic_limit_set_is_two_points() {
        let group = fixtures::cyclic_group().without_pairing();
        for k in [1, 3, 7] {
            let samples = group.sample_limit_set(k).unwrap();
            assert_eq!(samples.len(), 2);
            let f = group.generators()[0];
            let (p, q, _) = f.fixed_points().unwrap();
            let fixed = [p.finite().unwrap(), q.finite().unwrap()];
            for s in &samples {
                assert!(fixed.iter().any(|z| (z - s.point).norm() < 1e-9));
            }
        }
        let with_pairing = fixtures::cyclic_group();
        assert_eq!(with_pairing.sample_limit_set(6).unwrap().len(), 2);
    }

    #[test]
    fn limit_samples_cover_and_invariance() {
        let group = fixtures::four_circle_group();
        let k = 5;
        let samples = group.sample_limit_set(k).unwrap();
        assert_eq!(samples.len(), word_count(2, k));
        let cover = group.cover(k).unwrap();
        let eps = group.max_cover_radius(k).unwrap();
        for (s, (_, c)) in samples.iter().zip(&cover) {
            assert!(c.contains(s.point, 1e-12));
        }
        // A generator can cancel the first letter, landing in a disk one
        // level up.
        let coarse = group.max_cover_radius(k - 1).unwrap();
        for f in group.generators() {
            for s in &samples {
                let image = f.apply_finite(s.point).unwrap();
                let nearest = samples
                    .iter()
                    .map(|t| (t.point - image).norm())
                    .fold(f64::INFINITY, f64::min);
                assert!(nearest <= coarse, "{nearest} > {coarse}");
            }
        }
        // One-sided Hausdorff distance between successive depths.
        let finer = group.sample_limit_set(k + 1).unwrap();
        for s in &finer {
            let nearest = samples
                .iter()
                .map(|t| (t.point - s.point).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 2.0 * eps);
        }
    }

    #[test]
    fn circle_through_three_points() {
        let c = Circle::through(Complex::new(1.0, 0.0), Complex::new(0.0, 1.0), Complex::new(-1.0, 0.0)).unwrap();
        assert!(c.center.norm() < 1e-15);
        assert!((c.radius - 1.0).abs() < 1e-15);
        assert!(Circle::through(Complex::new(0.0, 0.0), Complex::new(1.0, 1.0), Complex::new(2.0, 2.0)).is_none());
    }
}
