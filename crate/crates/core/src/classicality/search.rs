//! Best-first search over Nielsen transformations for a generating set whose
//! pole-centered circles bound a classical domain.
//!
//! For a generator `γ` with `c ≠ 0`, the circle of radius `ρ` about the pole
//! `-d/c` is mapped onto the circle of radius `1/(|c|²ρ)` about `γ(∞) = a/c`,
//! exterior to interior. The isometric circles are the case `ρ = 1/|c|`.
//! Each generator therefore carries a one-parameter family of candidate
//! circle pairs, and the search scores a generating set by the best member
//! of that family. A second family uses Apollonius circles of the fixed
//! points, and the better of the two seeds a free-circle refinement.
//! Candidates are examined in several conjugation frames, since both
//! families depend on where infinity sits relative to the limit set.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{verify_classical_domain, ClassicalCertificate, ClassicalityError};
use crate::moebius::{Complex, Moebius, Point};
use crate::schottky::{visit_words, Circle, CirclePairing, SchottkyGroup, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NielsenMove {
    /// `γ_i ← γ_i γ_j^{±1}`
    RightMultiply { i: usize, j: usize, inverse: bool },
    /// `γ_i ← γ_j^{±1} γ_i`
    LeftMultiply { i: usize, j: usize, inverse: bool },
    /// `γ_i ← γ_i⁻¹`
    Invert { i: usize },
    Swap { i: usize, j: usize },
}

impl NielsenMove {
    pub fn random<R: Rng>(rng: &mut R, rank: usize) -> NielsenMove {
        let i = rng.gen_range(0..rank);
        if rank == 1 {
            return NielsenMove::Invert { i };
        }
        let mut j = rng.gen_range(0..rank - 1);
        if j >= i {
            j += 1;
        }
        let inverse = rng.gen_bool(0.5);
        match rng.gen_range(0..4) {
            0 => NielsenMove::RightMultiply { i, j, inverse },
            1 => NielsenMove::LeftMultiply { i, j, inverse },
            2 => NielsenMove::Invert { i },
            _ => NielsenMove::Swap { i, j },
        }
    }

    /// Applies the move to generators and their witness words.
    pub fn apply(&self, gens: &mut [Moebius], words: &mut [Word]) {
        let rank = gens.len();
        match *self {
            NielsenMove::RightMultiply { i, j, inverse } => {
                let (m, w) = power(gens[j], &words[j], inverse, rank);
                gens[i] = gens[i].compose(&m);
                words[i] = words[i].concat_reduced(&w, rank);
            }
            NielsenMove::LeftMultiply { i, j, inverse } => {
                let (m, w) = power(gens[j], &words[j], inverse, rank);
                gens[i] = m.compose(&gens[i]);
                words[i] = w.concat_reduced(&words[i], rank);
            }
            NielsenMove::Invert { i } => {
                gens[i] = gens[i].inverse();
                words[i] = words[i].inverse(rank);
            }
            NielsenMove::Swap { i, j } => {
                gens.swap(i, j);
                words.swap(i, j);
            }
        }
    }
}

fn power(m: Moebius, w: &Word, inverse: bool, rank: usize) -> (Moebius, Word) {
    if inverse {
        (m.inverse(), w.inverse(rank))
    } else {
        (m, w.clone())
    }
}

/// Applies moves in order; returns scrambled generators and their words.
pub fn nielsen_scramble(gens: &[Moebius], moves: &[NielsenMove]) -> (Vec<Moebius>, Vec<Word>) {
    let mut gens = gens.to_vec();
    let mut words: Vec<Word> = (0..gens.len()).map(|i| Word::new(vec![i])).collect();
    for mv in moves {
        mv.apply(&mut gens, &mut words);
    }
    (gens, words)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchOptions {
    /// Maximum number of expanded nodes over all frames.
    pub budget: usize,
    /// Conjugation frames tried after the identity frame.
    pub extra_frames: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            budget: 100_000,
            extra_frames: 6,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FailureReport {
    pub best_cost: f64,
    pub visited: usize,
    pub budget: usize,
    pub frames_tried: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SearchOutcome {
    Certified {
        certificate: ClassicalCertificate,
        /// Number of Nielsen moves from the input generators.
        depth: usize,
        visited: usize,
        frame: usize,
    },
    Exhausted(FailureReport),
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&ClassicalCertificate> {
        match self {
            SearchOutcome::Certified { certificate, .. } => Some(certificate),
            SearchOutcome::Exhausted(_) => None,
        }
    }
}

/// Score of a generating set: total overlap of the best circle pairs found
/// when positive, otherwise minus the best margin.
#[derive(Debug, Clone)]
struct Candidate {
    score: f64,
    circles: Vec<Circle>,
}

const LOG_T_RANGE: f64 = 4.0;
/// Grid steps per parameter in the coarse pass of a family fit.
const FAMILY_STEPS: usize = 80;

/// Coordinate descent over one parameter per generator in `[lo_i, hi_i]`:
/// a coarse grid sweep, then halving steps.
fn family_fit(
    ranges: &[(f64, f64)],
    build: impl Fn(&[f64]) -> Vec<Circle>,
    avoid: Option<Complex>,
) -> Candidate {
    let mut x: Vec<f64> = ranges.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect();
    let mut best = score(&build(&x), avoid);
    for _ in 0..3 {
        let mut improved = false;
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            for k in 0..=FAMILY_STEPS {
                let old = x[i];
                x[i] = lo + (hi - lo) * k as f64 / FAMILY_STEPS as f64;
                let s = score(&build(&x), avoid);
                if s < best - 1e-15 {
                    best = s;
                    improved = true;
                } else {
                    x[i] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    let mut step = 0.5 / FAMILY_STEPS as f64;
    while step > 1e-4 / LOG_T_RANGE {
        for (i, &(lo, hi)) in ranges.iter().enumerate() {
            for dir in [-1.0, 1.0] {
                let old = x[i];
                x[i] = (x[i] + dir * step * (hi - lo)).clamp(lo, hi);
                let s = score(&build(&x), avoid);
                if s < best {
                    best = s;
                } else {
                    x[i] = old;
                }
            }
        }
        step /= 2.0;
    }
    Candidate {
        score: best,
        circles: build(&x),
    }
}

fn pole_circles(gens: &[Moebius], avoid: Option<Complex>) -> Option<Candidate> {
    let g = gens.len();
    let mut poles = Vec::with_capacity(g);
    for f in gens {
        if f.c.norm() < 1e-12 {
            return None;
        }
        let base = 1.0 / f.c.norm();
        poles.push((-f.d / f.c, f.a / f.c, base));
    }
    let build = |log_t: &[f64]| -> Vec<Circle> {
        let mut circles = vec![Circle { center: Complex::new(0.0, 0.0), radius: 1.0 }; 2 * g];
        for (i, &(p, q, base)) in poles.iter().enumerate() {
            let t = log_t[i].exp();
            circles[i] = Circle { center: p, radius: base * t };
            circles[i + g] = Circle { center: q, radius: base / t };
        }
        circles
    };
    Some(family_fit(&vec![(-LOG_T_RANGE, LOG_T_RANGE); g], build, avoid))
}

/// Largest fraction of the admissible range used by the Apollonius family;
/// the ends are lines.
const APOLLONIUS_SPAN: f64 = 0.95;

/// Circle `|z - p| = ρ |z - q|` for attracting `p` and repelling `q`.
fn apollonius(p: Complex, q: Complex, rho: f64) -> Circle {
    let s = rho * rho;
    Circle {
        center: (p - q * s) / (1.0 - s),
        radius: rho * (p - q).norm() / (1.0 - s).abs(),
    }
}

/// Pairs of Apollonius circles of the fixed points: in the chart
/// `w = (z - p)/(z - q)` the generator is `w ↦ kw`, so `|w| = R` goes to
/// `|w| = |k|R`. Both disks are bounded when `1 < R < 1/|k|`. Weak
/// loxodromics, whose isometric circles overlap, are covered by this family.
fn apollonius_circles(gens: &[Moebius], avoid: Option<Complex>) -> Option<Candidate> {
    let g = gens.len();
    let mut data = Vec::with_capacity(g);
    for f in gens {
        let (p, q, _) = f.fixed_points().ok()?;
        let k = f.multiplier().norm();
        if !(k > 0.0 && k < 1.0) {
            return None;
        }
        data.push((p.finite()?, q.finite()?, -k.ln()));
    }
    let build = |u: &[f64]| -> Vec<Circle> {
        let mut circles = vec![Circle { center: Complex::new(0.0, 0.0), radius: 1.0 }; 2 * g];
        for (i, &(p, q, span)) in data.iter().enumerate() {
            let log_r = span * u[i];
            circles[i] = apollonius(p, q, log_r.exp());
            circles[i + g] = apollonius(p, q, (log_r - span).exp());
        }
        circles
    };
    let lo = 0.5 * (1.0 - APOLLONIUS_SPAN);
    Some(family_fit(&vec![(lo, 1.0 - lo); g], build, avoid))
}

/// Better of the pole and Apollonius families.
fn seed_circles(gens: &[Moebius], avoid: Option<Complex>) -> Option<Candidate> {
    let pole = pole_circles(gens, avoid);
    let apollo = apollonius_circles(gens, avoid);
    match (pole, apollo) {
        (Some(a), Some(b)) => Some(if b.score < a.score { b } else { a }),
        (a, b) => a.or(b),
    }
}

/// Evaluations allowed in the free-circle refinement.
const REFINE_EVALS: usize = 600;
/// Smallest relative step of the refinement.
const REFINE_MIN_STEP: f64 = 1e-3;

/// Frees the source circles from their poles: each circle `i` may move as
/// long as it still contains the pole `-d/c`, and circle `i + g` is its
/// image. Coordinate pattern search on centre and log-radius, started from
/// the pole-centered optimum. Radii stay within the pole family's range so
/// near-degenerate circles (and their huge images) are never scored.
fn refine(gens: &[Moebius], start: Candidate, avoid: Option<Complex>) -> Candidate {
    let g = gens.len();
    let poles: Vec<Complex> = gens.iter().map(|f| -f.d / f.c).collect();
    let build = |x: &[f64]| -> Option<Vec<Circle>> {
        let mut circles = vec![Circle { center: Complex::new(0.0, 0.0), radius: 1.0 }; 2 * g];
        for i in 0..g {
            let source = Circle {
                center: Complex::new(x[3 * i], x[3 * i + 1]),
                radius: x[3 * i + 2].exp(),
            };
            if (poles[i] - source.center).norm() >= source.radius {
                return None;
            }
            let image = source.image(&gens[i])?;
            let base = 1.0 / gens[i].c.norm();
            let in_range = |r: f64| (r / base).ln().abs() <= LOG_T_RANGE;
            if !in_range(source.radius) || !in_range(image.radius) {
                return None;
            }
            circles[i + g] = image;
            circles[i] = source;
        }
        Some(circles)
    };
    let eval = |x: &[f64]| build(x).map_or(f64::INFINITY, |c| score(&c, avoid));
    let mut x: Vec<f64> = start.circles[..g]
        .iter()
        .flat_map(|c| [c.center.re, c.center.im, c.radius.ln()])
        .collect();
    let mut best = eval(&x);
    if !best.is_finite() {
        return start;
    }
    let mut rel = 0.25;
    let mut evals = 1;
    let step_of = |x: &[f64], k: usize, rel: f64| if k % 3 == 2 { rel } else { rel * x[k - k % 3 + 2].exp() };
    while rel > REFINE_MIN_STEP && evals < REFINE_EVALS {
        let mut improved = false;
        for k in 0..3 * g {
            let step = step_of(&x, k, rel);
            for dir in [-1.0, 1.0] {
                let old = x[k];
                x[k] += dir * step;
                let s = eval(&x);
                evals += 1;
                if s < best {
                    best = s;
                    improved = true;
                    break;
                }
                x[k] = old;
            }
        }
        // The score is a minimum of gaps, so at a kink only moves of two
        // coordinates together can improve it.
        if !improved {
            'pairs: for k in 0..3 * g {
                for l in k + 1..3 * g {
                    let (sk, sl) = (step_of(&x, k, rel), step_of(&x, l, rel));
                    for (dk, dl) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let (ok, ol) = (x[k], x[l]);
                        x[k] += dk * sk;
                        x[l] += dl * sl;
                        let s = eval(&x);
                        evals += 1;
                        if s < best {
                            best = s;
                            improved = true;
                            break 'pairs;
                        }
                        x[k] = ok;
                        x[l] = ol;
                    }
                }
            }
        }
        if !improved {
            rel /= 2.0;
        }
    }
    match build(&x) {
        Some(circles) if best < start.score => Candidate { score: best, circles },
        _ => start,
    }
}

/// Seed circles, refined when neither family alone bounds a domain.
fn fit_circles(gens: &[Moebius], avoid: Option<Complex>) -> Option<Candidate> {
    let candidate = seed_circles(gens, avoid)?;
    if candidate.score < 0.0 || !candidate.score.is_finite() {
        return Some(candidate);
    }
    Some(refine(gens, candidate, avoid))
}

/// Overlap of the disks (positive) or minus their smallest gap. A disk
/// containing `avoid` counts as overlap by its relative penetration.
fn score(circles: &[Circle], avoid: Option<Complex>) -> f64 {
    let mut overlap = 0.0;
    let mut margin = f64::INFINITY;
    if let Some(z) = avoid {
        for c in circles {
            let depth = c.radius - (z - c.center).norm();
            if depth >= 0.0 {
                overlap += depth / c.radius + f64::EPSILON;
            }
        }
    }
    for i in 0..circles.len() {
        for j in i + 1..circles.len() {
            let gap = circles[i].gap(&circles[j]);
            if gap < 0.0 {
                // Relative to the smaller disk, so shrinking every circle
                // (long words) does not look like progress.
                overlap -= gap / circles[i].radius.min(circles[j].radius);
            }
            margin = margin.min(gap);
        }
    }
    if overlap > 0.0 {
        overlap
    } else {
        -margin
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Priority(f64, u64);

impl Eq for Priority {}

impl PartialOrd for Priority {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Priority {
    // Reversed: the heap pops the lowest score, then the earliest node.
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

struct Node {
    gens: Vec<Moebius>,
    words: Vec<Word>,
    depth: usize,
    score: f64,
    /// Whether `score` already includes the free-circle refinement.
    refined: bool,
}

/// Priority added per Nielsen move, so equally good states with shorter
/// words are expanded first.
const DEPTH_PENALTY: f64 = 0.05;

/// Key invariant under reordering and inversion of generators.
fn state_key(gens: &[Moebius]) -> Vec<[i64; 8]> {
    let q = |z: Complex| [(z.re * 1e7).round() as i64, (z.im * 1e7).round() as i64];
    let key_of = |m: &Moebius| {
        let e = m.canonical_entries();
        let mut out = [0i64; 8];
        for (k, z) in e.iter().enumerate() {
            let [re, im] = q(*z);
            out[2 * k] = re;
            out[2 * k + 1] = im;
        }
        out
    };
    let mut keys: Vec<[i64; 8]> = gens
        .iter()
        .map(|m| {
            let (a, b) = (key_of(m), key_of(&m.inverse()));
            a.min(b)
        })
        .collect();
    keys.sort_unstable();
    keys
}

fn moves(rank: usize) -> Vec<NielsenMove> {
    let mut out = Vec::new();
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            for inverse in [false, true] {
                out.push(NielsenMove::RightMultiply { i, j, inverse });
                out.push(NielsenMove::LeftMultiply { i, j, inverse });
            }
        }
    }
    out
}

/// Conjugation frames `z ↦ 1/(z - q)` ranked by how evenly the limit set
/// surrounds `q` (ratio of nearest to farthest limit sample).
fn candidate_frames(group: &SchottkyGroup, count: usize) -> Vec<Moebius> {
    if count == 0 {
        return Vec::new();
    }
    let mut samples = Vec::new();
    let depth = if group.rank() == 1 { 2 } else { 4 };
    visit_words(group, depth, |letters, f| {
        if letters.len() == depth {
            if let Ok((Point::Finite(p), _, _)) = f.fixed_points() {
                samples.push(p);
            }
        }
    });
    if samples.is_empty() {
        return Vec::new();
    }
    let (mut lo, mut hi) = (samples[0], samples[0]);
    for p in &samples {
        lo = Complex::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = Complex::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    let center = (lo + hi) / 2.0;
    let half = ((hi - lo) / 2.0).norm().max(1e-6) * 1.5;
    let n = 24;
    let mut scored = Vec::new();
    for ix in 0..=n {
        for iy in 0..=n {
            let q = center
                + Complex::new(
                    half * (2.0 * ix as f64 / n as f64 - 1.0),
                    half * (2.0 * iy as f64 / n as f64 - 1.0),
                );
            let (near, far) = samples.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| {
                let d = (p - q).norm();
                (a.min(d), b.max(d))
            });
            if near > 0.0 {
                scored.push((near / far, q));
            }
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut chosen: Vec<Complex> = Vec::new();
    for (_, q) in scored {
        if chosen.iter().all(|c| (c - q).norm() > half / 4.0) {
            chosen.push(q);
        }
        if chosen.len() == count {
            break;
        }
    }
    let one = Complex::new(1.0, 0.0);
    chosen
        .into_iter()
        .filter_map(|q| Moebius::new(Complex::new(0.0, 0.0), one, one, -q).ok())
        .collect()
}

/// Pulls frame circles back to the original frame; `None` if a disk would
/// contain the frame's image of infinity.
fn pull_back(circles: &[Circle], frame: &Moebius) -> Option<Vec<Circle>> {
    let inv = frame.inverse();
    let pole = frame.apply(Point::Infinity);
    circles
        .iter()
        .map(|c| {
            if let Point::Finite(z) = pole {
                if c.contains(z, 0.0) {
                    return None;
                }
            }
            c.image(&inv)
        })
        .collect()
}

/// Searches Nielsen-equivalent generating sets for a classical pairing.
pub fn search_classical_generators(
    group: &SchottkyGroup,
    options: SearchOptions,
) -> Result<SearchOutcome, ClassicalityError> {
    for (i, f) in group.generators().iter().enumerate() {
        if !f.is_loxodromic() {
            return Err(ClassicalityError::NonLoxodromic(i + 1));
        }
    }
    let rank = group.rank();
    let original = group.generators().to_vec();

    // A pairing that already verifies wins outright.
    if let Some(p) = group.pairing() {
        if let Ok(certificate) = verify_classical_domain(&original, p) {
            return Ok(SearchOutcome::Certified {
                certificate,
                depth: 0,
                visited: 0,
                frame: 0,
            });
        }
    }

    let mut frames = vec![Moebius::IDENTITY];
    frames.extend(candidate_frames(group, options.extra_frames));
    let per_frame = (options.budget / frames.len()).max(1);
    let move_set = moves(rank);
    let mut visited = 0usize;
    let mut best_cost = f64::INFINITY;

    for (frame_index, frame) in frames.iter().enumerate() {
        let start: Vec<Moebius> = original.iter().map(|f| f.conjugate_by(frame)).collect();
        let Ok(frame_group) = SchottkyGroup::new(start.clone()) else {
            continue;
        };
        let mut arena = vec![Node {
            gens: start,
            words: (0..rank).map(|i| Word::new(vec![i])).collect(),
            depth: 0,
            score: f64::INFINITY,
            refined: true,
        }];
        // Disks must stay clear of the original point at infinity.
        let avoid = frame.apply(Point::Infinity).finite();
        let mut seen = HashSet::new();
        seen.insert(state_key(&arena[0].gens));
        let mut heap = BinaryHeap::new();
        let mut counter = 0u64;
        arena[0].score = fit_circles(&arena[0].gens, avoid).map_or(f64::INFINITY, |c| c.score);
        heap.push((Priority(arena[0].score, counter), 0usize));
        let mut expanded = 0usize;

        while let Some((_, idx)) = heap.pop() {
            // Children are queued on their pole score; the costlier
            // refinement runs once, when a node first reaches the front.
            if !arena[idx].refined {
                arena[idx].refined = true;
                if arena[idx].score >= 0.0 {
                    let start = seed_circles(&arena[idx].gens, avoid).expect("queued nodes have seed circles");
                    arena[idx].score = refine(&arena[idx].gens, start, avoid).score;
                    counter += 1;
                    let priority = arena[idx].score + DEPTH_PENALTY * arena[idx].depth as f64;
                    heap.push((Priority(priority, counter), idx));
                    continue;
                }
            }
            let cost = arena[idx].score;
            best_cost = best_cost.min(cost);
            if cost < 0.0 {
                let node = &arena[idx];
                if let Some(certificate) = certify(group, &node.words, frame) {
                    return Ok(SearchOutcome::Certified {
                        certificate,
                        depth: node.depth,
                        visited: visited + expanded,
                        frame: frame_index,
                    });
                }
            }
            if expanded >= per_frame {
                break;
            }
            expanded += 1;
            for mv in &move_set {
                let mut gens = arena[idx].gens.clone();
                let mut words = arena[idx].words.clone();
                mv.apply(&mut gens, &mut words);
                // Products are re-evaluated from words: chaining compositions
                // along the path lets cancellation errors compound.
                let Some(gens) = words
                    .iter()
                    .map(|w| frame_group.word_to_map(w).ok())
                    .collect::<Option<Vec<Moebius>>>()
                else {
                    continue;
                };
                if !gens.iter().all(Moebius::is_loxodromic) {
                    continue;
                }
                if !seen.insert(state_key(&gens)) {
                    continue;
                }
                let Some(candidate) = seed_circles(&gens, avoid).filter(|c| c.score.is_finite()) else {
                    continue;
                };
                counter += 1;
                let depth = arena[idx].depth + 1;
                arena.push(Node {
                    gens,
                    words,
                    depth,
                    score: candidate.score,
                    refined: false,
                });
                let priority = candidate.score + DEPTH_PENALTY * depth as f64;
                heap.push((Priority(priority, counter), arena.len() - 1));
            }
        }
        visited += expanded;
    }
    Ok(SearchOutcome::Exhausted(FailureReport {
        best_cost,
        visited,
        budget: options.budget,
        frames_tried: frames.len(),
    }))
}

// Generators are re-evaluated from their words so the certificate does not
// inherit round-off accumulated along the search path.
fn certify(group: &SchottkyGroup, words: &[Word], frame: &Moebius) -> Option<ClassicalCertificate> {
    let generators = words
        .iter()
        .map(|w| group.word_to_map(w).ok())
        .collect::<Option<Vec<Moebius>>>()?;
    let in_frame: Vec<Moebius> = generators.iter().map(|f| f.conjugate_by(frame)).collect();
    let candidate = fit_circles(&in_frame, frame.apply(Point::Infinity).finite())?;
    if candidate.score >= 0.0 {
        return None;
    }
    let circles = pull_back(&candidate.circles, frame)?;
    let pairing = CirclePairing { circles };
    let mut certificate = verify_classical_domain(&generators, &pairing).ok()?;
    certificate.witness_words = words.iter().map(Word::one_based).collect();
    Some(certificate)
}

/// Checks a certificate's witness words against the original generators,
/// entrywise up to sign with tolerance relative to the largest entry.
pub fn witnesses_match(group: &SchottkyGroup, certificate: &ClassicalCertificate, tol: f64) -> bool {
    let words = certificate.witness();
    words.len() == certificate.generators.len()
        && words.iter().zip(&certificate.generators).all(|(w, f)| {
            w.is_reduced(group.rank())
                && group
                    .word_to_map(w)
                    .map(|m| {
                        let scale = m.to_rows().iter().map(|[re, im]| re.hypot(*im)).fold(1.0, f64::max);
                        m.projective_eq(f, tol * scale)
                    })
                    .unwrap_or(false)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn already_classical_is_depth_zero() {
        let group = fixtures::four_circle_group();
        match search_classical_generators(&group, SearchOptions::default()).unwrap() {
            SearchOutcome::Certified { depth, .. } => assert_eq!(depth, 0),
            other => panic!("{other:?}"),
        }
        let bare = group.without_pairing();
        match search_classical_generators(&bare, SearchOptions::default()).unwrap() {
            SearchOutcome::Certified { depth, certificate, .. } => {
                assert_eq!(depth, 0);
                // The isometric circles already give this margin.
                assert!(certificate.margin >= 3.0 * 2f64.sqrt() - 2.0 - 1e-6, "{}", certificate.margin);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn weak_loxodromic_needs_apollonius_circles() {
        let k = Complex::from_polar(0.64, 1.0);
        let f = Moebius::from_fixed_points(Complex::new(1.0, 0.5), Complex::new(-1.0, 0.0), k).unwrap();
        assert!(pole_circles(&[f], None).unwrap().score > 0.0);
        let apollo = apollonius_circles(&[f], None).unwrap();
        assert!(apollo.score < 0.0);
        let group = SchottkyGroup::new(vec![f]).unwrap();
        let outcome = search_classical_generators(&group, SearchOptions::default()).unwrap();
        assert!(matches!(outcome, SearchOutcome::Certified { depth: 0, .. }));
    }

    #[test]
    fn apollonius_pair_is_mapped_exactly() {
        let f = Moebius::from_fixed_points(Complex::new(0.3, -0.2), Complex::new(2.0, 1.0), Complex::from_polar(0.3, -2.0))
            .unwrap();
        let candidate = apollonius_circles(&[f], None).unwrap();
        let image = candidate.circles[0].image(&f).unwrap();
        assert!((image.center - candidate.circles[1].center).norm() < 1e-9);
        assert!((image.radius - candidate.circles[1].radius).abs() < 1e-9);
    }

    #[test]
    fn cyclic_group_from_isometric_circles() {
        let group = fixtures::cyclic_group().without_pairing();
        let outcome = search_classical_generators(&group, SearchOptions::default()).unwrap();
        assert!(outcome.certificate().is_some());
    }

    #[test]
    fn scrambled_four_circle_group_is_recovered() {
        let base = fixtures::four_circle_group();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let moves: Vec<NielsenMove> = (0..3).map(|_| NielsenMove::random(&mut rng, 2)).collect();
            let (gens, _) = nielsen_scramble(base.generators(), &moves);
            let h = Moebius::new(
                Complex::new(1.0, 0.2),
                Complex::new(0.5, -0.3),
                Complex::new(0.03, 0.02),
                Complex::new(1.0, 0.0),
            )
            .unwrap();
            let gens: Vec<Moebius> = gens.iter().map(|f| f.conjugate_by(&h)).collect();
            let group = SchottkyGroup::new(gens).unwrap();
            let outcome = search_classical_generators(
                &group,
                SearchOptions {
                    budget: 10_000,
                    ..SearchOptions::default()
                },
            )
            .unwrap();
            let cert = outcome.certificate().unwrap_or_else(|| panic!("{moves:?}: {outcome:?}"));
            assert!(cert.margin > 0.0);
            assert!(witnesses_match(&group, cert, 1e-8));
        }
    }
}
