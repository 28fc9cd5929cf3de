//! Acceptance suite. Each criterion runs in sequence, prints one PASS/FAIL
//! line (written straight to stdout so it survives output capture), and the
//! test fails at the end if any criterion did.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use schottky_lab::classicality::{
    classify_domain_sequence, deform_toward_classical, nielsen_scramble, search_classical_generators,
    verify_classical_domain, witnesses_match, DeformOptions, DomainEntry, DomainSequence, NielsenMove,
    SearchOptions, SearchOutcome, SingularityKind,
};
use schottky_lab::cli::config::DEFAULT_SEED;
use schottky_lab::cli::theorem::{theorem_check, TheoremCheckOptions};
use schottky_lab::curves::{
    build_quasicircle, classify_quasicircle, default_generating_curve, frechet_distance, is_invariant,
    is_simple, FrechetOptions, PolyCurve,
};
use schottky_lab::dimension::{
    box_dimension, exponent_of_convergence, rectifiability_proxy, transfer_dimension, Method, Rectifiability,
};
use schottky_lab::fixtures;
use schottky_lab::moebius::{Complex, Moebius};
use schottky_lab::schottky::{Circle, SchottkyGroup};

// Tolerances and limits.
const DERIVATIVE_REL_TOL: f64 = 1e-6;
const ASSOCIATIVITY_TOL: f64 = 1e-12;
const CYCLIC_DIM_MAX: f64 = 0.05;
const ESTIMATOR_AGREEMENT: f64 = 0.1;
const LENGTH_RATIO_MAX: f64 = 0.9;
const SMALL_DIMENSION: f64 = 0.9;
const LARGE_DIMENSION: f64 = 1.1;
const INVARIANCE_FACTOR: f64 = 2.0;
const METRIC_TOL: f64 = 1e-9;
const CONCENTRIC_TOL: f64 = 0.01;
const SEARCH_BUDGET: usize = 100_000;
const MAX_SCRAMBLES: usize = 3;
const MONOTONICITY_SLACK: f64 = 0.02;
const THEOREM_SAMPLES: usize = 25;
const THEOREM_THRESHOLD: f64 = 0.85;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    check(took < limit, format!("took {took:.2?}, limit {limit:?}"))
}

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn random_complex(rng: &mut ChaCha8Rng, r: f64) -> Complex {
    c(rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_map(rng: &mut ChaCha8Rng) -> Moebius {
    loop {
        let e: Vec<Complex> = (0..4).map(|_| random_complex(rng, 3.0)).collect();
        if (e[0] * e[3] - e[1] * e[2]).norm() > 0.1 {
            if let Ok(f) = Moebius::new(e[0], e[1], e[2], e[3]) {
                return f;
            }
        }
    }
}

fn entry_scale(f: &Moebius) -> f64 {
    f.to_rows().iter().map(|[re, im]| re.hypot(*im)).fold(1.0, f64::max)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_chain, mut worst_fd, mut worst_assoc) = (0.0f64, 0.0f64, 0.0f64);
    let mut pairs = 0;
    while pairs < 1000 {
        let (f, g, h) = (random_map(&mut rng), random_map(&mut rng), random_map(&mut rng));
        let z = random_complex(&mut rng, 4.0);
        // Stay away from poles where the derivative is unbounded.
        if (g.c * z + g.d).norm() < 0.05 {
            continue;
        }
        let gz = g.apply_finite(z).unwrap();
        if (f.c * gz + f.d).norm() < 0.05 || (f.c * z + f.d).norm() < 0.05 {
            continue;
        }
        pairs += 1;

        let direct = f.compose(&g).derivative_modulus(z).unwrap();
        let chained = f.derivative_modulus(gz).unwrap() * g.derivative_modulus(z).unwrap();
        worst_chain = worst_chain.max((direct - chained).abs() / direct.max(chained));

        // Central difference; |f'(z)| is the modulus of the complex derivative.
        let step = 1e-5 * (1.0 + z.norm());
        let fd = (f.apply_finite(z + step).unwrap() - f.apply_finite(z - step).unwrap()) / (2.0 * step);
        let exact = f.derivative_modulus(z).unwrap();
        worst_fd = worst_fd.max((fd.norm() - exact).abs() / exact);

        let left = f.compose(&g).compose(&h);
        let right = f.compose(&g.compose(&h));
        let diff = left
            .to_rows()
            .iter()
            .zip(right.to_rows().iter())
            .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
            .fold(0.0, f64::max);
        worst_assoc = worst_assoc.max(diff / entry_scale(&left));
    }
    check(worst_chain <= DERIVATIVE_REL_TOL, format!("chain rule error {worst_chain:.2e}"))?;
    check(worst_fd <= DERIVATIVE_REL_TOL, format!("finite difference error {worst_fd:.2e}"))?;
    check(worst_assoc <= ASSOCIATIVITY_TOL, format!("associativity error {worst_assoc:.2e}"))?;
    within(Duration::from_secs(1), start)?;
    Ok(format!(
        "1000 pairs: chain {worst_chain:.1e}, fd {worst_fd:.1e}, assoc {worst_assoc:.1e} in {:.2?}",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let group = fixtures::cyclic_group();
    let depth = 8;
    let values = [
        exponent_of_convergence(&group, depth).map_err(|e| e.to_string())?.value,
        transfer_dimension(&group, depth).map_err(|e| e.to_string())?.value,
        box_dimension(&group, depth).map_err(|e| e.to_string())?.value,
    ];
    for (name, v) in ["exponent", "transfer", "boxcount"].iter().zip(values) {
        check(v <= CYCLIC_DIM_MAX, format!("{name} = {v}"))?;
    }
    within(Duration::from_secs(1), start)?;
    Ok(format!("exponent/transfer/boxcount = {values:.4?} at depth {depth}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let group = fixtures::four_circle_group();
    let mut report = Vec::new();
    for depth in [6, 7] {
        let values = [
            exponent_of_convergence(&group, depth).map_err(|e| e.to_string())?.value,
            transfer_dimension(&group, depth).map_err(|e| e.to_string())?.value,
            box_dimension(&group, depth).map_err(|e| e.to_string())?.value,
        ];
        for i in 0..3 {
            check(values[i] < 1.0, format!("depth {depth}: estimate {} = {}", i, values[i]))?;
            for j in i + 1..3 {
                check(
                    (values[i] - values[j]).abs() <= ESTIMATOR_AGREEMENT,
                    format!("depth {depth}: {values:?} disagree"),
                )?;
            }
        }
        report.push(format!("d{depth} {values:.3?}"));
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!("exponent/transfer/boxcount {}", report.join(", ")))
}

// Regular dodecahedron's face circles on the sphere, pulled into the plane by
// stereographic projection and paired antipodally. Nearly tangent circles
// covering most of the sphere give a limit set of dimension above one.
type V3 = [f64; 3];

fn normalize(v: V3) -> V3 {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn rotate(p: V3, axis: V3, angle: f64) -> V3 {
    let (cs, sn) = (angle.cos(), angle.sin());
    let kxp = cross(axis, p);
    let kdp = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
    std::array::from_fn(|j| p[j] * cs + kxp[j] * sn + axis[j] * kdp * (1.0 - cs))
}

fn stereographic(p: V3) -> Complex {
    c(p[0] / (1.0 - p[2]), p[1] / (1.0 - p[2]))
}

/// Boundary of the spherical cap about `n` of angular radius `alpha`.
fn cap_circle(n: V3, alpha: f64) -> Circle {
    let helper = if n[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let u = normalize(cross(n, helper));
    let v = cross(n, u);
    let pts: Vec<Complex> = (0..3)
        .map(|k| {
            let t = k as f64 * TAU / 3.0;
            stereographic(std::array::from_fn(|j| {
                n[j] * alpha.cos() + (u[j] * t.cos() + v[j] * t.sin()) * alpha.sin()
            }))
        })
        .collect();
    Circle::through(pts[0], pts[1], pts[2]).expect("cap boundary is a circle")
}

fn near_tangent_dodecahedral_group() -> SchottkyGroup {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let half: Vec<V3> = [[0.0, 1.0, phi], [0.0, 1.0, -phi], [1.0, phi, 0.0], [-1.0, phi, 0.0], [phi, 0.0, 1.0], [-phi, 0.0, 1.0]]
        .into_iter()
        .map(normalize)
        .collect();
    let mut normals = half.clone();
    normals.extend(half.iter().map(|v| [-v[0], -v[1], -v[2]]));
    // Tilt so that no cap contains the north pole.
    let axis = normalize([0.3, -0.7, 0.5]);
    let normals: Vec<V3> = normals.iter().map(|&n| rotate(n, axis, 0.471)).collect();
    // Adjacent face normals are arccos(1/√5) apart; caps of half that touch.
    let tangent = 0.5 * (1.0 / 5f64.sqrt()).acos();
    let alpha = tangent - 0.05f64.to_radians();
    let circles = normals.iter().map(|&n| cap_circle(n, alpha)).collect();
    let rotation = Complex::from_polar(1.0, 1.5 * PI);
    SchottkyGroup::from_circles(circles, &[rotation; 6]).expect("disjoint caps")
}

/// A classical pairing for the group. A group whose limit set contains
/// infinity has no bounded circles, so it is first conjugated by
/// `z ↦ (z - 1)/(z + 1)`; dimension and rectifiability are unchanged.
fn with_pairing(group: SchottkyGroup) -> Result<SchottkyGroup, String> {
    if group.pairing().is_some() {
        return Ok(group);
    }
    let fixes_infinity = group.generators().iter().any(|f| f.c.norm() < 1e-12);
    let group = if fixes_infinity {
        group.conjugated(&Moebius::real(1.0, -1.0, 1.0, 1.0).map_err(|e| e.to_string())?)
    } else {
        group
    };
    match search_classical_generators(&group, SearchOptions::default()).map_err(|e| e.to_string())? {
        SearchOutcome::Certified { certificate, .. } => {
            SchottkyGroup::with_pairing(certificate.generators, certificate.circles).map_err(|e| e.to_string())
        }
        SearchOutcome::Exhausted(r) => Err(format!("no pairing found: {r:?}")),
    }
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let candidates = [
        ("cyclic", fixtures::cyclic_group()),
        ("diagonal-cyclic", fixtures::diagonal_cyclic_group()),
        ("four-circle", fixtures::four_circle_group()),
        ("near-touching", fixtures::near_touching_four_circle_group()),
    ];
    let mut summary = Vec::new();
    for (name, group) in candidates {
        let dim = exponent_of_convergence(&group, 8).map_err(|e| format!("{name}: {e}"))?.value;
        if dim >= SMALL_DIMENSION {
            continue;
        }
        let group = with_pairing(group).map_err(|e| format!("{name}: {e}"))?;
        let zeta = default_generating_curve(&group).map_err(|e| format!("{name}: {e}"))?;
        let lengths = (2..=7)
            .map(|k| build_quasicircle(&group, &zeta, k).map(|q| q.length()))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| format!("{name}: {e}"))?;
        let increments: Vec<f64> = lengths.windows(2).map(|w| w[1] - w[0]).collect();
        let worst = increments.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
        check(
            increments.iter().all(|d| *d > 0.0) && worst < LENGTH_RATIO_MAX,
            format!("{name}: length increments {increments:?}"),
        )?;
        let proxy = rectifiability_proxy(&group, 8).map_err(|e| e.to_string())?;
        check(proxy == Rectifiability::ConvergesLikely, format!("{name}: proxy {proxy:?}"))?;
        summary.push(format!("{name} dim {dim:.3} ratio {worst:.3}"));
    }
    check(summary.len() == 4, format!("only {} fixtures below {SMALL_DIMENSION}", summary.len()))?;

    let wide = near_tangent_dodecahedral_group();
    let dim = exponent_of_convergence(&wide, 6).map_err(|e| e.to_string())?.value;
    check(dim > LARGE_DIMENSION, format!("near-tangent exponent {dim}"))?;
    let proxy = rectifiability_proxy(&wide, 6).map_err(|e| e.to_string())?;
    check(proxy == Rectifiability::DivergesLikely, format!("near-tangent proxy {proxy:?}"))?;
    within(Duration::from_secs(60), start)?;
    Ok(format!("{}; near-tangent rank 6 dim {dim:.3} diverges", summary.join(", ")))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let group = fixtures::four_circle_group();
    let zeta = default_generating_curve(&group).map_err(|e| e.to_string())?;
    let curve = build_quasicircle(&group, &zeta, 6).map_err(|e| e.to_string())?;
    check(is_simple(&curve), "not simple")?;
    let tol = INVARIANCE_FACTOR * group.max_cover_radius(6).map_err(|e| e.to_string())?;
    check(is_invariant(&group, &curve, tol), format!("not invariant at tol {tol:.3e}"))?;
    let flags = classify_quasicircle(&group, &curve, group.pairing().unwrap());
    check(flags.transverse, "not transverse")?;
    check(!flags.parallel, "parallel")?;
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "{} pieces, simple, invariant at tol {tol:.2e}, transverse, not parallel",
        curve.pieces().len()
    ))
}

fn random_polygon(rng: &mut ChaCha8Rng) -> PolyCurve {
    loop {
        let n = rng.gen_range(3..8);
        let pts: Vec<Complex> = (0..n).map(|_| random_complex(rng, 5.0)).collect();
        let distinct = (0..n).all(|i| (pts[i] - pts[(i + 1) % n]).norm() > 1e-3);
        if distinct {
            if let Ok(p) = PolyCurve::polygon(&pts) {
                return p;
            }
        }
    }
}

/// Dense-sample oracle for two circles sampled from angle 0 in the same
/// direction: plain discrete Fréchet dynamic program plus the length term.
fn dense_circle_oracle(a: &Circle, b: &Circle, samples: usize) -> f64 {
    let pa: Vec<Complex> = (0..=samples).map(|k| a.point_at(TAU * k as f64 / samples as f64)).collect();
    let pb: Vec<Complex> = (0..=samples).map(|k| b.point_at(TAU * k as f64 / samples as f64)).collect();
    let m = pb.len();
    let mut prev = vec![f64::INFINITY; m];
    for (i, p) in pa.iter().enumerate() {
        let mut cur = vec![f64::INFINITY; m];
        for j in 0..m {
            let d = (p - pb[j]).norm();
            let reach = match (i, j) {
                (0, 0) => 0.0,
                (0, _) => cur[j - 1],
                (_, 0) => prev[0],
                _ => prev[j].min(prev[j - 1]).min(cur[j - 1]),
            };
            cur[j] = d.max(reach);
        }
        prev = cur;
    }
    prev[m - 1] + TAU * (a.radius - b.radius).abs()
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let opts = FrechetOptions::default();
    let d = |x: &PolyCurve, y: &PolyCurve| frechet_distance(x, y, opts);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (a, b, cc) = (random_polygon(&mut rng), random_polygon(&mut rng), random_polygon(&mut rng));
        let (ab, ba, bc, ac) = (d(&a, &b), d(&b, &a), d(&b, &cc), d(&a, &cc));
        worst = worst.max(d(&a, &a).abs());
        worst = worst.max((ab - ba).abs());
        worst = worst.max(-ab);
        worst = worst.max(ac - ab - bc);
    }
    check(worst <= METRIC_TOL, format!("metric axiom violated by {worst:.2e}"))?;

    let (inner, outer) = (
        Circle::new(c(0.0, 0.0), 1.0).unwrap(),
        Circle::new(c(0.0, 0.0), 2.0).unwrap(),
    );
    let value = frechet_distance(
        &PolyCurve::circle(&inner),
        &PolyCurve::circle(&outer),
        FrechetOptions {
            resolution: Some(0.05),
            length_term: true,
        },
    );
    let oracle = dense_circle_oracle(&inner, &outer, 2000);
    check((value - oracle).abs() <= CONCENTRIC_TOL, format!("concentric {value} vs oracle {oracle}"))?;
    check((value - (1.0 + TAU)).abs() <= CONCENTRIC_TOL, format!("concentric {value} vs 1 + 2π"))?;
    within(Duration::from_secs(10), start)?;
    Ok(format!(
        "axioms within {worst:.1e}; concentric {value:.5} (oracle {oracle:.5}, 1+2π = {:.5})",
        1.0 + TAU
    ))
}

fn random_disjoint_circles(rng: &mut ChaCha8Rng, n: usize) -> Vec<Circle> {
    loop {
        let cs: Vec<Circle> = (0..n)
            .map(|_| Circle::new(random_complex(rng, 4.0), rng.gen_range(0.3..1.5)).unwrap())
            .collect();
        if (0..n).all(|i| (i + 1..n).all(|j| cs[i].gap(&cs[j]) > 0.1)) {
            return cs;
        }
    }
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut deepest = 0;
    let mut most_visited = 0;
    for case in 0..20 {
        let rank = if case % 4 == 3 { 3 } else { 2 };
        let circles = random_disjoint_circles(&mut rng, 2 * rank);
        let rotations: Vec<Complex> = (0..rank).map(|_| Complex::from_polar(1.0, rng.gen_range(0.0..TAU))).collect();
        let group = SchottkyGroup::from_circles(circles, &rotations).map_err(|e| format!("case {case}: {e}"))?;
        verify_classical_domain(group.generators(), group.pairing().unwrap())
            .map_err(|e| format!("case {case}: constructed pairing rejected: {e}"))?;

        let moves: Vec<NielsenMove> = (0..MAX_SCRAMBLES).map(|_| NielsenMove::random(&mut rng, rank)).collect();
        let (scrambled, _) = nielsen_scramble(group.generators(), &moves);
        let h = Moebius::new(c(1.0, 0.0), random_complex(&mut rng, 1.0), random_complex(&mut rng, 0.3), c(1.0, 0.0))
            .map_err(|e| e.to_string())?;
        let target = SchottkyGroup::new(scrambled).map_err(|e| e.to_string())?.conjugated(&h);
        let outcome = search_classical_generators(
            &target,
            SearchOptions {
                budget: SEARCH_BUDGET,
                ..SearchOptions::default()
            },
        )
        .map_err(|e| format!("case {case}: {e}"))?;
        match outcome {
            SearchOutcome::Certified {
                certificate,
                depth,
                visited,
                ..
            } => {
                check(
                    witnesses_match(&target, &certificate, 1e-6),
                    format!("case {case}: witness words do not reproduce the generators"),
                )?;
                deepest = deepest.max(depth);
                most_visited = most_visited.max(visited);
            }
            SearchOutcome::Exhausted(r) => {
                return Err(format!("case {case} (rank {rank}, moves {moves:?}): {r:?}"));
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "20/20 recovered, deepest {deepest} moves, at most {most_visited} nodes, {:.2?}",
        start.elapsed()
    ))
}

fn disk(re: f64, im: f64, r: f64) -> DomainEntry {
    DomainEntry::Circle(Circle::new(c(re, im), r).unwrap())
}

fn sequence(n: usize, step: impl Fn(f64) -> Vec<DomainEntry>) -> DomainSequence {
    DomainSequence {
        steps: (1..=n).map(|k| step(k as f64)).collect(),
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let tangency = sequence(12, |n| vec![disk(0.0, 0.0, 1.0), disk(2.0 + 1.0 / n, 0.0, 1.0), disk(0.0, 5.0, 1.0)]);
    let degeneration = sequence(12, |n| vec![disk(0.0, 0.0, 0.5f64.powf(n)), disk(4.0, 0.0, 1.0)]);
    // Two circles about the origin close in on the unit circle while the
    // circles squeezed between them shrink.
    let collapse = sequence(12, |n| {
        let w = 0.5 / n;
        vec![
            disk(0.0, 0.0, 1.0 - w),
            disk(1.0, 0.0, 0.4 * w),
            disk(0.0, 1.0, 0.4 * w),
            disk(-1.0, 0.0, 0.4 * w),
            disk(0.0, -1.0, 0.4 * w),
            disk(0.0, 0.0, 1.0 + w),
        ]
    });
    let constant = sequence(6, |_| vec![disk(-3.0, 0.0, 1.0), disk(3.0, 0.0, 1.0)]);

    let label = |seq: &DomainSequence| classify_domain_sequence(seq).map(|r| r.kind).map_err(|e| e.to_string());
    match label(&tangency)? {
        SingularityKind::Tangency { pair: (0, 1), point } if (point - c(1.0, 0.0)).norm() < 1e-6 => {}
        other => return Err(format!("tangency labelled {other:?}")),
    }
    match label(&degeneration)? {
        SingularityKind::Degeneration { index: 0, .. } => {}
        other => return Err(format!("degeneration labelled {other:?}")),
    }
    match label(&collapse)? {
        SingularityKind::Collapsing { pair: (0, 5), .. } => {}
        other => return Err(format!("collapse labelled {other:?}")),
    }
    let none = label(&constant)?;
    check(none == SingularityKind::None, format!("constant sequence labelled {none:?}"))?;
    within(Duration::from_secs(1), start)?;
    Ok("tangency, degeneration, concentric collapse and a constant sequence labelled correctly".into())
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let group = fixtures::near_touching_four_circle_group();
    let options = DeformOptions {
        steps: 20,
        stop_on_certificate: false,
        ..DeformOptions::default()
    };
    let trace = deform_toward_classical(&group, &options).map_err(|e| e.to_string())?;
    check(trace.steps.len() == 21, format!("{} steps recorded", trace.steps.len()))?;
    let rise = trace.max_increase();
    check(rise <= MONOTONICITY_SLACK, format!("dimension rose by {rise}"))?;
    let last = trace.steps.last().unwrap();
    check(last.certified && trace.certificate.is_some(), "final step not certified")?;
    within(Duration::from_secs(120), start)?;
    Ok(format!(
        "dimension {:.4} -> {:.4}, largest rise {rise:.4}, certified",
        trace.steps[0].estimate.value, last.estimate.value
    ))
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let report = theorem_check(TheoremCheckOptions {
        samples: THEOREM_SAMPLES,
        threshold: THEOREM_THRESHOLD,
        budget: SEARCH_BUDGET,
        seed: DEFAULT_SEED,
        method: Method::Exponent,
        depth: 10,
    });
    check(report.kept == THEOREM_SAMPLES, format!("only {} groups below the threshold", report.kept))?;
    if !report.all_certified() {
        let failures: Vec<String> = report
            .failures
            .iter()
            .map(|&i| serde_json::to_string(&report.records[i]).unwrap())
            .collect();
        return Err(format!("{} failures:\n{}", failures.len(), failures.join("\n")));
    }
    within(Duration::from_secs(600), start)?;
    Ok(format!(
        "{}/{} certified from {} draws, at most {} nodes",
        report.successes,
        report.kept,
        report.draws,
        report.budgets_used.iter().max().unwrap_or(&0)
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        ("moebius kernel", criterion_1),
        ("cyclic dimension", criterion_2),
        ("estimator consistency", criterion_3),
        ("rectifiability dichotomy", criterion_4),
        ("quasicircle validity", criterion_5),
        ("frechet metric", criterion_6),
        ("classicality round trip", criterion_7),
        ("singularity classifier", criterion_8),
        ("deformation monotonicity", criterion_9),
        ("random groups are classical", criterion_10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let line = match run() {
            Ok(detail) => format!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed.push(i + 1);
                format!("FAIL {:>2} {name}: {reason}", i + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
        out.flush().unwrap();
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
