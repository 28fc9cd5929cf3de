//! Command-line front end: argument parsing, input documents and the text
//! emitters shared by all subcommands.
//!
//! Exit codes: 0 success, 1 input error, 2 numerical non-convergence,
//! 3 search budget exhausted.

pub mod config;
pub mod document;
pub mod emit;
pub mod sampler;
pub mod theorem;

use std::ffi::OsString;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::classicality::{
    classify_domain_sequence, deform_toward_classical, search_classical_generators, ClassicalityError, DeformOptions,
    DomainSequence, SearchOptions, SearchOutcome,
};
use crate::curves::{
    build_quasicircle, classify_quasicircle, default_generating_curve, frechet_distance, is_invariant, is_simple,
    CurveError, FrechetOptions, Piece, PolyCurve,
};
use crate::dimension::{estimate, poincare_partial_sum, DimensionError, Method};
use crate::moebius::Complex;
use crate::schottky::{GroupError, SchottkyGroup};
use config::ExperimentConfig;
use document::GroupDocument;
use emit::Figure;
use theorem::{theorem_check, TheoremCheckOptions};

pub const THREADS_ENV: &str = "SCHOTTKY_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    NonConverged(String),
    #[error("{0}")]
    BudgetExhausted(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::NonConverged(_) => 2,
            CliError::BudgetExhausted(_) => 3,
        }
    }
}

impl From<DimensionError> for CliError {
    fn from(err: DimensionError) -> Self {
        match err {
            DimensionError::DepthTooSmall { .. } | DimensionError::NoPairing => CliError::Input(err.to_string()),
            DimensionError::Group(GroupError::DegenerateImage { .. }) => CliError::NonConverged(err.to_string()),
            DimensionError::Group(_) => CliError::Input(err.to_string()),
            _ => CliError::NonConverged(err.to_string()),
        }
    }
}

impl From<CurveError> for CliError {
    fn from(err: CurveError) -> Self {
        match err {
            CurveError::Group(GroupError::DegenerateImage { .. }) | CurveError::Pole => {
                CliError::NonConverged(err.to_string())
            }
            _ => CliError::Input(err.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "schottky-lab", version, about = "Schottky groups: limit sets, dimension, quasi-circles, classical domains")]
struct Cli {
    /// Word depth (overrides the per-command default).
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Dimension estimator.
    #[arg(long, global = true, value_enum)]
    method: Option<Method>,
    /// Node budget of the classical search.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Seed for random sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Single-threaded run with byte-identical output.
    #[arg(long, global = true)]
    deterministic: bool,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Group file utilities.
    Group {
        #[command(subcommand)]
        action: GroupAction,
    },
    /// Hausdorff dimension estimate as JSON.
    Dim {
        file: PathBuf,
        /// Also write (s, partial sum) samples of the Poincaré series.
        #[arg(long)]
        series_csv: Option<PathBuf>,
    },
    /// Limit-set samples as CSV (re,im,word).
    Limitset { file: PathBuf },
    /// Truncated quasi-circle as CSV, or JSON when --out ends in .json.
    Quasicircle { file: PathBuf },
    /// Fréchet distance (with length term) between two curve JSON files.
    Frechet {
        first: PathBuf,
        second: PathBuf,
        /// Sample spacing along the curves.
        #[arg(long)]
        resolution: Option<f64>,
        /// Drop the |ℓ₁ − ℓ₂| term.
        #[arg(long)]
        no_length_term: bool,
    },
    /// Search for classical generators; writes a certificate or a failure report.
    Classical { file: PathBuf },
    /// Classify a JSON array of domain steps.
    Singularity { file: PathBuf },
    /// Multiplier-inflation path as a CSV trace.
    Deform {
        file: PathBuf,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Sample random rank-2 groups below a dimension threshold and certify them.
    TheoremCheck {
        #[arg(long, default_value_t = 25)]
        samples: usize,
        #[arg(long, default_value_t = 0.85)]
        threshold: f64,
    },
    /// Layered SVG figure.
    Render {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = RenderWhat::All)]
        what: RenderWhat,
    },
}

#[derive(Debug, Subcommand)]
enum GroupAction {
    Validate { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RenderWhat {
    Circles,
    Limitset,
    Quasicircle,
    All,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn env_threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Group { .. } => "group validate",
        Command::Dim { .. } => "dim",
        Command::Limitset { .. } => "limitset",
        Command::Quasicircle { .. } => "quasicircle",
        Command::Frechet { .. } => "frechet",
        Command::Classical { .. } => "classical",
        Command::Singularity { .. } => "singularity",
        Command::Deform { .. } => "deform",
        Command::TheoremCheck { .. } => "theorem-check",
        Command::Render { .. } => "render",
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let mut config = ExperimentConfig {
        command: command_name(&cli.command).to_string(),
        depth: cli.depth,
        deterministic: cli.deterministic,
        out: cli.out.clone(),
        threads: if cli.deterministic { Some(1) } else { env_threads()? },
        ..ExperimentConfig::default()
    };
    if let Some(m) = cli.method {
        config.method = m;
    }
    if let Some(b) = cli.budget {
        config.budget = b;
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command, &config, cli.budget.is_some()))
}

fn dispatch(command: Command, config: &ExperimentConfig, budget_given: bool) -> Result<(), CliError> {
    match command {
        Command::Group {
            action: GroupAction::Validate { file },
        } => cmd_validate(&file, config),
        Command::Dim { file, series_csv } => cmd_dim(&file, series_csv.as_deref(), config),
        Command::Limitset { file } => cmd_limitset(&file, config),
        Command::Quasicircle { file } => cmd_quasicircle(&file, config),
        Command::Frechet {
            first,
            second,
            resolution,
            no_length_term,
        } => cmd_frechet(&first, &second, resolution, !no_length_term, config),
        Command::Classical { file } => cmd_classical(&file, config),
        Command::Singularity { file } => cmd_singularity(&file, config),
        Command::Deform { file, steps } => cmd_deform(&file, steps, config, budget_given),
        Command::TheoremCheck { samples, threshold } => cmd_theorem_check(samples, threshold, config),
        Command::Render { file, what } => cmd_render(&file, what, config),
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_group(path: &Path) -> Result<(GroupDocument, SchottkyGroup), CliError> {
    let text = read_text(path)?;
    let doc = GroupDocument::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let group = doc
        .to_group()
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok((doc, group))
}

fn emit(config: &ExperimentConfig, text: &str) -> Result<(), CliError> {
    match &config.out {
        Some(path) => write_file(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn emit_json(config: &ExperimentConfig, mut body: Value) -> Result<(), CliError> {
    body["config"] = serde_json::to_value(config).expect("config serializes");
    let mut text = serde_json::to_string_pretty(&body).expect("json");
    text.push('\n');
    emit(config, &text)
}

fn cmd_validate(file: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    let (doc, group) = load_group(file)?;
    let multipliers: Vec<f64> = group.generators().iter().map(|f| 1.0 / f.multiplier().norm()).collect();
    emit_json(
        config,
        json!({
            "valid": true,
            "name": doc.name,
            "rank": group.rank(),
            "classical_pairing": group.pairing().is_some(),
            "margin": group.pairing().map(|p| p.margin()),
            "expansion_factors": multipliers,
        }),
    )
}

fn cmd_dim(file: &Path, series_csv: Option<&Path>, config: &ExperimentConfig) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let depth = config.method_depth(config.method);
    let est = estimate(&group, config.method, depth)?;
    if let Some(path) = series_csv {
        let mut csv = emit::csv_header(&config.snapshot());
        csv.push_str("s,partial_sum\n");
        for k in 0..=40 {
            let s = k as f64 * 0.05;
            let t = poincare_partial_sum(&group, s, depth);
            csv.push_str(&format!("{s},{}\n", t.partial_sum));
        }
        write_file(path, &csv)?;
    }
    emit_json(config, serde_json::to_value(est).expect("estimate serializes"))
}

fn cmd_limitset(file: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let samples = group
        .sample_limit_set(config.limit_depth())
        .map_err(|e| CliError::NonConverged(e.to_string()))?;
    emit(config, &emit::limit_set_csv(&config.snapshot(), &samples))
}

/// The group itself when it carries a pairing, otherwise the certified
/// generators found by the search.
fn classical_form(group: &SchottkyGroup, config: &ExperimentConfig) -> Result<SchottkyGroup, CliError> {
    if group.pairing().is_some() {
        return Ok(group.clone());
    }
    let outcome = search_classical_generators(
        group,
        SearchOptions {
            budget: config.budget,
            ..SearchOptions::default()
        },
    )
    .map_err(|e| CliError::Input(e.to_string()))?;
    match outcome {
        SearchOutcome::Certified { certificate, .. } => {
            SchottkyGroup::with_pairing(certificate.generators, certificate.circles)
                .map_err(|e| CliError::NonConverged(e.to_string()))
        }
        SearchOutcome::Exhausted(r) => Err(CliError::BudgetExhausted(format!(
            "no circle pairing given and none found within budget {} (best cost {:.4})",
            r.budget, r.best_cost
        ))),
    }
}

fn quasicircle(group: &SchottkyGroup, config: &ExperimentConfig) -> Result<(SchottkyGroup, PolyCurve), CliError> {
    let classical = classical_form(group, config)?;
    let zeta = default_generating_curve(&classical)?;
    let curve = build_quasicircle(&classical, &zeta, config.curve_depth())?;
    Ok((classical, curve))
}

fn cmd_quasicircle(file: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let (classical, curve) = quasicircle(&group, config)?;
    let depth = config.curve_depth();
    let pairing = classical.pairing().expect("classical form has a pairing");
    let tol = config.tolerances.invariance_factor
        * classical
            .max_cover_radius(depth)
            .map_err(|e| CliError::NonConverged(e.to_string()))?;
    let summary = json!({
        "depth": depth,
        "pieces": curve.pieces().len(),
        "length": curve.length(),
        "simple": is_simple(&curve),
        "invariant": is_invariant(&classical, &curve, tol),
        "invariance_tolerance": tol,
        "flags": classify_quasicircle(&classical, &curve, pairing),
    });
    let as_json = config
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    if as_json {
        let mut body = summary;
        body["curve"] = serde_json::to_value(&curve).expect("curve serializes");
        emit_json(config, body)
    } else {
        let mut text = emit::csv_header(&config.snapshot());
        text.push_str(&format!("# summary: {summary}\n"));
        text.push_str(&curve.to_csv());
        emit(config, &text)
    }
}

#[derive(Deserialize)]
struct CurveFile {
    #[serde(default)]
    pieces: Option<Vec<Piece>>,
    #[serde(default)]
    vertices: Option<Vec<[f64; 2]>>,
}

/// Accepts `{"pieces": [...]}`, `{"vertices": [[x, y], ...]}` or a
/// quasicircle JSON output (curve under `"curve"`).
fn load_curve(path: &Path) -> Result<PolyCurve, CliError> {
    let text = read_text(path)?;
    let bad = |msg: String| CliError::Input(format!("{}: {msg}", path.display()));
    let mut value: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    if let Some(inner) = value.get_mut("curve") {
        value = inner.take();
    }
    let file: CurveFile = serde_json::from_value(value).map_err(|e| bad(e.to_string()))?;
    match (file.pieces, file.vertices) {
        (Some(pieces), _) => PolyCurve::new(pieces).map_err(|e| bad(format!("field `pieces`: {e}"))),
        (None, Some(vertices)) => {
            let pts: Vec<Complex> = vertices.iter().map(|[x, y]| Complex::new(*x, *y)).collect();
            PolyCurve::polygon(&pts).map_err(|e| bad(format!("field `vertices`: {e}")))
        }
        (None, None) => Err(bad("expected field `pieces` or `vertices`".into())),
    }
}

fn cmd_frechet(
    first: &Path,
    second: &Path,
    resolution: Option<f64>,
    length_term: bool,
    config: &ExperimentConfig,
) -> Result<(), CliError> {
    let a = load_curve(first)?;
    let b = load_curve(second)?;
    let resolution = resolution.unwrap_or(config.tolerances.frechet_resolution);
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(CliError::Input(format!("resolution must be positive, got {resolution}")));
    }
    let options = FrechetOptions {
        resolution: Some(resolution),
        length_term: false,
    };
    let sup = frechet_distance(&a, &b, options);
    let gap = (a.length() - b.length()).abs();
    emit_json(
        config,
        json!({
            "distance": if length_term { sup + gap } else { sup },
            "sup_term": sup,
            "length_term": length_term.then_some(gap),
            "lengths": [a.length(), b.length()],
            "resolution": resolution,
        }),
    )
}

fn cmd_classical(file: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let options = SearchOptions {
        budget: config.budget,
        ..SearchOptions::default()
    };
    let outcome = search_classical_generators(&group, options).map_err(|e| match e {
        ClassicalityError::NonLoxodromic(_) => CliError::Input(e.to_string()),
        other => CliError::NonConverged(other.to_string()),
    })?;
    match outcome {
        SearchOutcome::Certified {
            certificate,
            depth,
            visited,
            frame,
        } => emit_json(
            config,
            json!({
                "status": "certified",
                "certificate": certificate,
                "nielsen_depth": depth,
                "visited": visited,
                "frame": frame,
            }),
        ),
        SearchOutcome::Exhausted(report) => {
            emit_json(config, json!({ "status": "budget_exhausted", "report": report }))?;
            Err(CliError::BudgetExhausted(format!(
                "no classical generators found within budget {}",
                report.budget
            )))
        }
    }
}

fn cmd_singularity(file: &Path, config: &ExperimentConfig) -> Result<(), CliError> {
    let text = read_text(file)?;
    let seq: DomainSequence = serde_json::from_str(&text).map_err(|e| {
        CliError::Input(format!(
            "{}: line {}, column {}: {e}",
            file.display(),
            e.line(),
            e.column()
        ))
    })?;
    let report = classify_domain_sequence(&seq).map_err(|e| CliError::Input(e.to_string()))?;
    emit_json(config, json!({ "report": report }))
}

fn cmd_deform(file: &Path, steps: usize, config: &ExperimentConfig, budget_given: bool) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let mut options = DeformOptions {
        steps,
        method: config.method,
        ..DeformOptions::default()
    };
    if let Some(d) = config.depth {
        options.depth = d;
    }
    if budget_given {
        options.search.budget = config.budget;
    }
    let trace = deform_toward_classical(&group, &options)?;
    let mut effective = config.clone();
    effective.budget = options.search.budget;
    let mut csv = emit::csv_header(&effective.snapshot());
    if let Some(w) = &trace.warning {
        csv.push_str(&format!("# warning: {w}\n"));
    }
    csv.push_str("step,multipliers,dimension,certified\n");
    for s in &trace.steps {
        let mult: Vec<String> = s.multipliers.iter().map(f64::to_string).collect();
        csv.push_str(&format!("{},{},{},{}\n", s.step, mult.join(";"), s.estimate.value, s.certified));
    }
    emit(config, &csv)?;
    if trace.certificate.is_none() {
        return Err(CliError::BudgetExhausted(format!(
            "no certificate after {} steps",
            trace.steps.len()
        )));
    }
    Ok(())
}

fn cmd_theorem_check(samples: usize, threshold: f64, config: &ExperimentConfig) -> Result<(), CliError> {
    if samples == 0 {
        return Err(CliError::Input("samples must be at least 1".into()));
    }
    if !threshold.is_finite() {
        return Err(CliError::Input("threshold must be finite".into()));
    }
    let report = theorem_check(TheoremCheckOptions {
        samples,
        threshold,
        budget: config.budget,
        seed: config.seed,
        method: config.method,
        depth: config.method_depth(config.method),
    });
    let failed = report.failures.len();
    emit_json(config, serde_json::to_value(&report).expect("report serializes"))?;
    if failed > 0 {
        return Err(CliError::BudgetExhausted(format!(
            "{failed} of {} groups not certified within budget",
            report.kept
        )));
    }
    Ok(())
}

fn cmd_render(file: &Path, what: RenderWhat, config: &ExperimentConfig) -> Result<(), CliError> {
    let (_, group) = load_group(file)?;
    let wants = |w: RenderWhat| what == w || what == RenderWhat::All;
    let mut depth = config.limit_depth();
    let (circles, points, curve) = {
        let mut circles = Vec::new();
        let mut points = Vec::new();
        let mut curve = None;
        let mut classical = None;
        if wants(RenderWhat::Quasicircle) {
            let (g, c) = quasicircle(&group, config)?;
            depth = config.curve_depth();
            curve = Some(c);
            classical = Some(g);
        }
        if wants(RenderWhat::Circles) {
            let source = classical.as_ref().unwrap_or(&group);
            if let Some(p) = source.pairing() {
                circles = p.circles.clone();
            }
        }
        if wants(RenderWhat::Limitset) {
            points = group
                .sample_limit_set(config.limit_depth())
                .map_err(|e| CliError::NonConverged(e.to_string()))?
                .into_iter()
                .map(|s| s.point)
                .collect();
        }
        (circles, points, curve)
    };
    let header = format!(
        "{} {} seed={} depth={} config: {}",
        config.tool,
        config.version,
        config.seed,
        depth,
        config.snapshot()
    );
    let svg = emit::render_svg(
        &header,
        &Figure {
            circles: &circles,
            points: &points,
            curve: curve.as_ref(),
        },
    );
    emit(config, &svg)
}
