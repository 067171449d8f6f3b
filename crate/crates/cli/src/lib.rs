//! Command-line pipelines: parse an operator, run a computation, write
//! CSV/JSON/SVG artifacts.

pub mod svg;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use borg_spectra::borg::{
    check_converse, check_forward, interlacing_report, random_suite, BorgReport, InterlacingReport, SuiteConfig,
};
use borg_spectra::mathieu::{approximant_sweep_for, convergents, Sweep};
use borg_spectra::oracle::{section_interlacing, truncation_compare, TruncationComparison};
use borg_spectra::{
    band_table, best_constant, gap_report, pseudospectrum_intervals, spectrum, GapReport, Interval, OperatorKind,
    OperatorSpec, RealSpectrum, DEFAULT_GRID, VERSION,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "borg-spectra", version, about = "Spectra and pseudospectra of periodic operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Band table, spectrum intervals and a one-row segment plot.
    Spectrum(SpecArgs),
    /// ε-fattened spectra with gap reports and stadium plots.
    Pseudospectrum(PseudoArgs),
    /// Forward and converse checks for one operator, or a seeded random suite
    /// when no --spec is given.
    Borg(BorgArgs),
    /// Periodic approximants of the almost Mathieu operator.
    Mathieu(MathieuArgs),
    /// Finite sections compared with the symbol spectrum.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Comma-separated subset of csv,json,svg.
    #[arg(long, value_delimiter = ',', default_value = "csv,json,svg")]
    pub format: Vec<Format>,
    /// θ-grid size.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    pub grid: usize,
}

#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// Path to a JSON operator description, or the JSON itself.
    #[arg(long)]
    pub spec: String,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct PseudoArgs {
    #[arg(long)]
    pub spec: String,
    /// Fattening radius; repeatable.
    #[arg(long = "epsilon", required = true)]
    pub epsilons: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct BorgArgs {
    #[arg(long)]
    pub spec: Option<String>,
    /// Check radius; repeatable. Defaults to the smallest ε connecting Λ_ε
    /// for the forward check and to the potential's deviation for the converse.
    #[arg(long = "epsilon")]
    pub epsilons: Vec<f64>,
    /// Random suite size.
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct MathieuArgs {
    /// Frequency; defaults to the golden mean (√5 − 1)/2.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Number of convergents.
    #[arg(long, default_value_t = 5)]
    pub count: usize,
    #[arg(long, default_value_t = 1.0)]
    pub coupling: f64,
    /// Radii at which connectedness is recorded; repeatable.
    #[arg(long = "epsilon")]
    pub epsilons: Vec<f64>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub spec: String,
    /// Number of periods in a section; repeatable.
    #[arg(long = "blocks", default_values_t = [4usize, 16, 64])]
    pub blocks: Vec<usize>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    Input(String),
    /// A check failed or its hypothesis was violated; exit code 3.
    Violation(String),
    /// Anything else; exit code 1.
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Violation(_) => 3,
            CliError::Failure(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Violation(m) => write!(f, "check failed: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<borg_spectra::Error> for CliError {
    fn from(e: borg_spectra::Error) -> Self {
        use borg_spectra::Error as E;
        match e {
            E::HypothesisViolation(_) => CliError::Violation(e.to_string()),
            E::NoConvergence | E::NotHermitian(_) => CliError::Failure(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

/// Files written and whether any check failed.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
    pub violation: Option<String>,
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub grid: usize,
    pub epsilons: Vec<f64>,
}

impl RunConfig {
    fn new(output: &Output, epsilons: &[f64]) -> Result<Self, CliError> {
        if output.grid < 2 {
            return Err(CliError::Input(format!("--grid must be at least 2, got {}", output.grid)));
        }
        if let Some(e) = epsilons.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(CliError::Input(format!("--epsilon must be finite and >= 0, got {e}")));
        }
        fs::create_dir_all(&output.out)
            .map_err(|e| CliError::Input(format!("cannot create {}: {e}", output.out.display())))?;
        Ok(RunConfig {
            out: output.out.clone(),
            formats: output.format.clone(),
            grid: output.grid,
            epsilons: epsilons.to_vec(),
        })
    }

    fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

/// Reads `--spec`: inline JSON when it starts with `{`, a file path otherwise.
pub fn load_spec(arg: &str) -> Result<OperatorSpec, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Input(format!("cannot read {arg}: {e}")))?
    };
    text.parse().map_err(|e: borg_spectra::Error| CliError::Input(e.to_string()))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("output");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let io = |e: std::io::Error| CliError::Input(format!("cannot write {}: {e}", path.display()));
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(contents.as_bytes()).map_err(io)?;
    f.sync_all().map_err(io)?;
    fs::rename(&tmp, path).map_err(io)
}

fn emit(outcome: &mut Outcome, cfg: &RunConfig, name: &str, contents: String) -> Result<(), CliError> {
    let path = cfg.out.join(name);
    write_atomic(&path, &contents)?;
    outcome.files.push(path);
    Ok(())
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    version: &'a str,
    #[serde(flatten)]
    body: T,
}

fn json<T: Serialize>(body: T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(&Versioned { version: VERSION, body })
        .map_err(|e| CliError::Failure(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_header(columns: &str) -> String {
    format!("# borg-spectra {VERSION}\n{columns}\n")
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Pseudospectrum(a) => cmd_pseudospectrum(a),
        Command::Borg(a) => cmd_borg(a),
        Command::Mathieu(a) => cmd_mathieu(a),
        Command::Oracle(a) => cmd_oracle(a),
    }
}

#[derive(Serialize)]
struct SpectrumDoc<'a> {
    spec: &'a OperatorSpec,
    grid: usize,
    #[serde(flatten)]
    spectrum: &'a RealSpectrum,
    gap_report: GapReport,
}

pub fn cmd_spectrum(args: &SpecArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&args.output, &[])?;
    let spec = load_spec(&args.spec)?;
    let bt = band_table(&spec, 0, cfg.grid)?;
    let s = borg_spectra::spectra::spectrum_intervals(&bt);
    let report = gap_report(&s);
    let mut outcome = Outcome::default();
    if cfg.wants(Format::Csv) {
        let mut csv = csv_header("theta,band_index,lambda");
        for (theta, j, lambda) in bt.rows() {
            writeln!(csv, "{theta},{j},{lambda}").unwrap();
        }
        emit(&mut outcome, &cfg, "bands.csv", csv)?;
    }
    if cfg.wants(Format::Json) {
        let doc = SpectrumDoc { spec: &spec, grid: cfg.grid, spectrum: &s, gap_report: report.clone() };
        emit(&mut outcome, &cfg, "spectrum.json", json(doc)?)?;
    }
    if cfg.wants(Format::Svg) {
        let row = svg::Row { label: "spectrum".into(), intervals: s.intervals().to_vec(), stadium_radius: None };
        emit(&mut outcome, &cfg, "spectrum.svg", svg::render(&[row]))?;
    }
    outcome.summary = format!(
        "{} component(s), {} significant gap(s), epsilon_star = {}",
        s.component_count(),
        report.gaps.len(),
        report.epsilon_star
    );
    Ok(outcome)
}

#[derive(Serialize)]
struct FattenedDoc {
    epsilon: f64,
    intervals: Vec<Interval>,
    gap_report: GapReport,
}

#[derive(Serialize)]
struct PseudoDoc<'a> {
    spec: &'a OperatorSpec,
    grid: usize,
    spectrum: &'a RealSpectrum,
    pseudospectra: Vec<FattenedDoc>,
}

pub fn cmd_pseudospectrum(args: &PseudoArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&args.output, &args.epsilons)?;
    let spec = load_spec(&args.spec)?;
    let s = spectrum(&spec, cfg.grid)?;
    let fattened = cfg
        .epsilons
        .iter()
        .map(|&epsilon| {
            let f = pseudospectrum_intervals(&s, epsilon)?;
            Ok(FattenedDoc { epsilon, intervals: f.intervals().to_vec(), gap_report: gap_report(&f) })
        })
        .collect::<Result<Vec<_>, borg_spectra::Error>>()?;
    let mut outcome = Outcome::default();
    if cfg.wants(Format::Csv) {
        let mut csv = csv_header("epsilon,component,lo,hi");
        for f in &fattened {
            for (k, i) in f.intervals.iter().enumerate() {
                writeln!(csv, "{},{},{},{}", f.epsilon, k + 1, i.lo, i.hi).unwrap();
            }
        }
        emit(&mut outcome, &cfg, "pseudospectrum.csv", csv)?;
    }
    if cfg.wants(Format::Svg) {
        let rows: Vec<svg::Row> = fattened
            .iter()
            .map(|f| svg::Row {
                label: format!("ε = {}", f.epsilon),
                intervals: s.intervals().to_vec(),
                stadium_radius: Some(f.epsilon),
            })
            .collect();
        emit(&mut outcome, &cfg, "pseudospectrum.svg", svg::render(&rows))?;
    }
    outcome.summary = fattened
        .iter()
        .map(|f| {
            format!("epsilon {}: {}", f.epsilon, if f.gap_report.connected { "connected" } else { "disconnected" })
        })
        .collect::<Vec<_>>()
        .join("\n");
    if cfg.wants(Format::Json) {
        let doc = PseudoDoc { spec: &spec, grid: cfg.grid, spectrum: &s, pseudospectra: fattened };
        emit(&mut outcome, &cfg, "pseudospectrum.json", json(doc)?)?;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct BorgCheck {
    forward: BorgReport,
    /// Absent for general Laurent operators.
    converse: Option<BorgReport>,
}

#[derive(Serialize)]
struct BorgDoc<'a> {
    spec: &'a OperatorSpec,
    grid: usize,
    checks: Vec<BorgCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interlacing: Option<InterlacingReport>,
}

pub fn cmd_borg(args: &BorgArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&args.output, &args.epsilons)?;
    let Some(spec_arg) = &args.spec else {
        return borg_suite(args, &cfg);
    };
    let spec = load_spec(spec_arg)?;
    if spec.kind() == OperatorKind::LaurentGeneral && !spec.potential_sorted() {
        return Err(CliError::Violation("the laurent forward check needs an ascending potential".into()));
    }
    let s = spectrum(&spec, cfg.grid)?;
    let pairs: Vec<(f64, f64)> = if cfg.epsilons.is_empty() {
        let (_, dv) = best_constant(spec.potential())?;
        let (_, da) = best_constant(spec.couplings())?;
        vec![(gap_report(&s).epsilon_star.max(1e-12), dv.max(da).max(1e-12))]
    } else {
        cfg.epsilons.iter().map(|&e| (e, e)).collect()
    };
    if pairs.iter().any(|&(f, c)| f <= 0.0 || c <= 0.0) {
        return Err(CliError::Input("borg checks need epsilon > 0".into()));
    }
    let mut checks = Vec::new();
    for (ef, ec) in pairs {
        let forward = check_forward(&spec, ef, cfg.grid)?;
        let converse = match check_converse(&spec, ec, cfg.grid) {
            Ok(r) => Some(r),
            Err(borg_spectra::Error::Unsupported(_)) => None,
            Err(e) => return Err(e.into()),
        };
        checks.push(BorgCheck { forward, converse });
    }
    let interlacing = if spec.period() >= 2 { Some(interlacing_report(&spec, 0, cfg.grid)?) } else { None };
    let mut outcome = Outcome::default();
    let mut lines = Vec::new();
    for c in &checks {
        lines.push(report_line("forward", &c.forward));
        if let Some(r) = &c.converse {
            lines.push(report_line("converse", r));
        }
        let failed = !c.forward.satisfied || c.converse.as_ref().is_some_and(|r| !r.satisfied);
        if failed && outcome.violation.is_none() {
            outcome.violation = Some(format!("unsatisfied check at epsilon = {}", c.forward.epsilon));
        }
    }
    if let Some(i) = &interlacing {
        if !i.holds && outcome.violation.is_none() {
            outcome.violation = Some(format!("interlacing violated by {}", i.worst_violation));
        }
    }
    outcome.summary = lines.join("\n");
    if cfg.wants(Format::Json) {
        let doc = BorgDoc { spec: &spec, grid: cfg.grid, checks, interlacing };
        emit(&mut outcome, &cfg, "borg.json", json(doc)?)?;
    }
    Ok(outcome)
}

fn report_line(name: &str, r: &BorgReport) -> String {
    format!(
        "{name} eps={} deviation={} bound={} margin={} hypothesis_met={} satisfied={}",
        r.epsilon, r.deviation, r.bound, r.margin, r.hypothesis_met, r.satisfied
    )
}

fn borg_suite(args: &BorgArgs, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let config = SuiteConfig { seed: args.seed, instances: args.count, grid: cfg.grid, ..SuiteConfig::default() };
    let report = random_suite(&config)?;
    let mut outcome = Outcome {
        summary: format!(
            "{} instances: {} forward violation(s); converse hypothesis met {} time(s), {} violation(s)",
            config.instances, report.forward_violations, report.converse_checked, report.converse_violations
        ),
        ..Outcome::default()
    };
    if report.forward_violations + report.converse_violations > 0 {
        outcome.violation = Some(outcome.summary.clone());
    }
    if cfg.wants(Format::Json) {
        emit(&mut outcome, cfg, "borg_suite.json", json(&report)?)?;
    }
    Ok(outcome)
}

pub fn sweep_csv(sweep: &Sweep) -> String {
    let mut csv = csv_header("b,period,gap_count,epsilon_star,d_H_to_next");
    for (i, r) in sweep.reports.iter().enumerate() {
        let next = sweep.hausdorff_to_next(i).map(|d| d.to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{next}", r.convergent.b, r.period, r.gap_count, r.epsilon_star).unwrap();
    }
    csv
}

pub fn cmd_mathieu(args: &MathieuArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&args.output, &args.epsilons)?;
    let alpha = args.alpha.unwrap_or((5f64.sqrt() - 1.0) / 2.0);
    let list = convergents(alpha, args.count)?;
    // a rational alpha is its own approximant; sweeping coarser ones adds nothing
    let rationals = match list.convergents.last() {
        Some(c) if c.value == alpha => std::slice::from_ref(c),
        _ => &list.convergents[..],
    };
    let sweep = Sweep {
        truncated: list.truncated,
        ..approximant_sweep_for(alpha, rationals, cfg.grid, args.coupling, &cfg.epsilons)?
    };
    let mut outcome = Outcome::default();
    if cfg.wants(Format::Csv) {
        emit(&mut outcome, &cfg, "sweep.csv", sweep_csv(&sweep))?;
    }
    if cfg.wants(Format::Svg) {
        let rows: Vec<svg::Row> = sweep
            .reports
            .iter()
            .map(|r| svg::Row {
                label: format!("{}/{}", r.convergent.a, r.convergent.b),
                intervals: r.spectrum.intervals().to_vec(),
                stadium_radius: None,
            })
            .collect();
        emit(&mut outcome, &cfg, "butterfly.svg", svg::render(&rows))?;
    }
    outcome.summary = format!(
        "{} approximant(s){}; periods {:?}",
        sweep.reports.len(),
        if sweep.truncated { " (convergent list truncated)" } else { "" },
        sweep.reports.iter().map(|r| r.period).collect::<Vec<_>>()
    );
    if cfg.wants(Format::Json) {
        emit(&mut outcome, &cfg, "sweep.json", json(&sweep)?)?;
    }
    Ok(outcome)
}

#[derive(Serialize)]
struct OracleDoc<'a> {
    spec: &'a OperatorSpec,
    grid: usize,
    #[serde(flatten)]
    comparison: &'a TruncationComparison,
    /// Interlacing violation between sections on `n·p` and `n·p + 1` sites.
    section_interlacing: Vec<(usize, f64)>,
}

pub fn oracle_csv(cmp: &TruncationComparison) -> String {
    let mut csv = csv_header("n,index,eigenvalue,dist_to_symbol_spectrum");
    for r in &cmp.eigen_rows {
        writeln!(csv, "{},{},{},{}", r.n, r.index, r.eigenvalue, r.dist_to_symbol_spectrum).unwrap();
    }
    csv
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::new(&args.output, &[])?;
    let spec = load_spec(&args.spec)?;
    if args.blocks.contains(&0) {
        return Err(CliError::Input("--blocks must be at least 1".into()));
    }
    let cmp = truncation_compare(&spec, &args.blocks, cfg.grid)?;
    let section = args
        .blocks
        .iter()
        .map(|&n| Ok((n, section_interlacing(&spec, n * spec.period())?)))
        .collect::<Result<Vec<_>, borg_spectra::Error>>()?;
    let mut outcome = Outcome::default();
    if cfg.wants(Format::Csv) {
        emit(&mut outcome, &cfg, "oracle.csv", oracle_csv(&cmp))?;
    }
    outcome.summary = cmp
        .rows
        .iter()
        .map(|r| format!("n={} one_sided={} hausdorff={}", r.n, r.one_sided, r.hausdorff))
        .collect::<Vec<_>>()
        .join("\n");
    if cfg.wants(Format::Json) {
        let doc = OracleDoc { spec: &spec, grid: cfg.grid, comparison: &cmp, section_interlacing: section };
        emit(&mut outcome, &cfg, "oracle.json", json(doc)?)?;
    }
    Ok(outcome)
}
