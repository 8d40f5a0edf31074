//! `opdep`: ordinal pattern dependence from the command line.
//!
//! Exit codes: 0 success or pass, 1 verification failure, 2 usage, parse or
//! model error, 3 degenerate computation.

mod input;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use opdep::concordance::{concordance_check, Grid, OrthantProbability, CONCORDANCE_TOL};
use opdep::density::joint_pattern_distribution;
use opdep::model_file::Model;
use opdep::ordinal::Pattern;
use opdep::scenarios::{self, ScenarioReport};
use opdep::{empirical_opd, JointPatternDistribution, TimeSeriesPair};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Model(String),
    #[error("{0}")]
    Compute(#[from] opdep::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Compute(opdep::Error::DegenerateDistribution) => 3,
            _ => 2,
        }
    }
}

#[derive(Parser)]
#[command(name = "opdep", version, about = "Ordinal pattern dependence: estimation, exact models, concordance checks")]
struct Cli {
    #[command(flatten)]
    output: OutputArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate OPD from a CSV file with columns x, y.
    Estimate {
        csv: PathBuf,
        /// Pattern order.
        #[arg(short = 'd', long = "order")]
        order: usize,
        /// Distance between window starts.
        #[arg(long, default_value_t = 1)]
        step: usize,
    },
    /// Run one of the built-in scenario verifications.
    Verify {
        #[arg(value_enum)]
        scenario: Scenario,
    },
    /// Operations on a model file.
    Model {
        #[command(subcommand)]
        command: ModelCommand,
    },
    /// Check whether model A is below model B in concordance order.
    Concordance {
        a: PathBuf,
        b: PathBuf,
        /// Points per axis, one value for all axes or one per axis ("9" or "9,9,5,5").
        #[arg(long)]
        grid: Option<String>,
        /// Common range "lo,hi" for every axis. Defaults to the joint
        /// bounding box padded by 0.5.
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        #[arg(long, default_value_t = CONCORDANCE_TOL)]
        tol: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Scenario {
    Counterexample,
    Example42,
    Example43,
}

impl Scenario {
    fn run(self) -> ScenarioReport {
        match self {
            Scenario::Counterexample => scenarios::verify_counterexample(),
            Scenario::Example42 => scenarios::verify_example42(),
            Scenario::Example43 => scenarios::verify_example43(),
        }
    }
}

#[derive(Subcommand)]
enum ModelCommand {
    /// Check structure, total mass and cell disjointness.
    Validate { file: PathBuf },
    /// Exact OPD with its coincidence and cross terms.
    Opd { file: PathBuf },
    /// Exact pattern distributions.
    Patterns { file: PathBuf },
    /// Seeded random draws.
    Sample {
        file: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
    },
    /// Cdf and survival function at a point.
    Cdf {
        file: PathBuf,
        /// Comma-separated coordinates (x_1..x_d, y_1..y_d).
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

/// What a command hands back for printing.
struct Report {
    json: Value,
    text: String,
    pass: bool,
}

impl Report {
    fn ok(json: Value, text: String) -> Self {
        Self { json, text, pass: true }
    }
}

fn real(v: f64) -> String {
    format!("{v:?}")
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("--{flag}: cannot parse {:?}", p.trim())))
        })
        .collect()
}

fn estimate(csv: &Path, order: usize, step: usize) -> Result<Report, CliError> {
    let (x, y) = input::read_series(csv)?;
    let pair = TimeSeriesPair::new(x, y)?;
    let est = empirical_opd(&pair, order, step)?;
    let text = format!(
        "value: {}\ncoincidence: {}\ncross_term: {}\nwindows: {}\nskipped_windows: {}",
        real(est.value),
        real(est.coincidence),
        real(est.cross_term),
        est.window_count,
        est.skipped_windows
    );
    let mut json = serde_json::to_value(est).expect("estimate serializes");
    json["order"] = json!(order);
    json["step"] = json!(step);
    Ok(Report::ok(json, text))
}

fn verify(scenario: Scenario) -> Report {
    let report = scenario.run();
    let mut text = String::new();
    for c in &report.checks {
        let tag = if c.pass { "PASS" } else { "FAIL" };
        text += &format!("{tag} {}: expected {}, got {}\n", c.name, c.expected, c.actual);
    }
    text += &format!("{}: {}", report.scenario, if report.pass { "pass" } else { "fail" });
    Report {
        json: serde_json::to_value(&report).expect("report serializes"),
        pass: report.pass,
        text,
    }
}

fn pattern_json(order: usize, probs: &[f64]) -> Value {
    probs
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let pattern = Pattern::from_index(i, order).expect("index in range");
            json!({"pattern": pattern.ranks(), "prob": p})
        })
        .collect()
}

fn patterns(model: &Model) -> Result<Report, CliError> {
    let joint: JointPatternDistribution = match model {
        Model::Piecewise(m) => joint_pattern_distribution(m)?,
        Model::Discrete(m) => m.joint_pattern_distribution()?,
    };
    let d = joint.order();
    let (px, py) = (joint.marginal_x(), joint.marginal_y());
    let name = |i: usize| Pattern::from_index(i, d).expect("index in range").to_string();
    let mut text = String::from("pattern  P(X)  P(Y)\n");
    for (i, (a, b)) in px.probs().iter().zip(py.probs()).enumerate() {
        text += &format!("{}  {}  {}\n", name(i), real(*a), real(*b));
    }
    text += "joint (X pattern, Y pattern): prob\n";
    let mut entries = Vec::new();
    for ((i, j), p) in joint.entries() {
        text += &format!("{} {}: {}\n", name(i), name(j), real(p));
        entries.push(json!({"x": Pattern::from_index(i, d)?.ranks(), "y": Pattern::from_index(j, d)?.ranks(), "prob": p}));
    }
    text += &format!("coincidence: {}", real(joint.coincidence()));
    let json = json!({
        "order": d,
        "x": pattern_json(d, px.probs()),
        "y": pattern_json(d, py.probs()),
        "joint": entries,
        "coincidence": joint.coincidence(),
    });
    Ok(Report::ok(json, text))
}

fn model_command(cmd: &ModelCommand) -> Result<Report, CliError> {
    match cmd {
        ModelCommand::Validate { file } => {
            let m = input::load_model(file)?;
            let json = json!({"file": file, "kind": m.kind(), "order": m.order(), "valid": true});
            Ok(Report::ok(json, format!("{}: valid {} model of order {}", file.display(), m.kind(), m.order())))
        }
        ModelCommand::Opd { file } => {
            let t = input::load_model(file)?.exact_terms()?;
            let text = format!(
                "opd: {}\ncoincidence: {}\ncross_term: {}",
                real(t.value),
                real(t.coincidence),
                real(t.cross_term)
            );
            Ok(Report::ok(serde_json::to_value(t).expect("terms serialize"), text))
        }
        ModelCommand::Patterns { file } => patterns(&input::load_model(file)?),
        ModelCommand::Sample { file, seed, count } => {
            let samples = match input::load_model(file)? {
                Model::Piecewise(m) => opdep::density::sample(&m, *count, *seed),
                Model::Discrete(m) => m.sample(*count, *seed),
            };
            let rows: Vec<Vec<f64>> = samples.rows().map(<[f64]>::to_vec).collect();
            let text = rows
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(json!({"seed": seed, "count": count, "samples": rows}), text))
        }
        ModelCommand::Cdf { file, point } => {
            let m = input::load_model(file)?;
            let p: Vec<f64> = parse_list("point", point)?;
            let (cdf, survival) = (m.cdf(&p)?, m.survival(&p)?);
            Ok(Report::ok(
                json!({"point": p, "cdf": cdf, "survival": survival}),
                format!("cdf: {}\nsurvival: {}", real(cdf), real(survival)),
            ))
        }
    }
}

fn concordance(a: &Path, b: &Path, grid: Option<&str>, range: Option<&str>, tol: f64) -> Result<Report, CliError> {
    let (ma, mb) = (input::load_model(a)?, input::load_model(b)?);
    if ma.dim() != mb.dim() {
        return Err(CliError::Usage(format!(
            "models have dimensions {} and {}",
            ma.dim(),
            mb.dim()
        )));
    }
    if tol.is_nan() || tol < 0.0 {
        return Err(CliError::Usage(format!("--tol must be nonnegative, got {tol}")));
    }
    let dim = ma.dim();
    let counts: Vec<usize> = match grid {
        None => vec![9; dim],
        Some(s) => match parse_list::<usize>("grid", s)?.as_slice() {
            [n] => vec![*n; dim],
            v if v.len() == dim => v.to_vec(),
            v => {
                return Err(CliError::Usage(format!(
                    "--grid has {} counts for {dim} coordinates",
                    v.len()
                )))
            }
        },
    };
    if let Some(n) = counts.iter().find(|&&n| n < 2) {
        return Err(CliError::Usage(format!("--grid counts must be at least 2, got {n}")));
    }
    let grid = match range {
        None => Grid::around(&[ma.bounding_box(), mb.bounding_box()], &counts, 0.5),
        Some(s) => match parse_list::<f64>("range", s)?.as_slice() {
            [lo, hi] => Grid::uniform(&vec![(*lo, *hi); dim], &counts),
            _ => return Err(CliError::Usage("--range expects \"lo,hi\"".into())),
        },
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    let r = concordance_check(&ma, &mb, &grid, tol)?;
    let mut text = format!(
        "points evaluated: {}\nmax cdf violation: {}\nmax survival violation: {}\n",
        r.points_evaluated,
        real(r.max_cdf_violation),
        real(r.max_survival_violation)
    );
    for w in &r.witness_points {
        let coords: Vec<String> = w.iter().map(|v| v.to_string()).collect();
        text += &format!("witness: ({})\n", coords.join(", "));
    }
    text += if r.dominated() { "A <=_C B: yes" } else { "A <=_C B: no" };
    Ok(Report {
        json: serde_json::to_value(&r).expect("report serializes"),
        pass: r.dominated(),
        text,
    })
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Estimate { csv, order, step } => estimate(csv, *order, *step),
        Command::Verify { scenario } => Ok(verify(*scenario)),
        Command::Model { command } => model_command(command),
        Command::Concordance { a, b, grid, range, tol } => {
            concordance(a, b, grid.as_deref(), range.as_deref(), *tol)
        }
    }
}

fn emit(out: &OutputArgs, report: &Report) -> std::io::Result<()> {
    let body = match out.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("json value serializes"),
        Format::Text => report.text.clone(),
    };
    match &out.out {
        Some(path) => std::fs::write(path, body + "\n"),
        None => writeln!(std::io::stdout().lock(), "{body}"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("OPDEP_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = emit(&cli.output, &report) {
                eprintln!("error: cannot write output: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
