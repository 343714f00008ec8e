//! `qgap`: batch runner for the detectability and gap amplification checks.
//!
//! Exit status: 0 when every check passes, 1 on a bound violation, 2 on a
//! configuration or input error, 3 when a size cap is exceeded. The report
//! is written in every case except `gen`, which writes its artifact instead.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::report::{write_bytes, ErrorInfo, Report};

#[derive(Parser, Debug)]
#[command(
    name = "qgap",
    version,
    about = "Detectability and gap amplification experiments"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    #[serde(skip)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random states, assignments or bad sets per run.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Walk length (largest one for sweeps).
    #[arg(long = "t", global = true)]
    pub t: Option<usize>,
    /// Violation allowance per layer.
    #[arg(long, global = true)]
    pub ell: Option<usize>,
    /// Lanczos residual target.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Largest enumeration: θ products, or walks for one walk Hamiltonian.
    #[arg(long = "cap-enum", global = true)]
    pub cap_enum: Option<u64>,
    /// Largest dimension diagonalized densely.
    #[arg(long = "cap-dense", global = true)]
    pub cap_dense: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Write a generated instance (.qsat.json) or graph (.graph.json).
    Gen(GenArgs),
    /// Check an instance file for structural problems.
    Validate(InstanceArgs),
    /// Show or compute the layer partition.
    Layers(LayersArgs),
    /// θ of every pyramid in the covers of every layer.
    Theta(ThetaArgs),
    /// Ground energy ε₀.
    Ground(GroundArgs),
    /// Sector weights against the decay bound, plus the sector energy claims.
    Decay(InstanceArgs),
    /// Projected norms and the detectability witness per random state.
    Detect(InstanceArgs),
    /// Principal angle between the kernels of a two-layer system.
    Kitaev(InstanceArgs),
    /// Classical t-walk amplification on a constraint graph.
    Camp(CampArgs),
    /// Quantum t-walk amplification on an edge system.
    Qamp(QampArgs),
    /// Walk moments of random bad edge sets.
    Moments(MomentsArgs),
    /// Every check over the pinned corpus.
    VerifyAll(VerifyAllArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Validate(_) => "validate",
            Command::Layers(_) => "layers",
            Command::Theta(_) => "theta",
            Command::Ground(_) => "ground",
            Command::Decay(_) => "decay",
            Command::Detect(_) => "detect",
            Command::Kitaev(_) => "kitaev",
            Command::Camp(_) => "camp",
            Command::Qamp(_) => "qamp",
            Command::Moments(_) => "moments",
            Command::VerifyAll(_) => "verify-all",
        }
    }
}

/// A graph given as a file or as a named shape.
#[derive(Args, Debug, Serialize)]
pub struct GraphArgs {
    /// `.json` graph file, or an edge list (`u v` per line).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// `k4`, `prism`, `complete:N`, `cycle:N` or `path:N`.
    #[arg(long, conflicts_with = "graph")]
    pub shape: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GenFamily {
    DiagonalNeq,
    Rank1Entangled,
    /// Random rank-r qubit projector on every edge.
    RandomRank,
    /// A random d-regular graph.
    RandomRegular,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[arg(value_enum)]
    pub family: GenFamily,
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    /// Angle `a` of the entangled ket `cos a |00> + sin a |11>`.
    #[arg(long, default_value_t = std::f64::consts::PI / 5.0)]
    pub angle: f64,
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub d: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct InstanceArgs {
    /// `.qsat.json` instance.
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Args, Debug, Serialize)]
pub struct LayersArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InstanceArgs,
    /// Recompute greedily even if the file carries layers.
    #[arg(long)]
    pub recompute: bool,
    /// Also write the layered instance here.
    #[arg(long)]
    #[serde(skip)]
    pub save: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThetaModeArg {
    /// Exact below the cap, sampled above it.
    Auto,
    /// Exact, or exit 3 when a pyramid exceeds the cap.
    Exact,
    Sampled,
}

#[derive(Args, Debug, Serialize)]
pub struct ThetaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = ThetaModeArg::Auto)]
    pub mode: ThetaModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroundMethod {
    /// Dense below the cap, where Lanczos is cross-checked; Lanczos above.
    Auto,
    Dense,
    Lanczos,
}

#[derive(Args, Debug, Serialize)]
pub struct GroundArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InstanceArgs,
    #[arg(long, value_enum, default_value_t = GroundMethod::Auto)]
    pub method: GroundMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CspKind {
    /// Random allowed pairs around a planted satisfying assignment.
    Planted,
    /// Adjacent symbols must differ.
    Neq,
}

#[derive(Args, Debug, Serialize)]
pub struct CampArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    #[arg(long, value_enum, default_value_t = CspKind::Planted)]
    pub csp: CspKind,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    /// Fraction of forbidden pairs per edge for planted instances.
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    #[arg(long, default_value_t = 3)]
    pub q: usize,
    #[arg(long, default_value_t = 0.3)]
    pub density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum QampFamily {
    DiagonalNeq,
    Rank1Entangled,
    RandomRank,
    /// Edge constraints read from `--instance`.
    File,
}

#[derive(Args, Debug, Serialize)]
pub struct QampArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphArgs,
    /// Experiment file `{"graph", "family", "q", "t", "trials", "seed"}`;
    /// its fields override the flags.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = QampFamily::DiagonalNeq)]
    pub family: QampFamily,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = std::f64::consts::PI / 5.0)]
    pub angle: f64,
    #[arg(long, default_value_t = 2)]
    pub rank: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusName {
    Standard,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyAllArgs {
    #[arg(long, value_enum, default_value_t = CorpusName::Standard)]
    pub corpus: CorpusName,
}

/// Why a run could not produce its checks.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Cap(String),
}

impl CliError {
    fn info(&self) -> (ErrorInfo, u8) {
        match self {
            CliError::Config(m) => (
                ErrorInfo {
                    kind: "config",
                    message: m.clone(),
                },
                2,
            ),
            CliError::Cap(m) => (
                ErrorInfo {
                    kind: "cap-exceeded",
                    message: m.clone(),
                },
                3,
            ),
        }
    }
}

impl From<qgap_core::Error> for CliError {
    fn from(e: qgap_core::Error) -> Self {
        use qgap_core::Error::*;
        match e {
            DimensionTooLarge { .. } | EnumerationTooLarge { .. } => CliError::Cap(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("QAMP_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("QAMP_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn execute(cli: &Cli) -> u8 {
    if let Err(e) = init_threads() {
        let (info, code) = e.info();
        eprintln!("qgap: {}", info.message);
        return code;
    }
    let out = cli.common.out.as_deref();
    if let Command::Gen(args) = &cli.command {
        return match commands::gen(args, &cli.common)
            .and_then(|bytes| write_bytes(out, &bytes).map_err(|e| CliError::Config(e.to_string())))
        {
            Ok(()) => 0,
            Err(e) => {
                let (info, code) = e.info();
                eprintln!("qgap gen: {}", info.message);
                code
            }
        };
    }
    let config = serde_json::json!({"args": &cli.command, "common": &cli.common});
    let mut report = Report::new(cli.command.name(), config);
    let mut code = 0;
    if let Err(e) = commands::run(cli, &mut report) {
        let (info, c) = e.info();
        eprintln!("qgap {}: {}", cli.command.name(), info.message);
        report.error = Some(info);
        code = c;
    }
    report.settle();
    if code == 0 && !report.pass {
        code = 1;
    }
    let bytes = match cli.common.format {
        Format::Json => report.to_json().map_err(|e| e.to_string()),
        Format::Csv => report.to_csv().map_err(|e| e.to_string()),
    };
    match bytes.and_then(|b| write_bytes(out, &b).map_err(|e| e.to_string())) {
        Ok(()) => code,
        Err(e) => {
            eprintln!("qgap: cannot write report: {e}");
            2
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let code = execute(&cli);
    eprintln!(
        "qgap {}: {:.3}s",
        cli.command.name(),
        start.elapsed().as_secs_f64()
    );
    ExitCode::from(code)
}
