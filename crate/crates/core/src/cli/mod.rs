//! Command-line runner: `solve`, `verify-landscape` and `resource-count`.

mod scenario;
mod solve;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, MatrixFile};
use crate::models::Model;
use crate::quantum::{resource_count, PauliHamiltonian};

pub use scenario::{run_scenario, LandscapeReport, Scenario};
pub use solve::{run_solve, SolveReport};

#[derive(Debug, Parser)]
#[command(name = "oblique-vqe", version, about = "Lowest eigenpairs via orthogonality-penalized cost functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimize a model and extract eigenpairs.
    Solve(Box<SolveArgs>),
    /// Build, verify, classify and escape stationary points from a scenario file.
    VerifyLandscape(VerifyArgs),
    /// Print the number of inner-product circuits per objective evaluation.
    ResourceCount(ResourceArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long, default_value = "matrix")]
    pub backend: crate::optimize::Backend,
    /// Dense matrix JSON {rows, cols, real, imag?}.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// Pauli Hamiltonian JSON.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Ansatz circuit JSON, shared by every state.
    #[arg(long)]
    pub ansatz: Option<PathBuf>,
    /// Comma-separated bitstrings, or a JSON file holding a list of them.
    #[arg(long)]
    pub init: Option<String>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mu1: f64,
    /// Comma-separated weights for wql1m (default p, p-1, ..., 1).
    #[arg(long, value_delimiter = ',')]
    pub weights: Vec<f64>,
    /// simplex | trust | gd (default: gd for matrix, trust for statevector).
    #[arg(long)]
    pub optimizer: Option<crate::optimize::Method>,
    #[arg(long, default_value_t = 1e-1)]
    pub rhobeg: f64,
    #[arg(long, default_value_t = 1e-7)]
    pub rhoend: f64,
    #[arg(long, default_value_t = 600)]
    pub max_iters: usize,
    #[arg(long)]
    pub grad_tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Independent starts with seeds seed, seed+1, ...; the lowest objective wins.
    #[arg(long, default_value_t = 1)]
    pub starts: usize,
    /// Worker threads for multi-start runs.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Exit with status 1 when the eigenvalue relative error exceeds this.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write iteration,objective_rel_err,eig_rel_err,ortho_err rows.
    #[arg(long)]
    pub csv: bool,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub scenario: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_timestamp: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ResourceArgs {
    #[arg(long)]
    pub model: Model,
    #[arg(long)]
    pub p: u64,
    /// Number of Pauli terms N_U.
    #[arg(long, conflicts_with = "hamiltonian")]
    pub num_terms: Option<u64>,
    /// Take N_U from this Hamiltonian file.
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

pub(crate) fn load_matrix(path: &Path) -> Result<HermitianOperator> {
    let f: MatrixFile = serde_json::from_str(&read_file(path)?).map_err(|e| Error::Parse(format!("{}: {}", path.display(), e)))?;
    HermitianOperator::new(f.to_matrix()?)
}

pub(crate) fn load_hamiltonian(path: &Path) -> Result<PauliHamiltonian> {
    PauliHamiltonian::from_json(&read_file(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {}", path.display(), m)),
        other => other,
    })
}

pub(crate) fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            println!("{}", text);
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))
}

fn cmd_resource_count(args: &ResourceArgs) -> Result<i32> {
    if args.p == 0 {
        return Err(Error::InvalidInput("p must be at least 1".into()));
    }
    let terms = match (&args.hamiltonian, args.num_terms) {
        (Some(path), _) => load_hamiltonian(path)?.num_terms() as u64,
        (None, Some(n)) if n >= 1 => n,
        (None, Some(_)) => return Err(Error::InvalidInput("num-terms must be at least 1".into())),
        (None, None) => return Err(Error::InvalidInput("give --num-terms or --hamiltonian".into())),
    };
    let report = resource_count(args.model, args.p, terms);
    emit(None, &to_json(&serde_json::json!({
        "model": report.model,
        "p": args.p,
        "num_terms": terms,
        "hamiltonian_circuits": report.hamiltonian_circuits,
        "regularization_circuits": report.regularization_circuits,
    }))?)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let text = read_file(&args.scenario)?;
    let scenario = Scenario::from_json(&text)?;
    let base = args.scenario.parent().unwrap_or_else(|| Path::new("."));
    let mut report = run_scenario(&scenario, base)?;
    if !args.no_timestamp {
        report.timestamp = Some(timestamp());
    }
    emit(args.out.as_deref(), &to_json(&report)?)?;
    eprintln!(
        "{} of {} checks passed",
        report.checks_passed(),
        report.checks_total()
    );
    Ok(if report.pass { 0 } else { 1 })
}

/// Runs the CLI and returns the process exit code: 0 success, 1 numerical
/// failure, 2 input error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::VerifyLandscape(a) => cmd_verify(a),
        Command::ResourceCount(a) => cmd_resource_count(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e);
            if e.is_input_error() {
                2
            } else {
                1
            }
        }
    }
}
