//! `cncsim`: phase-space catalogs, decompositions, simulation, scans,
//! oracle goldens and self-verification.

mod commands;
mod state;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Exit status for a failed verification suite.
pub const EXIT_VERIFY: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "cncsim", version, about = "Phase-space simulation of Pauli-measurement circuits with magic states")]
struct Cli {
    /// Worker threads (0 = all cores). Outputs do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Directory for cached catalogs.
    #[arg(long, global = true, env = "CNCSIM_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Enumerate phase-space points and print the count table (CSV).
    Catalog(CatalogArgs),
    /// Positive representability or robustness of a state (JSON).
    Decompose(DecomposeArgs),
    /// Sample measurement outcomes, or the exact distribution with --exact (CSV).
    Simulate(SimulateArgs),
    /// Parameter scans: the ρ(x,y) plane, |H(φ)⟩ powers, random-state volume fractions (CSV).
    Scan(ScanArgs),
    /// Regenerate dense-oracle golden files.
    Oracle(OracleArgs),
    /// Run self-check suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct CatalogArgs {
    #[arg(long)]
    n: usize,
    /// Allowed values of m, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    m: Vec<usize>,
    #[arg(long)]
    rebit: bool,
    /// Also write every point as JSON.
    #[arg(long)]
    #[serde(skip)]
    export: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum DecomposeMode {
    Feasibility,
    Robustness,
    #[value(name = "robustness_s")]
    RobustnessS,
}

#[derive(Args, Debug, Serialize)]
struct DecomposeArgs {
    /// `named:<spec>`, `product:<bloch>;…[|<stabilizers>]`, or a state JSON file.
    #[arg(long)]
    state: String,
    #[arg(long, value_enum)]
    mode: DecomposeMode,
    /// Catalog classes (default 1..n).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long)]
    rebit: bool,
    /// Phase-1 feasibility tolerance override.
    #[arg(long)]
    tol_feasible: Option<f64>,
    /// Include the representation in the output.
    #[arg(long)]
    with_solution: bool,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    state: String,
    /// Program JSON file, or inline JSON starting with `[`.
    #[arg(long)]
    program: String,
    #[arg(long, default_value_t = 1)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exact outcome distribution instead of samples.
    #[arg(long)]
    exact: bool,
    /// Catalog classes used to find a non-negative representation (default 1..n).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct ScanArgs {
    #[command(subcommand)]
    kind: ScanKind,
    #[arg(long, short, global = true)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Measure {
    /// Hilbert–Schmidt mixed states.
    Hs,
    /// Fubini–Study pure states.
    Fs,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum ScanKind {
    /// Feasibility over the ρ(x,y) cross section.
    Plane {
        #[arg(long, default_value = "-0.25:0.25")]
        x: String,
        #[arg(long, default_value = "-0.25:0.25")]
        y: String,
        #[arg(long, default_value_t = 41)]
        grid: usize,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        m: Vec<usize>,
    },
    /// Feasibility and robustness of |H(φ)⟩^⊗k over φ ∈ [0, 2π).
    Phi {
        #[arg(long, default_value_t = 2)]
        power: usize,
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, value_delimiter = ',')]
        m: Option<Vec<usize>>,
    },
    /// Fraction of random states that are positively representable.
    Volume {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, value_enum, default_value = "hs")]
        measure: Measure,
        #[arg(long, value_delimiter = ',', default_value = "1,2")]
        m: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    /// Output directory for golden JSON files.
    #[arg(long, short)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, default_value = "fast")]
    level: String,
    #[arg(long, short)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

/// Machine-readable header carried by every output.
#[derive(Serialize, Debug, Clone)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub config_hash: String,
    pub command: serde_json::Value,
}

impl Provenance {
    fn of(cmd: &Command) -> Self {
        let command = serde_json::to_value(cmd).expect("command serializes");
        let digest = Sha256::digest(command.to_string().as_bytes());
        let config_hash = digest.iter().map(|b| format!("{b:02x}")).collect();
        Provenance { tool: "cncsim", version: env!("CARGO_PKG_VERSION"), config_hash, command }
    }

    /// `#`-prefixed lines for CSV outputs.
    pub fn csv_header(&self) -> String {
        format!(
            "# tool: {} {}\n# config_hash: sha256:{}\n# command: {}\n",
            self.tool, self.version, self.config_hash, self.command
        )
    }
}

/// Failure of a verification suite (exit code 4).
#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<VerificationFailed>().is_some() {
        return EXIT_VERIFY;
    }
    match e.downcast_ref::<cncsim::Error>() {
        Some(cncsim::Error::ResourceCap(_)) => 3,
        Some(cncsim::Error::Solver(_)) => 1,
        Some(_) => 2,
        None if e.downcast_ref::<std::io::Error>().is_some() => 2,
        None => 1,
    }
}

pub fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(cncsim::Error::from)?,
        None => std::io::stdout().write_all(text.as_bytes()).map_err(cncsim::Error::from)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Fails only if a pool already exists; the default pool is then used.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global();
    }
    let prov = Provenance::of(&cli.command);
    let cache = cli.cache_dir.as_deref();
    let result = match &cli.command {
        Command::Catalog(a) => commands::catalog(a, cache, &prov),
        Command::Decompose(a) => commands::decompose(a, cache, &prov),
        Command::Simulate(a) => commands::simulate(a, cache, &prov),
        Command::Scan(a) => commands::scan(a, cache, &prov),
        Command::Oracle(a) => commands::oracle(a),
        Command::Verify(a) => commands::verify(a, &prov),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
