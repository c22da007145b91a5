//! `pwh`: batch driver for the orthogonality, transform and identity checks.
//!
//! Exit codes: 0 all checks pass, 2 bad configuration, 3 numeric failure or a failed check.

mod commands;
mod config;
mod error;
mod output;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "pwh", version, about = "Piecewise hypergeometric orthogonal systems: evaluation and checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// key=value file with the same names as the flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, global = true)]
    theta: Option<String>,
    /// quadrature target (>= 1e-12)
    #[arg(long, global = true)]
    tol: Option<String>,
    #[arg(long, global = true)]
    level_max: Option<String>,
    /// json or csv
    #[arg(long, global = true)]
    format: Option<String>,
    /// write here instead of stdout
    #[arg(long, global = true)]
    output: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Sample Φ or Ψ on a grid
    Eval(EvalArgs),
    /// Gram matrix of the discrete family against the closed-form norms
    Gram(IndexArgs),
    /// Quadrature norms against the closed form
    Norms(IndexArgs),
    /// Forward transform of ξ_μ(x) = (1−x)^μ on (0,1)
    Spectral(TransformArgs),
    /// Parseval identity for ξ_μ
    Parseval(TransformArgs),
    /// Beta integral, de Branges-Wilson and Dougall checks
    Identities(IdentityArgs),
    /// Barnes integrals and the Mellin convolution
    Mellin,
    /// Gluing conditions at x = 1
    Boundary(BoundaryArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, conflicts_with = "psi")]
    phi: bool,
    #[arg(long)]
    psi: bool,
    /// index n, p = θ + n
    #[arg(long, allow_hyphen_values = true)]
    n: Option<String>,
    /// any real p (Φ only)
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// continuous parameter (Ψ only)
    #[arg(long)]
    s: Option<String>,
    /// start:end:step
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
}

#[derive(Args, Debug)]
struct IndexArgs {
    #[arg(long, allow_hyphen_values = true)]
    n_max: Option<String>,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n_max: Option<String>,
    #[arg(long)]
    s_max: Option<String>,
    #[arg(long)]
    s_step: Option<String>,
}

#[derive(Args, Debug)]
struct IdentityArgs {
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    nu: Option<String>,
}

#[derive(Args, Debug)]
struct BoundaryArgs {
    #[arg(long, allow_hyphen_values = true)]
    n_max: Option<String>,
    /// shift p off θ + ℤ to break the gluing on purpose
    #[arg(long, allow_hyphen_values = true)]
    perturb: Option<String>,
}

fn put(m: &mut BTreeMap<String, String>, key: &str, v: &Option<String>) {
    if let Some(v) = v {
        m.insert(key.to_string(), v.clone());
    }
}

impl Cli {
    fn flags(&self) -> (Command, BTreeMap<String, String>) {
        let mut m = BTreeMap::new();
        put(&mut m, "alpha", &self.alpha);
        put(&mut m, "beta", &self.beta);
        put(&mut m, "theta", &self.theta);
        put(&mut m, "tol", &self.tol);
        put(&mut m, "level-max", &self.level_max);
        put(&mut m, "format", &self.format);
        put(&mut m, "output", &self.output);
        let cmd = match &self.command {
            Cmd::Eval(a) => {
                if a.phi {
                    m.insert("function".into(), "phi".into());
                }
                if a.psi {
                    m.insert("function".into(), "psi".into());
                }
                put(&mut m, "n", &a.n);
                put(&mut m, "p", &a.p);
                put(&mut m, "s", &a.s);
                put(&mut m, "grid", &a.grid);
                Command::Eval
            }
            Cmd::Gram(a) | Cmd::Norms(a) => {
                put(&mut m, "n-max", &a.n_max);
                if matches!(self.command, Cmd::Gram(_)) {
                    Command::Gram
                } else {
                    Command::Norms
                }
            }
            Cmd::Spectral(a) | Cmd::Parseval(a) => {
                put(&mut m, "mu", &a.mu);
                put(&mut m, "n-max", &a.n_max);
                put(&mut m, "s-max", &a.s_max);
                put(&mut m, "s-step", &a.s_step);
                if matches!(self.command, Cmd::Spectral(_)) {
                    Command::Spectral
                } else {
                    Command::Parseval
                }
            }
            Cmd::Identities(a) => {
                put(&mut m, "mu", &a.mu);
                put(&mut m, "nu", &a.nu);
                Command::Identities
            }
            Cmd::Mellin => Command::Mellin,
            Cmd::Boundary(a) => {
                put(&mut m, "n-max", &a.n_max);
                put(&mut m, "perturb", &a.perturb);
                Command::Boundary
            }
        };
        (cmd, m)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PWH_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Config(format!("PWH_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot build thread pool: {e}")))
}

fn run(cli: Cli) -> Result<bool, CliError> {
    init_threads()?;
    let (cmd, flags) = cli.flags();
    let file = match &cli.config {
        Some(path) => config::parse_file(path)?,
        None => BTreeMap::new(),
    };
    let cfg = RunConfig::resolve(cmd, file, flags)?;
    let report = commands::run(&cfg)?;
    match &cfg.output {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            output::write_report(&cfg, &report, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            output::write_report(&cfg, &report, &mut w)?;
        }
    }
    if report.failed {
        eprintln!("pwh: one or more checks failed");
    }
    Ok(!report.failed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("pwh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
