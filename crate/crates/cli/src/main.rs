//! `dispersal`: runs one experiment and writes its record and CSV files.
//!
//! Exit codes: 0 pass, 1 fail, 2 usage error, 3 runtime error.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, RunConfig};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "dispersal", version, about = "Maximal-function and convergence experiments for e^{itP(D)}")]
struct Cli {
    /// Canonical `key = value` run file; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Sub>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Evolution norms on the unit ball at uniform times.
    Evolve(Flags),
    /// Maximal-function norm under time-grid refinement.
    Maximal(Flags),
    /// Counterexample growth for boussinesq or pm:<m>.
    Counterexample(Flags),
    /// Convergence rate of the evolution as t -> 0.
    Rate(Flags),
    /// Perturbation transfer against the elliptic symbol.
    Transfer(Flags),
    /// Scale uniformity of the weighted smoothing ratio.
    Smoothing(Flags),
    /// Maximal bound on annulus indicators.
    Positive(Flags),
    /// Invariant suite.
    Check(Flags),
}

#[derive(Debug, Default, clap::Args)]
struct Flags {
    /// elliptic, nonelliptic, boussinesq, beam, fractional:<a> or pm:<m>
    #[arg(long)]
    symbol: Option<String>,
    /// Comma-separated radii
    #[arg(long = "R", value_delimiter = ',', num_args = 1..)]
    radii: Option<Vec<f64>>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    /// Frequency lattice spacing
    #[arg(long)]
    h: Option<f64>,
    /// Frequency cutoff
    #[arg(long)]
    cutoff: Option<f64>,
    #[arg(long)]
    ball_spacing: Option<f64>,
    /// Number of times, overriding the oscillation rule
    #[arg(long)]
    t_count: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory [default: $DISPERSAL_OUT, else ./dispersal-out]
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    threads: Option<usize>,
}

impl Sub {
    fn split(self) -> (Command, Flags) {
        match self {
            Sub::Evolve(f) => (Command::Evolve, f),
            Sub::Maximal(f) => (Command::Maximal, f),
            Sub::Counterexample(f) => (Command::Counterexample, f),
            Sub::Rate(f) => (Command::Rate, f),
            Sub::Transfer(f) => (Command::Transfer, f),
            Sub::Smoothing(f) => (Command::Smoothing, f),
            Sub::Positive(f) => (Command::Positive, f),
            Sub::Check(f) => (Command::Check, f),
        }
    }
}

fn from_flags(command: Command, f: Flags) -> RunConfig {
    RunConfig {
        command,
        symbol: f.symbol,
        radii: f.radii,
        m: f.m,
        delta: f.delta,
        s: f.s,
        h: f.h,
        cutoff: f.cutoff,
        ball_spacing: f.ball_spacing,
        t_count: f.t_count,
        seed: f.seed,
        out: f.out,
        threads: f.threads,
    }
}

#[derive(Debug)]
enum ArgError {
    /// Includes `--help` and `--version`, which clap exits on with status 0.
    Clap(clap::Error),
    Usage(String),
}

impl From<String> for ArgError {
    fn from(s: String) -> Self {
        ArgError::Usage(s)
    }
}

impl From<&str> for ArgError {
    fn from(s: &str) -> Self {
        ArgError::Usage(s.to_string())
    }
}

fn parse_args(args: impl IntoIterator<Item = String>) -> Result<RunConfig, ArgError> {
    let cli = Cli::try_parse_from(args).map_err(ArgError::Clap)?;
    let cfg = match (cli.config, cli.command) {
        (None, None) => return Err("no command given; see `dispersal --help`".into()),
        (None, Some(sub)) => {
            let (command, flags) = sub.split();
            from_flags(command, flags)
        }
        (Some(path), sub) => {
            let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut cfg = RunConfig::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if let Some(sub) = sub {
                let (command, flags) = sub.split();
                if command != cfg.command {
                    return Err(format!("{} configures `{}`, not `{command}`", path.display(), cfg.command).into());
                }
                cfg.overlay(&from_flags(command, flags));
            }
            cfg
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match parse_args(std::env::args()) {
        Ok(cfg) => cfg,
        Err(ArgError::Clap(e)) => e.exit(),
        Err(ArgError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if let Some(n) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("threads: {e}");
            return ExitCode::from(EXIT_RUNTIME);
        }
    }
    let rec = match run::execute(&cfg) {
        Ok(rec) => rec,
        Err(e) => {
            eprintln!("{}: {e}", cfg.command);
            return ExitCode::from(EXIT_RUNTIME);
        }
    };
    let dir = run::output_dir(&cfg);
    if let Err(e) = run::write_outputs(&dir, &cfg, &rec) {
        eprintln!("{}: {e}", dir.display());
        return ExitCode::from(EXIT_RUNTIME);
    }
    let fit = rec
        .fit
        .map(|f| format!(" slope {:.4} residual {:.2e}", f.slope, f.residual))
        .unwrap_or_default();
    println!("{} {}:{fit} {}", cfg.command, rec.symbol, if rec.pass { "PASS" } else { "FAIL" });
    println!("wrote {}", dir.display());
    if rec.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
