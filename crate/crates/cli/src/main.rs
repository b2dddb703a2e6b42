use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fibspec::config::{ConfigError, OutputFormat, SpectralConfig};

mod commands;

/// Spectra of the Fibonacci Hamiltonian: band covers, Cantor statistics,
/// gap tracks, sum sets and finite-chain checks.
#[derive(Parser, Debug)]
#[command(name = "fibspec", disable_version_flag = true)]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Coupling constant
    #[arg(short = 'V', long = "coupling", global = true, allow_negative_numbers = true)]
    coupling: Option<f64>,
    /// Approximant level
    #[arg(short = 'k', long = "level", global = true)]
    level: Option<usize>,
    /// Band edge accuracy
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Phase of the potential
    #[arg(long, global = true)]
    omega: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// `key = value` file; flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Band cover B_k = σ_k ∪ σ_{k+1}
    Bands,
    /// Thickness, denseness, dimension bounds and box dimension of B_k
    Metrics,
    /// One row per coupling
    Sweep(commands::SweepArgs),
    /// Follow one gap through decreasing couplings
    Track(commands::TrackArgs),
    /// Sum-set evidence for B_k + B_k, or the translate sweep as CSV
    Sumset,
    /// Finite-chain eigenvalues compared with B_k
    Oracle(commands::OracleArgs),
}

fn build_config(common: &Common) -> Result<SpectralConfig, ConfigError> {
    let mut cfg = SpectralConfig::default();
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path)
            .map_err(|_| ConfigError::BadValue { key: "config".into(), value: path.display().to_string() })?;
        cfg.apply_str(&text)?;
    }
    if let Some(v) = common.coupling {
        cfg.coupling = v;
    }
    if let Some(k) = common.level {
        cfg.level = k;
    }
    if let Some(t) = common.tol {
        cfg.tol = t;
    }
    if let Some(o) = common.omega {
        cfg.omega = o;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(f) = common.format {
        cfg.format = match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        };
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let cfg = match build_config(&cli.common) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Some(n) = cli.common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match &cli.command {
        Command::Bands => commands::bands(&cfg),
        Command::Metrics => commands::metrics(&cfg),
        Command::Sweep(a) => commands::sweep(&cfg, a),
        Command::Track(a) => commands::track(&cfg, a),
        Command::Sumset => commands::sumset(&cfg),
        Command::Oracle(a) => commands::oracle(&cfg, a),
    };
    let text = match result {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(commands::exit_code(&e));
        }
    };
    match &cli.common.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::SUCCESS
}
