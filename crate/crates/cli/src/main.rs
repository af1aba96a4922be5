//! `lpdecay` command-line entry point.
//!
//! Exit status: 0 on success, 1 when a run completes but one of its checks
//! fails, 2 on any error (bad config, missing artifacts, solver failure).

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "lpdecay", version, about = "Variable-viscosity Navier-Stokes decay and Littlewood-Paley toolkit")]
struct Cli {
    /// Output root. Overrides LPDECAY_OUT and the config's `output` key.
    #[arg(long, global = true, env = "LPDECAY_OUT")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override values read from a config file.
#[derive(Args, Debug, Default, Clone)]
pub struct Overrides {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub l: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Write a spectral snapshot every this many steps.
    #[arg(long)]
    pub snapshot_every: Option<usize>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub contrast: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the flow and write diagnostics, ledgers and a report.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Comma-separated seeds; one isolated run directory per seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        /// Worker threads for concurrent seeds.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Fit decay exponents of a finished run.
    DecayFit {
        /// Run directory written by `simulate`.
        #[arg(long)]
        run: PathBuf,
        /// Fit window as `lo,hi`.
        #[arg(long, value_parser = parse_window)]
        window: Option<(f64, f64)>,
    },
    /// Print a Besov norm of one component of a snapshot.
    BesovNorm {
        #[arg(long)]
        field: PathBuf,
        /// `u1`, `u2` or `rho`.
        #[arg(long, default_value = "rho")]
        component: String,
        /// `log:ETA` or `classical:S,P,R` (`inf` allowed for P and R).
        #[arg(long, default_value = "log:1.5")]
        spec: String,
    },
    /// Block-wise transport experiment from the config's `[transport]` table.
    TransportReg {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Evaluate the explicit smallness condition for the config's data.
    CheckSmallness {
        #[arg(long)]
        config: PathBuf,
        /// Exit with status 1 when the condition fails.
        #[arg(long)]
        require_pass: bool,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run inequality suites and print one line per check.
    VerifyInequalities {
        /// bernstein, heat_block, calculus, gronwall, product_law, splitting or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Refit the calculus-integral constants.
    FitConstants {
        /// Write the constants file here.
        #[arg(long)]
        write: Option<PathBuf>,
        /// Exit with status 1 unless the fit reproduces the frozen file.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out;
    let result = match cli.command {
        Command::Simulate {
            config,
            seeds,
            jobs,
            overrides,
        } => commands::simulate(&config, &seeds, jobs, &overrides, out),
        Command::DecayFit { run, window } => commands::decay_fit(&run, window),
        Command::BesovNorm { field, component, spec } => commands::besov_norm(&field, &component, &spec),
        Command::TransportReg { config, overrides } => commands::transport_reg(&config, &overrides, out),
        Command::CheckSmallness {
            config,
            require_pass,
            overrides,
        } => commands::check_smallness(&config, require_pass, &overrides, out),
        Command::VerifyInequalities { suite, seed } => commands::verify_inequalities(&suite, seed, out),
        Command::FitConstants { write, check } => commands::fit_constants(write.as_deref(), check),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = lo.trim().parse().map_err(|e| format!("lo: {e}"))?;
    let hi: f64 = hi.trim().parse().map_err(|e| format!("hi: {e}"))?;
    Ok((lo, hi))
}
