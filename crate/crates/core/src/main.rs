use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jetconj::config::ExperimentConfig;
use jetconj::report::{emit, Emit, Outputs};
use jetconj::{commands, pipeline, Error};

/// Conjugacy of contracting quadratic jet sequences: checks, solver and basin scans.
#[derive(Parser)]
#[command(name = "jetconj", version)]
struct Cli {
    /// Master seed; overrides `seed` from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (falls back to $JETCONJ_OUT_DIR, then ./out).
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Formats to write, comma separated: json, csv, svg.
    #[arg(long, global = true, value_delimiter = ',', default_value = "json")]
    emit: Vec<Emit>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArg {
    /// TOML run configuration; defaults are used for missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the basis poset with its triangular and resonance sets.
    Poset {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Check that the permutation word annihilates the resonance relation.
    VerifyNilpotency {
        #[command(flatten)]
        cfg: ConfigArg,
    },
    /// Fit decay slopes of the two parts of the conjugacy operator.
    DecompBounds {
        #[command(flatten)]
        cfg: ConfigArg,
    },
    /// Solve the 2-jet conjugacy equation for a random pinched sequence.
    SolveJets {
        #[command(flatten)]
        cfg: ConfigArg,
    },
    /// Scan the basin of a permutation-interleaved triangular sequence.
    Basin {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Exact table of the bunching constants.
    EpsilonTable {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        dmax: Option<usize>,
    },
    /// Run every stage end to end.
    Pipeline {
        #[command(flatten)]
        cfg: ConfigArg,
    },
}

fn load(arg: &ConfigArg, seed: Option<u64>) -> jetconj::Result<ExperimentConfig> {
    let mut cfg = match &arg.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> jetconj::Result<(&'static str, Outputs)> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Poset { cfg, d } => {
            let mut c = load(cfg, seed)?;
            if let Some(d) = d {
                c.poset.d = *d;
            }
            ("poset", commands::poset(&c)?)
        }
        Command::VerifyNilpotency { cfg } => ("verify-nilpotency", commands::verify_nilpotency(&load(cfg, seed)?)?),
        Command::DecompBounds { cfg } => ("decomp-bounds", commands::decomp_bounds(&load(cfg, seed)?)?),
        Command::SolveJets { cfg } => ("solve-jets", commands::solve_jets(&load(cfg, seed)?)?),
        Command::Basin { cfg, d } => {
            let mut c = load(cfg, seed)?;
            if let Some(d) = d {
                c.basin.d = *d;
            }
            ("basin", commands::basin(&c)?)
        }
        Command::EpsilonTable { cfg, dmax } => {
            let mut c = load(cfg, seed)?;
            if let Some(m) = dmax {
                c.epsilon.dmax = *m;
            }
            ("epsilon-table", commands::epsilon_table(&c)?)
        }
        Command::Pipeline { cfg } => ("pipeline", pipeline::run_pipeline(&load(cfg, seed)?)?.outputs),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("JETCONJ_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let (stem, mut outputs) = match run(&cli) {
        Ok(x) => x,
        Err(e @ (Error::Config(_) | Error::InvalidParameter { .. } | Error::InvalidDimension { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let written = match emit(&mut outputs, &out_dir, stem, &cli.emit) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    for c in &outputs.report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    for p in written {
        println!("wrote {}", p.display());
    }
    if outputs.report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
