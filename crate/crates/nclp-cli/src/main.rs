//! Reproducible experiment driver: seeded scenario configs in, a
//! human-readable table plus JSON/CSV reports out.
//!
//! Exit codes: 0 all assertions pass, 1 assertion failure, 2 config error,
//! 3 numerical non-convergence.

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;
use report::Report;

#[derive(Parser)]
#[command(name = "nclp", about = "Weighted noncommutative Lp laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// JSON config (schema 1); defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for report.json and cases.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reduced trial counts for a fast smoke run.
    #[arg(long)]
    quick: bool,
    /// Restrict the multipliers experiment to one family.
    #[arg(long)]
    family: Option<String>,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Integral representation and contraction of the geometric-mean map.
    Prop31(RunArgs),
    /// SDP-certified cb norms of the kernel families vs their claimed bounds.
    Multipliers(RunArgs),
    /// Triangular comparison ratios inside [2/3, 2].
    Compa(RunArgs),
    /// Triangular truncation growth and interpolation brackets.
    Triangular(RunArgs),
    /// Fourier transforms, L1 norms and kernel positivity.
    Fourier(RunArgs),
    /// The weighted interpolation sandwich.
    Sandwich(RunArgs),
    /// Divergence of the opposite-variation kernel.
    Counterexample(RunArgs),
    /// Blockwise transference of scalar cb certificates.
    Transference(RunArgs),
    /// Every experiment in sequence.
    All(RunArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Prop31(_) => "prop31",
            Command::Multipliers(_) => "multipliers",
            Command::Compa(_) => "compa",
            Command::Triangular(_) => "triangular",
            Command::Fourier(_) => "fourier",
            Command::Sandwich(_) => "sandwich",
            Command::Counterexample(_) => "counterexample",
            Command::Transference(_) => "transference",
            Command::All(_) => "all",
        }
    }

    fn args(&self) -> &RunArgs {
        match self {
            Command::Prop31(a)
            | Command::Multipliers(a)
            | Command::Compa(a)
            | Command::Triangular(a)
            | Command::Fourier(a)
            | Command::Sandwich(a)
            | Command::Counterexample(a)
            | Command::Transference(a)
            | Command::All(a) => a,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    let name = cli.command.name();
    let args = cli.command.args().clone();

    let cfg = match load_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("config error: {e}");
            std::process::exit(2);
        }
    };

    let start = Instant::now();
    let outcome = if name == "transference" {
        Ok(experiments::transference_cases(&cfg))
    } else if name == "all" {
        experiments::run("all", &cfg).map(|mut out| {
            out.merge_from(experiments::transference_cases(&cfg));
            out
        })
    } else {
        experiments::run(name, &cfg)
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("config error: {e}");
            std::process::exit(2);
        }
    };

    let report = Report::assemble(
        cfg.clone(),
        outcome.cases,
        start.elapsed().as_secs_f64(),
        outcome.non_convergences,
    );
    report.print_table();
    let out_dir = args.out.clone().or_else(|| cfg.out_dir.clone());
    if let Some(dir) = &out_dir {
        if let Err(e) = report.write(dir) {
            eprintln!("failed to write report: {e}");
            std::process::exit(2);
        }
        println!("report written to {}", dir.display());
    }

    if report.summary.violations > 0 {
        std::process::exit(1);
    }
    if report.summary.non_convergences > 0 {
        std::process::exit(3);
    }
}

fn load_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(family) = &args.family {
        cfg.family = Some(family.clone());
    }
    if args.quick {
        cfg = cfg.quick();
    }
    cfg.validate()?;
    Ok(cfg)
}
