//! Command-line front end: reads a datum config, runs the requested
//! pipeline, prints a human table (or JSON with --json).  Exit code 0 only
//! when every requested verification passed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hopfgal::config::{load_config, RunConfig};
use hopfgal::pipeline::{run, Command as Pipeline};

#[derive(Parser)]
#[command(
    name = "hopfgal",
    about = "Exact Galois/biGalois classification for non-semisimple monomial Hopf algebras",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Classify the group datum into one of the six types
    Classify(WithConfig),
    /// Compute the plain and modified second cohomology groups
    Cohomology(WithConfig),
    /// Enumerate the isomorphism classes of right Galois objects
    Gal(WithConfig),
    /// Compute the biGalois group (Gamma with its reductions)
    Bigal(WithConfig),
    /// Run the full property suite on the datum
    Verify(WithConfig),
    /// Compare closed-form predictions against the computational pipeline
    Predict(WithConfig),
    /// Run the shipped fixture suite and check each expectation
    PaperExamples {
        #[arg(long)]
        json: bool,
    },
}

#[derive(clap::Args)]
struct WithConfig {
    /// Path to the JSON datum config
    #[arg(long)]
    config: PathBuf,
    /// Override the coefficient modulus M
    #[arg(long)]
    modulus: Option<i64>,
    /// Override the scalar samples (comma separated, e.g. "0,1,-1,zeta")
    #[arg(long)]
    samples: Option<String>,
    /// Override the kappa-matrix dimension cap
    #[arg(long)]
    cap: Option<usize>,
    /// Emit the machine-readable JSON report
    #[arg(long)]
    json: bool,
}

fn apply_overrides(mut cfg: RunConfig, args: &WithConfig) -> Result<RunConfig, hopfgal::Error> {
    if let Some(m) = args.modulus {
        cfg.modulus = m;
    }
    if let Some(s) = &args.samples {
        let field = hopfgal::arith::lcm(cfg.modulus as u64, cfg.datum.field().modulus);
        cfg.samples = s
            .split(',')
            .map(|t| {
                hopfgal::config::parse_scalar(
                    &hopfgal::config::RawScalar::Text(t.trim().into()),
                    field,
                )
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(c) = args.cap {
        cfg.kappa_cap = c;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, json) = match &cli.command {
        CliCommand::Classify(a) => (run_with(a, Pipeline::Classify), a.json),
        CliCommand::Cohomology(a) => (run_with(a, Pipeline::Cohomology), a.json),
        CliCommand::Gal(a) => (run_with(a, Pipeline::Gal), a.json),
        CliCommand::Bigal(a) => (run_with(a, Pipeline::Bigal), a.json),
        CliCommand::Verify(a) => (run_with(a, Pipeline::Verify), a.json),
        CliCommand::Predict(a) => (run_with(a, Pipeline::Predict), a.json),
        CliCommand::PaperExamples { json } => (
            hopfgal::pipeline::run_paper_examples().map_err(|e| e.to_string()),
            *json,
        ),
    };
    match outcome {
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Ok(report) => {
            if json {
                println!("{}", report.to_json_string());
            } else {
                print!("{}", report.to_human_string());
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

fn run_with(args: &WithConfig, command: Pipeline) -> Result<hopfgal::report::Report, String> {
    let cfg = load_config(&args.config).map_err(|e| e.to_string())?;
    let cfg = apply_overrides(cfg, args).map_err(|e| e.to_string())?;
    run(&cfg, command).map_err(|e| e.to_string())
}
