use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use segre_cli::checks::{criterion, suite_criteria, SUITES};
use segre_cli::run::{run_chern, run_decompose, run_lelong, run_segre, Outcome, RunError};
use segre_cli::scenario::{parse_eps_list, Overrides, Scenario};
use serde_json::json;

#[derive(Parser)]
#[command(name = "segre-lab", version, about = "Segre and Chern currents of singular Hermitian metrics on a grid")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Grid points per real axis.
    #[arg(long)]
    grid: Option<usize>,
    /// Comma-separated ε schedule, e.g. `1,1/4,1/16`.
    #[arg(long)]
    eps: Option<String>,
    /// `series` or `alternative_Z`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Segre currents along the ε schedule.
    Segre(Common),
    /// Chern currents in both modes.
    Chern(Common),
    /// Lelong numbers at probe points and along curves.
    Lelong(Common),
    /// Fixed and moving parts of the Segre currents.
    Decompose(Common),
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum Failure {
    Config(String),
    Run(RunError),
}

fn execute(common: &Common, f: fn(&segre_cli::scenario::Problem, &std::path::Path) -> Result<Outcome, RunError>) -> Result<Outcome, Failure> {
    let scenario = Scenario::load(&common.scenario).map_err(|e| Failure::Config(e.to_string()))?;
    let eps = common.eps.as_deref().map(parse_eps_list).transpose().map_err(|e| Failure::Config(e.to_string()))?;
    let overrides = Overrides { grid: common.grid, eps, mode: common.mode.clone(), seed: common.seed };
    let problem = scenario.resolve(&overrides).map_err(|e| Failure::Config(e.to_string()))?;
    f(&problem, &common.out).map_err(Failure::Run)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let (common, f): (&Common, fn(&_, &_) -> _) = match &cli.command {
        Command::Segre(c) => (c, run_segre),
        Command::Chern(c) => (c, run_chern),
        Command::Lelong(c) => (c, run_lelong),
        Command::Decompose(c) => (c, run_decompose),
        Command::Verify { suite, out } => {
            let ids = suite_criteria(suite).expect("suite names are validated by clap");
            let results: Vec<_> = ids.iter().map(|&id| criterion(id)).collect();
            let passed = results.iter().all(|c| c.passed);
            let report = json!({"suite": suite, "passed": passed, "criteria": results});
            let text = serde_json::to_string_pretty(&report).expect("serializable report");
            println!("{text}");
            if let Some(path) = out {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(1);
                }
            }
            return if passed { ExitCode::SUCCESS } else { ExitCode::from(2) };
        }
    };
    match execute(common, f) {
        Ok(outcome) => {
            for file in &outcome.files {
                println!("{}", file.display());
            }
            if outcome.converged {
                ExitCode::SUCCESS
            } else {
                eprintln!("warning: at least one requested degree did not converge");
                ExitCode::from(2)
            }
        }
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
