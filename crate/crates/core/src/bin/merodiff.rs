use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use merodiff::experiment::{self, ExperimentConfig, ExperimentReport};

#[derive(Parser)]
#[command(name = "merodiff", version, about = "Desk-scale experiments on differences of meromorphic functions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run experiments from TOML configs; exit status 0 iff every check passes.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Run the configs concurrently.
        #[arg(long)]
        parallel: bool,
        /// Output directory (overrides the config; MERODIFF_OUT_DIR overrides both).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the experiment catalogue.
    List,
    /// Write the CSV tables of a report.
    Plotdata {
        report: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_one(path: &Path, out: &Option<PathBuf>) -> Result<ExperimentReport, String> {
    let cfg = ExperimentConfig::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let report = experiment::run_experiment(&cfg).map_err(|e| format!("{}: {e}", path.display()))?;
    let dir = match (std::env::var_os(experiment::OUT_DIR_ENV), out) {
        (None, Some(o)) => o.clone(),
        _ => experiment::output_dir(&cfg),
    };
    experiment::write_report(&report, &dir).map_err(|e| e.to_string())?;
    Ok(report)
}

fn print_report(r: &ExperimentReport) {
    println!("{} ({:.2} s)", r.experiment, r.metadata.runtime_seconds);
    for c in &r.checks {
        println!("  [{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var(experiment::THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.cmd {
        Cmd::List => {
            for (id, desc) in experiment::list_experiments() {
                println!("{id:<20} {desc}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Plotdata { report, out } => {
            let dir = out.unwrap_or_else(|| report.parent().map(PathBuf::from).unwrap_or_default());
            match ExperimentReport::load(&report).and_then(|r| experiment::emit_plotdata(&r, &dir)) {
                Ok(paths) => {
                    for p in paths {
                        println!("{}", p.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
        Cmd::Run { configs, parallel, out } => {
            let results: Vec<Result<ExperimentReport, String>> = if parallel {
                configs.par_iter().map(|p| run_one(p, &out)).collect()
            } else {
                configs.iter().map(|p| run_one(p, &out)).collect()
            };
            let mut ok = true;
            for r in &results {
                match r {
                    Ok(rep) => {
                        print_report(rep);
                        ok &= rep.passed;
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        ok = false;
                    }
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
