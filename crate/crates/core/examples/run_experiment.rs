//! Runs one catalogue experiment from a TOML config (or a built-in default)
//! and prints its checks.

use merodiff::experiment::{self, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::load(path.as_ref())?,
        None => ExperimentConfig::new("thm-lesshalf"),
    };
    for (id, desc) in experiment::list_experiments() {
        println!("{id:<18} {desc}");
    }
    let report = experiment::run_experiment(&cfg)?;
    for c in &report.checks {
        println!("[{}] {}: {}", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail);
    }
    println!("{}", report.to_json()?);
    Ok(())
}
