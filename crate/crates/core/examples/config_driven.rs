//! Load a TOML experiment config and run its policy x budget sweep, exactly
//! as `qsar run --config` does.
//!
//!     cargo run --release --example config_driven [config.toml]

use qsar::experiments::{run_experiment, ExperimentConfig};

fn main() {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/quick.toml").to_string()
    });
    let config = match ExperimentConfig::load(&path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    };
    match run_experiment(&config) {
        Ok(output) => {
            for row in &output.rows {
                println!(
                    "{:<9} N={:<6} errors {}/{}",
                    row.policy.to_string(),
                    row.budget,
                    row.estimate.errors,
                    row.estimate.runs
                );
            }
            println!(
                "wrote {} and {}",
                output.results_csv.display(),
                output.plot_script.display()
            );
        }
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    }
}
