//! Probability of error against budget for all six policies on the first
//! simulated environment, written as a results CSV plus a plot script.
//!
//!     cargo run --release --example error_curve [output-dir]

use std::path::PathBuf;

use qsar::experiments::runner::{plot_script, write_results_csv, PLOT_SCRIPT, RESULTS_FILE};
use qsar::experiments::{evaluate_grid, Preset, RunSettings};
use qsar::PolicyKind;

fn main() -> qsar::Result<()> {
    let out = std::env::args().nth(1).map_or_else(
        || std::env::temp_dir().join("qsar_error_curve"),
        PathBuf::from,
    );
    let env = Preset::Env1.environment(5, None)?;
    let run = RunSettings {
        policies: PolicyKind::ALL.to_vec(),
        budgets: vec![1500, 3000, 6000],
        runs: 200,
        seed: 17,
        output: out.clone(),
        crn: true,
    };
    let rows = evaluate_grid(&env, &run)?;
    for row in &rows {
        println!(
            "{:<9} N={:<6} e_hat {:.3} ± {:.3}",
            row.policy.to_string(),
            row.budget,
            row.estimate.e_hat,
            2.0 * row.estimate.stderr
        );
    }

    std::fs::create_dir_all(&out).expect("create output dir");
    let file = std::fs::File::create(out.join(RESULTS_FILE)).expect("create csv");
    write_results_csv(&rows, file)?;
    std::fs::write(out.join(PLOT_SCRIPT), plot_script(RESULTS_FILE)).expect("write plot script");
    println!("wrote {}", out.display());
    Ok(())
}
