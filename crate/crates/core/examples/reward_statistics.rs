//! Mean, median and 0.8-quantile of the three reward models used in the
//! simulated environments, and the minimum gap each statistic induces.
//!
//!     cargo run --release --example reward_statistics

use qsar::experiments::presets::{arm_a, arm_b, arm_c};
use qsar::QuantileLevel;

fn main() -> qsar::Result<()> {
    let arms = [("A", arm_a()), ("B", arm_b()), ("C", arm_c())];
    let median = QuantileLevel::new(0.5)?;
    let q80 = QuantileLevel::new(0.8)?;

    println!(
        "{:<4} {:<22} {:>8} {:>8} {:>8}",
        "arm", "model", "mean", "median", "q0.8"
    );
    let mut rows = Vec::new();
    for (name, spec) in &arms {
        let row = [
            spec.mean(),
            spec.true_quantile(median),
            spec.true_quantile(q80),
        ];
        println!(
            "{name:<4} {:<22} {:>8.3} {:>8.3} {:>8.3}",
            spec.to_string(),
            row[0],
            row[1],
            row[2]
        );
        rows.push(row);
    }

    // minimum gap between the best value and the runner-up, per statistic
    print!("{:<27}", "min gap");
    for col in 0..3 {
        let mut values: Vec<f64> = rows.iter().map(|r| r[col]).collect();
        values.sort_by(|a, b| b.total_cmp(a));
        print!(" {:>8.3}", values[0] - values[1]);
    }
    println!();
    Ok(())
}
