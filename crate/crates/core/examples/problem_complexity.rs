//! Gaps, problem complexity and the Q-SAR error bound of both simulated
//! environments, with bias constants estimated by Monte Carlo.
//!
//!     cargo run --release --example problem_complexity

use qsar::experiments::{complexity_of, Preset};

fn main() -> qsar::Result<()> {
    let budgets = [2000, 10_000, 100_000, 1_000_000];
    for preset in [Preset::Env1, Preset::Env2] {
        let env = preset.environment(5, None)?;
        let report = complexity_of(&env, None, None, &[64, 128, 256], 50_000, 11, &budgets)?;
        println!("== {preset} ==");
        println!("{report}");
    }
    Ok(())
}
