//! Monte-Carlo check that the empirical tail frequencies stay below the
//! concentration bounds, on a reduced version of the default suite.
//!
//!     cargo run --release --example bound_validation

use qsar::experiments::{validate_bounds, BoundSuite};

fn main() -> qsar::Result<()> {
    let suite = BoundSuite {
        n: vec![50, 200],
        k: vec![5, 25],
        trials: 20_000,
        oracle_trials: 100_000,
        ..BoundSuite::default()
    };
    let output = validate_bounds(&suite)?;
    println!("{output}");
    Ok(())
}
