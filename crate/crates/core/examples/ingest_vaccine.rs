//! Ingest per-strategy reward files (`arm_*.csv`, one reward per line, as
//! exported from an epidemic simulator) and identify the best strategies by
//! their 0.8-quantile with Q-SAR.
//!
//!     cargo run --release --example ingest_vaccine [data-dir]
//!
//! Without a directory, a synthetic data set of 8 strategies with 1000
//! rewards each is generated first.

use std::io::Write;
use std::path::PathBuf;

use qsar::bandit::Environment;
use qsar::experiments::ingest_arm_data;
use qsar::{evaluate, DistributionSpec, EvalOptions, PolicyConfig, PolicyKind, QuantileLevel};
use rand::SeedableRng;

fn synthesize(dir: &PathBuf) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for i in 0..8 {
        // reward = people not infected; strategies differ in location and spread
        let spec = DistributionSpec::abs_gaussian(10.0 + 0.6 * i as f64, 2.0 + 0.2 * i as f64)
            .expect("valid model");
        let mut file = std::fs::File::create(dir.join(format!("arm_{i:02}.csv")))?;
        writeln!(file, "reward")?;
        for x in spec.sample(1000, &mut rng) {
            writeln!(file, "{x}")?;
        }
    }
    Ok(())
}

fn main() -> qsar::Result<()> {
    let dir = match std::env::args().nth(1) {
        Some(d) => PathBuf::from(d),
        None => {
            let dir = std::env::temp_dir().join("qsar_vaccine_demo");
            synthesize(&dir).expect("write synthetic data");
            dir
        }
    };
    let report = ingest_arm_data(&dir)?;
    print!("{report}");

    let env = Environment::new(report.arms, QuantileLevel::new(0.8)?, 2)?;
    println!("empirical 0.8-quantiles: {:.3?}", env.quantiles());
    println!("best 2 strategies: {:?}", env.true_optimal_set());
    for kind in [PolicyKind::QSar, PolicyKind::QUniform] {
        let policy = PolicyConfig::for_env(kind, &env);
        let est = evaluate(&env, &policy, 800, 500, 1, EvalOptions::default())?;
        println!(
            "{kind:<9} N=800: probability of error {:.3} ± {:.3}",
            est.e_hat,
            2.0 * est.stderr
        );
    }
    Ok(())
}
