//! One Q-SAR episode on the second simulated environment: which arms are
//! recommended, and how the budget was spent.
//!
//!     cargo run --release --example single_run

use qsar::bandit::run_key;
use qsar::experiments::Preset;
use qsar::{Policy, PolicyConfig, PolicyKind};

fn main() -> qsar::Result<()> {
    let env = Preset::Env2.environment(5, None)?;
    let policy = PolicyConfig::for_env(PolicyKind::QSar, &env);
    let budget = 6000;
    policy.check_budget(&env, budget)?;

    let outcome = policy.run(&env, budget, run_key(2024, 0, None))?;
    println!(
        "environment: {} arms, tau = {}, m = {}",
        env.num_arms(),
        env.tau(),
        env.m()
    );
    println!("true optimal set:  {:?}", env.true_optimal_set());
    println!("recommended set:   {:?}", outcome.recommended);
    println!(
        "correct: {}, pulls used {} of {}",
        outcome.recommended == env.true_optimal_set(),
        outcome.pulls_used(),
        budget
    );
    for (arm, (spec, pulls)) in env.arms().iter().zip(&outcome.pulls).enumerate() {
        println!("  arm {arm:>2} {:<20} pulls {pulls}", spec.to_string());
    }
    Ok(())
}
