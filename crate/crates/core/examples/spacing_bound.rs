//! Expected spacing between consecutive order statistics against the
//! hazard-rate bound `E[X_(k) - X_(k+1)] <= 1/(k L)`.
//!
//!     cargo run --release --example spacing_bound

use qsar::concentration::mc_expected_spacing;
use qsar::DistributionSpec;

fn main() -> qsar::Result<()> {
    let specs = [
        DistributionSpec::exponential(1.0)?,
        DistributionSpec::exponential(0.25)?,
        DistributionSpec::abs_gaussian(0.0, 2.0)?,
        DistributionSpec::abs_gaussian(3.5, 2.0)?,
    ];
    let n = 100;
    println!(
        "{:<22} {:>4} {:>10} {:>10} {:>10}",
        "model", "k", "E[S_k]", "se", "1/(kL)"
    );
    for spec in &specs {
        let l = spec.hazard_lower_bound()?;
        for k in [1, 5, 25, 75] {
            let est = mc_expected_spacing(spec, n, k, 20_000, 5)?;
            println!(
                "{:<22} {k:>4} {:>10.5} {:>10.5} {:>10.5}",
                spec.to_string(),
                est.mean,
                est.stderr,
                1.0 / (k as f64 * l)
            );
        }
    }
    Ok(())
}
