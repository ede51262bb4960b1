//! Confidence radii for order statistics and empirical quantiles, their
//! epsilon-form tail probabilities, and the sample-size form used by Q-SAR.
//!
//!     cargo run --release --example concentration_bounds

use qsar::concentration::{
    epsilon_for_gamma, os_left_radius, os_right_radius, quantile_epsilon_bound,
    quantile_n_form_bound, quantile_n_form_bound_unrestricted, quantile_radii, OsBoundParams,
    QuantileBoundParams,
};
use qsar::{DistributionSpec, QuantileLevel};

fn main() -> qsar::Result<()> {
    let spec = DistributionSpec::exponential(1.0)?;
    let l = spec.hazard_lower_bound()?;
    println!("{spec}: hazard floor L = {l}");

    println!("\norder statistic X_(k) of n = 200 draws, deviation from E[X_(k)]");
    println!("{:>4} {:>6} {:>10} {:>10}", "k", "gamma", "right", "left");
    for k in [5, 25, 100] {
        for gamma in [1.0, 3.0] {
            let p = OsBoundParams {
                n: 200,
                k,
                hazard_floor: l,
                gamma,
            };
            println!(
                "{k:>4} {gamma:>6} {:>10.4} {:>10.4}",
                os_right_radius(p)?,
                os_left_radius(p)?
            );
        }
    }

    let tau = QuantileLevel::new(0.5)?;
    println!("\nempirical median, bias constant b = 1, deviation from the true median");
    println!("{:>6} {:>6} {:>10} {:>10}", "n", "gamma", "right", "left");
    for n in [50, 200, 1000] {
        let p = QuantileBoundParams {
            n,
            tau,
            hazard_floor: l,
            bias: 1.0,
        };
        for gamma in [1.0, 3.0] {
            let r = quantile_radii(p, gamma)?;
            println!("{n:>6} {gamma:>6} {:>10.4} {:>10.4}", r.right, r.left);
        }
    }

    let p = QuantileBoundParams {
        n: 200,
        tau,
        hazard_floor: l,
        bias: 1.0,
    };
    let eps = epsilon_for_gamma(p, 2.0)?;
    let back = quantile_epsilon_bound(p, eps.right)?;
    println!(
        "\nepsilon for gamma = 2: right {:.4}, left {:.4}; tail probability at that epsilon {:.4} (e^-2 = {:.4})",
        eps.right,
        eps.left,
        back.right,
        (-2.0f64).exp()
    );

    println!("\ntwo-sided bound by sample size at epsilon = 0.5");
    println!("{:>6} {:>12} {:>14}", "n", "restricted", "unrestricted");
    for n in [50, 200, 1000, 5000] {
        let p = QuantileBoundParams {
            n,
            tau,
            hazard_floor: l,
            bias: 1.0,
        };
        println!(
            "{n:>6} {:>12.4e} {:>14.4e}",
            quantile_n_form_bound(p, 0.5)?,
            quantile_n_form_bound_unrestricted(p, 0.5)?
        );
    }
    Ok(())
}
