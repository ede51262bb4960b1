//! Closed-form tail radii and tail probabilities for order statistics and
//! empirical quantiles of IHR distributions.
//!
//! With hazard floor `L` and rank `k` among `n` samples:
//!
//! * right tail is sub-gamma with variance factor `v_r = 2 / (k L^2)` and
//!   scale `c_r = 2 / (k L)`;
//! * left tail is sub-Gaussian with `v_l = 2 (n - k + 1) / ((k - 1)^2 L^2)`;
//! * quantile bounds add the bias term `w_n = b / n`.

use crate::distributions::QuantileLevel;
use crate::error::{Error, Result};
use crate::order_stats::rank_for;

/// Inputs for the order-statistic bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OsBoundParams {
    pub n: usize,
    pub k: usize,
    pub hazard_floor: f64,
    pub gamma: f64,
}

/// Inputs for the quantile bounds; the deviation level (`gamma` or
/// `epsilon`) is passed separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileBoundParams {
    pub n: usize,
    pub tau: QuantileLevel,
    pub hazard_floor: f64,
    pub bias: f64,
}

/// A right/left pair of radii or probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailPair {
    pub right: f64,
    pub left: f64,
}

/// Tail probabilities from the epsilon form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonBound {
    pub right: f64,
    pub left: f64,
    /// The epsilon form is stated for `gamma >= 1`; set when either side's
    /// implied `gamma` falls below that.
    pub gamma_below_one: bool,
}

fn check_floor(l: f64) -> Result<()> {
    if l.is_finite() && l > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "hazard floor L must be > 0, got {l}"
        )))
    }
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be finite and >= 0, got {v}"
        )))
    }
}

fn check_right_rank(n: usize, k: usize) -> Result<()> {
    if k >= 1 && k < n {
        Ok(())
    } else {
        Err(Error::RankOutOfRange {
            k,
            n,
            reason: "right-tail bound needs 1 <= k < n",
        })
    }
}

fn check_left_rank(n: usize, k: usize) -> Result<()> {
    if k == 1 {
        return Err(Error::LeftTailUndefinedAtRankOne);
    }
    if k >= 2 && k <= n {
        Ok(())
    } else {
        Err(Error::RankOutOfRange {
            k,
            n,
            reason: "left-tail bound needs 1 < k <= n",
        })
    }
}

/// `v_r = 2 / (k L^2)`.
pub fn right_variance(k: usize, l: f64) -> f64 {
    2.0 / (k as f64 * l * l)
}

/// `c_r = 2 / (k L)`.
pub fn right_scale(k: usize, l: f64) -> f64 {
    2.0 / (k as f64 * l)
}

/// `v_l = 2 (n - k + 1) / ((k - 1)^2 L^2)`.
pub fn left_variance(n: usize, k: usize, l: f64) -> f64 {
    let km1 = (k - 1) as f64;
    2.0 * (n - k + 1) as f64 / (km1 * km1 * l * l)
}

/// `sqrt(2 v_r gamma) + c_r gamma`: with probability at least `1 - exp(-gamma)`,
/// `X_(k) - E[X_(k)]` stays below this.
pub fn os_right_radius(p: OsBoundParams) -> Result<f64> {
    check_right_rank(p.n, p.k)?;
    check_floor(p.hazard_floor)?;
    check_nonneg("gamma", p.gamma)?;
    let v = right_variance(p.k, p.hazard_floor);
    let c = right_scale(p.k, p.hazard_floor);
    Ok((2.0 * v * p.gamma).sqrt() + c * p.gamma)
}

/// `sqrt(2 v_l gamma)`: with probability at least `1 - exp(-gamma)`,
/// `E[X_(k)] - X_(k)` stays below this.
pub fn os_left_radius(p: OsBoundParams) -> Result<f64> {
    check_left_rank(p.n, p.k)?;
    check_floor(p.hazard_floor)?;
    check_nonneg("gamma", p.gamma)?;
    Ok((2.0 * left_variance(p.n, p.k, p.hazard_floor) * p.gamma).sqrt())
}

impl QuantileBoundParams {
    fn validate(&self) -> Result<usize> {
        check_floor(self.hazard_floor)?;
        check_nonneg("bias constant b", self.bias)?;
        Ok(rank_for(self.n, self.tau)?.k())
    }

    /// `w_n = b / n`.
    pub fn bias_term(&self) -> f64 {
        self.bias / self.n as f64
    }

    fn os(&self, k: usize, gamma: f64) -> OsBoundParams {
        OsBoundParams {
            n: self.n,
            k,
            hazard_floor: self.hazard_floor,
            gamma,
        }
    }
}

/// Radii around the population quantile: with probability at least
/// `1 - exp(-gamma)` each, `Q_hat - Q < right` and `Q - Q_hat < left`.
pub fn quantile_radii(p: QuantileBoundParams, gamma: f64) -> Result<TailPair> {
    let k = p.validate()?;
    let w = p.bias_term();
    Ok(TailPair {
        right: os_right_radius(p.os(k, gamma))? + w,
        left: os_left_radius(p.os(k, gamma))? + w,
    })
}

/// Right-tail radius alone; valid whenever `k < n` (also at `k = 1`).
pub fn quantile_right_radius(p: QuantileBoundParams, gamma: f64) -> Result<f64> {
    let k = p.validate()?;
    Ok(os_right_radius(p.os(k, gamma))? + p.bias_term())
}

/// Left-tail radius alone; needs `k > 1`.
pub fn quantile_left_radius(p: QuantileBoundParams, gamma: f64) -> Result<f64> {
    let k = p.validate()?;
    Ok(os_left_radius(p.os(k, gamma))? + p.bias_term())
}

/// Exponents `eps^2 / (2 (v_r + (c_r + w) eps))` and `eps^2 / (2 (v_l + w eps))`.
fn epsilon_exponents(p: QuantileBoundParams, epsilon: f64) -> Result<TailPair> {
    let k = p.validate()?;
    check_right_rank(p.n, k)?;
    check_left_rank(p.n, k)?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be > 0, got {epsilon}"
        )));
    }
    let l = p.hazard_floor;
    let w = p.bias_term();
    let e2 = epsilon * epsilon;
    Ok(TailPair {
        right: e2 / (2.0 * (right_variance(k, l) + (right_scale(k, l) + w) * epsilon)),
        left: e2 / (2.0 * (left_variance(p.n, k, l) + w * epsilon)),
    })
}

/// `P(Q_hat - Q >= eps)` and `P(Q - Q_hat >= eps)` bounds.
pub fn quantile_epsilon_bound(p: QuantileBoundParams, epsilon: f64) -> Result<EpsilonBound> {
    let exponents = epsilon_exponents(p, epsilon)?;
    let gamma_below_one = exponents.right < 1.0 || exponents.left < 1.0;
    if gamma_below_one {
        log::warn!(
            "epsilon-form bound queried at implied gamma < 1 (right {:.3}, left {:.3}); \
             the form is only stated for gamma >= 1",
            exponents.right,
            exponents.left
        );
    }
    Ok(EpsilonBound {
        right: (-exponents.right).exp(),
        left: (-exponents.left).exp(),
        gamma_below_one,
    })
}

/// The deviation `eps` at which the epsilon form reaches `exp(-gamma)`,
/// i.e. the exact dual of [`quantile_epsilon_bound`]:
/// `eps = c gamma + sqrt(c^2 gamma^2 + 2 v gamma)` with `c = c_r + w` on the
/// right and `c = w` on the left.
pub fn epsilon_for_gamma(p: QuantileBoundParams, gamma: f64) -> Result<TailPair> {
    let k = p.validate()?;
    check_right_rank(p.n, k)?;
    check_left_rank(p.n, k)?;
    check_nonneg("gamma", gamma)?;
    let l = p.hazard_floor;
    let w = p.bias_term();
    let solve = |v: f64, c: f64| c * gamma + ((c * gamma).powi(2) + 2.0 * v * gamma).sqrt();
    Ok(TailPair {
        right: solve(right_variance(k, l), right_scale(k, l) + w),
        left: solve(left_variance(p.n, k, l), w),
    })
}

/// `gamma` solving `sqrt(2 v_r gamma) + (c_r + w) gamma = eps`, the right
/// radius with the bias term scaled by `gamma` (valid for `gamma >= 1`).
pub fn implied_gamma_right(p: QuantileBoundParams, epsilon: f64) -> Result<f64> {
    let k = p.validate()?;
    check_right_rank(p.n, k)?;
    check_nonneg("epsilon", epsilon)?;
    let v = right_variance(k, p.hazard_floor);
    let c = right_scale(k, p.hazard_floor) + p.bias_term();
    // quadratic in s = sqrt(gamma): c s^2 + sqrt(2 v) s - eps = 0
    let b = (2.0 * v).sqrt();
    let s = 2.0 * epsilon / (b + (b * b + 4.0 * c * epsilon).sqrt());
    Ok(s * s)
}

/// `alpha = 4 (1 + tau) / (1 - tau)`.
pub fn alpha(tau: QuantileLevel) -> f64 {
    4.0 * (1.0 + tau.value()) / tau.upper_mass()
}

/// `beta = 4/3 (2 L + b (1 - tau) L^2)`.
pub fn beta(tau: QuantileLevel, l: f64, b: f64) -> f64 {
    4.0 / 3.0 * (2.0 * l + b * tau.upper_mass() * l * l)
}

/// `alpha~ = 2 (tau + 2) / (1 - tau)`.
pub fn alpha_tilde(tau: QuantileLevel) -> f64 {
    2.0 * (tau.value() + 2.0) / tau.upper_mass()
}

/// `beta~ = 2 L + b (1 - tau) L^2`.
pub fn beta_tilde(tau: QuantileLevel, l: f64, b: f64) -> f64 {
    2.0 * l + b * tau.upper_mass() * l * l
}

/// Two-sided bound `2 exp(-n (1 - tau) L^2 eps^2 / (2 (alpha + beta eps)))`,
/// valid for `n >= 4 / (1 - tau)`. Capped at 1.
pub fn quantile_n_form_bound(p: QuantileBoundParams, epsilon: f64) -> Result<f64> {
    check_floor(p.hazard_floor)?;
    check_nonneg("bias constant b", p.bias)?;
    check_nonneg("epsilon", epsilon)?;
    let required = 4.0 / p.tau.upper_mass();
    if (p.n as f64) < required - 1e-9 {
        return Err(Error::SampleSizeTooSmall { n: p.n, required });
    }
    let l = p.hazard_floor;
    let denom = 2.0 * (alpha(p.tau) + beta(p.tau, l, p.bias) * epsilon);
    let exponent = p.n as f64 * p.tau.upper_mass() * l * l * epsilon * epsilon / denom;
    Ok((2.0 * (-exponent).exp()).min(1.0))
}

/// Two-sided bound without the sample-size restriction:
/// `2 exp(-(n (1 - tau) - 1) L^2 eps^2 / (2 (alpha~ + beta~ eps)))`. Capped at 1.
pub fn quantile_n_form_bound_unrestricted(p: QuantileBoundParams, epsilon: f64) -> Result<f64> {
    check_floor(p.hazard_floor)?;
    check_nonneg("bias constant b", p.bias)?;
    check_nonneg("epsilon", epsilon)?;
    if p.n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let l = p.hazard_floor;
    let denom = 2.0 * (alpha_tilde(p.tau) + beta_tilde(p.tau, l, p.bias) * epsilon);
    let scaled = l * l * epsilon * epsilon / denom;
    let exponent = -(p.n as f64) * p.tau.upper_mass() * scaled + scaled;
    Ok((2.0 * exponent.exp()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tau(t: f64) -> QuantileLevel {
        QuantileLevel::new(t).unwrap()
    }

    fn os(n: usize, k: usize, l: f64, gamma: f64) -> OsBoundParams {
        OsBoundParams {
            n,
            k,
            hazard_floor: l,
            gamma,
        }
    }

    #[test]
    fn right_radius_values() {
        assert_eq!(os_right_radius(os(10, 1, 1.0, 0.0)).unwrap(), 0.0);
        // v_r = 1, c_r = 1 at k=2, L=1: sqrt(2 * 1 * 2) + 1 * 2
        assert_abs_diff_eq!(
            os_right_radius(os(10, 2, 1.0, 2.0)).unwrap(),
            4.0,
            epsilon = 1e-12
        );
        let base = os_right_radius(os(30, 4, 0.7, 1.3)).unwrap();
        let doubled = os_right_radius(os(30, 4, 1.4, 1.3)).unwrap();
        assert_abs_diff_eq!(doubled, base / 2.0, epsilon = 1e-12);
        assert!(os_right_radius(os(5, 5, 1.0, 1.0)).is_err());
    }

    #[test]
    fn left_radius_values() {
        assert_eq!(os_left_radius(os(10, 2, 1.0, 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(
            os_left_radius(os(10, 6, 1.0, 1.0)).unwrap(),
            0.8f64.sqrt(),
            epsilon = 1e-12
        );
        assert!(matches!(
            os_left_radius(os(10, 1, 1.0, 1.0)),
            Err(Error::LeftTailUndefinedAtRankOne)
        ));
    }

    #[test]
    fn quantile_radius_arithmetic() {
        let p = QuantileBoundParams {
            n: 100,
            tau: tau(0.5),
            hazard_floor: 0.25,
            bias: 1.0,
        };
        let r = quantile_radii(p, 1.0).unwrap();
        let expected = (2.0 * 2.0 / (50.0 * 0.0625_f64)).sqrt() + 2.0 / (50.0 * 0.25) + 0.01;
        assert_abs_diff_eq!(r.right, expected, epsilon = 1e-12);

        let unbiased = QuantileBoundParams { bias: 0.0, ..p };
        let r0 = quantile_radii(unbiased, 1.0).unwrap();
        assert_eq!(r0.right, os_right_radius(os(100, 50, 0.25, 1.0)).unwrap());
        assert_eq!(r0.left, os_left_radius(os(100, 50, 0.25, 1.0)).unwrap());
    }

    #[test]
    fn radii_shrink_with_n() {
        let mut prev = TailPair {
            right: f64::INFINITY,
            left: f64::INFINITY,
        };
        for n in [50, 100, 200, 400] {
            let p = QuantileBoundParams {
                n,
                tau: tau(0.5),
                hazard_floor: 0.5,
                bias: 2.0,
            };
            let r = quantile_radii(p, 1.5).unwrap();
            assert!(r.right <= prev.right && r.left <= prev.left);
            prev = r;
        }
    }

    #[test]
    fn epsilon_form_limits() {
        let p = QuantileBoundParams {
            n: 200,
            tau: tau(0.5),
            hazard_floor: 1.0,
            bias: 1.0,
        };
        let tiny = quantile_epsilon_bound(p, 1e-9).unwrap();
        assert!(tiny.right > 0.999_999 && tiny.left > 0.999_999);
        assert!(tiny.gamma_below_one);

        let c = right_scale(100, 1.0) + p.bias_term();
        for eps in [10.0, 50.0, 200.0] {
            let b = quantile_epsilon_bound(p, eps).unwrap();
            assert!(b.right <= (-eps / (4.0 * c)).exp());
            assert!(!b.gamma_below_one);
        }
        assert!(quantile_epsilon_bound(p, 0.0).is_err());
    }

    #[test]
    fn epsilon_form_weaker_than_relaxed_radius() {
        let p = QuantileBoundParams {
            n: 120,
            tau: tau(0.7),
            hazard_floor: 0.4,
            bias: 3.0,
        };
        for eps in [0.5, 1.0, 4.0, 20.0] {
            let g = implied_gamma_right(p, eps).unwrap();
            let v = right_variance(36, 0.4);
            let c = right_scale(36, 0.4) + p.bias_term();
            assert_abs_diff_eq!((2.0 * v * g).sqrt() + c * g, eps, epsilon = 1e-9);
            // eps^2 / (2 (v + c eps)) = g - c^2 g^2 / (2 (v + c eps)) < g
            let prob = quantile_epsilon_bound(p, eps).unwrap().right;
            assert!(prob >= (-g).exp());
        }
    }

    #[test]
    fn n_form_values() {
        let p = QuantileBoundParams {
            n: 8,
            tau: tau(0.5),
            hazard_floor: 1.0,
            bias: 0.0,
        };
        assert_eq!(alpha(p.tau), 12.0);
        assert_abs_diff_eq!(beta(p.tau, 1.0, 0.0), 8.0 / 3.0, epsilon = 1e-15);
        let expected = (2.0 * (-4.0 / (2.0 * (12.0 + 8.0 / 3.0_f64))).exp()).min(1.0);
        assert_abs_diff_eq!(
            quantile_n_form_bound(p, 1.0).unwrap(),
            expected,
            epsilon = 1e-15
        );

        let small = QuantileBoundParams { n: 7, ..p };
        assert!(matches!(
            quantile_n_form_bound(small, 1.0),
            Err(Error::SampleSizeTooSmall { .. })
        ));
    }

    #[test]
    fn n_form_monotone() {
        let at = |n: usize, l: f64| {
            quantile_n_form_bound(
                QuantileBoundParams {
                    n,
                    tau: tau(0.5),
                    hazard_floor: l,
                    bias: 0.5,
                },
                0.3,
            )
            .unwrap()
        };
        assert!(at(8, 1.0) >= at(16, 1.0) && at(16, 1.0) >= at(32, 1.0));
        assert!(at(64, 0.5) >= at(64, 1.0) && at(64, 1.0) >= at(64, 2.0));
    }

    #[test]
    fn unrestricted_values() {
        let p = QuantileBoundParams {
            n: 16,
            tau: tau(0.5),
            hazard_floor: 1.0,
            bias: 0.0,
        };
        assert_eq!(alpha_tilde(p.tau), 10.0);
        assert_eq!(beta_tilde(p.tau, 1.0, 0.0), 2.0);
        let expected = 2.0 * (-8.0 / 24.0 + 1.0 / 24.0f64).exp();
        assert_abs_diff_eq!(
            quantile_n_form_bound_unrestricted(p, 1.0).unwrap(),
            expected.min(1.0),
            epsilon = 1e-15
        );
        let tiny = quantile_n_form_bound_unrestricted(p, 1e-12).unwrap();
        assert_eq!(tiny, 1.0);
    }
}
