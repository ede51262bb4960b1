//! Problem complexity of a quantile best-arm instance and the resulting
//! Q-SAR error bound.

use crate::concentration::bounds::{alpha, alpha_tilde, beta, beta_tilde};
use crate::distributions::QuantileLevel;
use crate::error::{Error, Result};
use crate::policies::schedule::log_bar;

/// Per-arm inputs to the complexity: hazard floor `L_i` and bias constant `b_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmHardness {
    pub hazard_floor: f64,
    pub bias: f64,
}

/// One `(i, j)` cell of the complexity grid (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityTerm {
    pub arm: usize,
    pub gap_rank: usize,
    pub h: f64,
    pub h_tilde: f64,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    pub tau: QuantileLevel,
    /// `H^tau`.
    pub h_tau: f64,
    /// `H~^tau`.
    pub h_tilde: f64,
    /// Constant `C` of the variant bound.
    pub constant_c: f64,
    /// `(i, j)` attaining each maximum.
    pub argmax_h: (usize, usize),
    pub argmax_h_tilde: (usize, usize),
    pub argmax_c: (usize, usize),
    pub terms: Vec<ComplexityTerm>,
}

/// `H^tau = max_{i,j} 8j/(1-tau) (4 alpha / (L_i^2 D_(j)^2) + beta_i / (L_i^2 D_(j)))`,
/// its tilde variant, and `C = max_{i,j} L_i^2 D_(j)^2 / (8 (4 alpha~ + beta~_i D_(j)))`.
///
/// `gaps` may be given in any order; `D_(j)` is the j-th smallest.
pub fn problem_complexity(
    gaps: &[f64],
    arms: &[ArmHardness],
    tau: QuantileLevel,
) -> Result<ComplexityReport> {
    if gaps.is_empty() || arms.is_empty() {
        return Err(Error::InvalidParameter(
            "complexity needs at least one gap and one arm".into(),
        ));
    }
    if let Some(g) = gaps.iter().find(|g| !(g.is_finite() && **g > 0.0)) {
        return Err(Error::NonUniqueOptimalSet(format!(
            "gap {g} is not strictly positive"
        )));
    }
    if let Some(a) = arms
        .iter()
        .find(|a| !(a.hazard_floor.is_finite() && a.hazard_floor > 0.0 && a.bias >= 0.0))
    {
        return Err(Error::InvalidParameter(format!(
            "arm hardness needs L > 0 and b >= 0, got L={}, b={}",
            a.hazard_floor, a.bias
        )));
    }
    let mut sorted = gaps.to_vec();
    sorted.sort_by(f64::total_cmp);

    let a = alpha(tau);
    let a_tilde = alpha_tilde(tau);
    let upper = tau.upper_mass();

    let mut terms = Vec::with_capacity(arms.len() * sorted.len());
    for (i, arm) in arms.iter().enumerate() {
        let l2 = arm.hazard_floor * arm.hazard_floor;
        let b = beta(tau, arm.hazard_floor, arm.bias);
        let b_tilde = beta_tilde(tau, arm.hazard_floor, arm.bias);
        for (j, &gap) in sorted.iter().enumerate() {
            let lead = 8.0 * (j + 1) as f64 / upper;
            terms.push(ComplexityTerm {
                arm: i + 1,
                gap_rank: j + 1,
                h: lead * (4.0 * a / (l2 * gap * gap) + b / (l2 * gap)),
                h_tilde: lead * (4.0 * a_tilde / (l2 * gap * gap) + b_tilde / (l2 * gap)),
                c: l2 * gap * gap / (8.0 * (4.0 * a_tilde + b_tilde * gap)),
            });
        }
    }

    let argmax = |key: fn(&ComplexityTerm) -> f64| {
        // first maximal cell in (i, j) order
        let best = terms.iter().fold(
            &terms[0],
            |best, t| if key(t) > key(best) { t } else { best },
        );
        (key(best), (best.arm, best.gap_rank))
    };
    let (h_tau, argmax_h) = argmax(|t| t.h);
    let (h_tilde, argmax_h_tilde) = argmax(|t| t.h_tilde);
    let (constant_c, argmax_c) = argmax(|t| t.c);

    Ok(ComplexityReport {
        tau,
        h_tau,
        h_tilde,
        constant_c,
        argmax_h,
        argmax_h_tilde,
        argmax_c,
        terms,
    })
}

/// Which Q-SAR error bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundVariant {
    /// `2 K^2 exp(-(N - K) / (log_bar(K) H^tau))`, for `N >= 4/(1-tau) log_bar(K) + K`.
    Standard,
    /// `2 K^2 exp(-(N - K) / (log_bar(K) H~^tau) + C)`, any budget.
    WithConstant,
}

/// Smallest budget covered by the standard bound.
pub fn min_budget_for_bound(arms: usize, tau: QuantileLevel) -> f64 {
    4.0 / tau.upper_mass() * log_bar(arms) + arms as f64
}

/// Upper bound on the probability that Q-SAR misidentifies the top `m` arms.
/// Capped at 1.
pub fn qsar_error_bound(
    budget: usize,
    arms: usize,
    m: usize,
    report: &ComplexityReport,
    variant: BoundVariant,
) -> Result<f64> {
    if arms < 2 || m == 0 || m >= arms {
        return Err(Error::InvalidParameter(format!(
            "need K >= 2 and 1 <= m < K, got K={arms}, m={m}"
        )));
    }
    if budget < arms {
        return Err(Error::InvalidParameter(format!(
            "budget {budget} below K={arms}"
        )));
    }
    let k = arms as f64;
    let spare = (budget - arms) as f64;
    let exponent = match variant {
        BoundVariant::Standard => {
            let required = min_budget_for_bound(arms, report.tau);
            if (budget as f64) < required {
                return Err(Error::BudgetTooSmall {
                    policy: "qsar error bound".into(),
                    budget,
                    reason: format!("needs N >= 4/(1-tau) log_bar(K) + K = {required:.3}"),
                });
            }
            -spare / (log_bar(arms) * report.h_tau)
        }
        BoundVariant::WithConstant => -spare / (log_bar(arms) * report.h_tilde) + report.constant_c,
    };
    Ok((2.0 * k * k * exponent.exp()).min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn tau(t: f64) -> QuantileLevel {
        QuantileLevel::new(t).unwrap()
    }

    fn unit_arms(k: usize) -> Vec<ArmHardness> {
        vec![
            ArmHardness {
                hazard_floor: 1.0,
                bias: 0.0
            };
            k
        ]
    }

    #[test]
    fn hand_enumerated_two_gaps() {
        // tau = 0.5: alpha = 12, beta = 8/3, lead 16
        let report = problem_complexity(&[1.0, 0.5], &unit_arms(2), tau(0.5)).unwrap();
        let term = |j: f64, d: f64| 16.0 * j * (48.0 / (d * d) + (8.0 / 3.0) / d);
        let expected = [term(1.0, 0.5), term(2.0, 1.0)]
            .into_iter()
            .fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(report.h_tau, expected, epsilon = 1e-9);
        assert_eq!(report.argmax_h, (1, 1));
        assert_eq!(report.terms.len(), 4);
    }

    #[test]
    fn gap_scaling() {
        let arms = unit_arms(3);
        let base = problem_complexity(&[0.5, 1.0, 2.0], &arms, tau(0.6)).unwrap();
        let scaled = problem_complexity(&[1.5, 3.0, 6.0], &arms, tau(0.6)).unwrap();
        let a = alpha(tau(0.6));
        let b = beta(tau(0.6), 1.0, 0.0);
        for (t0, t1) in base.terms.iter().zip(&scaled.terms) {
            let lead = 8.0 / 0.4 * t0.gap_rank as f64;
            let quad0 = t0.h - lead * b / [0.5, 1.0, 2.0][t0.gap_rank - 1];
            let quad1 = t1.h - lead * b / [1.5, 3.0, 6.0][t1.gap_rank - 1];
            assert_abs_diff_eq!(quad1, quad0 / 9.0, epsilon = 1e-9);
            let lin0 = t0.h - lead * 4.0 * a / [0.5_f64, 1.0, 2.0][t0.gap_rank - 1].powi(2);
            let lin1 = t1.h - lead * 4.0 * a / [1.5_f64, 3.0, 6.0][t1.gap_rank - 1].powi(2);
            assert_abs_diff_eq!(lin1, lin0 / 3.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_gap_rejected() {
        assert!(matches!(
            problem_complexity(&[0.0, 1.0], &unit_arms(2), tau(0.5)),
            Err(Error::NonUniqueOptimalSet(_))
        ));
    }

    #[test]
    fn error_bound_arithmetic() {
        let mut report = problem_complexity(&[1.0, 1.0], &unit_arms(2), tau(0.5)).unwrap();
        report.h_tau = 100.0;
        // K = 2: log_bar = 1, prefactor 8
        let n = 2000;
        assert_abs_diff_eq!(
            qsar_error_bound(n, 2, 1, &report, BoundVariant::Standard).unwrap(),
            (8.0 * (-(1998.0) / 100.0f64).exp()).min(1.0),
            epsilon = 1e-15
        );
        let lb5 = 0.5 + 0.5 + 1.0 / 3.0 + 0.25 + 0.2;
        assert_abs_diff_eq!(
            qsar_error_bound(1000, 5, 2, &report, BoundVariant::Standard).unwrap(),
            (50.0 * (-995.0 / (lb5 * 100.0f64)).exp()).min(1.0),
            epsilon = 1e-15
        );
        let mut prev = 1.0;
        for n in [1000, 2000, 4000, 8000, 16000] {
            let b = qsar_error_bound(n, 5, 2, &report, BoundVariant::Standard).unwrap();
            assert!(b <= prev);
            prev = b;
        }
        assert!(prev < 1e-20);
        assert!(qsar_error_bound(5, 5, 2, &report, BoundVariant::Standard).is_err());
        assert!(qsar_error_bound(5, 5, 2, &report, BoundVariant::WithConstant).is_ok());
    }
}
