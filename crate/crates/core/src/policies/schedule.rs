//! Phase lengths shared by the successive accept/reject and successive
//! reject families.

use crate::error::{Error, Result};
use crate::order_stats::robust_ceil;

/// `1/2 + sum_{i=2}^{K} 1/i`, the normalizer of the accept/reject schedule.
pub fn log_bar(k: usize) -> f64 {
    log_tilde(k, 1)
}

/// `m/(m+1) + sum_{i=m+1}^{K} 1/i`, the normalizer of the reject-only
/// schedule. Equals [`log_bar`] bit for bit when `m = 1`.
pub fn log_tilde(k: usize, m: usize) -> f64 {
    let lead = m as f64 / (m + 1) as f64;
    (m + 1..=k).fold(lead, |acc, i| acc + 1.0 / i as f64)
}

/// Which schedule a policy follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleFamily {
    /// `K - 1` phases normalized by `log_bar(K)` (SAR, Q-SAR).
    AcceptReject,
    /// `K - m` phases normalized by `log_tilde(K)` (SR, Q-SR).
    Reject,
}

/// Cumulative per-arm pull counts `n_0 = 0 <= n_1 <= ... <= n_P`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    pub family: ScheduleFamily,
    pub arms: usize,
    pub m: usize,
    pub budget: usize,
    pub normalizer: f64,
    cumulative: Vec<usize>,
}

impl PhaseSchedule {
    /// Number of phases `P`.
    pub fn phases(&self) -> usize {
        self.cumulative.len() - 1
    }

    /// `n_p`, with `n_0 = 0`.
    pub fn n(&self, p: usize) -> usize {
        self.cumulative[p]
    }

    pub fn cumulative(&self) -> &[usize] {
        &self.cumulative
    }

    /// Pulls per active arm in phase `p` (1-based).
    pub fn increment(&self, p: usize) -> usize {
        self.cumulative[p] - self.cumulative[p - 1]
    }

    /// Active arms during phase `p` (1-based).
    pub fn active_arms(&self, p: usize) -> usize {
        self.arms + 1 - p
    }

    /// Pulls implied by running every phase to completion.
    pub fn total_pulls(&self) -> usize {
        (1..=self.phases())
            .map(|p| self.active_arms(p) * self.increment(p))
            .sum()
    }
}

pub fn build_schedule(
    arms: usize,
    m: usize,
    budget: usize,
    family: ScheduleFamily,
) -> Result<PhaseSchedule> {
    if arms < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 arms, got {arms}"
        )));
    }
    if m == 0 || m >= arms {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= m < K, got m={m}, K={arms}"
        )));
    }
    if budget <= arms {
        return Err(Error::InvalidParameter(format!(
            "budget N={budget} must exceed the number of arms K={arms}"
        )));
    }
    let (phases, normalizer) = match family {
        ScheduleFamily::AcceptReject => (arms - 1, log_bar(arms)),
        ScheduleFamily::Reject => (arms - m, log_tilde(arms, m)),
    };
    let spare = (budget - arms) as f64;
    let mut cumulative = Vec::with_capacity(phases + 1);
    cumulative.push(0);
    for p in 1..=phases {
        let n_p = robust_ceil(spare / (normalizer * (arms + 1 - p) as f64));
        cumulative.push(n_p);
    }
    Ok(PhaseSchedule {
        family,
        arms,
        m,
        budget,
        normalizer,
        cumulative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn normalizers() {
        assert_eq!(log_bar(2), 1.0);
        assert_abs_diff_eq!(log_bar(4), 0.5 + 0.5 + 1.0 / 3.0 + 0.25, epsilon = 1e-15);
        assert_eq!(log_tilde(4, 1).to_bits(), log_bar(4).to_bits());
        assert_abs_diff_eq!(
            log_tilde(5, 2),
            2.0 / 3.0 + 1.0 / 3.0 + 0.25 + 0.2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn two_arm_schedule() {
        for n in [3usize, 10, 101, 1000] {
            let s = build_schedule(2, 1, n, ScheduleFamily::AcceptReject).unwrap();
            assert_eq!(s.phases(), 1);
            assert_eq!(s.n(1), (n - 2).div_ceil(2));
        }
    }

    #[test]
    fn hand_computed_ceilings() {
        // 95 / (log_bar(5) * (6 - p)) = 10.65, 13.32, 17.76, 26.64
        let sar = build_schedule(5, 2, 100, ScheduleFamily::AcceptReject).unwrap();
        assert_eq!(sar.cumulative(), &[0, 11, 14, 18, 27]);
        // 95 / (log_tilde(5, 2) * (6 - p)) = 13.10, 16.38, 21.84
        let sr = build_schedule(5, 2, 100, ScheduleFamily::Reject).unwrap();
        assert_eq!(sr.cumulative(), &[0, 14, 17, 22]);
        assert!(sar.total_pulls() <= 100);
        assert!(sr.total_pulls() <= 100);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(build_schedule(1, 1, 10, ScheduleFamily::Reject).is_err());
        assert!(build_schedule(4, 4, 10, ScheduleFamily::Reject).is_err());
        assert!(build_schedule(4, 0, 10, ScheduleFamily::Reject).is_err());
        assert!(build_schedule(4, 1, 4, ScheduleFamily::Reject).is_err());
    }
}
