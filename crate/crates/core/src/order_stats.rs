//! Order statistics in decreasing order: `X_(1) >= X_(2) >= ... >= X_(n)`.
//!
//! The empirical `tau`-quantile is the order statistic of rank
//! `floor(n (1 - tau))`. A rank of zero is an error, never clamped.

use std::cmp::Ordering;

use crate::distributions::QuantileLevel;
use crate::error::{Error, Result};

/// Floor of `x` that treats values within rounding noise of an integer as
/// that integer, so `10 * (1 - 0.8)` gives 2 rather than 1.
pub(crate) fn robust_floor(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest as usize
    } else {
        x.floor() as usize
    }
}

pub(crate) fn robust_ceil(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.abs().max(1.0) {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// Rank `k` of an order statistic among `n` samples, `1 <= k <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rank {
    k: usize,
    n: usize,
}

impl Rank {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::RankOutOfRange {
                k,
                n,
                reason: "rank must satisfy 1 <= k <= n",
            });
        }
        Ok(Self { k, n })
    }

    pub fn k(self) -> usize {
        self.k
    }

    pub fn n(self) -> usize {
        self.n
    }
}

/// The rank `floor(n (1 - tau))` used by the empirical quantile.
pub fn rank_for(n: usize, tau: QuantileLevel) -> Result<Rank> {
    let k = robust_floor(n as f64 * tau.upper_mass());
    if k == 0 {
        return Err(Error::RankUnderflow {
            n,
            tau: tau.value(),
        });
    }
    Rank::new(k, n)
}

/// Smallest sample size whose quantile rank is at least one.
pub fn min_samples_for(tau: QuantileLevel) -> usize {
    let mut n = robust_ceil(1.0 / tau.upper_mass()).max(1);
    while rank_for(n, tau).is_err() {
        n += 1;
    }
    n
}

fn descending(a: &f64, b: &f64) -> Ordering {
    b.total_cmp(a)
}

/// A sample sorted in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    values: Vec<f64>,
}

impl SortedSample {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        values.sort_by(descending);
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn check(&self, k: Rank) -> Result<()> {
        if k.n() != self.len() {
            return Err(Error::RankOutOfRange {
                k: k.k(),
                n: self.len(),
                reason: "rank was built for a different sample size",
            });
        }
        Ok(())
    }

    /// `X_(k)`, the k-th largest value.
    pub fn order_statistic(&self, k: Rank) -> Result<f64> {
        self.check(k)?;
        Ok(self.values[k.k() - 1])
    }

    /// `S_k = X_(k) - X_(k+1)`.
    pub fn spacing(&self, k: Rank) -> Result<f64> {
        self.check(k)?;
        if k.k() >= self.len() {
            return Err(Error::RankOutOfRange {
                k: k.k(),
                n: self.len(),
                reason: "spacing needs k <= n - 1",
            });
        }
        Ok(self.values[k.k() - 1] - self.values[k.k()])
    }
}

/// The k-th largest value of `buf` (1-based), found by selection. Reorders `buf`.
pub fn kth_largest(buf: &mut [f64], k: usize) -> f64 {
    debug_assert!(k >= 1 && k <= buf.len());
    let (_, kth, _) = buf.select_nth_unstable_by(k - 1, descending);
    *kth
}

/// `X_(floor(n (1 - tau)))` of `raw`.
pub fn empirical_quantile(raw: &[f64], tau: QuantileLevel) -> Result<f64> {
    if raw.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut scratch = raw.to_vec();
    empirical_quantile_in_place(&mut scratch, tau)
}

/// As [`empirical_quantile`], but reorders `buf` instead of copying it.
pub fn empirical_quantile_in_place(buf: &mut [f64], tau: QuantileLevel) -> Result<f64> {
    if buf.is_empty() {
        return Err(Error::EmptySample);
    }
    let rank = rank_for(buf.len(), tau)?;
    Ok(kth_largest(buf, rank.k()))
}

pub(crate) fn quantile_of_ascending(ascending: &[f64], tau: QuantileLevel) -> Result<f64> {
    let n = ascending.len();
    let rank = rank_for(n, tau)?;
    Ok(ascending[n - rank.k()])
}

/// `inf{x : F_n(x) >= tau}` on an ascending sample.
pub(crate) fn ecdf_inverse(ascending: &[f64], tau: QuantileLevel) -> f64 {
    let n = ascending.len();
    let idx = robust_ceil(n as f64 * tau.value()).clamp(1, n);
    ascending[idx - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tau(t: f64) -> QuantileLevel {
        QuantileLevel::new(t).unwrap()
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_for(4, tau(0.5)).unwrap().k(), 2);
        assert_eq!(rank_for(10, tau(0.8)).unwrap().k(), 2);
        assert!(matches!(
            rank_for(3, tau(0.8)),
            Err(Error::RankUnderflow { .. })
        ));
        assert_eq!(min_samples_for(tau(0.8)), 5);
        assert_eq!(min_samples_for(tau(0.5)), 2);
        assert_eq!(min_samples_for(tau(0.3)), 2);
    }

    #[test]
    fn order_statistics() {
        let s = SortedSample::new(vec![1.0, 4.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.order_statistic(Rank::new(1, 4).unwrap()).unwrap(), 4.0);
        assert_eq!(s.order_statistic(Rank::new(4, 4).unwrap()).unwrap(), 1.0);
        let dup = SortedSample::new(vec![5.0, 2.0, 5.0]).unwrap();
        assert_eq!(dup.order_statistic(Rank::new(2, 3).unwrap()).unwrap(), 5.0);
        assert!(Rank::new(5, 4).is_err());
        assert!(Rank::new(0, 4).is_err());
        assert!(s.order_statistic(Rank::new(2, 3).unwrap()).is_err());
        assert!(SortedSample::new(vec![]).is_err());
    }

    #[test]
    fn quantiles() {
        assert_eq!(
            empirical_quantile(&[1.0, 2.0, 3.0, 4.0], tau(0.5)).unwrap(),
            3.0
        );
        assert!(matches!(
            empirical_quantile(&[7.0], tau(0.3)),
            Err(Error::RankUnderflow { .. })
        ));
        assert_eq!(
            empirical_quantile(&[0.9, 0.1, 0.5, 0.7, 0.3], tau(0.6)).unwrap(),
            0.7
        );
        assert!(empirical_quantile(&[], tau(0.5)).is_err());
    }

    #[test]
    fn spacings() {
        let s = SortedSample::new(vec![4.0, 3.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.spacing(Rank::new(2, 4).unwrap()).unwrap(), 1.0);
        assert!(s.spacing(Rank::new(4, 4).unwrap()).is_err());
        let tie = SortedSample::new(vec![5.0, 5.0, 2.0]).unwrap();
        assert_eq!(tie.spacing(Rank::new(1, 3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn ecdf_inverse_is_left_continuous_quantile() {
        assert_eq!(ecdf_inverse(&[1.0, 2.0, 3.0], tau(0.5)), 2.0);
        assert_eq!(ecdf_inverse(&[1.0, 2.0, 3.0, 4.0], tau(0.5)), 2.0);
        assert_eq!(ecdf_inverse(&[4.0], tau(0.9)), 4.0);
    }
}
