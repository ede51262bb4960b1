//! Bandit environments, ground-truth optimal sets and gaps, and the
//! Monte-Carlo estimator of a policy's probability of error.
//!
//! Arm ids are 0-based indices into [`Environment::arms`].

use rayon::prelude::*;

use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};
use crate::rng::{self, domain};

/// A set of arms, the quantile level that ranks them, and the number `m`
/// of arms to identify.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    arms: Vec<DistributionSpec>,
    tau: QuantileLevel,
    m: usize,
    quantiles: Vec<f64>,
    optimal: Vec<usize>,
}

impl Environment {
    pub fn new(arms: Vec<DistributionSpec>, tau: QuantileLevel, m: usize) -> Result<Self> {
        if arms.len() < 2 {
            return Err(Error::InvalidEnvironment(format!(
                "need at least 2 arms, got {}",
                arms.len()
            )));
        }
        if m == 0 || m >= arms.len() {
            return Err(Error::InvalidEnvironment(format!(
                "need 1 <= m < K, got m={m}, K={}",
                arms.len()
            )));
        }
        for (i, arm) in arms.iter().enumerate() {
            arm.validate()
                .map_err(|e| Error::InvalidEnvironment(format!("arm {i}: {e}")))?;
        }
        let quantiles: Vec<f64> = arms.iter().map(|a| a.true_quantile(tau)).collect();
        let optimal = top_m(&quantiles, m)?;
        Ok(Self {
            arms,
            tau,
            m,
            quantiles,
            optimal,
        })
    }

    pub fn arms(&self) -> &[DistributionSpec] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn tau(&self) -> QuantileLevel {
        self.tau
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// True `tau`-quantile of every arm.
    pub fn quantiles(&self) -> &[f64] {
        &self.quantiles
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(DistributionSpec::mean).collect()
    }

    /// The `m` arms with the largest true quantiles, ascending by id.
    pub fn true_optimal_set(&self) -> &[usize] {
        &self.optimal
    }

    pub fn gaps(&self) -> GapProfile {
        gap_profile(&self.quantiles, self.m).expect("uniqueness checked at construction")
    }
}

/// Ids of the `m` largest values, ascending by id. Errors when the m-th and
/// (m+1)-th largest values tie.
fn top_m(values: &[f64], m: usize) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let (mth, next) = (values[order[m - 1]], values[order[m]]);
    if mth <= next {
        return Err(Error::NonUniqueOptimalSet(format!(
            "arms {} and {} tie at the m/(m+1) boundary with value {mth}",
            order[m - 1],
            order[m]
        )));
    }
    let mut set = order[..m].to_vec();
    set.sort_unstable();
    Ok(set)
}

/// Gaps of every arm to the optimal/non-optimal boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    /// `D_i`, indexed by arm id.
    pub delta: Vec<f64>,
    /// `D_(1) <= ... <= D_(K)`.
    pub delta_sorted: Vec<f64>,
    pub optimal_set: Vec<usize>,
}

impl GapProfile {
    pub fn min_gap(&self) -> f64 {
        self.delta_sorted[0]
    }
}

/// Gaps for an arbitrary per-arm statistic: optimal arms measure against
/// the (m+1)-th best value, the rest against the m-th best.
pub fn gap_profile(values: &[f64], m: usize) -> Result<GapProfile> {
    if m == 0 || m >= values.len() {
        return Err(Error::InvalidEnvironment(format!(
            "need 1 <= m < K, got m={m}, K={}",
            values.len()
        )));
    }
    let optimal_set = top_m(values, m)?;
    let mut ranked = values.to_vec();
    ranked.sort_by(|a, b| b.total_cmp(a));
    let (mth, next) = (ranked[m - 1], ranked[m]);
    let delta: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if optimal_set.binary_search(&i).is_ok() {
                v - next
            } else {
                mth - v
            }
        })
        .collect();
    let mut delta_sorted = delta.clone();
    delta_sorted.sort_by(f64::total_cmp);
    Ok(GapProfile {
        delta,
        delta_sorted,
        optimal_set,
    })
}

/// Result of one episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// Recommended arm ids, ascending.
    pub recommended: Vec<usize>,
    /// Pulls per arm.
    pub pulls: Vec<usize>,
}

impl RunOutcome {
    pub fn pulls_used(&self) -> usize {
        self.pulls.iter().sum()
    }
}

/// A fixed-budget identification procedure.
pub trait Policy: Sync {
    fn name(&self) -> String;

    /// Reject budgets too small to run without rank underflow.
    fn check_budget(&self, env: &Environment, budget: usize) -> Result<()>;

    /// One episode; all randomness comes from streams derived from `run_key`.
    fn run(&self, env: &Environment, budget: usize, run_key: u64) -> Result<RunOutcome>;

    /// Label separating this policy's streams from other policies' when
    /// common random numbers are off.
    fn stream_label(&self) -> u64;
}

/// Empirical probability of error over independent runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    pub runs: usize,
    pub errors: usize,
    pub e_hat: f64,
    pub stderr: f64,
}

impl ErrorEstimate {
    pub fn from_counts(runs: usize, errors: usize) -> Self {
        let e_hat = errors as f64 / runs as f64;
        Self {
            runs,
            errors,
            e_hat,
            stderr: (e_hat * (1.0 - e_hat) / runs as f64).sqrt(),
        }
    }
}

/// Options for [`evaluate`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalOptions {
    /// Share arm streams across policies (common random numbers).
    pub common_random_numbers: bool,
}

/// Stream key of run `run`.
pub fn run_key(base_seed: u64, run: usize, policy_label: Option<u64>) -> u64 {
    match policy_label {
        Some(label) => rng::derive_key(base_seed, &[domain::POLICY_RUN, run as u64, label]),
        None => rng::derive_key(base_seed, &[domain::POLICY_RUN, run as u64]),
    }
}

/// Run `runs` independent episodes and count misidentifications.
pub fn evaluate<P: Policy + ?Sized>(
    env: &Environment,
    policy: &P,
    budget: usize,
    runs: usize,
    base_seed: u64,
    options: EvalOptions,
) -> Result<ErrorEstimate> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be >= 1".into()));
    }
    policy.check_budget(env, budget)?;
    let label = (!options.common_random_numbers).then(|| policy.stream_label());
    let optimal = env.true_optimal_set();
    let errors = (0..runs)
        .into_par_iter()
        .map(|run| {
            let outcome = policy
                .run(env, budget, run_key(base_seed, run, label))
                .map_err(|e| Error::RunFailed {
                    run,
                    source: Box::new(e),
                })?;
            debug_assert!(outcome.pulls_used() <= budget);
            Ok::<usize, Error>(usize::from(outcome.recommended != optimal))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(ErrorEstimate::from_counts(runs, errors))
}
