//! Fixed-budget identification policies.
//!
//! Every policy pulls arms through an [`ArmPool`], which gives each arm its
//! own stream derived from the run key. An arm's draws therefore do not
//! depend on the order in which other arms are pulled, and two policies run
//! with the same key see identical rewards.

pub mod schedule;

use std::fmt;
use std::str::FromStr;

use crate::bandit::{Environment, Policy, RunOutcome};
use crate::distributions::QuantileLevel;
use crate::error::{Error, Result};
use crate::order_stats::{empirical_quantile_in_place, min_samples_for, rank_for};
use crate::rng;

pub use schedule::{build_schedule, log_bar, log_tilde, PhaseSchedule, ScheduleFamily};

/// The arm-quality statistic a policy ranks by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statistic {
    Quantile(QuantileLevel),
    Mean,
}

/// Available policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Quantile successive accepts and rejects.
    QSar,
    /// Quantile successive rejects.
    QSr,
    /// Mean successive accepts and rejects.
    Sar,
    /// Mean successive rejects.
    Sr,
    /// Uniform allocation, top-m by empirical quantile.
    QUniform,
    /// Quantile batch elimination.
    QBe,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 6] = [
        PolicyKind::QSar,
        PolicyKind::QSr,
        PolicyKind::Sar,
        PolicyKind::Sr,
        PolicyKind::QUniform,
        PolicyKind::QBe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::QSar => "qsar",
            PolicyKind::QSr => "qsr",
            PolicyKind::Sar => "sar",
            PolicyKind::Sr => "sr",
            PolicyKind::QUniform => "quniform",
            PolicyKind::QBe => "qbe",
        }
    }

    pub fn uses_quantile(self) -> bool {
        !matches!(self, PolicyKind::Sar | PolicyKind::Sr)
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == normalized)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown policy '{s}' (expected one of qsar, qsr, sar, sr, quniform, qbe)"
                ))
            })
    }
}

/// A policy bound to its statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    pub statistic: Statistic,
}

impl PolicyConfig {
    /// Quantile policies take `tau`; mean policies ignore it.
    pub fn new(kind: PolicyKind, tau: QuantileLevel) -> Self {
        let statistic = if kind.uses_quantile() {
            Statistic::Quantile(tau)
        } else {
            Statistic::Mean
        };
        Self { kind, statistic }
    }

    pub fn for_env(kind: PolicyKind, env: &Environment) -> Self {
        Self::new(kind, env.tau())
    }

    fn too_small(&self, budget: usize, reason: String) -> Error {
        Error::BudgetTooSmall {
            policy: self.kind.to_string(),
            budget,
            reason,
        }
    }

    /// Smallest budget that passes [`Policy::check_budget`].
    pub fn min_budget(&self, env: &Environment) -> usize {
        let mut n = env.num_arms() + 1;
        while self.check_budget(env, n).is_err() {
            n += 1;
        }
        n
    }
}

impl Policy for PolicyConfig {
    fn name(&self) -> String {
        self.kind.to_string()
    }

    fn stream_label(&self) -> u64 {
        self.kind as u64 + 1
    }

    fn check_budget(&self, env: &Environment, budget: usize) -> Result<()> {
        let arms = env.num_arms();
        let m = env.m();
        let family = match self.kind {
            PolicyKind::QSar | PolicyKind::Sar => Some(ScheduleFamily::AcceptReject),
            PolicyKind::QSr | PolicyKind::Sr => Some(ScheduleFamily::Reject),
            PolicyKind::QUniform | PolicyKind::QBe => None,
        };
        if let Some(family) = family {
            if budget <= arms {
                return Err(self.too_small(budget, format!("needs N > K = {arms}")));
            }
            let schedule = build_schedule(arms, m, budget, family)?;
            if let Statistic::Quantile(tau) = self.statistic {
                let required = 4.0 / tau.upper_mass() * schedule.normalizer + arms as f64;
                if (budget as f64) < required {
                    return Err(self.too_small(
                        budget,
                        format!(
                            "needs N >= 4/(1-tau) * {:.4} + K = {required:.3}",
                            schedule.normalizer
                        ),
                    ));
                }
                if rank_for(schedule.n(1), tau).is_err() {
                    return Err(self.too_small(
                        budget,
                        format!(
                            "first phase pulls each arm {} times, fewer than the {} needed for a \
                             {tau}-quantile",
                            schedule.n(1),
                            min_samples_for(tau)
                        ),
                    ));
                }
            }
            return Ok(());
        }
        let tau = match self.statistic {
            Statistic::Quantile(tau) => tau,
            Statistic::Mean => unreachable!("uniform and batch policies rank by quantile"),
        };
        let needed = min_samples_for(tau);
        match self.kind {
            PolicyKind::QUniform => {
                if budget / arms < needed {
                    return Err(self.too_small(budget, format!("needs floor(N/K) >= {needed}")));
                }
            }
            PolicyKind::QBe => {
                if budget / (arms - m) < arms * needed {
                    return Err(
                        self.too_small(budget, format!("needs floor(N/(K-m)) >= K * {needed}"))
                    );
                }
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    fn run(&self, env: &Environment, budget: usize, run_key: u64) -> Result<RunOutcome> {
        self.run_in_pool(env, budget, ArmPool::new(env, run_key))
    }
}

impl PolicyConfig {
    /// Like [`Policy::run`], but arm `i` draws from the stream of id
    /// `stream_ids[i]` instead of `i`. Relabelling arms together with their
    /// stream ids relabels the recommendation the same way.
    pub fn run_with_stream_ids(
        &self,
        env: &Environment,
        budget: usize,
        run_key: u64,
        stream_ids: &[u64],
    ) -> Result<RunOutcome> {
        if stream_ids.len() != env.num_arms() {
            return Err(Error::InvalidParameter(format!(
                "{} stream ids for {} arms",
                stream_ids.len(),
                env.num_arms()
            )));
        }
        self.run_in_pool(
            env,
            budget,
            ArmPool::with_stream_ids(env, run_key, stream_ids),
        )
    }

    fn run_in_pool(
        &self,
        env: &Environment,
        budget: usize,
        mut pool: ArmPool<'_>,
    ) -> Result<RunOutcome> {
        self.check_budget(env, budget)?;
        let recommended = match self.kind {
            PolicyKind::QSar | PolicyKind::Sar => {
                successive_accept_reject(&mut pool, env, budget, self.statistic)?
            }
            PolicyKind::QSr | PolicyKind::Sr => {
                successive_reject(&mut pool, env, budget, self.statistic)?
            }
            PolicyKind::QUniform => uniform(&mut pool, env, budget, self.statistic)?,
            PolicyKind::QBe => batch_elimination(&mut pool, env, budget, self.statistic)?,
        };
        Ok(pool.finish(recommended))
    }
}

/// Per-arm reward buffers fed by per-arm streams.
pub struct ArmPool<'a> {
    env: &'a Environment,
    streams: Vec<rng::Stream>,
    samples: Vec<Vec<f64>>,
}

impl<'a> ArmPool<'a> {
    pub fn new(env: &'a Environment, run_key: u64) -> Self {
        let ids: Vec<u64> = (0..env.num_arms() as u64).collect();
        Self::with_stream_ids(env, run_key, &ids)
    }

    /// Pool where arm `i` draws from stream `stream_ids[i]` of `run_key`.
    pub fn with_stream_ids(env: &'a Environment, run_key: u64, stream_ids: &[u64]) -> Self {
        Self {
            env,
            streams: stream_ids
                .iter()
                .map(|&id| rng::stream(run_key, &[id]))
                .collect(),
            samples: vec![Vec::new(); env.num_arms()],
        }
    }

    pub fn pull(&mut self, arm: usize, count: usize) {
        self.env.arms()[arm].sample_into(&mut self.streams[arm], count, &mut self.samples[arm]);
    }

    /// Statistic of everything observed so far on `arm`.
    pub fn statistic(&mut self, arm: usize, statistic: Statistic) -> Result<f64> {
        let buf = &mut self.samples[arm];
        match statistic {
            // selection reorders the buffer, which does not change the sample
            Statistic::Quantile(tau) => empirical_quantile_in_place(buf, tau),
            Statistic::Mean => {
                if buf.is_empty() {
                    return Err(Error::EmptySample);
                }
                Ok(buf.iter().sum::<f64>() / buf.len() as f64)
            }
        }
    }

    pub fn pulls(&self, arm: usize) -> usize {
        self.samples[arm].len()
    }

    fn finish(self, mut recommended: Vec<usize>) -> RunOutcome {
        recommended.sort_unstable();
        RunOutcome {
            recommended,
            pulls: self.samples.iter().map(Vec::len).collect(),
        }
    }
}

/// Active arms with their statistics, best first; ties go to the lower id.
fn rank_active(
    pool: &mut ArmPool<'_>,
    active: &[usize],
    statistic: Statistic,
) -> Result<Vec<(usize, f64)>> {
    let mut ranked = active
        .iter()
        .map(|&arm| Ok((arm, pool.statistic(arm, statistic)?)))
        .collect::<Result<Vec<_>>>()?;
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(ranked)
}

/// Successive accepts and rejects over `K - 1` phases.
///
/// With `l` arms still to find among the ranked active arms
/// `a_1 >= ... >= a_|A|`, phase `p` compares `a_1 - a_(l+1)` (accept the
/// best) against `a_l - a_|A|` (reject the worst). Ties reject the worst,
/// except when `l = |A| - 1 >= 2`, where rejecting would leave no
/// non-optimal arm in the active set.
fn successive_accept_reject(
    pool: &mut ArmPool<'_>,
    env: &Environment,
    budget: usize,
    statistic: Statistic,
) -> Result<Vec<usize>> {
    let arms = env.num_arms();
    let schedule = build_schedule(arms, env.m(), budget, ScheduleFamily::AcceptReject)?;
    let mut active: Vec<usize> = (0..arms).collect();
    let mut accepted = Vec::with_capacity(env.m());
    let mut left = env.m();

    for p in 1..=schedule.phases() {
        let pulls = schedule.increment(p);
        for &arm in &active {
            pool.pull(arm, pulls);
        }
        let ranked = rank_active(pool, &active, statistic)?;
        let size = ranked.len();
        debug_assert!(left >= 1 && left < size);
        let (best, best_value) = ranked[0];
        let (worst, worst_value) = ranked[size - 1];
        let gap_best = best_value - ranked[left].1;
        let gap_worst = ranked[left - 1].1 - worst_value;

        let accept = if gap_best == gap_worst {
            left == size - 1 && left >= 2
        } else {
            gap_best > gap_worst
        };
        if accept {
            active.retain(|&a| a != best);
            accepted.push(best);
            left -= 1;
        } else {
            active.retain(|&a| a != worst);
        }
    }
    debug_assert_eq!(active.len(), 1);
    accepted.extend(active);
    Ok(accepted)
}

/// Successive rejects over `K - m` phases; the worst active arm (ties: the
/// higher id) is dropped each phase.
fn successive_reject(
    pool: &mut ArmPool<'_>,
    env: &Environment,
    budget: usize,
    statistic: Statistic,
) -> Result<Vec<usize>> {
    let arms = env.num_arms();
    let schedule = build_schedule(arms, env.m(), budget, ScheduleFamily::Reject)?;
    let mut active: Vec<usize> = (0..arms).collect();
    for p in 1..=schedule.phases() {
        let pulls = schedule.increment(p);
        for &arm in &active {
            pool.pull(arm, pulls);
        }
        let ranked = rank_active(pool, &active, statistic)?;
        let worst = ranked[ranked.len() - 1].0;
        active.retain(|&a| a != worst);
    }
    Ok(active)
}

/// `floor(N / K)` pulls per arm, then the top `m`.
fn uniform(
    pool: &mut ArmPool<'_>,
    env: &Environment,
    budget: usize,
    statistic: Statistic,
) -> Result<Vec<usize>> {
    let arms = env.num_arms();
    let active: Vec<usize> = (0..arms).collect();
    for &arm in &active {
        pool.pull(arm, budget / arms);
    }
    let ranked = rank_active(pool, &active, statistic)?;
    Ok(ranked[..env.m()].iter().map(|&(arm, _)| arm).collect())
}

/// `K - m` batches of `floor(N / (K - m))` pulls, each split evenly over the
/// active arms; after each batch the arm with the lowest cumulative
/// statistic is eliminated.
fn batch_elimination(
    pool: &mut ArmPool<'_>,
    env: &Environment,
    budget: usize,
    statistic: Statistic,
) -> Result<Vec<usize>> {
    let arms = env.num_arms();
    let batches = arms - env.m();
    let batch_budget = budget / batches;
    let mut active: Vec<usize> = (0..arms).collect();
    for _ in 0..batches {
        let per_arm = batch_budget / active.len();
        for &arm in &active {
            pool.pull(arm, per_arm);
        }
        let ranked = rank_active(pool, &active, statistic)?;
        let worst = ranked[ranked.len() - 1].0;
        active.retain(|&a| a != worst);
    }
    Ok(active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;

    fn point_arms(values: &[f64], tau: f64, m: usize) -> Environment {
        let arms = values
            .iter()
            .map(|&v| DistributionSpec::empirical(vec![v]).unwrap())
            .collect();
        Environment::new(arms, QuantileLevel::new(tau).unwrap(), m).unwrap()
    }

    fn run(kind: PolicyKind, env: &Environment, budget: usize) -> RunOutcome {
        PolicyConfig::for_env(kind, env)
            .run(env, budget, 17)
            .unwrap()
    }

    #[test]
    fn parse_names() {
        assert_eq!("Q-SAR".parse::<PolicyKind>().unwrap(), PolicyKind::QSar);
        assert_eq!("qbe".parse::<PolicyKind>().unwrap(), PolicyKind::QBe);
        assert_eq!(
            "Q_Uniform".parse::<PolicyKind>().unwrap(),
            PolicyKind::QUniform
        );
        assert!("ucb".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn qsar_hand_traces() {
        // ids 0, 1, 2 hold constants 1, 2, 3
        let env = point_arms(&[1.0, 2.0, 3.0], 0.5, 1);
        assert_eq!(run(PolicyKind::QSar, &env, 14).recommended, vec![2]);
        // phase 1: accept-gap 3-1=2 beats reject-gap 2-1=1, so 3 is accepted;
        // phase 2: gaps tie with one slot left, so 1 is rejected
        let env = point_arms(&[1.0, 2.0, 3.0], 0.5, 2);
        assert_eq!(run(PolicyKind::QSar, &env, 14).recommended, vec![1, 2]);
    }

    #[test]
    fn reject_family_on_constants() {
        let env = point_arms(&[1.0, 2.0, 3.0], 0.5, 1);
        assert_eq!(run(PolicyKind::QSr, &env, 14).recommended, vec![2]);
        assert_eq!(run(PolicyKind::Sr, &env, 12).recommended, vec![2]);
        assert_eq!(run(PolicyKind::Sar, &env, 12).recommended, vec![2]);
        let env = point_arms(&[1.0, 2.0, 3.0, 4.0], 0.5, 2);
        assert_eq!(run(PolicyKind::QSr, &env, 40).recommended, vec![2, 3]);
    }

    #[test]
    fn uniform_and_batch_on_constants() {
        let env = point_arms(&[5.0, 1.0, 4.0, 2.0, 3.0], 0.5, 2);
        let u = run(PolicyKind::QUniform, &env, 23);
        assert_eq!(u.recommended, vec![0, 2]);
        assert_eq!(u.pulls_used(), 5 * (23 / 5));
        let b = run(PolicyKind::QBe, &env, 60);
        assert_eq!(b.recommended, vec![0, 2]);
        assert!(b.pulls_used() <= 60);
    }

    #[test]
    fn batch_elimination_drops_worst_first() {
        let env = point_arms(&[3.0, 1.0, 2.0], 0.5, 1);
        let policy = PolicyConfig::for_env(PolicyKind::QBe, &env);
        let mut pool = ArmPool::new(&env, 1);
        let survivors = batch_elimination(&mut pool, &env, 100, policy.statistic).unwrap();
        assert_eq!(survivors, vec![0]);
        // arm 1 (value 1) left after the first batch, arm 2 after the second
        assert_eq!(pool.pulls(1), 50 / 3);
        assert_eq!(pool.pulls(2), 50 / 3 + 50 / 2);
    }

    #[test]
    fn budget_preconditions() {
        let env = point_arms(&[1.0, 2.0, 3.0], 0.8, 1);
        let qsar = PolicyConfig::for_env(PolicyKind::QSar, &env);
        // 4/(1-0.8) * log_bar(3) + 3 = 20 * 1.3333 + 3 = 29.67
        assert!(qsar.check_budget(&env, 29).is_err());
        assert!(qsar.check_budget(&env, 30).is_ok());
        assert_eq!(qsar.min_budget(&env), 30);
        assert!(qsar.run(&env, 10, 0).is_err());

        let uni = PolicyConfig::for_env(PolicyKind::QUniform, &env);
        assert!(uni.check_budget(&env, 14).is_err());
        assert!(uni.check_budget(&env, 15).is_ok());

        let sr = PolicyConfig::for_env(PolicyKind::Sr, &env);
        assert!(sr.check_budget(&env, 3).is_err());
        assert!(sr.check_budget(&env, 4).is_ok());
    }

    #[test]
    fn rank_safety_beyond_the_error_bound_budget() {
        // 25 arms at tau = 0.8: the bound's budget condition allows N = 92,
        // where the first phase would pull each arm once
        let values: Vec<f64> = (1..=25).map(f64::from).collect();
        let env = point_arms(&values, 0.8, 5);
        let qsar = PolicyConfig::for_env(PolicyKind::QSar, &env);
        let err = qsar.check_budget(&env, 92).unwrap_err().to_string();
        assert!(err.contains("first phase"), "{err}");
        let n = qsar.min_budget(&env);
        assert!(qsar.run(&env, n, 3).is_ok());
    }
}
