//! Monte-Carlo checks of the tail bounds.
//!
//! Trials are processed in fixed-size blocks, each drawing from its own
//! derived stream, and the per-block counts are summed. The result is the
//! same for any number of worker threads.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::concentration::bounds::{
    os_left_radius, os_right_radius, quantile_left_radius, quantile_right_radius, OsBoundParams,
    QuantileBoundParams,
};
use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};
use crate::order_stats::{kth_largest, rank_for, Rank, SortedSample};
use crate::rng::{self, domain};

const BLOCK: usize = 4096;

/// Which side of the deviation is being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `X - center >= radius`.
    Right,
    /// `center - X >= radius`.
    Left,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Right => "right",
            Side::Left => "left",
        })
    }
}

/// One `(gamma, side)` cell of a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct TailCheck {
    pub gamma: f64,
    pub side: Side,
    pub radius: f64,
    /// `exp(-gamma)`.
    pub bound: f64,
    pub exceedances: u64,
    pub trials: u64,
    pub frequency: f64,
    /// Binomial standard error at the bound, `sqrt(bound (1 - bound) / trials)`.
    pub stderr: f64,
}

impl TailCheck {
    /// Frequency within three binomial standard errors of the bound.
    pub fn passed(&self) -> bool {
        self.frequency <= self.bound + 3.0 * self.stderr
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub spec: String,
    pub n: usize,
    pub k: usize,
    pub tau: Option<f64>,
    /// Deviations are measured from this: `E[X_(k)]` (estimated) or `Q^tau`.
    pub center: f64,
    /// Standard error of `center`; zero when it is exact.
    pub center_stderr: f64,
    pub checks: Vec<TailCheck>,
}

impl TailReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(TailCheck::passed)
    }
}

/// Mean and standard error of a Monte-Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

fn require_ihr(spec: &DistributionSpec) -> Result<f64> {
    if !spec.is_parametric() {
        return Err(Error::InvalidParameter(
            "bound validation needs a parametric IHR distribution".into(),
        ));
    }
    spec.validate()?;
    spec.hazard_lower_bound()
}

/// `override_floor` if given (it must be positive), else the analytic floor.
fn hazard_floor(spec: &DistributionSpec, override_floor: Option<f64>) -> Result<f64> {
    let analytic = require_ihr(spec)?;
    match override_floor {
        Some(l) if l.is_finite() && l > 0.0 => Ok(l),
        Some(l) => Err(Error::InvalidParameter(format!(
            "hazard floor {l} must be > 0"
        ))),
        None => Ok(analytic),
    }
}

/// Run `total` trials in blocks; `body` gets the block's trial count and stream.
fn blocked<T, F>(total: usize, seed: u64, path: &[u64], body: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut rng::Stream) -> T + Sync,
{
    let blocks = total.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK.min(total - b * BLOCK);
            let mut full_path = path.to_vec();
            full_path.push(b as u64);
            let mut stream = rng::stream(seed, &full_path);
            body(count, &mut stream)
        })
        .collect()
}

/// Monte-Carlo estimate of `E[X_(k)]` for samples of size `n`.
pub fn mc_expected_order_statistic(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
    purpose: u64,
) -> Result<McEstimate> {
    Rank::new(k, n)?;
    if replications < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 replications".into(),
        ));
    }
    let parts = blocked(
        replications,
        seed,
        &[purpose, n as u64, k as u64],
        |count, stream| {
            let mut buf = Vec::with_capacity(n);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                buf.clear();
                spec.sample_into(stream, n, &mut buf);
                let x = kth_largest(&mut buf, k);
                sum += x;
                sum_sq += x * x;
            }
            (sum, sum_sq)
        },
    );
    Ok(mean_and_stderr(&parts, replications))
}

fn mean_and_stderr(parts: &[(f64, f64)], count: usize) -> McEstimate {
    let (sum, sum_sq) = parts
        .iter()
        .fold((0.0, 0.0), |(s, q), (a, b)| (s + a, q + b));
    let n = count as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples: count,
    }
}

fn check_gammas(gammas: &[f64]) -> Result<()> {
    if gammas.is_empty() {
        return Err(Error::InvalidParameter("empty gamma grid".into()));
    }
    if let Some(g) = gammas.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
        return Err(Error::InvalidParameter(format!("gamma {g} must be >= 0")));
    }
    Ok(())
}

/// Count, per cell, the trials whose statistic deviates from `center` by at
/// least the cell's radius on its side.
#[allow(clippy::too_many_arguments)]
fn count_exceedances(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    center: f64,
    cells: &[(Side, f64)],
    trials: usize,
    seed: u64,
    path: &[u64],
) -> Vec<u64> {
    let parts = blocked(trials, seed, path, |count, stream| {
        let mut buf = Vec::with_capacity(n);
        let mut hits = vec![0u64; cells.len()];
        for _ in 0..count {
            buf.clear();
            spec.sample_into(stream, n, &mut buf);
            let deviation = kth_largest(&mut buf, k) - center;
            for (hit, &(side, radius)) in hits.iter_mut().zip(cells) {
                let exceeded = match side {
                    Side::Right => deviation >= radius,
                    Side::Left => -deviation >= radius,
                };
                *hit += u64::from(exceeded);
            }
        }
        hits
    });
    parts
        .into_iter()
        .fold(vec![0u64; cells.len()], |mut acc, part| {
            acc.iter_mut().zip(part).for_each(|(a, p)| *a += p);
            acc
        })
}

fn assemble(gammas_cells: &[(f64, Side, f64)], hits: Vec<u64>, trials: usize) -> Vec<TailCheck> {
    gammas_cells
        .iter()
        .zip(hits)
        .map(|(&(gamma, side, radius), exceedances)| {
            let bound = (-gamma).exp();
            let t = trials as f64;
            TailCheck {
                gamma,
                side,
                radius,
                bound,
                exceedances,
                trials: trials as u64,
                frequency: exceedances as f64 / t,
                stderr: (bound * (1.0 - bound) / t).sqrt(),
            }
        })
        .collect()
}

/// Empirical check of the order-statistic tail bounds around `E[X_(k)]`.
///
/// `E[X_(k)]` is estimated from `oracle_trials` independent samples. Left
/// cells are omitted at `k = 1`, where the left bound is undefined. The radii
/// use the analytic hazard floor unless `hazard_floor_override` is given.
#[allow(clippy::too_many_arguments)]
pub fn mc_validate_os_tail(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    gammas: &[f64],
    trials: usize,
    oracle_trials: usize,
    hazard_floor_override: Option<f64>,
    seed: u64,
) -> Result<TailReport> {
    let l = hazard_floor(spec, hazard_floor_override)?;
    check_gammas(gammas)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let oracle = mc_expected_order_statistic(spec, n, k, oracle_trials, seed, domain::OS_ORACLE)?;

    let mut cells = Vec::new();
    for &gamma in gammas {
        let p = OsBoundParams {
            n,
            k,
            hazard_floor: l,
            gamma,
        };
        cells.push((gamma, Side::Right, os_right_radius(p)?));
        if k > 1 {
            cells.push((gamma, Side::Left, os_left_radius(p)?));
        }
    }
    let sides: Vec<_> = cells.iter().map(|&(_, s, r)| (s, r)).collect();
    let hits = count_exceedances(
        spec,
        n,
        k,
        oracle.mean,
        &sides,
        trials,
        seed,
        &[domain::OS_TRIALS, n as u64, k as u64],
    );
    Ok(TailReport {
        spec: spec.to_string(),
        n,
        k,
        tau: None,
        center: oracle.mean,
        center_stderr: oracle.stderr,
        checks: assemble(&cells, hits, trials),
    })
}

/// Empirical check of the quantile tail bounds around the population
/// quantile, with bias constant `bias`. The radii use the analytic hazard
/// floor unless `hazard_floor_override` is given.
#[allow(clippy::too_many_arguments)]
pub fn mc_validate_quantile_tail(
    spec: &DistributionSpec,
    n: usize,
    tau: QuantileLevel,
    bias: f64,
    gammas: &[f64],
    trials: usize,
    hazard_floor_override: Option<f64>,
    seed: u64,
) -> Result<TailReport> {
    let l = hazard_floor(spec, hazard_floor_override)?;
    check_gammas(gammas)?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let k = rank_for(n, tau)?.k();
    let params = QuantileBoundParams {
        n,
        tau,
        hazard_floor: l,
        bias,
    };
    let mut cells = Vec::new();
    for &gamma in gammas {
        cells.push((gamma, Side::Right, quantile_right_radius(params, gamma)?));
        if k > 1 {
            cells.push((gamma, Side::Left, quantile_left_radius(params, gamma)?));
        }
    }
    let center = spec.true_quantile(tau);
    let sides: Vec<_> = cells.iter().map(|&(_, s, r)| (s, r)).collect();
    let hits = count_exceedances(
        spec,
        n,
        k,
        center,
        &sides,
        trials,
        seed,
        &[domain::QUANTILE_TRIALS, n as u64, tau.value().to_bits()],
    );
    Ok(TailReport {
        spec: spec.to_string(),
        n,
        k,
        tau: Some(tau.value()),
        center,
        center_stderr: 0.0,
        checks: assemble(&cells, hits, trials),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasEstimate {
    /// `max_n n (|E_hat[X_(k)] - Q| + 3 se)`.
    pub b_hat: f64,
    /// `(n, n (|E_hat[X_(k)] - Q| + 3 se))` per grid point.
    pub per_n: Vec<(usize, f64)>,
}

/// Estimate the constant `b` with `|E[X_(floor(n(1-tau)))] - Q^tau| <= b / n`
/// over a grid of sample sizes.
pub fn estimate_bias_constant(
    spec: &DistributionSpec,
    tau: QuantileLevel,
    n_grid: &[usize],
    oracle_trials: usize,
    seed: u64,
) -> Result<BiasEstimate> {
    require_ihr(spec)?;
    if n_grid.is_empty() {
        return Err(Error::InvalidParameter("empty sample-size grid".into()));
    }
    let quantile = spec.true_quantile(tau);
    let mut per_n = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let k = rank_for(n, tau)?.k();
        let est =
            mc_expected_order_statistic(spec, n, k, oracle_trials, seed, domain::BIAS_ORACLE)?;
        per_n.push((
            n,
            n as f64 * ((est.mean - quantile).abs() + 3.0 * est.stderr),
        ));
    }
    let b_hat = per_n.iter().map(|&(_, b)| b).fold(0.0, f64::max);
    Ok(BiasEstimate { b_hat, per_n })
}

/// Monte-Carlo mean of the spacing `S_k = X_(k) - X_(k+1)` at sample size `n`.
pub fn mc_expected_spacing(
    spec: &DistributionSpec,
    n: usize,
    k: usize,
    replications: usize,
    seed: u64,
) -> Result<McEstimate> {
    if k == 0 || k >= n {
        return Err(Error::RankOutOfRange {
            k,
            n,
            reason: "spacing needs 1 <= k <= n - 1",
        });
    }
    if replications < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 replications".into(),
        ));
    }
    let rank = Rank::new(k, n)?;
    let parts = blocked(
        replications,
        seed,
        &[domain::SPACING, n as u64, k as u64],
        |count, stream| {
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let sample = SortedSample::new(spec.sample(n, stream)).expect("n >= 2");
                let s = sample.spacing(rank).expect("k < n");
                sum += s;
                sum_sq += s * s;
            }
            (sum, sum_sq)
        },
    );
    Ok(mean_and_stderr(&parts, replications))
}

pub const CSV_HEADER: [&str; 11] = [
    "spec",
    "n",
    "k",
    "tau",
    "gamma",
    "side",
    "radius",
    "bound",
    "frequency",
    "trials",
    "stderr",
];

/// Write reports as CSV with a header row.
pub fn write_reports_csv<W: Write>(reports: &[TailReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for report in reports {
        let tau = report.tau.map(|t| t.to_string()).unwrap_or_default();
        for c in &report.checks {
            w.write_record([
                report.spec.clone(),
                report.n.to_string(),
                report.k.to_string(),
                tau.clone(),
                c.gamma.to_string(),
                c.side.to_string(),
                c.radius.to_string(),
                c.bound.to_string(),
                c.frequency.to_string(),
                c.trials.to_string(),
                c.stderr.to_string(),
            ])?;
        }
    }
    w.flush()
        .map_err(|e| Error::io("writing validation csv", e))?;
    Ok(())
}
