//! Experiment drivers: probability-of-error sweeps, bound-validation sweeps
//! and complexity reports.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crate::bandit::{evaluate, Environment, ErrorEstimate, EvalOptions, GapProfile};
use crate::concentration::{
    estimate_bias_constant, mc_validate_os_tail, mc_validate_quantile_tail, problem_complexity,
    qsar_error_bound, write_reports_csv, ArmHardness, BiasEstimate, BoundVariant, ComplexityReport,
    TailReport,
};
use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};
use crate::experiments::config::{BoundSuite, ExperimentConfig, RunSettings};
use crate::policies::{PolicyConfig, PolicyKind};

pub const RESULTS_FILE: &str = "results.csv";
pub const PLOT_SCRIPT: &str = "plot_results.py";
pub const BOUND_VALIDATION_FILE: &str = "bound_validation.csv";
pub const BIAS_FILE: &str = "bias_estimates.csv";

pub const RESULTS_HEADER: [&str; 7] = [
    "policy", "budget", "runs", "errors", "e_hat", "stderr", "seed",
];

/// Run `f` on a dedicated pool of `jobs` worker threads (`None`: rayon's default).
///
/// Every driver in this crate aggregates in a fixed order, so the result does
/// not depend on `jobs`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be >= 1".into()));
        }
        builder = builder.num_threads(jobs);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(format!("creating {}", dir.display()), e))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// One `(policy, budget)` cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub policy: PolicyKind,
    pub budget: usize,
    pub estimate: ErrorEstimate,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub results_csv: PathBuf,
    pub plot_script: PathBuf,
}

/// Evaluate every `(policy, budget)` cell without touching the filesystem.
///
/// All cells share the base seed, so with common random numbers the policies
/// face identical reward streams.
pub fn evaluate_grid(env: &Environment, run: &RunSettings) -> Result<Vec<ResultRow>> {
    if run.runs == 0 {
        return Err(Error::Config("runs must be >= 1".into()));
    }
    let options = EvalOptions {
        common_random_numbers: run.crn,
    };
    let mut rows = Vec::with_capacity(run.policies.len() * run.budgets.len());
    for &kind in &run.policies {
        let policy = PolicyConfig::for_env(kind, env);
        for &budget in &run.budgets {
            let estimate =
                evaluate(env, &policy, budget, run.runs, run.seed, options).map_err(|e| {
                    Error::CellFailed {
                        policy: kind.to_string(),
                        budget,
                        source: Box::new(e),
                    }
                })?;
            log::info!(
                "{kind} N={budget}: {} / {} errors",
                estimate.errors,
                estimate.runs
            );
            rows.push(ResultRow {
                policy: kind,
                budget,
                estimate,
                seed: run.seed,
            });
        }
    }
    Ok(rows)
}

/// Write rows in the results-CSV schema.
pub fn write_results_csv<W: std::io::Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in rows {
        w.write_record([
            r.policy.to_string(),
            r.budget.to_string(),
            r.estimate.runs.to_string(),
            r.estimate.errors.to_string(),
            r.estimate.e_hat.to_string(),
            r.estimate.stderr.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("flushing results", e))?;
    Ok(())
}

/// Plot script drawing probability of error against budget, one series per policy.
pub fn plot_script(csv_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
"""Plot probability of error against budget from {csv_name}."""
import csv
import os
import sys
from collections import defaultdict

import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))
path = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, "{csv_name}")
series = defaultdict(list)
with open(path, newline="") as f:
    for row in csv.DictReader(f):
        series[row["policy"]].append(
            (int(row["budget"]), float(row["e_hat"]), float(row["stderr"]))
        )

fig, ax = plt.subplots(figsize=(6, 4))
for policy, points in series.items():
    points.sort()
    budgets = [p[0] for p in points]
    errors = [p[1] for p in points]
    bars = [2 * p[2] for p in points]
    ax.errorbar(budgets, errors, yerr=bars, marker="o", capsize=3, label=policy)
ax.set_xlabel("budget N")
ax.set_ylabel("probability of error")
ax.set_ylim(bottom=0)
ax.legend()
fig.tight_layout()
out = os.path.splitext(path)[0] + ".png"
fig.savefig(out, dpi=150)
print("wrote", out)
"#
    )
}

/// Run the configured sweep and write `results.csv` and `plot_results.py`
/// into the configured output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutput> {
    let run = config.run_settings()?;
    let env = config.environment()?;
    let rows = evaluate_grid(&env, run)?;

    create_dir(&run.output)?;
    let results_csv = run.output.join(RESULTS_FILE);
    let mut bytes = Vec::new();
    write_results_csv(&rows, &mut bytes)?;
    write_file(&results_csv, &bytes)?;
    let plot = run.output.join(PLOT_SCRIPT);
    write_file(&plot, plot_script(RESULTS_FILE).as_bytes())?;
    Ok(ExperimentOutput {
        rows,
        results_csv,
        plot_script: plot,
    })
}

/// Bias constant used for one `(spec, tau)` pair of a validation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasRecord {
    pub spec: String,
    pub tau: f64,
    /// `None` when `b` came from the config rather than estimation.
    pub estimate: Option<BiasEstimate>,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundValidationOutput {
    pub reports: Vec<TailReport>,
    pub bias: Vec<BiasRecord>,
    pub passed: bool,
}

impl BoundValidationOutput {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        write_reports_csv(&self.reports, out)
    }

    pub fn write_bias_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["spec", "tau", "n", "b_n", "b"])?;
        for rec in &self.bias {
            match &rec.estimate {
                Some(est) => {
                    for &(n, b_n) in &est.per_n {
                        w.write_record([
                            rec.spec.clone(),
                            rec.tau.to_string(),
                            n.to_string(),
                            b_n.to_string(),
                            rec.bias.to_string(),
                        ])?;
                    }
                }
                None => w.write_record([
                    rec.spec.clone(),
                    rec.tau.to_string(),
                    String::new(),
                    String::new(),
                    rec.bias.to_string(),
                ])?,
            }
        }
        w.flush()
            .map_err(|e| Error::io("flushing bias estimates", e))?;
        Ok(())
    }
}

impl fmt::Display for BoundValidationOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rec in &self.bias {
            writeln!(
                f,
                "bias constant {} tau={}: b = {:.4}",
                rec.spec, rec.tau, rec.bias
            )?;
        }
        writeln!(
            f,
            "{:<24} {:>5} {:>4} {:>5} {:>5} {:>6} {:>10} {:>9} {:>9} {:>9}  status",
            "spec", "n", "k", "tau", "gamma", "side", "radius", "bound", "freq", "stderr"
        )?;
        for r in &self.reports {
            let tau = r.tau.map_or_else(|| "-".to_string(), |t| t.to_string());
            for c in &r.checks {
                writeln!(
                    f,
                    "{:<24} {:>5} {:>4} {:>5} {:>5} {:>6} {:>10.4} {:>9.5} {:>9.5} {:>9.5}  {}",
                    r.spec,
                    r.n,
                    r.k,
                    tau,
                    c.gamma,
                    c.side,
                    c.radius,
                    c.bound,
                    c.frequency,
                    c.stderr,
                    if c.passed() { "ok" } else { "FAILED" }
                )?;
            }
        }
        write!(
            f,
            "overall: {}",
            if self.passed { "PASSED" } else { "FAILED" }
        )
    }
}

/// Drive the order-statistic and quantile tail checks over the suite's grids.
///
/// Order-statistic cells use every `(n, k)` with `k < n`; quantile cells use
/// every `(n, tau)` with the bias constant either configured or estimated
/// over `bias_grid` (or `n` when that is empty).
pub fn validate_bounds(suite: &BoundSuite) -> Result<BoundValidationOutput> {
    let mut reports = Vec::new();
    let mut bias = Vec::new();
    for spec in &suite.specs {
        for &n in &suite.n {
            for &k in suite.k.iter().filter(|&&k| k >= 1 && k < n) {
                reports.push(mc_validate_os_tail(
                    spec,
                    n,
                    k,
                    &suite.gamma,
                    suite.trials,
                    suite.oracle_trials,
                    suite.hazard_floor,
                    suite.seed,
                )?);
            }
        }
        for &tau in &suite.tau {
            let record = bias_for(spec, tau, suite)?;
            for &n in &suite.n {
                reports.push(mc_validate_quantile_tail(
                    spec,
                    n,
                    tau,
                    record.bias,
                    &suite.gamma,
                    suite.trials,
                    suite.hazard_floor,
                    suite.seed,
                )?);
            }
            bias.push(record);
        }
    }
    let passed = reports.iter().all(TailReport::passed);
    Ok(BoundValidationOutput {
        reports,
        bias,
        passed,
    })
}

fn bias_for(spec: &DistributionSpec, tau: QuantileLevel, suite: &BoundSuite) -> Result<BiasRecord> {
    let (estimate, bias) = match suite.bias {
        Some(b) => (None, b),
        None => {
            let grid = if suite.bias_grid.is_empty() {
                &suite.n
            } else {
                &suite.bias_grid
            };
            let est = estimate_bias_constant(spec, tau, grid, suite.oracle_trials, suite.seed)?;
            let b = est.b_hat;
            (Some(est), b)
        }
    };
    Ok(BiasRecord {
        spec: spec.to_string(),
        tau: tau.value(),
        estimate,
        bias,
    })
}

/// Run the bound-validation suite and write `bound_validation.csv` and
/// `bias_estimates.csv` into `out_dir`.
pub fn run_bound_validation(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<BoundValidationOutput> {
    let output = validate_bounds(&config.bounds)?;
    create_dir(out_dir)?;
    let mut bytes = Vec::new();
    output.write_csv(&mut bytes)?;
    write_file(&out_dir.join(BOUND_VALIDATION_FILE), &bytes)?;
    let mut bytes = Vec::new();
    output.write_bias_csv(&mut bytes)?;
    write_file(&out_dir.join(BIAS_FILE), &bytes)?;
    Ok(output)
}

/// Error bounds at one budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetBound {
    pub budget: usize,
    /// `None` below the budget the standard bound requires.
    pub standard: Option<f64>,
    pub with_constant: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityOutput {
    pub arm_labels: Vec<String>,
    pub quantiles: Vec<f64>,
    pub gaps: GapProfile,
    pub hardness: Vec<ArmHardness>,
    pub report: ComplexityReport,
    pub bounds: Vec<BudgetBound>,
}

impl fmt::Display for ComplexityOutput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "tau = {}, K = {}, m = {}",
            self.report.tau,
            self.quantiles.len(),
            self.gaps.optimal_set.len()
        )?;
        writeln!(
            f,
            "{:<4} {:<26} {:>10} {:>10} {:>10} {:>10}  optimal",
            "arm", "distribution", "quantile", "gap", "L", "b"
        )?;
        for (i, label) in self.arm_labels.iter().enumerate() {
            writeln!(
                f,
                "{:<4} {:<26} {:>10.4} {:>10.4} {:>10.4} {:>10.4}  {}",
                i,
                label,
                self.quantiles[i],
                self.gaps.delta[i],
                self.hardness[i].hazard_floor,
                self.hardness[i].bias,
                if self.gaps.optimal_set.contains(&i) {
                    "*"
                } else {
                    ""
                }
            )?;
        }
        writeln!(f, "min gap   = {:.4}", self.gaps.min_gap())?;
        writeln!(
            f,
            "H         = {:.6e}  (arm {}, gap rank {})",
            self.report.h_tau, self.report.argmax_h.0, self.report.argmax_h.1
        )?;
        writeln!(f, "H~        = {:.6e}", self.report.h_tilde)?;
        writeln!(f, "C         = {:.6e}", self.report.constant_c)?;
        writeln!(f, "{:>8} {:>14} {:>14}", "budget", "bound", "bound (C)")?;
        for b in &self.bounds {
            let standard = b
                .standard
                .map_or_else(|| "n/a".to_string(), |v| format!("{v:.6e}"));
            writeln!(
                f,
                "{:>8} {:>14} {:>14.6e}",
                b.budget, standard, b.with_constant
            )?;
        }
        Ok(())
    }
}

/// Gaps, complexities and error bounds of `env`.
///
/// Per-arm `L` and `b` come from `hazard_floor`/`bias` when given, otherwise
/// from the analytic hazard floor and a Monte-Carlo bias estimate. Empirical
/// arms have neither, so both overrides are then required.
pub fn complexity_of(
    env: &Environment,
    hazard_floor: Option<&[f64]>,
    bias: Option<&[f64]>,
    bias_grid: &[usize],
    oracle_trials: usize,
    seed: u64,
    budgets: &[usize],
) -> Result<ComplexityOutput> {
    let k = env.num_arms();
    for (name, values) in [("hazard_floor", hazard_floor), ("bias", bias)] {
        if values.is_some_and(|v| v.len() != k) {
            return Err(Error::Config(format!(
                "{name} needs one entry per arm ({k})"
            )));
        }
    }
    let tau = env.tau();
    // identical arms share one estimate
    let mut cache: Vec<(&DistributionSpec, f64)> = Vec::new();
    let mut hardness = Vec::with_capacity(k);
    for (i, spec) in env.arms().iter().enumerate() {
        if !spec.is_parametric() && (hazard_floor.is_none() || bias.is_none()) {
            return Err(Error::Config(format!(
                "arm {i} ({spec}) is empirical: supply [complexity].hazard_floor and [complexity].bias"
            )));
        }
        let l = match hazard_floor {
            Some(v) => v[i],
            None => spec.hazard_lower_bound()?,
        };
        let b = match bias {
            Some(v) => v[i],
            None => match cache.iter().find(|(s, _)| *s == spec) {
                Some(&(_, b)) => b,
                None => {
                    let b =
                        estimate_bias_constant(spec, tau, bias_grid, oracle_trials, seed)?.b_hat;
                    cache.push((spec, b));
                    b
                }
            },
        };
        hardness.push(ArmHardness {
            hazard_floor: l,
            bias: b,
        });
    }
    let gaps = env.gaps();
    let report = problem_complexity(&gaps.delta, &hardness, tau)?;
    let bounds = budgets
        .iter()
        .map(|&budget| -> Result<BudgetBound> {
            let standard =
                match qsar_error_bound(budget, k, env.m(), &report, BoundVariant::Standard) {
                    Ok(v) => Some(v),
                    Err(Error::BudgetTooSmall { .. }) => None,
                    Err(e) => return Err(e),
                };
            let with_constant =
                qsar_error_bound(budget, k, env.m(), &report, BoundVariant::WithConstant)?;
            Ok(BudgetBound {
                budget,
                standard,
                with_constant,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComplexityOutput {
        arm_labels: env.arms().iter().map(ToString::to_string).collect(),
        quantiles: env.quantiles().to_vec(),
        gaps,
        hardness,
        report,
        bounds,
    })
}

/// Complexity report for the configured environment over the configured
/// budget grid (`[complexity].budgets`, else `[experiment].budgets`).
pub fn report_complexity(config: &ExperimentConfig) -> Result<ComplexityOutput> {
    let env = config.environment()?;
    let c = &config.complexity;
    let budgets = if c.budgets.is_empty() {
        config
            .run
            .as_ref()
            .map(|r| r.budgets.clone())
            .unwrap_or_default()
    } else {
        c.budgets.clone()
    };
    complexity_of(
        &env,
        c.hazard_floor.as_deref(),
        c.bias.as_deref(),
        &c.bias_grid,
        c.oracle_trials,
        c.seed,
        &budgets,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::presets::Preset;

    fn settings(
        policies: Vec<PolicyKind>,
        budgets: Vec<usize>,
        runs: usize,
        crn: bool,
    ) -> RunSettings {
        RunSettings {
            policies,
            budgets,
            runs,
            seed: 3,
            output: PathBuf::from("unused"),
            crn,
        }
    }

    #[test]
    fn qsar_and_qsr_agree_at_m1_under_crn() {
        let env = Preset::Env1.environment(1, None).unwrap();
        let run = settings(vec![PolicyKind::QSar, PolicyKind::QSr], vec![600], 30, true);
        let rows = evaluate_grid(&env, &run).unwrap();
        assert_eq!(rows[0].estimate.errors, rows[1].estimate.errors);
    }

    #[test]
    fn csv_is_deterministic_and_parseable() {
        let env = Preset::Toy.environment(1, None).unwrap();
        let run = settings(
            vec![PolicyKind::QUniform, PolicyKind::Sr],
            vec![30, 60],
            40,
            false,
        );
        let render = |jobs| {
            let rows = with_jobs(Some(jobs), || evaluate_grid(&env, &run))
                .unwrap()
                .unwrap();
            let mut bytes = Vec::new();
            write_results_csv(&rows, &mut bytes).unwrap();
            bytes
        };
        let a = render(1);
        assert_eq!(a, render(3));
        let mut reader = csv::Reader::from_reader(a.as_slice());
        assert_eq!(reader.headers().unwrap(), RESULTS_HEADER.as_slice());
        assert_eq!(reader.records().count(), 4);
    }

    #[test]
    fn zero_runs_rejected() {
        let env = Preset::Toy.environment(1, None).unwrap();
        let run = settings(vec![PolicyKind::Sr], vec![30], 0, false);
        assert!(evaluate_grid(&env, &run).unwrap_err().is_config_error());
    }

    #[test]
    fn empirical_arms_need_overrides() {
        let arms = vec![
            DistributionSpec::empirical(vec![1.0, 2.0, 3.0]).unwrap(),
            DistributionSpec::empirical(vec![4.0, 5.0, 6.0]).unwrap(),
        ];
        let env = Environment::new(arms, QuantileLevel::new(0.5).unwrap(), 1).unwrap();
        assert!(complexity_of(&env, None, None, &[64], 100, 1, &[]).is_err());
        let out = complexity_of(
            &env,
            Some(&[1.0, 1.0]),
            Some(&[0.5, 0.5]),
            &[64],
            100,
            1,
            &[10, 100],
        )
        .unwrap();
        assert_eq!(out.bounds.len(), 2);
        assert!(out.to_string().contains("min gap"));
    }

    #[test]
    fn bound_column_non_increasing() {
        let env = Preset::Env2.environment(5, None).unwrap();
        let floors: Vec<f64> = env
            .arms()
            .iter()
            .map(|a| a.hazard_lower_bound().unwrap())
            .collect();
        let bias = vec![1.0; env.num_arms()];
        let budgets = [500, 2000, 6000, 10000, 50000];
        let out = complexity_of(&env, Some(&floors), Some(&bias), &[], 0, 0, &budgets).unwrap();
        for w in out.bounds.windows(2) {
            assert!(w[1].with_constant <= w[0].with_constant);
            if let (Some(a), Some(b)) = (w[0].standard, w[1].standard) {
                assert!(b <= a);
            }
        }
        assert!(
            (out.gaps.min_gap() - 1.21).abs() < 0.05,
            "{}",
            out.gaps.min_gap()
        );
    }

    #[test]
    fn small_validation_suite_runs() {
        let suite = BoundSuite {
            specs: vec![DistributionSpec::Exponential { rate: 1.0 }],
            n: vec![20],
            k: vec![1, 5, 20],
            trials: 2000,
            oracle_trials: 2000,
            ..BoundSuite::default()
        };
        let out = validate_bounds(&suite).unwrap();
        // k = 20 is skipped, k = 1 has only right cells
        assert_eq!(out.reports.len(), 3);
        assert_eq!(out.reports[0].checks.len(), 3);
        assert_eq!(out.reports[1].checks.len(), 6);
        assert!(out.passed, "{out}");
        let mut csv = Vec::new();
        out.write_csv(&mut csv).unwrap();
        assert!(String::from_utf8(csv)
            .unwrap()
            .starts_with("spec,n,k,tau,gamma"));
    }

    #[test]
    fn overstated_hazard_floor_fails_validation() {
        let suite = BoundSuite {
            specs: vec![DistributionSpec::Exponential { rate: 1.0 }],
            n: vec![50],
            k: vec![5],
            tau: vec![],
            trials: 4000,
            oracle_trials: 4000,
            hazard_floor: Some(100.0),
            ..BoundSuite::default()
        };
        let out = validate_bounds(&suite).unwrap();
        assert!(!out.passed);
        assert!(out.to_string().ends_with("overall: FAILED"));
    }

    #[test]
    fn larger_min_gap_smaller_complexity_at_matched_inputs() {
        use crate::experiments::presets::{arm_a, arm_c};
        let tau = QuantileLevel::new(0.5).unwrap();
        let build = |mu_b: f64| {
            let mut arms = vec![arm_a(); 15];
            arms.extend(vec![DistributionSpec::abs_gaussian(mu_b, 2.0).unwrap(); 5]);
            arms.extend(vec![arm_c(); 5]);
            Environment::new(arms, tau, 5).unwrap()
        };
        let (near, far) = (build(3.5), build(4.5));
        let floors = vec![0.2; 25];
        let bias = vec![1.0; 25];
        let h = |env: &Environment| {
            complexity_of(env, Some(&floors), Some(&bias), &[], 0, 0, &[]).unwrap()
        };
        let (a, b) = (h(&near), h(&far));
        assert!(b.gaps.min_gap() > a.gaps.min_gap());
        assert!(b.report.h_tau < a.report.h_tau);
    }
}
