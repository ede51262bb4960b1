//! Experiment configuration files.
//!
//! Configs are TOML. Every section is optional; each command checks for the
//! sections it needs.
//!
//! ```toml
//! [environment]
//! preset = "env2"            # env1 | env2 | toy
//! # data_dir = "vaccine"     # directory of arm_*.csv files
//! # arms = [{ kind = "exponential", rate = 0.25, count = 5 },
//! #         { kind = "abs_gaussian", mu = 3.5, sigma = 2.0 },
//! #         { kind = "empirical", path = "arm.csv" }]
//! tau = 0.8                  # optional for presets
//! m = 5
//!
//! [experiment]
//! policies = ["qsar", "qsr", "sar", "sr"]
//! budgets = [2000, 6000, 10000]   # strictly increasing
//! runs = 5000
//! seed = 42
//! output = "results"
//! crn = false                # common random numbers across policies
//!
//! [bounds]                   # validate-bounds; all keys optional
//! specs = [{ kind = "exponential", rate = 1.0 }]
//! n = [50, 200]
//! k = [5, 25]
//! tau = [0.5]
//! gamma = [1.0, 2.0, 3.0]
//! trials = 100000
//! oracle_trials = 1000000
//! bias_grid = [50, 200]      # defaults to n
//! # bias = 2.0              # skip estimation and use this b
//! # hazard_floor = 0.5      # radii from this L instead of the analytic one
//! seed = 7
//!
//! [complexity]               # all keys optional
//! budgets = [2000, 6000]     # defaults to experiment budgets
//! bias_grid = [64, 128, 256]
//! oracle_trials = 100000
//! # hazard_floor = [..]      # one per arm; required for empirical arms
//! # bias = [..]              # one per arm; required for empirical arms
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bandit::Environment;
use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};
use crate::experiments::ingest::ingest_arm_data;
use crate::experiments::presets::Preset;
use crate::policies::{PolicyConfig, PolicyKind};

pub const DEFAULT_RUNS: usize = 5000;
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    environment: Option<RawEnvironment>,
    experiment: Option<RawExperiment>,
    bounds: Option<RawBounds>,
    complexity: Option<RawComplexity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    preset: Option<String>,
    data_dir: Option<PathBuf>,
    arms: Option<Vec<RawArm>>,
    tau: Option<f64>,
    m: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawArm {
    AbsGaussian {
        mu: f64,
        sigma: f64,
        #[serde(default = "one")]
        count: usize,
    },
    Exponential {
        rate: f64,
        #[serde(default = "one")]
        count: usize,
    },
    Empirical {
        path: Option<PathBuf>,
        samples: Option<Vec<f64>>,
        #[serde(default = "one")]
        count: usize,
    },
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    policies: Vec<String>,
    budgets: Vec<usize>,
    runs: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    crn: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    specs: Option<Vec<RawArm>>,
    n: Option<Vec<usize>>,
    k: Option<Vec<usize>>,
    tau: Option<Vec<f64>>,
    gamma: Option<Vec<f64>>,
    trials: Option<usize>,
    oracle_trials: Option<usize>,
    bias_grid: Option<Vec<usize>>,
    bias: Option<f64>,
    hazard_floor: Option<f64>,
    seed: Option<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawComplexity {
    budgets: Option<Vec<usize>>,
    bias_grid: Option<Vec<usize>>,
    oracle_trials: Option<usize>,
    hazard_floor: Option<Vec<f64>>,
    bias: Option<Vec<f64>>,
    seed: Option<u64>,
}

/// Where the arms come from.
#[derive(Debug, Clone, PartialEq)]
pub enum EnvironmentSource {
    Preset(Preset),
    Inline(Vec<DistributionSpec>),
    DataDir(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentConfig {
    pub source: EnvironmentSource,
    pub tau: Option<QuantileLevel>,
    pub m: usize,
}

impl EnvironmentConfig {
    pub fn tau(&self) -> Result<QuantileLevel> {
        match (self.tau, &self.source) {
            (Some(tau), _) => Ok(tau),
            (None, EnvironmentSource::Preset(p)) => Ok(p.default_tau()),
            (None, _) => Err(Error::Config(
                "missing tau: [environment].tau is required unless a preset is used".into(),
            )),
        }
    }

    pub fn build(&self) -> Result<Environment> {
        let tau = self.tau()?;
        match &self.source {
            EnvironmentSource::Preset(p) => p.environment(self.m, Some(tau)),
            EnvironmentSource::Inline(arms) => Environment::new(arms.clone(), tau, self.m),
            EnvironmentSource::DataDir(dir) => {
                Environment::new(ingest_arm_data(dir)?.arms, tau, self.m)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub policies: Vec<PolicyKind>,
    pub budgets: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub output: PathBuf,
    pub crn: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundSuite {
    pub specs: Vec<DistributionSpec>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub tau: Vec<QuantileLevel>,
    pub gamma: Vec<f64>,
    pub trials: usize,
    pub oracle_trials: usize,
    /// Sample sizes for estimating `b`; empty means "use `n`".
    pub bias_grid: Vec<usize>,
    pub bias: Option<f64>,
    /// Hazard floor used for every spec's radii instead of the analytic one.
    pub hazard_floor: Option<f64>,
    pub seed: u64,
}

impl Default for BoundSuite {
    fn default() -> Self {
        Self {
            specs: vec![
                DistributionSpec::Exponential { rate: 1.0 },
                DistributionSpec::AbsGaussian {
                    mu: 0.0,
                    sigma: 2.0,
                },
            ],
            n: vec![50, 200],
            k: vec![5, 25],
            tau: vec![QuantileLevel::new(0.5).expect("valid")],
            gamma: vec![1.0, 2.0, 3.0],
            trials: 100_000,
            oracle_trials: 1_000_000,
            bias_grid: Vec::new(),
            bias: None,
            hazard_floor: None,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexitySettings {
    pub budgets: Vec<usize>,
    pub bias_grid: Vec<usize>,
    pub oracle_trials: usize,
    pub hazard_floor: Option<Vec<f64>>,
    pub bias: Option<Vec<f64>>,
    pub seed: u64,
}

impl Default for ComplexitySettings {
    fn default() -> Self {
        Self {
            budgets: Vec::new(),
            bias_grid: vec![64, 128, 256],
            oracle_trials: 100_000,
            hazard_floor: None,
            bias: None,
            seed: 11,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub environment: Option<EnvironmentConfig>,
    pub run: Option<RunSettings>,
    pub bounds: BoundSuite,
    pub complexity: ComplexitySettings,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rfind('\n')
        .map_or(before.len(), |nl| before.len() - nl - 1)
        + 1;
    (line, col)
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn expand_arms(raw: &[RawArm], base: &Path) -> Result<Vec<DistributionSpec>> {
    let mut arms = Vec::new();
    for (i, arm) in raw.iter().enumerate() {
        let (spec, count) = match arm {
            RawArm::AbsGaussian { mu, sigma, count } => {
                (DistributionSpec::abs_gaussian(*mu, *sigma)?, *count)
            }
            RawArm::Exponential { rate, count } => (DistributionSpec::exponential(*rate)?, *count),
            RawArm::Empirical {
                path,
                samples,
                count,
            } => {
                let spec = match (path, samples) {
                    (Some(p), None) => DistributionSpec::from_csv(resolve(base, p))?,
                    (None, Some(s)) => DistributionSpec::empirical(s.clone())?,
                    _ => {
                        return Err(Error::Config(format!(
                            "arm {i}: empirical arms need exactly one of 'path' or 'samples'"
                        )))
                    }
                };
                (spec, *count)
            }
        };
        if count == 0 {
            return Err(Error::Config(format!("arm {i}: count must be >= 1")));
        }
        arms.extend(std::iter::repeat_n(spec, count));
    }
    Ok(arms)
}

fn levels(raw: &[f64]) -> Result<Vec<QuantileLevel>> {
    raw.iter().map(|&t| QuantileLevel::new(t)).collect()
}

fn nonempty<T>(name: &str, v: &[T]) -> Result<()> {
    if v.is_empty() {
        Err(Error::Config(format!("{name} must not be empty")))
    } else {
        Ok(())
    }
}

impl ExperimentConfig {
    /// Parse and validate a config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse config text; relative paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let location = e
                .span()
                .map(|s| {
                    let (line, col) = line_col(text, s.start);
                    format!(" at line {line}, column {col}")
                })
                .unwrap_or_default();
            Error::Config(format!("parse error{location}: {}", e.message()))
        })?;

        let environment = raw
            .environment
            .map(|env| -> Result<EnvironmentConfig> {
                let sources = [
                    env.preset.is_some(),
                    env.data_dir.is_some(),
                    env.arms.is_some(),
                ];
                if sources.iter().filter(|s| **s).count() != 1 {
                    return Err(Error::Config(
                        "[environment] needs exactly one of 'preset', 'data_dir' or 'arms'".into(),
                    ));
                }
                let source = if let Some(p) = env.preset {
                    EnvironmentSource::Preset(p.parse()?)
                } else if let Some(dir) = env.data_dir {
                    EnvironmentSource::DataDir(resolve(base, &dir))
                } else {
                    EnvironmentSource::Inline(expand_arms(&env.arms.unwrap_or_default(), base)?)
                };
                let tau = env.tau.map(QuantileLevel::new).transpose()?;
                Ok(EnvironmentConfig {
                    source,
                    tau,
                    m: env.m,
                })
            })
            .transpose()?;

        let run = raw
            .experiment
            .map(|ex| -> Result<RunSettings> {
                let policies = ex
                    .policies
                    .iter()
                    .map(|p| p.parse())
                    .collect::<Result<Vec<PolicyKind>>>()?;
                Ok(RunSettings {
                    policies,
                    budgets: ex.budgets,
                    runs: ex.runs.unwrap_or(DEFAULT_RUNS),
                    seed: ex.seed.unwrap_or(DEFAULT_SEED),
                    output: resolve(base, &ex.output.unwrap_or_else(|| "results".into())),
                    crn: ex.crn.unwrap_or(false),
                })
            })
            .transpose()?;

        let mut bounds = BoundSuite::default();
        if let Some(b) = raw.bounds {
            if let Some(specs) = b.specs {
                bounds.specs = expand_arms(&specs, base)?;
            }
            bounds.n = b.n.unwrap_or(bounds.n);
            bounds.k = b.k.unwrap_or(bounds.k);
            if let Some(t) = b.tau {
                bounds.tau = levels(&t)?;
            }
            bounds.gamma = b.gamma.unwrap_or(bounds.gamma);
            bounds.trials = b.trials.unwrap_or(bounds.trials);
            bounds.oracle_trials = b.oracle_trials.unwrap_or(bounds.oracle_trials);
            bounds.bias_grid = b.bias_grid.unwrap_or_default();
            bounds.bias = b.bias;
            bounds.hazard_floor = b.hazard_floor;
            bounds.seed = b.seed.unwrap_or(bounds.seed);
        }

        let mut complexity = ComplexitySettings::default();
        if let Some(c) = raw.complexity {
            complexity.budgets = c.budgets.unwrap_or_default();
            complexity.bias_grid = c.bias_grid.unwrap_or(complexity.bias_grid);
            complexity.oracle_trials = c.oracle_trials.unwrap_or(complexity.oracle_trials);
            complexity.hazard_floor = c.hazard_floor;
            complexity.bias = c.bias;
            complexity.seed = c.seed.unwrap_or(complexity.seed);
        }

        let config = Self {
            environment,
            run,
            bounds,
            complexity,
        };
        config.validate()?;
        Ok(config)
    }

    /// Check every invariant that does not need Monte-Carlo work.
    pub fn validate(&self) -> Result<()> {
        let env = self
            .environment
            .as_ref()
            .map(EnvironmentConfig::build)
            .transpose()?;

        if let Some(run) = &self.run {
            nonempty("[experiment].policies", &run.policies)?;
            nonempty("[experiment].budgets", &run.budgets)?;
            if run.budgets.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Config(format!(
                    "[experiment].budgets must be strictly increasing, got {:?}",
                    run.budgets
                )));
            }
            if run.runs == 0 {
                return Err(Error::Config("[experiment].runs must be >= 1".into()));
            }
            let env = env.as_ref().ok_or_else(|| {
                Error::Config("[experiment] needs an [environment] section".into())
            })?;
            let smallest = run.budgets[0];
            for &kind in &run.policies {
                let policy = PolicyConfig::for_env(kind, env);
                if let Err(e) = crate::bandit::Policy::check_budget(&policy, env, smallest) {
                    return Err(Error::Config(format!(
                        "policy '{kind}' cannot run at budget {smallest}: {e} (minimum {})",
                        policy.min_budget(env)
                    )));
                }
            }
        }

        let b = &self.bounds;
        nonempty("[bounds].specs", &b.specs)?;
        nonempty("[bounds].n", &b.n)?;
        nonempty("[bounds].gamma", &b.gamma)?;
        if b.trials == 0 || b.oracle_trials < 2 {
            return Err(Error::Config(
                "[bounds] needs trials >= 1 and oracle_trials >= 2".into(),
            ));
        }
        if let Some(spec) = b.specs.iter().find(|s| !s.is_parametric()) {
            return Err(Error::Config(format!(
                "[bounds].specs must be parametric IHR models, got {spec}"
            )));
        }
        if let Some(g) = b.gamma.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::Config(format!("[bounds].gamma {g} must be >= 0")));
        }
        if let Some(l) = b.hazard_floor {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::Config(format!(
                    "[bounds].hazard_floor {l} must be > 0"
                )));
            }
        }
        if let Some(bias) = b.bias {
            if !(bias.is_finite() && bias >= 0.0) {
                return Err(Error::Config(format!("[bounds].bias {bias} must be >= 0")));
            }
        }

        if let Some(env) = &env {
            let c = &self.complexity;
            for (name, values) in [("hazard_floor", &c.hazard_floor), ("bias", &c.bias)] {
                if let Some(v) = values {
                    if v.len() != env.num_arms() {
                        return Err(Error::Config(format!(
                            "[complexity].{name} has {} entries but the environment has {} arms",
                            v.len(),
                            env.num_arms()
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn environment(&self) -> Result<Environment> {
        self.environment
            .as_ref()
            .ok_or_else(|| Error::Config("missing [environment] section".into()))?
            .build()
    }

    pub fn run_settings(&self) -> Result<&RunSettings> {
        self.run
            .as_ref()
            .ok_or_else(|| Error::Config("missing [experiment] section".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig> {
        ExperimentConfig::parse(text, Path::new("."))
    }

    #[test]
    fn preset_expansion() {
        let cfg = parse(
            "[environment]\npreset = \"env2\"\nm = 5\n\
             [experiment]\npolicies = [\"qsar\"]\nbudgets = [2000]\nruns = 10\n",
        )
        .unwrap();
        let env = cfg.environment().unwrap();
        assert_eq!(env.num_arms(), 25);
        assert_eq!(env.tau().value(), 0.8);
        let run = cfg.run_settings().unwrap();
        assert_eq!(run.seed, DEFAULT_SEED);
        assert!(!run.crn);
    }

    #[test]
    fn inline_arms_need_tau() {
        let err = parse(
            "[environment]\nm = 1\narms = [{ kind = \"exponential\", rate = 1.0 }, \
             { kind = \"exponential\", rate = 0.5 }]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("missing tau"), "{err}");

        let ok = parse(
            "[environment]\nm = 1\ntau = 0.5\narms = [{ kind = \"exponential\", rate = 1.0, count = 3 }, \
             { kind = \"abs_gaussian\", mu = 1.0, sigma = 1.0 }, { kind = \"empirical\", samples = [9.0] }]\n",
        )
        .unwrap();
        assert_eq!(ok.environment().unwrap().num_arms(), 5);
    }

    #[test]
    fn budget_below_policy_minimum_names_policy() {
        let err = parse(
            "[environment]\npreset = \"env2\"\nm = 5\n\
             [experiment]\npolicies = [\"sr\", \"qsar\"]\nbudgets = [100, 200]\n",
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("'qsar'"), "{err}");
    }

    #[test]
    fn invariant_violations() {
        let base = "[environment]\npreset = \"env1\"\nm = 1\n[experiment]\npolicies = [\"qsar\"]\n";
        assert!(parse(&format!("{base}budgets = [3000, 2000]\n")).is_err());
        assert!(parse(&format!("{base}budgets = [2000, 2000]\n")).is_err());
        assert!(parse(&format!("{base}budgets = [2000]\nruns = 0\n")).is_err());
        assert!(parse(&format!("{base}budgets = []\n")).is_err());
        assert!(parse("[environment]\npreset = \"env9\"\nm = 1\n").is_err());
        assert!(parse("[bounds]\nspecs = [{ kind = \"empirical\", samples = [1.0] }]\n").is_err());
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = parse("[environment]\npreset = \"env1\"\nm = \"one\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3"), "{err}");
        let err = parse("[environment]\nbogus = 1\nm = 1\npreset = \"env1\"\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
