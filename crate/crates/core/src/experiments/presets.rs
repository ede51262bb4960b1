//! The simulated environments built from three base reward models:
//! `A = |N(0, 2^2)|`, `B = |N(3.5, 2^2)|`, `C = Exp(1/4)`.

use std::fmt;
use std::str::FromStr;

use crate::bandit::Environment;
use crate::distributions::{DistributionSpec, QuantileLevel};
use crate::error::{Error, Result};

pub fn arm_a() -> DistributionSpec {
    DistributionSpec::AbsGaussian {
        mu: 0.0,
        sigma: 2.0,
    }
}

pub fn arm_b() -> DistributionSpec {
    DistributionSpec::AbsGaussian {
        mu: 3.5,
        sigma: 2.0,
    }
}

pub fn arm_c() -> DistributionSpec {
    DistributionSpec::Exponential { rate: 0.25 }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// 15 A, m B (optimal by median), 5 C; `tau = 0.5`.
    Env1,
    /// 15 A, 5 B, m C (optimal by 0.8-quantile); `tau = 0.8`.
    Env2,
    /// One each of A, B, C; `tau = 0.5` unless overridden.
    Toy,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Env1 => "env1",
            Preset::Env2 => "env2",
            Preset::Toy => "toy",
        }
    }

    pub fn default_tau(self) -> QuantileLevel {
        let tau = match self {
            Preset::Env1 | Preset::Toy => 0.5,
            Preset::Env2 => 0.8,
        };
        QuantileLevel::new(tau).expect("valid preset level")
    }

    /// Labelled arms in id order.
    pub fn arms(self, m: usize) -> Vec<(&'static str, DistributionSpec)> {
        let repeat =
            |label, spec: DistributionSpec, count| std::iter::repeat_n((label, spec), count);
        match self {
            Preset::Env1 => repeat("A", arm_a(), 15)
                .chain(repeat("B", arm_b(), m))
                .chain(repeat("C", arm_c(), 5))
                .collect(),
            Preset::Env2 => repeat("A", arm_a(), 15)
                .chain(repeat("B", arm_b(), 5))
                .chain(repeat("C", arm_c(), m))
                .collect(),
            Preset::Toy => vec![("A", arm_a()), ("B", arm_b()), ("C", arm_c())],
        }
    }

    /// Build the environment; `tau` defaults to the preset's level.
    pub fn environment(self, m: usize, tau: Option<QuantileLevel>) -> Result<Environment> {
        if m == 0 {
            return Err(Error::InvalidEnvironment("m must be >= 1".into()));
        }
        let arms = self.arms(m).into_iter().map(|(_, spec)| spec).collect();
        Environment::new(arms, tau.unwrap_or_else(|| self.default_tau()), m)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "env1" | "environment1" | "env-i" => Ok(Preset::Env1),
            "env2" | "environment2" | "env-ii" => Ok(Preset::Env2),
            "toy" => Ok(Preset::Toy),
            _ => Err(Error::Config(format!(
                "unknown preset '{s}' (expected env1, env2 or toy)"
            ))),
        }
    }
}
