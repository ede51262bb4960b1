//! Reward models: folded ("absolute") Gaussian, exponential, and an empirical
//! model that bootstraps from a fixed population of observed rewards.
//!
//! The parametric families both have support `[0, inf)` and a non-decreasing
//! hazard rate, which is what the order-statistic bounds in
//! [`crate::concentration`] need.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::erf::{erf, erfc};

use crate::error::{Error, Result};
use crate::order_stats;

/// Bisection stops once the bracket is narrower than this.
const QUANTILE_TOLERANCE: f64 = 1e-10;
/// Grid resolution used to confirm a folded normal is IHR before trusting `h(0)`.
const IHR_GRID_POINTS: usize = 10_000;

/// A quantile level `tau` in the open interval `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct QuantileLevel(f64);

impl QuantileLevel {
    pub fn new(tau: f64) -> Result<Self> {
        if tau.is_finite() && tau > 0.0 && tau < 1.0 {
            Ok(Self(tau))
        } else {
            Err(Error::InvalidQuantileLevel(tau))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - tau`.
    pub fn upper_mass(self) -> f64 {
        1.0 - self.0
    }
}

impl fmt::Display for QuantileLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A fixed population of non-negative rewards, resampled with replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalData {
    samples: Vec<f64>,
    ascending: Vec<f64>,
}

impl EmpiricalData {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDistribution(
                "empirical distribution needs at least one sample".into(),
            ));
        }
        if let Some((i, v)) = samples
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "empirical sample {i} is {v}; rewards must be finite and non-negative"
            )));
        }
        let mut ascending = samples.clone();
        ascending.sort_by(f64::total_cmp);
        Ok(Self { samples, ascending })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Fraction of stored samples `<= x`.
    pub fn ecdf(&self, x: f64) -> f64 {
        let below = self.ascending.partition_point(|&v| v <= x);
        below as f64 / self.ascending.len() as f64
    }

    pub(crate) fn ascending(&self) -> &[f64] {
        &self.ascending
    }
}

/// Reward distribution of a single arm.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// `|X|` with `X ~ N(mu, sigma^2)`; `sigma` is the standard deviation.
    AbsGaussian {
        mu: f64,
        sigma: f64,
    },
    /// Exponential with rate `rate` (mean `1 / rate`).
    Exponential {
        rate: f64,
    },
    Empirical(EmpiricalData),
}

impl DistributionSpec {
    pub fn abs_gaussian(mu: f64, sigma: f64) -> Result<Self> {
        let spec = Self::AbsGaussian { mu, sigma };
        spec.validate()?;
        Ok(spec)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let spec = Self::Exponential { rate };
        spec.validate()?;
        Ok(spec)
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self> {
        EmpiricalData::new(samples).map(Self::Empirical)
    }

    /// Load an empirical arm from a CSV file: one reward per line, with an
    /// optional `reward` header. Blank lines are skipped.
    pub fn from_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let field = line.trim();
            if field.is_empty() {
                continue;
            }
            if lineno == 0 && field.eq_ignore_ascii_case("reward") {
                continue;
            }
            let value: f64 = field.parse().map_err(|_| {
                Error::data(
                    path,
                    format!("line {}: '{field}' is not a number", lineno + 1),
                )
            })?;
            if !value.is_finite() || value < 0.0 {
                return Err(Error::data(
                    path,
                    format!(
                        "line {}: reward {value} must be finite and non-negative",
                        lineno + 1
                    ),
                ));
            }
            samples.push(value);
        }
        if samples.is_empty() {
            return Err(Error::data(path, "no rewards found"));
        }
        Self::empirical(samples)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::AbsGaussian { mu, sigma } => {
                if !(mu.is_finite() && mu >= 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "abs-gaussian mu must be finite and >= 0, got {mu}"
                    )));
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "abs-gaussian sigma must be finite and > 0, got {sigma}"
                    )));
                }
            }
            Self::Exponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::InvalidDistribution(format!(
                        "exponential rate must be finite and > 0, got {rate}"
                    )));
                }
            }
            Self::Empirical(_) => {}
        }
        Ok(())
    }

    pub fn is_parametric(&self) -> bool {
        !matches!(self, Self::Empirical(_))
    }

    /// A single draw.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::AbsGaussian { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + sigma * z).abs()
            }
            // Inverse transform; 1 - U lies in (0, 1], so the log is finite.
            Self::Exponential { rate } => -(1.0 - rng.random::<f64>()).ln() / rate,
            Self::Empirical(data) => data.samples[rng.random_range(0..data.samples.len())],
        }
    }

    /// Append `count` i.i.d. draws to `out`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, count: usize, out: &mut Vec<f64>) {
        out.reserve(count);
        for _ in 0..count {
            out.push(self.draw(rng));
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        let mut out = Vec::with_capacity(count);
        self.sample_into(rng, count, &mut out);
        out
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        match *self {
            Self::AbsGaussian { mu, sigma } => Ok(if x < 0.0 {
                0.0
            } else {
                gaussian_density(x - mu, sigma) + gaussian_density(x + mu, sigma)
            }),
            Self::Exponential { rate } => Ok(if x < 0.0 {
                0.0
            } else {
                rate * (-rate * x).exp()
            }),
            Self::Empirical(_) => Err(Error::HazardUndefined(
                "empirical distributions carry no density model".into(),
            )),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        match self {
            Self::AbsGaussian { mu, sigma } => {
                let s = sigma * SQRT_2;
                0.5 * (erf((x + mu) / s) + erf((x - mu) / s))
            }
            Self::Exponential { rate } => -(-rate * x).exp_m1(),
            Self::Empirical(data) => data.ecdf(x),
        }
    }

    /// `1 - F(x)`, computed without cancellation for the parametric families.
    pub fn survival(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        match self {
            Self::AbsGaussian { mu, sigma } => {
                let s = sigma * SQRT_2;
                0.5 * (erfc((x - mu) / s) + erfc((x + mu) / s))
            }
            Self::Exponential { rate } => (-rate * x).exp(),
            Self::Empirical(data) => 1.0 - data.ecdf(x),
        }
    }

    /// The population quantile `inf{x : F(x) >= tau}`.
    ///
    /// Exponential uses its closed form, the folded normal bisects its CDF,
    /// and empirical arms use the order-statistic estimator on the stored
    /// population.
    pub fn true_quantile(&self, tau: QuantileLevel) -> f64 {
        match *self {
            Self::Exponential { rate } => -(-tau.value()).ln_1p() / rate,
            Self::AbsGaussian { mu, sigma } => {
                let target = tau.value();
                let (mut lo, mut hi) = (0.0_f64, mu + 12.0 * sigma);
                while self.cdf(hi) < target {
                    hi *= 2.0;
                }
                while hi - lo > QUANTILE_TOLERANCE {
                    let mid = 0.5 * (lo + hi);
                    if self.cdf(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
            // populations smaller than 1/(1-tau) have no order-statistic
            // quantile; fall back to the left-continuous inverse of the ECDF
            Self::Empirical(ref data) => order_stats::quantile_of_ascending(data.ascending(), tau)
                .unwrap_or_else(|_| order_stats::ecdf_inverse(data.ascending(), tau)),
        }
    }

    /// `h(x) = f(x) / (1 - F(x))`.
    pub fn hazard_rate(&self, x: f64) -> Result<f64> {
        match *self {
            Self::Empirical(_) => Err(Error::HazardUndefined(
                "empirical distributions carry no density model".into(),
            )),
            Self::Exponential { rate } => Ok(rate),
            Self::AbsGaussian { .. } => {
                let survival = self.survival(x.max(0.0));
                if survival <= 0.0 {
                    return Err(Error::HazardUndefined(format!("F({x}) = 1")));
                }
                Ok(self.pdf(x.max(0.0))? / survival)
            }
        }
    }

    /// A positive lower bound `L` on the hazard rate.
    ///
    /// Exponential: `rate`. Centered folded normal: `1 / (sigma sqrt(2 pi))`,
    /// half of the true infimum `h(0) = sqrt(2/pi) / sigma`. Shifted folded
    /// normal: `h(0)`, after confirming on a grid that `h` is non-decreasing.
    pub fn hazard_lower_bound(&self) -> Result<f64> {
        match *self {
            Self::Empirical(_) => Err(Error::NoHazardFloor),
            Self::Exponential { rate } => Ok(rate),
            Self::AbsGaussian { mu: 0.0, sigma } => Ok(1.0 / (sigma * (2.0 * PI).sqrt())),
            Self::AbsGaussian { mu, sigma } => {
                let upper = mu + 12.0 * sigma;
                let step = upper / (IHR_GRID_POINTS - 1) as f64;
                let mut previous = self.hazard_rate(0.0)?;
                for i in 1..IHR_GRID_POINTS {
                    let x = i as f64 * step;
                    let h = self.hazard_rate(x)?;
                    if h < previous - 1e-12 * previous.max(1.0) {
                        return Err(Error::IhrCheckFailed(format!(
                            "hazard decreases from {previous} to {h} near x={x}"
                        )));
                    }
                    previous = h;
                }
                self.hazard_rate(0.0)
            }
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::AbsGaussian { mu, sigma } => {
                let a = mu / sigma;
                // E|N(mu, sigma^2)| = sigma*sqrt(2/pi)*exp(-a^2/2) + mu*(1 - 2*Phi(-a))
                sigma * (2.0 / PI).sqrt() * (-0.5 * a * a).exp()
                    + mu * (1.0 - erfc(a * FRAC_1_SQRT_2))
            }
            Self::Exponential { rate } => 1.0 / rate,
            Self::Empirical(ref data) => {
                data.samples.iter().sum::<f64>() / data.samples.len() as f64
            }
        }
    }
}

impl fmt::Display for DistributionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AbsGaussian { mu, sigma } => write!(f, "AbsGaussian({mu},{sigma})"),
            Self::Exponential { rate } => write!(f, "Exponential({rate})"),
            Self::Empirical(data) => write!(f, "Empirical(n={})", data.len()),
        }
    }
}

fn gaussian_density(z: f64, sigma: f64) -> f64 {
    (-0.5 * (z / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}
