//! Interarrival and service-time laws.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{invalid, Error, Result};

/// Law of an interarrival or service time.
///
/// Serialized as `{"kind": "exponential", "rate": 1.0}` or
/// `{"kind": "deterministic", "value": 1.0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum DistributionSpec {
    Deterministic { value: f64 },
    Exponential { rate: f64 },
}

impl DistributionSpec {
    pub fn deterministic(value: f64) -> Result<Self> {
        let d = DistributionSpec::Deterministic { value };
        d.validate()?;
        Ok(d)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let d = DistributionSpec::Exponential { rate };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Deterministic { value } if !(value.is_finite() && value >= 0.0) => {
                Err(invalid("deterministic time must be finite and >= 0"))
            }
            DistributionSpec::Exponential { rate } if !(rate.is_finite() && rate > 0.0) => {
                Err(invalid("exponential rate must be finite and > 0"))
            }
            _ => Ok(()),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Exponential { rate } => 1.0 / rate,
        }
    }

    /// Draws one time. Deterministic laws consume no randomness.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Exponential { rate } => {
                let e: f64 = Exp1.sample(rng);
                e / rate
            }
        }
    }

    /// Quantile function.
    pub fn quantile(&self, p: f64) -> f64 {
        match *self {
            DistributionSpec::Deterministic { value } => value,
            DistributionSpec::Exponential { rate } => -libm::log1p(-p) / rate,
        }
    }

    /// Probability density; `None` for laws without one.
    pub fn pdf(&self, t: f64) -> Option<f64> {
        match *self {
            DistributionSpec::Deterministic { .. } => None,
            DistributionSpec::Exponential { rate } => Some(if t < 0.0 { 0.0 } else { rate * libm::exp(-rate * t) }),
        }
    }

    pub(crate) fn name(&self) -> &'static str {
        match self {
            DistributionSpec::Deterministic { .. } => "deterministic",
            DistributionSpec::Exponential { .. } => "exponential",
        }
    }
}

/// Law of `U = S − T` for the supported (service, arrival) pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DifferenceLaw {
    /// S ≡ d, T ~ Exp(λ).
    DeterministicMinusExp { d: f64, lambda: f64 },
    /// S ~ Exp(μ), T ~ Exp(λ).
    ExpMinusExp { mu: f64, lambda: f64 },
}

impl DifferenceLaw {
    pub fn new(service: &DistributionSpec, arrival: &DistributionSpec) -> Result<Self> {
        service.validate()?;
        arrival.validate()?;
        match (*service, *arrival) {
            (DistributionSpec::Deterministic { value }, DistributionSpec::Exponential { rate }) => {
                Ok(DifferenceLaw::DeterministicMinusExp { d: value, lambda: rate })
            }
            (DistributionSpec::Exponential { rate: mu }, DistributionSpec::Exponential { rate }) => {
                Ok(DifferenceLaw::ExpMinusExp { mu, lambda: rate })
            }
            (s, a) => Err(Error::UnsupportedPair {
                service: s.name(),
                arrival: a.name(),
            }),
        }
    }

    pub fn pdf(&self, u: f64) -> f64 {
        match *self {
            DifferenceLaw::DeterministicMinusExp { d, lambda } => {
                if u <= d {
                    lambda * libm::exp(-lambda * (d - u))
                } else {
                    0.0
                }
            }
            DifferenceLaw::ExpMinusExp { mu, lambda } => {
                let k = lambda * mu / (lambda + mu);
                if u >= 0.0 {
                    k * libm::exp(-mu * u)
                } else {
                    k * libm::exp(lambda * u)
                }
            }
        }
    }

    /// P(U ≤ u).
    pub fn cdf(&self, u: f64) -> f64 {
        match *self {
            DifferenceLaw::DeterministicMinusExp { d, lambda } => {
                if u <= d {
                    libm::exp(-lambda * (d - u))
                } else {
                    1.0
                }
            }
            DifferenceLaw::ExpMinusExp { mu, lambda } => {
                let s = lambda + mu;
                if u >= 0.0 {
                    1.0 - lambda / s * libm::exp(-mu * u)
                } else {
                    mu / s * libm::exp(lambda * u)
                }
            }
        }
    }
}

/// Density of `S − T` at `u`.
pub fn pdf_difference(service: &DistributionSpec, arrival: &DistributionSpec, u: f64) -> Result<f64> {
    Ok(DifferenceLaw::new(service, arrival)?.pdf(u))
}
