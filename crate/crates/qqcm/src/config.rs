//! Experiment configuration: one JSON document per experiment.
//!
//! ```json
//! {
//!   "queue": "md1",
//!   "r": 0.5,
//!   "interaction": { "kind": "xxz", "g": "pi/12", "g_delta": 0.1, "gamma": 0.05 },
//!   "idle_dephasing": { "gamma": 0.05 },
//!   "waiting_dephasing": { "gamma": 0.05 },
//!   "sweep": { "axis": "r", "values": [0.1, 0.5, 0.9] }
//! }
//! ```
//!
//! Time is measured in units of the mean service time unless
//! `service_rate` says otherwise; the arrival rate is `r · service_rate`.
//! Coupling constants accept a number or a multiple of pi written as
//! `"pi/12"`, `"2*pi/3"`, `"0.5*pi"`.

use std::path::Path;

use qqcm_core::{
    ChannelSpec, DensityMatrix, DephasingConvention, DistributionSpec, FixedPointMode, GridSpec, ModelSpec,
};
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// Minimum run length for commands that report long-run statistics.
pub const MIN_STATISTICS_ANCILLAS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QueueKind {
    /// Poisson arrivals, deterministic service `1/μ`.
    #[serde(alias = "MD1", alias = "M/D/1")]
    Md1,
    /// Poisson arrivals, exponential service with rate `μ`.
    #[serde(alias = "MM1", alias = "M/M/1")]
    Mm1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InteractionConfig {
    /// XXZ exchange with dephasing on both qubits. Exactly one of `g_delta`
    /// (the product gΔ) and `delta` must be given.
    Xxz {
        #[serde(deserialize_with = "angle")]
        g: f64,
        #[serde(default)]
        g_delta: Option<f64>,
        #[serde(default)]
        delta: Option<f64>,
        #[serde(default)]
        gamma: f64,
    },
    PartialSwap {
        #[serde(deserialize_with = "angle")]
        g: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DephasingConfig {
    pub gamma: f64,
    #[serde(default)]
    pub convention: DephasingConvention,
}

impl DephasingConfig {
    fn channel(cfg: Option<DephasingConfig>) -> ChannelSpec {
        match cfg {
            None => ChannelSpec::Identity,
            Some(d) => ChannelSpec::Dephasing {
                gamma: d.gamma,
                convention: d.convention,
            },
        }
    }
}

/// A named qubit state or a Bloch vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateConfig {
    /// |0⟩
    Ground,
    /// |1⟩
    Excited,
    /// |+⟩
    Plus,
    /// |−⟩
    Minus,
    /// I/2
    Mixed,
    Bloch([f64; 3]),
}

impl StateConfig {
    pub fn state(&self) -> Result<DensityMatrix> {
        Ok(match *self {
            StateConfig::Ground => DensityMatrix::ground(),
            StateConfig::Excited => DensityMatrix::excited(),
            StateConfig::Plus => DensityMatrix::plus(),
            StateConfig::Minus => DensityMatrix::from_bloch(-1.0, 0.0, 0.0)?,
            StateConfig::Mixed => DensityMatrix::maximally_mixed(2),
            StateConfig::Bloch([x, y, z]) => DensityMatrix::from_bloch(x, y, z)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    R,
    /// gΔ with g held fixed.
    GDelta,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::R => "r",
            SweepAxis::GDelta => "g_delta",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LindleyMode {
    /// Stationary CDFs compared with long-run samples.
    #[default]
    FixedPoint,
    /// `steps` iterations from an empty queue (`F ≡ 1`); no stability
    /// requirement.
    Iterate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LindleyConfig {
    pub mode: LindleyMode,
    pub steps: usize,
    /// Upper grid edge; defaults to `10/(μ − λ)` when the queue is stable.
    pub x_max: Option<f64>,
    pub intervals: usize,
    pub tol: f64,
    /// Number of long-run samples for the empirical CDFs.
    pub samples: usize,
    /// Thinning stride between samples; defaults to `⌈10/(1 − √r)²⌉`.
    pub stride: Option<usize>,
}

impl Default for LindleyConfig {
    fn default() -> Self {
        LindleyConfig {
            mode: LindleyMode::FixedPoint,
            steps: 1,
            x_max: None,
            intervals: qqcm_core::lindley::DEFAULT_INTERVALS,
            tol: qqcm_core::lindley::DEFAULT_TOL,
            samples: 100_000,
            stride: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointConfig {
    pub mode: FixedPointMode,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        FixedPointConfig {
            mode: FixedPointMode::DeterministicLimit,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub description: String,
    pub queue: QueueKind,
    /// Utilization `λ/μ`.
    pub r: f64,
    #[serde(default = "one")]
    pub service_rate: f64,
    pub interaction: InteractionConfig,
    #[serde(default)]
    pub idle_dephasing: Option<DephasingConfig>,
    #[serde(default)]
    pub waiting_dephasing: Option<DephasingConfig>,
    #[serde(default = "plus")]
    pub ancilla_state: StateConfig,
    #[serde(default = "ground")]
    pub initial_state: StateConfig,
    #[serde(default = "default_n_ancillas")]
    pub n_ancillas: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in_fraction: f64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "one_usize")]
    pub n_runs: usize,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub lindley: LindleyConfig,
    #[serde(default)]
    pub fixed_point: FixedPointConfig,
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

fn plus() -> StateConfig {
    StateConfig::Plus
}

fn ground() -> StateConfig {
    StateConfig::Ground
}

fn default_n_ancillas() -> usize {
    qqcm_core::collision::DEFAULT_N_ANCILLAS
}

fn default_burn_in() -> f64 {
    qqcm_core::collision::DEFAULT_BURN_IN
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(config_err("r must be finite and > 0"));
        }
        if !(self.service_rate > 0.0 && self.service_rate.is_finite()) {
            return Err(config_err("service_rate must be finite and > 0"));
        }
        if self.n_ancillas == 0 {
            return Err(config_err("n_ancillas must be >= 1"));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(config_err("burn_in_fraction must lie in [0, 1)"));
        }
        if self.n_runs == 0 {
            return Err(config_err("n_runs must be >= 1"));
        }
        if let InteractionConfig::Xxz { g, g_delta, delta, .. } = self.interaction {
            match (g_delta, delta) {
                (Some(_), Some(_)) => return Err(config_err("give either g_delta or delta, not both")),
                (None, None) => return Err(config_err("xxz interaction needs g_delta or delta")),
                (Some(_), None) if g == 0.0 => return Err(config_err("g_delta needs g != 0")),
                _ => {}
            }
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(config_err("sweep values must be nonempty"));
            }
            if sweep.values.iter().any(|v| !v.is_finite()) {
                return Err(config_err("sweep values must be finite"));
            }
            match sweep.axis {
                SweepAxis::R if sweep.values.iter().any(|&v| v <= 0.0) => {
                    return Err(config_err("swept r values must be > 0"))
                }
                SweepAxis::GDelta if !matches!(self.interaction, InteractionConfig::Xxz { .. }) => {
                    return Err(config_err("a g_delta sweep needs an xxz interaction"))
                }
                _ => {}
            }
            for &v in &sweep.values {
                self.at(sweep.axis, v).model()?;
            }
        }
        let l = &self.lindley;
        if l.intervals == 0 || !(l.tol > 0.0) || l.samples == 0 || l.steps == 0 {
            return Err(config_err("lindley needs intervals, tol, samples and steps > 0"));
        }
        if l.x_max.is_some_and(|x| !(x > 0.0 && x.is_finite())) || l.stride == Some(0) {
            return Err(config_err("lindley x_max and stride must be > 0"));
        }
        self.model()?;
        Ok(())
    }

    /// Checks the stricter requirements of commands that report long-run
    /// statistics.
    pub fn validate_for_statistics(&self) -> Result<()> {
        if self.n_ancillas < MIN_STATISTICS_ANCILLAS {
            return Err(config_err(format!(
                "n_ancillas must be >= {MIN_STATISTICS_ANCILLAS} for statistics"
            )));
        }
        Ok(())
    }

    /// A copy with the swept parameter set to `value`.
    pub fn at(&self, axis: SweepAxis, value: f64) -> ExperimentConfig {
        let mut cfg = self.clone();
        match axis {
            SweepAxis::R => cfg.r = value,
            SweepAxis::GDelta => {
                if let InteractionConfig::Xxz { g_delta, delta, .. } = &mut cfg.interaction {
                    *g_delta = Some(value);
                    *delta = None;
                }
            }
        }
        cfg.sweep = None;
        cfg
    }

    pub fn arrival(&self) -> Result<DistributionSpec> {
        Ok(DistributionSpec::exponential(self.r * self.service_rate)?)
    }

    pub fn service(&self) -> Result<DistributionSpec> {
        Ok(match self.queue {
            QueueKind::Md1 => DistributionSpec::deterministic(1.0 / self.service_rate)?,
            QueueKind::Mm1 => DistributionSpec::exponential(self.service_rate)?,
        })
    }

    pub fn interaction_channel(&self) -> ChannelSpec {
        match self.interaction {
            InteractionConfig::Xxz {
                g,
                g_delta,
                delta,
                gamma,
            } => ChannelSpec::XxzDephasing {
                g,
                delta: delta.unwrap_or_else(|| g_delta.unwrap_or(0.0) / g),
                gamma,
            },
            InteractionConfig::PartialSwap { g } => ChannelSpec::PartialSwap { g },
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        let model = ModelSpec {
            arrival: self.arrival()?,
            service: self.service()?,
            idle_channel: DephasingConfig::channel(self.idle_dephasing),
            waiting_channel: DephasingConfig::channel(self.waiting_dephasing),
            interaction_channel: self.interaction_channel(),
            ancilla_state: self.ancilla_state.state()?,
            initial_system_state: self.initial_state.state()?,
        };
        model.validate()?;
        Ok(model)
    }

    /// Lindley grid: explicit `x_max` or the default stationary range.
    pub fn lindley_grid(&self) -> Result<GridSpec> {
        let l = &self.lindley;
        match l.x_max {
            Some(x) => Ok(GridSpec::new(x, l.intervals)?),
            None => {
                let default = GridSpec::default_for(&self.arrival()?, &self.service()?)?;
                Ok(GridSpec::new(default.x_max, l.intervals)?)
            }
        }
    }
}

/// Deserializes a number or an expression `a*pi/b`.
fn angle<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Number(f64),
        Text(String),
    }
    match Raw::deserialize(d)? {
        Raw::Number(x) => Ok(x),
        Raw::Text(s) => {
            parse_angle(&s).ok_or_else(|| serde::de::Error::custom(format!("cannot read {s:?} as a number")))
        }
    }
}

/// Parses products and one quotient of numbers and `pi`.
pub fn parse_angle(text: &str) -> Option<f64> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut parts = compact.split('/');
    let num = product(parts.next()?)?;
    let value = match parts.next() {
        None => num,
        Some(den) => num / product(den)?,
    };
    if parts.next().is_some() || !value.is_finite() {
        return None;
    }
    Some(value)
}

fn product(text: &str) -> Option<f64> {
    text.split('*').try_fold(1.0, |acc, factor| {
        let v = match factor.to_ascii_lowercase().as_str() {
            "pi" | "π" => std::f64::consts::PI,
            f => f.parse::<f64>().ok()?,
        };
        Some(acc * v)
    })
}
