//! Deviation of real execution from profiled averages.

use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::rng::SubtractiveRng;

/// Realized times never drop below this fraction of the estimate.
pub const JITTER_FLOOR: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyRealization {
    /// Report the assigned models' average accuracy.
    #[default]
    Expected,
    /// Also draw per-job correctness with the model's accuracy as success probability.
    Bernoulli,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutionNoise {
    /// Coefficient of variation of the multiplicative time jitter.
    pub time_jitter_cv: f64,
    pub accuracy_realization: AccuracyRealization,
}

impl Default for ExecutionNoise {
    fn default() -> Self {
        ExecutionNoise { time_jitter_cv: 0.05, accuracy_realization: AccuracyRealization::Expected }
    }
}

impl ExecutionNoise {
    pub fn noiseless() -> Self {
        ExecutionNoise { time_jitter_cv: 0.0, accuracy_realization: AccuracyRealization::Expected }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.time_jitter_cv.is_finite() && self.time_jitter_cv >= 0.0) {
            return Err("time_jitter_cv must be finite and >= 0".into());
        }
        Ok(())
    }

    pub fn jitter(&self) -> Jitter {
        Jitter::new(self.time_jitter_cv)
    }
}

/// Mean-one lognormal multiplier with a given coefficient of variation.
#[derive(Debug, Clone, Copy)]
pub struct Jitter {
    dist: Option<LogNormal<f64>>,
}

impl Jitter {
    pub fn new(cv: f64) -> Self {
        if cv == 0.0 {
            return Jitter { dist: None };
        }
        let sigma2 = (1.0 + cv * cv).ln();
        let dist = LogNormal::new(-sigma2 / 2.0, sigma2.sqrt()).expect("finite lognormal parameters");
        Jitter { dist: Some(dist) }
    }

    pub fn sample(&self, rng: &mut SubtractiveRng) -> f64 {
        match &self.dist {
            None => 1.0,
            Some(d) => d.sample(rng).max(JITTER_FLOOR),
        }
    }
}
