//! Accuracy scheduling driven by measured competence progress.
//!
//! Training episodes run under an accuracy requirement drawn from a small
//! ordered set. The scheduler either fixes the tightest accuracy (baseline),
//! samples uniformly (random), or samples proportionally to each accuracy's
//! recent competence progress (active), so that whichever difficulty the
//! learner is currently improving on fastest gets trained on most.

mod evaluate;
mod progress;
mod sampling;
mod scheduler;

pub use evaluate::{evaluate_competence, Policy};
pub use progress::{competence_progress, CompetenceHistory};
pub use sampling::{sample_epsilon, selection_probabilities};
pub use scheduler::{Scheduler, SchedulerConfig};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurriculumError {
    #[error("invalid accuracy set: {0}")]
    BadAccuracySet(String),
    #[error("invalid scheduler configuration: {0}")]
    BadConfig(String),
    #[error("invalid competence record: {0}")]
    BadRecord(String),
    #[error("invalid progress values: {0}")]
    BadProgress(String),
}

/// Ordered accuracy requirements, tightest first, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct AccuracySet(Vec<f64>);

impl Default for AccuracySet {
    fn default() -> Self {
        AccuracySet(vec![0.02, 0.03, 0.04, 0.05])
    }
}

impl AccuracySet {
    pub fn new(values: Vec<f64>) -> Result<Self, CurriculumError> {
        if values.is_empty() {
            return Err(CurriculumError::BadAccuracySet("empty".into()));
        }
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(CurriculumError::BadAccuracySet(
                "accuracies must be positive and finite".into(),
            ));
        }
        if values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CurriculumError::BadAccuracySet(
                "accuracies must be strictly increasing".into(),
            ));
        }
        Ok(AccuracySet(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.0[index]
    }

    /// The hardest requirement (smallest radius).
    pub fn tightest(&self) -> f64 {
        self.0[0]
    }

    pub fn index_of(&self, epsilon: f64) -> Option<usize> {
        self.0.iter().position(|&v| v == epsilon)
    }
}

impl TryFrom<Vec<f64>> for AccuracySet {
    type Error = CurriculumError;
    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        AccuracySet::new(values)
    }
}

impl From<AccuracySet> for Vec<f64> {
    fn from(set: AccuracySet) -> Vec<f64> {
        set.0
    }
}

/// How the per-episode training accuracy is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Always the tightest accuracy.
    Baseline,
    /// Uniform over the accuracy set.
    Random,
    /// Proportional to competence progress.
    Active,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Baseline, Strategy::Random, Strategy::Active];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Strategy::Baseline => "baseline",
            Strategy::Random => "random",
            Strategy::Active => "active",
        };
        f.write_str(name)
    }
}

impl FromStr for Strategy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Strategy::Baseline),
            "random" => Ok(Strategy::Random),
            "active" => Ok(Strategy::Active),
            other => Err(format!(
                "unknown strategy '{other}'; allowed: baseline, random, active"
            )),
        }
    }
}
