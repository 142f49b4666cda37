//! Deterministic actor-critic learner over accuracy-augmented observations.
//!
//! The actor maps an 11-component observation (which carries the episode's
//! required accuracy in its last slot) to a torque pair in [-1, 1]^2; the
//! critic scores observation-action pairs. Updates use clipped TD targets and
//! bound-aware inverted action gradients. No exploration noise is ever added:
//! per-episode random starts and targets supply the exploration.

mod agent;
mod buffer;
mod nets;

pub use agent::{DdpgAgent, StepReport};
pub use buffer::{ReplayBuffer, Transition, REPLAY_CAPACITY};
pub use nets::{
    actor_objective_and_grads, compute_targets, critic_inputs, critic_loss_and_grads,
    invert_gradient, obs_matrix, select_action, AgentNets, CRITIC_IN_DIM,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error(transparent)]
    Net(#[from] neural_core::NetError),
    #[error(transparent)]
    Env(#[from] arm_env::EnvError),
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite {0}")]
    NonFinite(&'static str),
}

/// Learner hyperparameters. Defaults follow the common continuous-control
/// baseline settings: minibatch 64, gamma 0.99, tau 0.001, critic and actor
/// learning rates 1e-3 and 1e-4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentConfig {
    pub gamma: f64,
    pub tau: f64,
    pub critic_lr: f64,
    pub actor_lr: f64,
    pub batch_size: usize,
    /// Environment steps collected before updates begin.
    pub warmup: usize,
    pub updates_per_step: usize,
}

impl Default for AgentConfig {
    fn default() -> Self {
        AgentConfig {
            gamma: 0.99,
            tau: 0.001,
            critic_lr: 1e-3,
            actor_lr: 1e-4,
            batch_size: 64,
            warmup: 1000,
            updates_per_step: 1,
        }
    }
}

impl AgentConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(AgentError::InvalidConfig(format!(
                "gamma must be in (0, 1), got {}",
                self.gamma
            )));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(AgentError::InvalidConfig(format!(
                "tau must be in (0, 1], got {}",
                self.tau
            )));
        }
        if self.critic_lr <= 0.0 || self.actor_lr <= 0.0 {
            return Err(AgentError::InvalidConfig("learning rates must be > 0".into()));
        }
        if self.batch_size == 0 {
            return Err(AgentError::InvalidConfig("batch_size must be >= 1".into()));
        }
        if self.batch_size > self.warmup {
            return Err(AgentError::InvalidConfig(format!(
                "batch_size {} exceeds warmup {}",
                self.batch_size, self.warmup
            )));
        }
        if self.updates_per_step == 0 {
            return Err(AgentError::InvalidConfig("updates_per_step must be >= 1".into()));
        }
        Ok(())
    }

    /// TD targets are clipped to [-1/(1-gamma), 0], the feasible return range
    /// for rewards in {-1, 0}.
    pub fn target_clip(&self) -> (f64, f64) {
        (-1.0 / (1.0 - self.gamma), 0.0)
    }
}
