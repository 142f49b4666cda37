//! Ring-buffer experience storage.

use crate::AgentError;
use arm_env::{ACTION_DIM, OBS_DIM};
use rand::Rng;

/// Default replay capacity.
pub const REPLAY_CAPACITY: usize = 1_000_000;

/// One replayable experience. The episode's required accuracy rides along in
/// the last observation slot and stays constant across the transition; it only
/// ever affects the termination test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: [f64; OBS_DIM],
    pub action: [f64; ACTION_DIM],
    /// -1.0 or 0.0.
    pub reward: f64,
    pub next_obs: [f64; OBS_DIM],
    pub terminal: bool,
    pub epsilon: f64,
}

impl Transition {
    pub fn validate(&self) -> Result<(), AgentError> {
        let eps_slot = OBS_DIM - 1;
        if self.obs[eps_slot] != self.epsilon || self.next_obs[eps_slot] != self.epsilon {
            return Err(AgentError::InvalidTransition(format!(
                "accuracy slot ({}, {}) disagrees with epsilon {}",
                self.obs[eps_slot], self.next_obs[eps_slot], self.epsilon
            )));
        }
        let success = self.reward == 0.0;
        if self.reward != 0.0 && self.reward != -1.0 {
            return Err(AgentError::InvalidTransition(format!(
                "reward must be -1 or 0, got {}",
                self.reward
            )));
        }
        if success != self.terminal {
            return Err(AgentError::InvalidTransition(format!(
                "reward {} inconsistent with terminal {}",
                self.reward, self.terminal
            )));
        }
        Ok(())
    }
}

/// Fixed-capacity ring storage; once full, the oldest entries are overwritten
/// in insertion order.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    storage: Vec<Transition>,
    capacity: usize,
    cursor: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        ReplayBuffer {
            storage: Vec::with_capacity(capacity.min(1 << 20)),
            capacity,
            cursor: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Number of stored transitions, saturating at capacity.
    pub fn len(&self) -> usize {
        self.storage.len()
    }

    pub fn is_empty(&self) -> bool {
        self.storage.is_empty()
    }

    pub fn push(&mut self, transition: Transition) -> Result<(), AgentError> {
        transition.validate()?;
        if self.storage.len() < self.capacity {
            self.storage.push(transition);
        } else {
            self.storage[self.cursor] = transition;
        }
        self.cursor = (self.cursor + 1) % self.capacity;
        Ok(())
    }

    /// Uniform sample with replacement over the filled region, or `None` when
    /// fewer than `batch_size` transitions are stored.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        batch_size: usize,
        rng: &mut R,
    ) -> Option<Vec<&Transition>> {
        if self.storage.len() < batch_size {
            return None;
        }
        Some(
            (0..batch_size)
                .map(|_| &self.storage[rng.random_range(0..self.storage.len())])
                .collect(),
        )
    }
}
