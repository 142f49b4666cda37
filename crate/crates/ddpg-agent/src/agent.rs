//! Training-loop state: one environment cursor, the replay buffer and the
//! update schedule.

use crate::nets::{actor_update, critic_update, update_targets};
use crate::{AgentConfig, AgentError, AgentNets, ReplayBuffer, Transition};
use arm_env::{ArmEnv, ArmState, ACTION_DIM, OBS_DIM};
use rand::Rng;

/// What one training step produced.
#[derive(Debug, Clone, Copy)]
pub struct StepReport {
    pub reward: f64,
    /// Fingertip reached the required accuracy this step.
    pub terminal: bool,
    /// Episode finished, by success or by hitting the horizon.
    pub episode_ended: bool,
    pub distance: f64,
    /// Pre-update critic loss of the last update cycle, when any ran.
    pub critic_loss: Option<f64>,
    pub updates_run: usize,
}

struct EpisodeCursor {
    state: ArmState,
    steps: u32,
}

/// Single-owner learner: acts greedily, stores experience, and after warmup
/// performs `updates_per_step` critic/actor/target update cycles per
/// environment step.
pub struct DdpgAgent {
    pub nets: AgentNets,
    buffer: ReplayBuffer,
    config: AgentConfig,
    env_steps: u64,
    episode: Option<EpisodeCursor>,
}

impl DdpgAgent {
    pub fn new<R: Rng + ?Sized>(
        config: AgentConfig,
        hidden: &[usize],
        buffer_capacity: usize,
        rng: &mut R,
    ) -> Result<Self, AgentError> {
        config.validate()?;
        Ok(DdpgAgent {
            nets: AgentNets::init(hidden, rng)?,
            buffer: ReplayBuffer::new(buffer_capacity),
            config,
            env_steps: 0,
            episode: None,
        })
    }

    pub fn config(&self) -> &AgentConfig {
        &self.config
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn episode_in_progress(&self) -> bool {
        self.episode.is_some()
    }

    /// Greedy policy for evaluation.
    pub fn act(&self, obs: &[f64; OBS_DIM]) -> Result<[f64; ACTION_DIM], AgentError> {
        crate::select_action(&self.nets.actor, obs)
    }

    /// Advance training by one environment step under the given accuracy.
    ///
    /// A new episode starts automatically when none is in progress; the
    /// caller keeps `epsilon` fixed for the whole episode and picks a fresh
    /// one whenever the report says the episode ended. `env_rng` only feeds
    /// episode resets, `train_rng` only feeds minibatch sampling, so the two
    /// streams stay independent.
    pub fn train_step<R: Rng + ?Sized, S: Rng + ?Sized>(
        &mut self,
        env: &ArmEnv,
        epsilon: f64,
        env_rng: &mut R,
        train_rng: &mut S,
    ) -> Result<StepReport, AgentError> {
        let cursor = match self.episode.take() {
            Some(c) => c,
            None => EpisodeCursor {
                state: env.reset(env_rng),
                steps: 0,
            },
        };

        let obs = env.observe(&cursor.state, epsilon);
        let action = self.act(&obs)?;
        let outcome = env.step(&cursor.state, action, epsilon)?;
        let next_obs = env.observe(&outcome.next_state, epsilon);

        self.buffer.push(Transition {
            obs,
            action,
            reward: outcome.reward,
            next_obs,
            terminal: outcome.terminal,
            epsilon,
        })?;
        self.env_steps += 1;

        let steps = cursor.steps + 1;
        let episode_ended = outcome.terminal || steps >= env.horizon();
        if !episode_ended {
            self.episode = Some(EpisodeCursor {
                state: outcome.next_state,
                steps,
            });
        }

        let mut critic_loss = None;
        let mut updates_run = 0;
        if self.env_steps >= self.config.warmup as u64 {
            for _ in 0..self.config.updates_per_step {
                let batch = self
                    .buffer
                    .sample(self.config.batch_size, train_rng)
                    .expect("warmup >= batch_size guarantees a full batch");
                critic_loss = Some(critic_update(&mut self.nets, &batch, &self.config)?);
                actor_update(&mut self.nets, &batch, &self.config)?;
                update_targets(&mut self.nets, self.config.tau)?;
                updates_run += 1;
            }
        }

        Ok(StepReport {
            reward: outcome.reward,
            terminal: outcome.terminal,
            episode_ended,
            distance: outcome.distance,
            critic_loss,
            updates_run,
        })
    }
}
