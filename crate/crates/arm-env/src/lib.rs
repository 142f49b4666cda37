//! Two-link planar reaching environment.
//!
//! A seedable, fully deterministic simulation of a two-joint arm that must
//! bring its fingertip within a required accuracy `epsilon` of a target
//! point. The reward is sparse: 0 on success (which terminates the episode),
//! -1 otherwise. Targets are resampled per episode from an annulus that is
//! always inside the arm's reachable disc.

use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

/// Hard cap on joint angular velocity, rad/s.
pub const OMEGA_MAX: f64 = 10.0;
/// Inner radius of the target sampling annulus, meters.
pub const TARGET_RADIUS_MIN: f64 = 0.05;
/// Outer radius of the target sampling annulus, meters.
pub const TARGET_RADIUS_MAX: f64 = 0.20;
/// Width of the observation vector fed to the learner.
pub const OBS_DIM: usize = 11;
/// Number of torque inputs.
pub const ACTION_DIM: usize = 2;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid environment parameters: {0}")]
    BadParams(String),
    #[error("non-finite {0} fed to the simulation")]
    NonFinite(&'static str),
}

/// Physical configuration of the arm plus the current target.
///
/// Angles are stored wrapped to (-pi, pi]; angular velocities are clamped to
/// [-OMEGA_MAX, OMEGA_MAX] by the dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmState {
    pub theta1: f64,
    pub theta2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub target: [f64; 2],
}

/// Simulation constants. All defaults keep every sampled target reachable:
/// the annulus [0.05, 0.20] sits inside [|l1 - l2|, l1 + l2] = [0.01, 0.21].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvParams {
    /// First link length, meters.
    pub l1: f64,
    /// Second link length, meters.
    pub l2: f64,
    /// Integration step, seconds.
    pub dt: f64,
    /// Angular acceleration per unit torque, rad/s^2.
    pub torque_gain: f64,
    /// Velocity damping coefficient, 1/s.
    pub damping: f64,
    /// Maximum steps per episode.
    pub horizon: u32,
}

impl Default for EnvParams {
    fn default() -> Self {
        EnvParams {
            l1: 0.10,
            l2: 0.11,
            dt: 0.02,
            torque_gain: 20.0,
            damping: 2.0,
            horizon: 50,
        }
    }
}

impl EnvParams {
    pub fn validate(&self) -> Result<(), EnvError> {
        let positive = [
            ("l1", self.l1),
            ("l2", self.l2),
            ("dt", self.dt),
            ("torque_gain", self.torque_gain),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(EnvError::BadParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(EnvError::BadParams(format!(
                "damping must be >= 0, got {}",
                self.damping
            )));
        }
        if self.horizon < 1 {
            return Err(EnvError::BadParams("horizon must be >= 1".into()));
        }
        Ok(())
    }
}

/// Result of one simulation step.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    pub next_state: ArmState,
    /// 0 on success, -1 otherwise.
    pub reward: f64,
    /// True iff the fingertip came within `epsilon` of the target.
    pub terminal: bool,
    /// Fingertip-to-target distance after the step, meters.
    pub distance: f64,
}

/// Fingertip position for the given joint angles.
pub fn forward_kinematics(theta1: f64, theta2: f64, params: &EnvParams) -> [f64; 2] {
    [
        params.l1 * theta1.cos() + params.l2 * (theta1 + theta2).cos(),
        params.l1 * theta1.sin() + params.l2 * (theta1 + theta2).sin(),
    ]
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x % two_pi;
    if y <= -PI {
        y += two_pi;
    } else if y > PI {
        y -= two_pi;
    }
    y
}

/// The environment itself: validated parameters plus the step/reset/observe
/// operations. Owns no random state; callers pass their own streams.
#[derive(Debug, Clone)]
pub struct ArmEnv {
    params: EnvParams,
}

impl ArmEnv {
    pub fn new(params: EnvParams) -> Result<Self, EnvError> {
        params.validate()?;
        Ok(ArmEnv { params })
    }

    pub fn params(&self) -> &EnvParams {
        &self.params
    }

    pub fn horizon(&self) -> u32 {
        self.params.horizon
    }

    /// Start a new episode: joint angles uniform over the circle, zero
    /// velocity, and a fresh target drawn area-uniformly from the annulus
    /// (angle uniform, squared radius uniform).
    pub fn reset<R: Rng + ?Sized>(&self, rng: &mut R) -> ArmState {
        let theta1 = wrap_angle(rng.random_range(-PI..PI));
        let theta2 = wrap_angle(rng.random_range(-PI..PI));
        let angle = rng.random_range(0.0..2.0 * PI);
        let r2 = rng.random_range(TARGET_RADIUS_MIN.powi(2)..=TARGET_RADIUS_MAX.powi(2));
        let r = r2.sqrt();
        ArmState {
            theta1,
            theta2,
            omega1: 0.0,
            omega2: 0.0,
            target: [r * angle.cos(), r * angle.sin()],
        }
    }

    /// Advance one step with semi-implicit Euler dynamics.
    ///
    /// Torques outside [-1, 1] are clamped. Success is the inclusive test
    /// `distance <= epsilon` and terminates the episode.
    pub fn step(
        &self,
        state: &ArmState,
        action: [f64; ACTION_DIM],
        epsilon: f64,
    ) -> Result<StepOutcome, EnvError> {
        if !(action[0].is_finite() && action[1].is_finite()) {
            return Err(EnvError::NonFinite("action"));
        }
        if ![state.theta1, state.theta2, state.omega1, state.omega2]
            .iter()
            .all(|v| v.is_finite())
            || !(state.target[0].is_finite() && state.target[1].is_finite())
        {
            return Err(EnvError::NonFinite("state"));
        }
        let p = &self.params;
        let a1 = action[0].clamp(-1.0, 1.0);
        let a2 = action[1].clamp(-1.0, 1.0);

        let omega1 = (state.omega1 + p.dt * (p.torque_gain * a1 - p.damping * state.omega1))
            .clamp(-OMEGA_MAX, OMEGA_MAX);
        let omega2 = (state.omega2 + p.dt * (p.torque_gain * a2 - p.damping * state.omega2))
            .clamp(-OMEGA_MAX, OMEGA_MAX);
        let theta1 = wrap_angle(state.theta1 + p.dt * omega1);
        let theta2 = wrap_angle(state.theta2 + p.dt * omega2);

        let finger = forward_kinematics(theta1, theta2, p);
        let dx = finger[0] - state.target[0];
        let dy = finger[1] - state.target[1];
        let distance = (dx * dx + dy * dy).sqrt();
        let success = distance <= epsilon;

        Ok(StepOutcome {
            next_state: ArmState {
                theta1,
                theta2,
                omega1,
                omega2,
                target: state.target,
            },
            reward: if success { 0.0 } else { -1.0 },
            terminal: success,
            distance,
        })
    }

    /// Observation layout:
    /// `[cos t1, sin t1, cos t2, sin t2, w1/W, w2/W, fx, fy, tx, ty, eps]`.
    pub fn observe(&self, state: &ArmState, epsilon: f64) -> [f64; OBS_DIM] {
        let finger = forward_kinematics(state.theta1, state.theta2, &self.params);
        [
            state.theta1.cos(),
            state.theta1.sin(),
            state.theta2.cos(),
            state.theta2.sin(),
            state.omega1 / OMEGA_MAX,
            state.omega2 / OMEGA_MAX,
            finger[0],
            finger[1],
            state.target[0],
            state.target[1],
            epsilon,
        ]
    }
}
