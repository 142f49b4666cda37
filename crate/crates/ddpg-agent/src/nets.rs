//! Actor/critic networks, TD targets and the two update rules.

use crate::{AgentConfig, AgentError, Transition};
use arm_env::{ACTION_DIM, OBS_DIM};
use ndarray::Array2;
use neural_core::{adam_step, soft_update, Activation, NetworkParams, OptimizerState, ParamGrads};
use rand::Rng;

/// Critic input width: observation concatenated with the action.
pub const CRITIC_IN_DIM: usize = OBS_DIM + ACTION_DIM;

/// Online and target networks plus their optimizer states. Targets start as
/// exact copies and drift only through Polyak updates.
#[derive(Debug, Clone)]
pub struct AgentNets {
    pub actor: NetworkParams,
    pub critic: NetworkParams,
    pub target_actor: NetworkParams,
    pub target_critic: NetworkParams,
    pub actor_opt: OptimizerState,
    pub critic_opt: OptimizerState,
}

impl AgentNets {
    /// Build actor [OBS, hidden.., 2] with a tanh head and critic
    /// [OBS+2, hidden.., 1] with an identity head, ReLU in between.
    pub fn init<R: Rng + ?Sized>(hidden: &[usize], rng: &mut R) -> Result<Self, AgentError> {
        if hidden.is_empty() {
            return Err(AgentError::InvalidConfig("need at least one hidden layer".into()));
        }
        let mut actor_dims = vec![OBS_DIM];
        actor_dims.extend_from_slice(hidden);
        actor_dims.push(ACTION_DIM);
        let mut actor_acts = vec![Activation::Relu; hidden.len()];
        actor_acts.push(Activation::Tanh);

        let mut critic_dims = vec![CRITIC_IN_DIM];
        critic_dims.extend_from_slice(hidden);
        critic_dims.push(1);
        let mut critic_acts = vec![Activation::Relu; hidden.len()];
        critic_acts.push(Activation::Identity);

        let actor = NetworkParams::init(&actor_dims, &actor_acts, rng)?;
        let critic = NetworkParams::init(&critic_dims, &critic_acts, rng)?;
        let actor_opt = OptimizerState::new(&actor);
        let critic_opt = OptimizerState::new(&critic);
        Ok(AgentNets {
            target_actor: actor.clone(),
            target_critic: critic.clone(),
            actor,
            critic,
            actor_opt,
            critic_opt,
        })
    }
}

/// Greedy action: one deterministic actor pass, components in [-1, 1].
pub fn select_action(
    actor: &NetworkParams,
    obs: &[f64; OBS_DIM],
) -> Result<[f64; ACTION_DIM], AgentError> {
    if obs.iter().any(|v| !v.is_finite()) {
        return Err(AgentError::NonFinite("observation"));
    }
    let out = actor.forward_single(obs)?;
    Ok([out[0], out[1]])
}

/// Stack batch observations into a rows-are-samples matrix.
pub fn obs_matrix(batch: &[&Transition]) -> Array2<f64> {
    Array2::from_shape_fn((batch.len(), OBS_DIM), |(i, j)| batch[i].obs[j])
}

fn next_obs_matrix(batch: &[&Transition]) -> Array2<f64> {
    Array2::from_shape_fn((batch.len(), OBS_DIM), |(i, j)| batch[i].next_obs[j])
}

/// Stack `[obs || action]` rows for the critic.
pub fn critic_inputs(batch: &[&Transition]) -> Array2<f64> {
    Array2::from_shape_fn((batch.len(), CRITIC_IN_DIM), |(i, j)| {
        if j < OBS_DIM {
            batch[i].obs[j]
        } else {
            batch[i].action[j - OBS_DIM]
        }
    })
}

fn concat_obs_actions(obs: &Array2<f64>, actions: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_fn((obs.nrows(), CRITIC_IN_DIM), |(i, j)| {
        if j < OBS_DIM {
            obs[[i, j]]
        } else {
            actions[[i, j - OBS_DIM]]
        }
    })
}

/// TD targets `r + gamma * (1 - terminal) * Q'(s', mu'(s'))`, clipped to the
/// feasible return range [-1/(1-gamma), 0].
pub fn compute_targets(
    nets: &AgentNets,
    batch: &[&Transition],
    gamma: f64,
) -> Result<Vec<f64>, AgentError> {
    let next_obs = next_obs_matrix(batch);
    let (next_actions, _) = nets.target_actor.forward(&next_obs)?;
    let inputs = concat_obs_actions(&next_obs, &next_actions);
    let (q_next, _) = nets.target_critic.forward(&inputs)?;

    let lo = -1.0 / (1.0 - gamma);
    batch
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let q = q_next[[i, 0]];
            if !q.is_finite() {
                return Err(AgentError::NonFinite("target critic output"));
            }
            let bootstrap = if t.terminal { 0.0 } else { gamma * q };
            Ok((t.reward + bootstrap).clamp(lo, 0.0))
        })
        .collect()
}

/// Mean-squared TD error and its gradients w.r.t. the critic parameters.
/// Returns the loss before any update.
pub fn critic_loss_and_grads(
    critic: &NetworkParams,
    inputs: &Array2<f64>,
    targets: &[f64],
) -> Result<(f64, ParamGrads), AgentError> {
    let batch = inputs.nrows() as f64;
    let (q, cache) = critic.forward(inputs)?;
    let mut loss = 0.0;
    let mut upstream = Array2::zeros(q.raw_dim());
    for (i, &y) in targets.iter().enumerate() {
        let d = q[[i, 0]] - y;
        loss += d * d;
        upstream[[i, 0]] = 2.0 * d / batch;
    }
    loss /= batch;
    let (grads, _) = critic.backward(&cache, &upstream)?;
    Ok((loss, grads))
}

/// One Adam step on the mean-squared TD error; returns the pre-step loss.
pub fn critic_update(
    nets: &mut AgentNets,
    batch: &[&Transition],
    config: &AgentConfig,
) -> Result<f64, AgentError> {
    let targets = compute_targets(nets, batch, config.gamma)?;
    let inputs = critic_inputs(batch);
    let (loss, grads) = critic_loss_and_grads(&nets.critic, &inputs, &targets)?;
    adam_step(&mut nets.critic, &grads, &mut nets.critic_opt, config.critic_lr)?;
    Ok(loss)
}

/// Scale an ascent gradient so it never pushes an action past its bounds:
/// components pushing up are weighted by the remaining headroom to +1,
/// components pushing down by the headroom to -1.
pub fn invert_gradient(grad: [f64; ACTION_DIM], action: [f64; ACTION_DIM]) -> [f64; ACTION_DIM] {
    let mut out = [0.0; ACTION_DIM];
    for i in 0..ACTION_DIM {
        let p = action[i].clamp(-1.0, 1.0);
        let scale = if grad[i] > 0.0 {
            (1.0 - p) / 2.0
        } else {
            (p + 1.0) / 2.0
        };
        out[i] = grad[i] * scale;
    }
    out
}

/// Mean critic value of the actor's actions and the ascent gradients of that
/// objective w.r.t. the actor parameters.
///
/// With `invert` set, per-sample action gradients are bound-scaled before
/// being pushed through the actor; with it unset the result is the exact
/// gradient of the returned objective.
pub fn actor_objective_and_grads(
    actor: &NetworkParams,
    critic: &NetworkParams,
    obs: &Array2<f64>,
    invert: bool,
) -> Result<(f64, ParamGrads), AgentError> {
    let batch = obs.nrows() as f64;
    let (actions, actor_cache) = actor.forward(obs)?;
    let inputs = concat_obs_actions(obs, &actions);
    let (q, critic_cache) = critic.forward(&inputs)?;
    let objective = q.iter().sum::<f64>() / batch;

    // d(sum_i Q_i)/d(input_i): rows are independent, so all-ones upstream
    // recovers the per-sample input gradient.
    let ones = Array2::ones(q.raw_dim());
    let (_, input_grad) = critic.backward(&critic_cache, &ones)?;

    let mut upstream = Array2::zeros(actions.raw_dim());
    for i in 0..obs.nrows() {
        let g = [input_grad[[i, OBS_DIM]], input_grad[[i, OBS_DIM + 1]]];
        let a = [actions[[i, 0]], actions[[i, 1]]];
        let adj = if invert { invert_gradient(g, a) } else { g };
        upstream[[i, 0]] = adj[0] / batch;
        upstream[[i, 1]] = adj[1] / batch;
    }
    let (grads, _) = actor.backward(&actor_cache, &upstream)?;
    Ok((objective, grads))
}

/// One gradient-ascent Adam step on the actor's mean critic value, with
/// inverted action gradients.
pub fn actor_update(
    nets: &mut AgentNets,
    batch: &[&Transition],
    config: &AgentConfig,
) -> Result<(), AgentError> {
    let obs = obs_matrix(batch);
    let (_, mut grads) = actor_objective_and_grads(&nets.actor, &nets.critic, &obs, true)?;
    for layer in &mut grads.layers {
        layer.weights.mapv_inplace(|g| -g);
        layer.bias.mapv_inplace(|g| -g);
    }
    adam_step(&mut nets.actor, &grads, &mut nets.actor_opt, config.actor_lr)?;
    Ok(())
}

/// Polyak-track both target networks toward their online counterparts.
pub fn update_targets(nets: &mut AgentNets, tau: f64) -> Result<(), AgentError> {
    soft_update(&mut nets.target_actor, &nets.actor, tau)?;
    soft_update(&mut nets.target_critic, &nets.critic, tau)?;
    Ok(())
}
