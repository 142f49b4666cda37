//! Adam with bias correction over [`NetworkParams`].

use crate::{NetError, NetworkParams, ParamGrads};
use ndarray::{Array1, Array2};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPS: f64 = 1e-8;

/// First/second moment accumulators plus the step counter.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
    step: u64,
}

impl OptimizerState {
    /// Fresh zeroed state shaped after `params`.
    pub fn new(params: &NetworkParams) -> Self {
        let zeros = || {
            params
                .layers
                .iter()
                .map(|l| {
                    (
                        Array2::zeros(l.weights.raw_dim()),
                        Array1::zeros(l.bias.raw_dim()),
                    )
                })
                .collect::<Vec<_>>()
        };
        OptimizerState {
            m: zeros(),
            v: zeros(),
            step: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }
}

/// One bias-corrected Adam step; gradients must be finite and shape-aligned.
pub fn adam_step(
    params: &mut NetworkParams,
    grads: &ParamGrads,
    state: &mut OptimizerState,
    lr: f64,
) -> Result<(), NetError> {
    if grads.layers.len() != params.layers.len() || state.m.len() != params.layers.len() {
        return Err(NetError::Shape("gradient/state layer count mismatch".into()));
    }
    if !grads.is_finite() {
        return Err(NetError::NonFinite("gradients"));
    }

    state.step += 1;
    let t = state.step as i32;
    let bc1 = 1.0 - ADAM_BETA1.powi(t);
    let bc2 = 1.0 - ADAM_BETA2.powi(t);

    for (i, layer) in params.layers.iter_mut().enumerate() {
        let g = &grads.layers[i];
        if g.weights.raw_dim() != layer.weights.raw_dim()
            || g.bias.raw_dim() != layer.bias.raw_dim()
        {
            return Err(NetError::Shape(format!("layer {i} gradient shape mismatch")));
        }
        let (mw, mb) = &mut state.m[i];
        let (vw, vb) = &mut state.v[i];

        update_slice(
            layer.weights.as_slice_mut().expect("contiguous weights"),
            g.weights.as_slice().expect("contiguous grads"),
            mw.as_slice_mut().expect("contiguous m"),
            vw.as_slice_mut().expect("contiguous v"),
            lr,
            bc1,
            bc2,
        );
        update_slice(
            layer.bias.as_slice_mut().expect("contiguous bias"),
            g.bias.as_slice().expect("contiguous grads"),
            mb.as_slice_mut().expect("contiguous m"),
            vb.as_slice_mut().expect("contiguous v"),
            lr,
            bc1,
            bc2,
        );
    }
    Ok(())
}

fn update_slice(p: &mut [f64], g: &[f64], m: &mut [f64], v: &mut [f64], lr: f64, bc1: f64, bc2: f64) {
    for (((pi, &gi), mi), vi) in p.iter_mut().zip(g).zip(m.iter_mut()).zip(v.iter_mut()) {
        *mi = ADAM_BETA1 * *mi + (1.0 - ADAM_BETA1) * gi;
        *vi = ADAM_BETA2 * *vi + (1.0 - ADAM_BETA2) * gi * gi;
        let m_hat = *mi / bc1;
        let v_hat = *vi / bc2;
        *pi -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
    }
}
