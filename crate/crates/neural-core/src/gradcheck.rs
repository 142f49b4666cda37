//! Central finite-difference verification of analytic gradients.

use crate::{NetworkParams, ParamGrads};

/// Compare `analytic` against central finite differences of `loss` over every
/// parameter and return the maximum relative error.
///
/// Relative error uses `max(|fd|, |analytic|, 1e-6)` as denominator so that
/// zero-gradient parameters compare at round-off scale instead of dividing by
/// zero. Intended for small networks; cost is two loss evaluations per
/// parameter.
pub fn gradient_check<F>(params: &NetworkParams, analytic: &ParamGrads, loss: F, h: f64) -> f64
where
    F: Fn(&NetworkParams) -> f64,
{
    let mut work = params.clone();
    let mut max_rel = 0.0f64;

    for li in 0..params.layers.len() {
        for idx in 0..params.layers[li].weights.len() {
            let orig = flat_weight(&work, li, idx);
            set_weight(&mut work, li, idx, orig + h);
            let up = loss(&work);
            set_weight(&mut work, li, idx, orig - h);
            let down = loss(&work);
            set_weight(&mut work, li, idx, orig);
            let fd = (up - down) / (2.0 * h);
            let g = analytic.layers[li].weights.as_slice().expect("contiguous")[idx];
            max_rel = max_rel.max(rel_err(fd, g));
        }
        for idx in 0..params.layers[li].bias.len() {
            let orig = work.layers[li].bias[idx];
            work.layers[li].bias[idx] = orig + h;
            let up = loss(&work);
            work.layers[li].bias[idx] = orig - h;
            let down = loss(&work);
            work.layers[li].bias[idx] = orig;
            let fd = (up - down) / (2.0 * h);
            let g = analytic.layers[li].bias[idx];
            max_rel = max_rel.max(rel_err(fd, g));
        }
    }
    max_rel
}

fn flat_weight(net: &NetworkParams, layer: usize, idx: usize) -> f64 {
    net.layers[layer].weights.as_slice().expect("contiguous")[idx]
}

fn set_weight(net: &mut NetworkParams, layer: usize, idx: usize, value: f64) {
    net.layers[layer]
        .weights
        .as_slice_mut()
        .expect("contiguous")[idx] = value;
}

fn rel_err(fd: f64, g: f64) -> f64 {
    (fd - g).abs() / fd.abs().max(g.abs()).max(1e-6)
}
