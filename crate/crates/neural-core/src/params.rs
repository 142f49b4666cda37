//! Network parameters, forward/backward passes and Polyak updates.

use crate::NetError;
use ndarray::{Array1, Array2, Axis};
use rand::Rng;

/// Per-layer nonlinearity applied after the affine map.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Tanh,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative evaluated from the pre-activation. ReLU at exactly 0 is 0.
    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Identity => 1.0,
        }
    }
}

/// One dense layer: `out = act(x W^T + b)` with `weights` stored out x in.
#[derive(Debug, Clone)]
pub struct Layer {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
    pub activation: Activation,
}

impl Layer {
    pub fn fan_in(&self) -> usize {
        self.weights.ncols()
    }

    pub fn fan_out(&self) -> usize {
        self.weights.nrows()
    }
}

/// Dense network as an ordered stack of layers.
#[derive(Debug, Clone)]
pub struct NetworkParams {
    pub layers: Vec<Layer>,
}

/// Gradients for one layer, shapes mirroring [`Layer`].
#[derive(Debug, Clone)]
pub struct LayerGrads {
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

/// Gradients for a whole network, shapes mirroring [`NetworkParams`].
///
/// Gradients are summed over the batch; any 1/batch normalization belongs to
/// the loss that produced the upstream gradient.
#[derive(Debug, Clone)]
pub struct ParamGrads {
    pub layers: Vec<LayerGrads>,
}

impl ParamGrads {
    pub fn zeros_like(params: &NetworkParams) -> Self {
        ParamGrads {
            layers: params
                .layers
                .iter()
                .map(|l| LayerGrads {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().all(|v| v.is_finite()) && l.bias.iter().all(|v| v.is_finite()))
    }
}

/// Per-layer intermediates from one forward pass, consumed by [`NetworkParams::backward`].
#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input batch (rows = samples).
    pub input: Array2<f64>,
    /// Pre-activation `z` per layer.
    pub pre_activations: Vec<Array2<f64>>,
    /// Post-activation output per layer; the last entry is the network output.
    pub activations: Vec<Array2<f64>>,
}

/// Range of the final-layer init, the convention of the original
/// deterministic-policy-gradient nets.
pub const OUTPUT_INIT_BOUND: f64 = 3e-3;

impl NetworkParams {
    /// Initialize a network from layer dimensions and activation tags.
    ///
    /// Hidden layers draw weights and biases from U(-1/sqrt(fan_in), 1/sqrt(fan_in)),
    /// the final layer from U(-3e-3, 3e-3).
    pub fn init<R: Rng + ?Sized>(
        dims: &[usize],
        activations: &[Activation],
        rng: &mut R,
    ) -> Result<Self, NetError> {
        if dims.len() < 2 {
            return Err(NetError::Config(format!(
                "need at least 2 layer dims, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(NetError::Config("layer dims must be positive".into()));
        }
        if activations.len() != dims.len() - 1 {
            return Err(NetError::Config(format!(
                "expected {} activation tags, got {}",
                dims.len() - 1,
                activations.len()
            )));
        }

        let last = dims.len() - 2;
        let layers = dims
            .windows(2)
            .enumerate()
            .map(|(i, w)| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let bound = if i == last {
                    OUTPUT_INIT_BOUND
                } else {
                    1.0 / (fan_in as f64).sqrt()
                };
                Layer {
                    weights: Array2::from_shape_fn((fan_out, fan_in), |_| {
                        rng.random_range(-bound..bound)
                    }),
                    bias: Array1::from_shape_fn(fan_out, |_| rng.random_range(-bound..bound)),
                    activation: activations[i],
                }
            })
            .collect();
        Ok(NetworkParams { layers })
    }

    /// Layer dimensions as `[in, hidden..., out]`.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![self.layers[0].fan_in()];
        d.extend(self.layers.iter().map(Layer::fan_out));
        d
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].fan_in()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("network has layers").fan_out()
    }

    /// Total number of scalar parameters (weights + biases).
    pub fn param_count(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.weights.len() + l.bias.len())
            .sum()
    }

    /// Forward pass over a batch (rows = samples), keeping intermediates.
    pub fn forward(&self, batch: &Array2<f64>) -> Result<(Array2<f64>, ForwardCache), NetError> {
        if batch.ncols() != self.input_dim() {
            return Err(NetError::Shape(format!(
                "input width {} does not match first layer fan-in {}",
                batch.ncols(),
                self.input_dim()
            )));
        }
        let mut pre_activations = Vec::with_capacity(self.layers.len());
        let mut activations = Vec::with_capacity(self.layers.len());
        let mut current = batch.clone();
        for (i, layer) in self.layers.iter().enumerate() {
            if current.ncols() != layer.fan_in() {
                return Err(NetError::Shape(format!(
                    "layer {i}: input width {} does not match fan-in {}",
                    current.ncols(),
                    layer.fan_in()
                )));
            }
            let mut z = current.dot(&layer.weights.t());
            z += &layer.bias;
            let a = z.mapv(|v| layer.activation.apply(v));
            pre_activations.push(z);
            activations.push(a.clone());
            current = a;
        }
        Ok((
            current,
            ForwardCache {
                input: batch.clone(),
                pre_activations,
                activations,
            },
        ))
    }

    /// Forward pass for a single sample, without cache.
    pub fn forward_single(&self, input: &[f64]) -> Result<Vec<f64>, NetError> {
        let batch = Array2::from_shape_vec((1, input.len()), input.to_vec())
            .expect("1-row shape always valid");
        let (out, _) = self.forward(&batch)?;
        Ok(out.row(0).to_vec())
    }

    /// Reverse-mode gradients of the forward map.
    ///
    /// `upstream` is dLoss/dOutput (rows = samples). Returns parameter
    /// gradients summed over the batch plus the gradient with respect to the
    /// input batch, which lets a critic drive an actor update.
    pub fn backward(
        &self,
        cache: &ForwardCache,
        upstream: &Array2<f64>,
    ) -> Result<(ParamGrads, Array2<f64>), NetError> {
        let output = cache
            .activations
            .last()
            .ok_or_else(|| NetError::Shape("empty forward cache".into()))?;
        if upstream.raw_dim() != output.raw_dim() {
            return Err(NetError::Shape(format!(
                "upstream gradient shape {:?} does not match output shape {:?}",
                upstream.shape(),
                output.shape()
            )));
        }

        let mut grads = Vec::with_capacity(self.layers.len());
        let mut delta = upstream.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let z = &cache.pre_activations[i];
            delta.zip_mut_with(z, |d, &zv| *d *= layer.activation.derivative(zv));
            let layer_input = if i == 0 {
                &cache.input
            } else {
                &cache.activations[i - 1]
            };
            grads.push(LayerGrads {
                weights: delta.t().dot(layer_input),
                bias: delta.sum_axis(Axis(0)),
            });
            delta = delta.dot(&layer.weights);
        }
        grads.reverse();
        Ok((ParamGrads { layers: grads }, delta))
    }

    fn check_same_shape(&self, other: &NetworkParams) -> Result<(), NetError> {
        if self.layers.len() != other.layers.len() {
            return Err(NetError::Shape(format!(
                "layer count {} vs {}",
                self.layers.len(),
                other.layers.len()
            )));
        }
        for (i, (a, b)) in self.layers.iter().zip(&other.layers).enumerate() {
            if a.weights.raw_dim() != b.weights.raw_dim() || a.bias.raw_dim() != b.bias.raw_dim() {
                return Err(NetError::Shape(format!("layer {i} shapes differ")));
            }
        }
        Ok(())
    }
}

/// Polyak update: `target <- (1 - tau) * target + tau * online`, element-wise.
pub fn soft_update(
    target: &mut NetworkParams,
    online: &NetworkParams,
    tau: f64,
) -> Result<(), NetError> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(NetError::Config(format!("tau {tau} outside [0, 1]")));
    }
    target.check_same_shape(online)?;
    for (t, o) in target.layers.iter_mut().zip(&online.layers) {
        t.weights
            .zip_mut_with(&o.weights, |tv, &ov| *tv = (1.0 - tau) * *tv + tau * ov);
        t.bias
            .zip_mut_with(&o.bias, |tv, &ov| *tv = (1.0 - tau) * *tv + tau * ov);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn init_param_count_matches_layer_shapes() {
        // 11*400+400 + 400*300+300 + 300*2+2
        let net = NetworkParams::init(
            &[11, 400, 300, 2],
            &[Activation::Relu, Activation::Relu, Activation::Tanh],
            &mut rng(0),
        )
        .unwrap();
        assert_eq!(net.param_count(), 11 * 400 + 400 + 400 * 300 + 300 + 300 * 2 + 2);
        assert_eq!(net.param_count(), 125_702);
    }

    #[test]
    fn init_is_deterministic_for_fixed_seed() {
        let dims = [4, 8, 2];
        let acts = [Activation::Relu, Activation::Tanh];
        let a = NetworkParams::init(&dims, &acts, &mut rng(7)).unwrap();
        let b = NetworkParams::init(&dims, &acts, &mut rng(7)).unwrap();
        for (la, lb) in a.layers.iter().zip(&b.layers) {
            assert_eq!(la.weights, lb.weights);
            assert_eq!(la.bias, lb.bias);
        }
    }

    #[test]
    fn init_hidden_weights_respect_fan_in_bound() {
        let net = NetworkParams::init(
            &[400, 300, 1],
            &[Activation::Relu, Activation::Identity],
            &mut rng(3),
        )
        .unwrap();
        let bound = 1.0 / 400f64.sqrt();
        assert!((bound - 0.05).abs() < 1e-15);
        assert!(net.layers[0].weights.iter().all(|w| w.abs() <= bound));
        assert!(net.layers[1].weights.iter().all(|w| w.abs() <= OUTPUT_INIT_BOUND));
        assert!(net.layers[1].bias.iter().all(|b| b.abs() <= OUTPUT_INIT_BOUND));
    }

    #[test]
    fn init_rejects_bad_configs() {
        assert!(NetworkParams::init(&[4], &[], &mut rng(0)).is_err());
        assert!(NetworkParams::init(&[4, 0], &[Activation::Relu], &mut rng(0)).is_err());
        assert!(NetworkParams::init(&[4, 2], &[], &mut rng(0)).is_err());
    }

    #[test]
    fn forward_zero_net_outputs_zero() {
        let net = NetworkParams {
            layers: vec![Layer {
                weights: Array2::zeros((3, 2)),
                bias: Array1::zeros(3),
                activation: Activation::Identity,
            }],
        };
        let (out, _) = net.forward(&array![[1.0, -2.0], [0.5, 4.0]]).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn forward_identity_layer_passes_input_through() {
        let net = NetworkParams {
            layers: vec![Layer {
                weights: Array2::eye(3),
                bias: Array1::zeros(3),
                activation: Activation::Identity,
            }],
        };
        let input = array![[1.0, 2.0, 3.0], [-1.0, 0.0, 0.5]];
        let (out, _) = net.forward(&input).unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn forward_two_layer_relu_matches_hand_computation() {
        // layer 1: W = [[1, -1], [2, 0]], b = [0.5, -1]; ReLU
        // layer 2: W = [[1, 1], [0, -2]], b = [0, 1]; identity
        let net = NetworkParams {
            layers: vec![
                Layer {
                    weights: array![[1.0, -1.0], [2.0, 0.0]],
                    bias: array![0.5, -1.0],
                    activation: Activation::Relu,
                },
                Layer {
                    weights: array![[1.0, 1.0], [0.0, -2.0]],
                    bias: array![0.0, 1.0],
                    activation: Activation::Identity,
                },
            ],
        };
        // x = [1, 2]: z1 = [1-2+0.5, 2-1] = [-0.5, 1]; a1 = [0, 1]
        // z2 = [0+1, -2+1] = [1, -1]
        let (out, _) = net.forward(&array![[1.0, 2.0]]).unwrap();
        assert_eq!(out, array![[1.0, -1.0]]);
    }

    #[test]
    fn forward_rejects_width_mismatch() {
        let net = NetworkParams::init(&[3, 2], &[Activation::Identity], &mut rng(0)).unwrap();
        assert!(matches!(
            net.forward(&array![[1.0, 2.0]]),
            Err(NetError::Shape(_))
        ));
    }

    #[test]
    fn backward_zero_upstream_gives_zero_grads() {
        let net = NetworkParams::init(
            &[3, 5, 2],
            &[Activation::Relu, Activation::Tanh],
            &mut rng(11),
        )
        .unwrap();
        let batch = array![[0.3, -0.2, 0.9], [1.0, 0.1, -0.4]];
        let (out, cache) = net.forward(&batch).unwrap();
        let (grads, input_grad) = net.backward(&cache, &Array2::zeros(out.raw_dim())).unwrap();
        assert!(grads
            .layers
            .iter()
            .all(|l| l.weights.iter().all(|&g| g == 0.0) && l.bias.iter().all(|&g| g == 0.0)));
        assert!(input_grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn backward_sums_over_identical_rows() {
        let net = NetworkParams::init(
            &[3, 4, 2],
            &[Activation::Tanh, Activation::Identity],
            &mut rng(5),
        )
        .unwrap();
        let row = [0.4, -0.7, 0.2];
        let single = Array2::from_shape_vec((1, 3), row.to_vec()).unwrap();
        let batch = Array2::from_shape_fn((6, 3), |(_, j)| row[j]);

        let (out1, c1) = net.forward(&single).unwrap();
        let (g1, _) = net.backward(&c1, &Array2::ones(out1.raw_dim())).unwrap();
        let (out6, c6) = net.forward(&batch).unwrap();
        let (g6, _) = net.backward(&c6, &Array2::ones(out6.raw_dim())).unwrap();

        for (l1, l6) in g1.layers.iter().zip(&g6.layers) {
            for (a, b) in l1.weights.iter().zip(l6.weights.iter()) {
                assert!((6.0 * a - b).abs() < 1e-12, "6*{a} != {b}");
            }
            for (a, b) in l1.bias.iter().zip(l6.bias.iter()) {
                assert!((6.0 * a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn backward_rejects_upstream_shape_mismatch() {
        let net = NetworkParams::init(&[3, 2], &[Activation::Identity], &mut rng(0)).unwrap();
        let batch = array![[0.1, 0.2, 0.3]];
        let (_, cache) = net.forward(&batch).unwrap();
        assert!(matches!(
            net.backward(&cache, &Array2::zeros((1, 3))),
            Err(NetError::Shape(_))
        ));
    }

    #[test]
    fn soft_update_endpoints() {
        let online = NetworkParams::init(&[2, 3], &[Activation::Relu], &mut rng(1)).unwrap();
        let base = NetworkParams::init(&[2, 3], &[Activation::Relu], &mut rng(2)).unwrap();

        let mut t1 = base.clone();
        soft_update(&mut t1, &online, 1.0).unwrap();
        assert_eq!(t1.layers[0].weights, online.layers[0].weights);

        let mut t0 = base.clone();
        soft_update(&mut t0, &online, 0.0).unwrap();
        assert_eq!(t0.layers[0].weights, base.layers[0].weights);
    }

    #[test]
    fn soft_update_scalar_example() {
        let mk = |v: f64| NetworkParams {
            layers: vec![Layer {
                weights: array![[v]],
                bias: array![0.0],
                activation: Activation::Identity,
            }],
        };
        let mut target = mk(0.0);
        soft_update(&mut target, &mk(1.0), 0.001).unwrap();
        assert!((target.layers[0].weights[[0, 0]] - 0.001).abs() < 1e-15);
    }

    #[test]
    fn soft_update_rejects_shape_mismatch() {
        let mut target = NetworkParams::init(&[2, 3], &[Activation::Relu], &mut rng(1)).unwrap();
        let online = NetworkParams::init(&[2, 4], &[Activation::Relu], &mut rng(1)).unwrap();
        assert!(matches!(
            soft_update(&mut target, &online, 0.5),
            Err(NetError::Shape(_))
        ));
    }
}
