//! Binary parameter checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! u32                 layer count L
//! L x (u32, u32, u32) rows (fan-out), cols (fan-in), activation tag
//! then per layer:     rows*cols f64 weights (row-major), rows f64 bias
//! ```
//!
//! Activation tags: 0 = ReLU, 1 = tanh, 2 = identity.

use crate::{Activation, Layer, NetError, NetworkParams};
use ndarray::{Array1, Array2};
use std::io::{Read, Write};

fn activation_tag(a: Activation) -> u32 {
    match a {
        Activation::Relu => 0,
        Activation::Tanh => 1,
        Activation::Identity => 2,
    }
}

fn tag_activation(tag: u32) -> Result<Activation, NetError> {
    match tag {
        0 => Ok(Activation::Relu),
        1 => Ok(Activation::Tanh),
        2 => Ok(Activation::Identity),
        other => Err(NetError::Format(format!("unknown activation tag {other}"))),
    }
}

pub fn write_params<W: Write>(params: &NetworkParams, mut out: W) -> Result<(), NetError> {
    out.write_all(&(params.layers.len() as u32).to_le_bytes())?;
    for layer in &params.layers {
        out.write_all(&(layer.fan_out() as u32).to_le_bytes())?;
        out.write_all(&(layer.fan_in() as u32).to_le_bytes())?;
        out.write_all(&activation_tag(layer.activation).to_le_bytes())?;
    }
    for layer in &params.layers {
        for &w in layer.weights.iter() {
            out.write_all(&w.to_le_bytes())?;
        }
        for &b in layer.bias.iter() {
            out.write_all(&b.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_params<R: Read>(mut input: R) -> Result<NetworkParams, NetError> {
    let layer_count = read_u32(&mut input)? as usize;
    if layer_count == 0 {
        return Err(NetError::Format("layer count is zero".into()));
    }
    let mut shapes = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let rows = read_u32(&mut input)? as usize;
        let cols = read_u32(&mut input)? as usize;
        let act = tag_activation(read_u32(&mut input)?)?;
        if rows == 0 || cols == 0 {
            return Err(NetError::Format("zero layer dimension".into()));
        }
        shapes.push((rows, cols, act));
    }
    let mut layers = Vec::with_capacity(layer_count);
    let mut prev_out: Option<usize> = None;
    for (rows, cols, act) in shapes {
        if let Some(p) = prev_out {
            if p != cols {
                return Err(NetError::Format(format!(
                    "layer dims do not chain: {p} outputs feeding fan-in {cols}"
                )));
            }
        }
        prev_out = Some(rows);
        let mut weights = Vec::with_capacity(rows * cols);
        for _ in 0..rows * cols {
            weights.push(read_f64(&mut input)?);
        }
        let mut bias = Vec::with_capacity(rows);
        for _ in 0..rows {
            bias.push(read_f64(&mut input)?);
        }
        layers.push(Layer {
            weights: Array2::from_shape_vec((rows, cols), weights)
                .expect("shape matches element count"),
            bias: Array1::from_vec(bias),
            activation: act,
        });
    }
    Ok(NetworkParams { layers })
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32, NetError> {
    let mut buf = [0u8; 4];
    input.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64<R: Read>(input: &mut R) -> Result<f64, NetError> {
    let mut buf = [0u8; 8];
    input.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip_preserves_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let net = NetworkParams::init(
            &[11, 16, 8, 2],
            &[Activation::Relu, Activation::Relu, Activation::Tanh],
            &mut rng,
        )
        .unwrap();
        let mut buf = Vec::new();
        write_params(&net, &mut buf).unwrap();
        let restored = read_params(buf.as_slice()).unwrap();
        assert_eq!(net.layers.len(), restored.layers.len());
        for (a, b) in net.layers.iter().zip(&restored.layers) {
            assert_eq!(a.weights, b.weights);
            assert_eq!(a.bias, b.bias);
            assert_eq!(a.activation, b.activation);
        }
    }

    #[test]
    fn truncated_stream_is_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = NetworkParams::init(&[3, 2], &[Activation::Tanh], &mut rng).unwrap();
        let mut buf = Vec::new();
        write_params(&net, &mut buf).unwrap();
        buf.truncate(buf.len() - 4);
        assert!(read_params(buf.as_slice()).is_err());
    }

    #[test]
    fn bad_activation_tag_is_rejected() {
        let mut buf = Vec::new();
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&9u32.to_le_bytes());
        assert!(matches!(
            read_params(buf.as_slice()),
            Err(NetError::Format(_))
        ));
    }
}
