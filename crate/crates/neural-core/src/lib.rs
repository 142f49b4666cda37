//! Minimal dense-network stack for small continuous-control learners.
//!
//! Everything here operates on explicit state: parameters, optimizer moments
//! and forward caches are plain values handed around by the caller. There is
//! no hidden global RNG and no interior mutability, so independent training
//! runs can live side by side.

mod adam;
mod checkpoint;
mod gradcheck;
mod params;

pub use adam::{adam_step, OptimizerState, ADAM_BETA1, ADAM_BETA2, ADAM_EPS};
pub use checkpoint::{read_params, write_params};
pub use gradcheck::gradient_check;
pub use params::{
    soft_update, Activation, ForwardCache, Layer, LayerGrads, NetworkParams, ParamGrads,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("invalid network configuration: {0}")]
    Config(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("malformed parameter stream: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
