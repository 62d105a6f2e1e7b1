//! Minimal dense-network substrate: MLPs, reverse-mode gradients, Adam.

pub mod adam;
pub mod categorical;
pub mod mlp;

pub use adam::{optimizer_step, OptimizerState, DEFAULT_LEARNING_RATE};
pub use mlp::{ForwardTrace, Gradients, Mlp};
