//! Multi-look neural beamformer front end with spatial attention pooling.
//!
//! The pipeline factors into three jointly trained stages: a bank of fixed
//! complex spatial filters followed by complex linear projection features
//! (`frontend`), an LSTM attention subnet that weighs the per-direction
//! features (`attention`), and a recurrent classifier over stacked frames
//! (`backend`). Around those sit a microphone-array scene simulator (`sim`),
//! signal primitives (`dsp`), a deterministic trainer with gradient
//! verification (`training`), and diagnostics (`analysis`).

pub mod analysis;
pub mod attention;
pub mod backend;
pub mod config;
pub mod dsp;
pub mod error;
pub mod experiment;
pub mod frontend;
pub mod model;
pub mod nn;
pub mod rng;
pub mod sim;
pub mod training;

pub use error::{Error, Result};

/// Additive floor inside every `log | . |` so silent inputs stay finite
/// and differentiable. Shared by the STFT log-mel path and the CLP features.
pub const LOG_FLOOR: f64 = 1e-7;
