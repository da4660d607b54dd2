//! Bi-static 60 GHz Wi-Fi sensing simulator and signal-processing library.
//!
//! The crate synthesizes channel impulse responses for a room with a walking
//! human target, processes them into range-Doppler and micro-Doppler
//! products, applies threshold-gated CSI feedback reduction, and estimates
//! target angles from directional codebook sweeps.
//!
//! Pipeline stages map onto the modules:
//!
//! * [`kinematics`] - 17-joint walking-human trajectories (the moving
//!   scatterers);
//! * [`channel`] - deterministic ray tracing (LOS, per-joint single bounce,
//!   optional wall images) and banded CIR synthesis, plus autoregressive
//!   blending of target-unrelated components;
//! * [`phy`] - abstract CSI acquisition: noisy per-packet channel estimates
//!   and directional TRN-R/TRN-T codebook sweeps over a phased array;
//! * [`sensing`] - radar data matrix/cube assembly, clutter removal,
//!   range-Doppler maps, and STFT micro-Doppler spectrograms;
//! * [`threshold`] - TRRS-based CSI variation, threshold-gated feedback,
//!   and reconstruction of a regular stream from irregular reports;
//! * [`angles`] - codebook-direction angle estimation and accuracy scoring;
//! * [`config`] / [`pipeline`] - scenario configuration, built-in presets,
//!   and deterministic artifact-producing runs.
//!
//! Start with the runnable examples (`cargo run --example micro_doppler`)
//! or the `bisense` binary (`bisense simulate --preset paper-siso`).

pub mod angles;
pub mod channel;
pub mod config;
pub mod error;
pub mod geom;
pub mod kinematics;
pub mod output;
pub mod phy;
pub mod pipeline;
pub mod sensing;
pub mod threshold;

pub use error::{Error, Result};
pub use geom::{Point3, SPEED_OF_LIGHT};
