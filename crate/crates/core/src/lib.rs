//! Cooling-load forecasting and chiller plant planning.
//!
//! The crate is organised as a pipeline:
//!
//! - [`ingest`]: telemetry/weather parsing, cooling-load computation, half-hour
//!   resampling and a synthetic data generator.
//! - [`kalman`]: scalar Kalman filter used to denoise the load series.
//! - [`features`]: z-score scaling, K-means weather clustering and the nine
//!   supervised feature sets.
//! - [`nn`]: MLP and LSTM regressors with analytic gradients and the
//!   best-of-N training protocol.
//! - [`dispatch`]: chiller part-load curves, the minimum-power loading problem,
//!   a genetic-algorithm solver and an exhaustive grid oracle.
//! - [`tes`]: chiller + thermal-storage design proposals and their cost analysis.

pub mod dispatch;
pub mod error;
pub mod features;
pub mod ingest;
pub mod kalman;
pub mod nn;
pub mod rng;
pub mod tes;

pub use error::{Error, ErrorKind, Result};
