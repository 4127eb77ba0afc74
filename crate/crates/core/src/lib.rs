//! Hybrid coherent-state / polarization qubits on a Raussendorf cluster:
//! photon-loss noise model, ballistic lattice generation with heralded
//! fusion failures, loss-aware matching decoder, threshold estimation and
//! resource accounting.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below are what the simulator and CLI use.

pub mod analytic;
pub mod decoder;
pub mod error;
pub mod experiments;
pub mod generation;
pub mod lattice;
pub mod oracle;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type HybridParamsF64 = analytic::HybridParams<f64>;
pub type NoiseModelF64 = analytic::NoiseModel<f64>;
pub type ExtrapolationParamsF64 = analytic::ExtrapolationParams<f64>;
pub type HybridStateF64 = oracle::HybridState<f64>;
pub type HybridDensityF64 = oracle::HybridDensity<f64>;
