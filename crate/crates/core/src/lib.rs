//! Wavelet-based Besov surrogates of Hölder integral probability metrics
//! between measures supported on curves, with the tooling to measure their
//! scaling laws.
//!
//! The numeric core is generic over [`Real`] (`f32`/`f64`); the `*64`
//! aliases at the crate root fix the scalar to `f64`, which is what the
//! experiments and the command-line front end use.

pub mod besov;
pub mod error;
pub mod estimator;
pub mod example5;
pub mod interpolation;
pub mod measures;
pub mod scalar;
pub mod sum;
pub mod wavelets;

pub use error::{Error, Result};
pub use scalar::Real;

pub type WaveletFamily64 = wavelets::WaveletFamily<f64>;
pub type DiscreteMeasure64 = measures::DiscreteMeasure<f64>;
pub type ParametricCurve64 = measures::ParametricCurve<f64>;
pub type CoefficientField64 = besov::CoefficientField<f64>;
