//! Numerical laboratory for Hermite pseudo-multipliers `m(x, H)` with
//! `H = −Δ + |x|²`: the shell basis, the spectral calculus, symbol classes,
//! operator matrices and noncommutative derivatives, kernel estimates,
//! maximal functions with weights and the Weyl-transform picture.
//!
//! Everything numerical is generic over [`scalar::Real`]; the aliases below
//! fix `f64`, which is what the experiments use.

pub mod basis;
pub mod error;
pub mod fit;
pub mod kernellab;
pub mod maxweights;
pub mod opcalc;
pub mod scalar;
pub mod spectral;
pub mod symbol;
pub mod weylcheck;

pub use error::{Error, Result};

pub type Cx64 = scalar::Cx<f64>;
pub type GridFunction64 = basis::GridFunction<f64>;
pub type UniformGrid64 = basis::UniformGrid<f64>;
pub type QuadratureGrid64 = basis::QuadratureGrid<f64>;
pub type SpectralField64 = spectral::SpectralField<f64>;
pub type DiagonalMultiplier64 = spectral::DiagonalMultiplier<f64>;
pub type Symbol64 = symbol::Symbol<f64>;
pub type OperatorMatrix64 = opcalc::OperatorMatrix<f64>;
pub type CubeFamily64 = maxweights::CubeFamily<f64>;
pub type Weight64 = maxweights::Weight<f64>;
pub type PhasePoint64 = weylcheck::PhasePoint<f64>;
