//! Structured compressed sensing built from modulated unit-norm tight frames.
//!
//! Every sensing model here factors as `A = U · D · B`: a unit-norm tight
//! frame `U`, a (random or deterministic) diagonal modulation `D`, and a
//! column-orthonormal matrix `B`. All factors are fast linear operators, so
//! forward and adjoint applies cost `O(n log n)`.
//!
//! The numerical core is generic over the real scalar through [`Real`];
//! `f64` aliases are exported at the crate root for the common case.
//!
//! ```
//! use modframe::{sequences, analysis, operators::OrthoKind};
//!
//! let pair = sequences::rudin_shapiro_pair(8);
//! let lambda = pair.a_modulation::<f64>();
//! let report = analysis::modulated_coherence(&lambda, OrthoKind::Fourier).unwrap();
//! assert!(report.passes);
//! ```

pub mod analysis;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod models;
pub mod operators;
pub mod recovery;
pub mod rng;
pub mod scalar;
pub mod sequences;

pub use error::{Error, Result};
pub use scalar::Real;

use num_complex::Complex;

/// Complex sample with `f64` parts.
pub type C64 = Complex<f64>;
/// Complex sample with `f32` parts.
pub type C32 = Complex<f32>;

/// Shared, immutable `f64` operator.
pub type Operator64 = operators::Op<f64>;
/// Dense `f64` matrix.
pub type DenseMatrix64 = operators::DenseMatrix<f64>;
/// `f64` sensing model.
pub type SensingModel64 = models::SensingModel<f64>;
/// `f64` modulation sequence.
pub type ModulationSeq64 = sequences::ModulationSeq<f64>;
/// `f64` recovery output.
pub type RecoveryResult64 = recovery::RecoveryResult<f64>;
/// `f64` unit-norm tight frame.
pub type UtfOperator64 = frames::UtfOperator<f64>;
