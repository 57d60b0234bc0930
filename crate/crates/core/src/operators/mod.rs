//! Fast complex linear operators and their algebra.
//!
//! An operator knows its shape and how to apply itself and its adjoint.
//! Sensing models are lazy products of these; nothing is densified unless a
//! diagnostic asks for it through [`materialize`].

mod algebra;
mod circulant;
mod dense;
mod fft;
mod orthobasis;
mod subsample;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use algebra::{
    compose, diagonal, identity, scaled, Adjoint, BlockDiagonal, Compose, Diagonal, HStack,
    Identity, Integrator, Scaled,
};
pub use circulant::{circulant_apply, dense_circulant, Circulant};
pub use dense::{
    materialize, materialize_with_limit, DenseMatrix, DenseOperator, DEFAULT_MAX_ENTRIES,
};
pub use fft::{fft_unitary, Fourier, Radix2Fft};
pub use orthobasis::{
    ortho_operator, orthobasis_apply, BlockDct, Dct2, Haar, Hadamard, OrthoKind, PermutedFourier,
    DEFAULT_DCT_BLOCK,
};
pub use subsample::{Subsample, SubsampleSet};

/// A linear map `C^cols -> C^rows` with a fast adjoint.
///
/// `apply` and `apply_adjoint` assume the input length is already correct;
/// the checked entry points are [`LinearOperator::forward`] and
/// [`LinearOperator::adjoint`].
pub trait LinearOperator<T: Real>: Send + Sync + fmt::Debug {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;

    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>>;
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>>;

    /// Short human-readable description, e.g. `R_Ω·F*`.
    fn describe(&self) -> String;

    fn dims(&self) -> (usize, usize) {
        (self.rows(), self.cols())
    }

    fn forward(&self, x: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch {
                expected: self.cols(),
                got: x.len(),
                context: format!("forward of {}", self.describe()),
            });
        }
        Ok(self.apply(x))
    }

    fn adjoint(&self, y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if y.len() != self.rows() {
            return Err(Error::DimensionMismatch {
                expected: self.rows(),
                got: y.len(),
                context: format!("adjoint of {}", self.describe()),
            });
        }
        Ok(self.apply_adjoint(y))
    }
}

/// Shared handle to an immutable operator.
pub type Op<T> = Arc<dyn LinearOperator<T>>;

/// Wraps a concrete operator into a shared handle.
pub fn op<T: Real, L: LinearOperator<T> + 'static>(l: L) -> Op<T> {
    Arc::new(l)
}

/// `A* ` as an operator.
pub fn adjoint_of<T: Real>(a: Op<T>) -> Op<T> {
    Arc::new(Adjoint::new(a))
}

/// Column `j` of the operator, i.e. `A e_j`.
pub fn column<T: Real>(a: &dyn LinearOperator<T>, j: usize) -> Vec<Complex<T>> {
    a.apply(&crate::scalar::unit_vector(a.cols(), j))
}
