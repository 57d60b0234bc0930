use num_complex::Complex;
use rand::seq::index::sample;

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::rng::{seeded, stream};
use crate::scalar::Real;

/// Strictly increasing index set `Ω ⊂ [0, n)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsampleSet {
    indices: Vec<usize>,
    n: usize,
}

impl SubsampleSet {
    /// Indices must be strictly increasing and below `n`.
    pub fn new(indices: Vec<usize>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIndexSet(
                "ambient dimension must be positive".into(),
            ));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::InvalidIndexSet(format!(
                "index {bad} out of range for n = {n}"
            )));
        }
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidIndexSet(format!(
                "indices must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { indices, n })
    }

    /// Sorts the indices first; duplicates are still an error.
    pub fn from_unsorted(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        Self::new(indices, n)
    }

    /// `{0, …, m−1}`.
    pub fn contiguous(m: usize, n: usize) -> Result<Self> {
        Self::check_m(m, n)?;
        Self::new((0..m).collect(), n)
    }

    /// `{⌊j n / m⌋ : j < m}`.
    pub fn uniform_stride(m: usize, n: usize) -> Result<Self> {
        Self::check_m(m, n)?;
        Self::new((0..m).map(|j| j * n / m).collect(), n)
    }

    /// Uniformly random `m`-subset (without replacement), sorted.
    pub fn random(m: usize, n: usize, seed: u64) -> Result<Self> {
        Self::check_m(m, n)?;
        let mut rng = seeded(seed, stream::SUBSET);
        Self::from_unsorted(sample(&mut rng, n, m).into_vec(), n)
    }

    fn check_m(m: usize, n: usize) -> Result<()> {
        if m == 0 || m > n {
            return Err(Error::InvalidIndexSet(format!(
                "need 0 < m <= n, got m = {m}, n = {n}"
            )));
        }
        Ok(())
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// `R_Ω v`.
    pub fn restrict<T: Copy>(&self, v: &[T]) -> Vec<T> {
        self.indices.iter().map(|&i| v[i]).collect()
    }

    /// `R_Ω* y`: zero-fill into the ambient dimension.
    pub fn extend<T: Real>(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n];
        for (&i, &v) in self.indices.iter().zip(y) {
            out[i] = v;
        }
        out
    }
}

/// `R_Ω` as an operator (`m × n`).
#[derive(Debug, Clone)]
pub struct Subsample {
    set: SubsampleSet,
}

impl Subsample {
    pub fn new(set: SubsampleSet) -> Self {
        Self { set }
    }

    pub fn set(&self) -> &SubsampleSet {
        &self.set
    }
}

impl<T: Real> LinearOperator<T> for Subsample {
    fn rows(&self) -> usize {
        self.set.len()
    }
    fn cols(&self) -> usize {
        self.set.ambient()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.set.restrict(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.set.extend(y)
    }
    fn describe(&self) -> String {
        "R_Ω".into()
    }
}
