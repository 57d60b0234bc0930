use num_complex::Complex;

use super::fft::Radix2Fft;
use super::{DenseMatrix, LinearOperator};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Circulant `H_r` whose first column is `r`, applied as
/// `√n · F*((F r) ⊙ (F v))`.
#[derive(Debug, Clone)]
pub struct Circulant<T> {
    fft: Radix2Fft<T>,
    /// Unnormalized DFT of the generator, i.e. `√n · F r`.
    spectrum: Vec<Complex<T>>,
}

impl<T: Real> Circulant<T> {
    pub fn new(generator: &[Complex<T>]) -> Result<Self> {
        let fft = Radix2Fft::new(generator.len())?;
        let mut spectrum = generator.to_vec();
        fft.process(&mut spectrum, false);
        Ok(Self { fft, spectrum })
    }

    /// Builds `H_r` from its eigenvalues: `H = F* diag(λ) F`.
    pub fn from_spectrum(spectrum: Vec<Complex<T>>) -> Result<Self> {
        let fft = Radix2Fft::new(spectrum.len())?;
        Ok(Self { fft, spectrum })
    }

    pub fn spectrum(&self) -> &[Complex<T>] {
        &self.spectrum
    }

    fn filter(&self, v: &[Complex<T>], conj: bool) -> Vec<Complex<T>> {
        let mut buf = v.to_vec();
        self.fft.process(&mut buf, false);
        for (z, s) in buf.iter_mut().zip(&self.spectrum) {
            *z = *z * if conj { s.conj() } else { *s };
        }
        self.fft.process(&mut buf, true);
        let inv_n = T::one() / T::from_usize_lossy(self.fft.len());
        buf.iter_mut().for_each(|z| *z = *z * inv_n);
        buf
    }
}

impl<T: Real> LinearOperator<T> for Circulant<T> {
    fn rows(&self) -> usize {
        self.fft.len()
    }
    fn cols(&self) -> usize {
        self.fft.len()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.filter(x, false)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.filter(y, true)
    }
    fn describe(&self) -> String {
        "H_r".into()
    }
}

/// `H_r · v` via the FFT.
pub fn circulant_apply<T: Real>(r: &[Complex<T>], v: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if r.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: r.len(),
            got: v.len(),
            context: "circulant_apply: generator and input lengths".into(),
        });
    }
    Ok(Circulant::new(r)?.apply(v))
}

/// Dense `H_r` with `(H_r)_{jk} = r_{(j−k) mod n}`.
pub fn dense_circulant<T: Real>(r: &[Complex<T>]) -> DenseMatrix<T> {
    let n = r.len();
    DenseMatrix::from_fn(n, n, |j, k| r[(j + n - k) % n])
}
