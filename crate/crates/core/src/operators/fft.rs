use std::f64::consts::PI;

use num_complex::Complex;

use super::LinearOperator;
use crate::error::{Error, Result};
use crate::scalar::{cis, is_power_of_two, Real};

/// Iterative radix-2 decimation-in-time FFT plan (unnormalized).
#[derive(Debug, Clone)]
pub struct Radix2Fft<T> {
    n: usize,
    twiddles: Vec<Complex<T>>,
}

impl<T: Real> Radix2Fft<T> {
    pub fn new(n: usize) -> Result<Self> {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                len: n,
                context: "radix-2 FFT",
            });
        }
        // Stage tables back to back: the stage of butterfly span `2h` holds
        // e^{-2πik/2h} for k < h at offset h − 1.
        let mut twiddles = Vec::with_capacity(n.saturating_sub(1));
        let mut half = 1;
        while half < n {
            twiddles.extend((0..half).map(|k| cis(-PI * k as f64 / half as f64)));
            half <<= 1;
        }
        Ok(Self { n, twiddles })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place transform: `X_k = Σ x_j e^{∓2πijk/n}` (minus sign unless `inverse`).
    pub fn process(&self, buf: &mut [Complex<T>], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        if n > 1 {
            let shift = usize::BITS - n.trailing_zeros();
            for i in 0..n {
                let j = i.reverse_bits() >> shift;
                if i < j {
                    buf.swap(i, j);
                }
            }
        }
        let mut half = 1;
        while half < n {
            let table = &self.twiddles[half - 1..2 * half - 1];
            for block in buf.chunks_exact_mut(2 * half) {
                let (lo, hi) = block.split_at_mut(half);
                for ((a, b), &w) in lo.iter_mut().zip(hi.iter_mut()).zip(table) {
                    let w = if inverse { w.conj() } else { w };
                    let t = *b * w;
                    *b = *a - t;
                    *a = *a + t;
                }
            }
            half <<= 1;
        }
    }

    /// Unitary transform: the result of [`Self::process`] scaled by `n^{-1/2}`.
    pub fn unitary(&self, buf: &mut [Complex<T>], inverse: bool) {
        self.process(buf, inverse);
        let s = T::one() / T::from_usize_lossy(self.n).sqrt();
        buf.iter_mut().for_each(|z| *z = *z * s);
    }
}

/// `F v` (or `F* v`) with `F_{jk} = n^{-1/2} e^{-2πijk/n}`.
pub fn fft_unitary<T: Real>(v: &[Complex<T>], inverse: bool) -> Result<Vec<Complex<T>>> {
    let plan = Radix2Fft::new(v.len())?;
    let mut out = v.to_vec();
    plan.unitary(&mut out, inverse);
    Ok(out)
}

#[derive(Debug, Clone)]
enum Kernel<T> {
    Radix2(Radix2Fft<T>),
    /// `O(n²)` summation for lengths the radix-2 kernel cannot handle.
    Direct(Vec<Complex<T>>),
}

/// The unitary DFT `F` as an operator (or `F*` when built with [`Fourier::inverse`]).
#[derive(Debug, Clone)]
pub struct Fourier<T> {
    n: usize,
    inverse: bool,
    kernel: Kernel<T>,
}

impl<T: Real> Fourier<T> {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self {
            n,
            inverse: false,
            kernel: Kernel::Radix2(Radix2Fft::new(n)?),
        })
    }

    pub fn inverse(n: usize) -> Result<Self> {
        Ok(Self {
            inverse: true,
            ..Self::new(n)?
        })
    }

    /// Like [`Fourier::new`] but falls back to direct summation when `n` is
    /// not a power of two. Meant for small diagnostic sizes only.
    pub fn with_direct_fallback(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "DFT length must be positive".into(),
            ));
        }
        if is_power_of_two(n) {
            return Self::new(n);
        }
        let roots = (0..n)
            .map(|k| cis(-2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Self {
            n,
            inverse: false,
            kernel: Kernel::Direct(roots),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `F x` when `conj` is false, `F* x` otherwise.
    pub(crate) fn transform(&self, x: &[Complex<T>], conj: bool) -> Vec<Complex<T>> {
        match &self.kernel {
            Kernel::Radix2(plan) => {
                let mut out = x.to_vec();
                plan.unitary(&mut out, conj);
                out
            }
            Kernel::Direct(roots) => {
                let n = self.n;
                let s = T::one() / T::from_usize_lossy(n).sqrt();
                (0..n)
                    .map(|j| {
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (k, &xk) in x.iter().enumerate() {
                            let w = roots[(j * k) % n];
                            acc = acc + xk * if conj { w.conj() } else { w };
                        }
                        acc * s
                    })
                    .collect()
            }
        }
    }
}

impl<T: Real> LinearOperator<T> for Fourier<T> {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.transform(x, self.inverse)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.transform(y, !self.inverse)
    }
    fn describe(&self) -> String {
        if self.inverse { "F*" } else { "F" }.to_string()
    }
}
