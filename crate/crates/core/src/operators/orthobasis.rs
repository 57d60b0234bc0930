//! Orthonormal bases used as sparsifying transforms.
//!
//! Every kind is unitary. The operator built for a kind applies the
//! *analysis* transform (`F`, `H`, `C`, `Ĉ`, `W`); its adjoint is the
//! synthesis transform.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::fft::{Fourier, Radix2Fft};
use super::{Identity, LinearOperator, Op};
use crate::error::{Error, Result};
use crate::scalar::{cis, is_power_of_two, Real};

pub const DEFAULT_DCT_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OrthoKind {
    Identity,
    Fourier,
    /// DFT with columns in the order `0, +1, −1, +2, −2, …, n/2`.
    PermutedFourier,
    Hadamard,
    Dct2,
    BlockDct {
        block: usize,
    },
    Haar,
}

impl OrthoKind {
    pub fn block_dct() -> Self {
        OrthoKind::BlockDct {
            block: DEFAULT_DCT_BLOCK,
        }
    }

    /// Checks that a length-`n` transform of this kind exists.
    pub fn check_len(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "transform length must be positive".into(),
            ));
        }
        match *self {
            OrthoKind::Identity | OrthoKind::Dct2 => Ok(()),
            OrthoKind::Fourier
            | OrthoKind::PermutedFourier
            | OrthoKind::Hadamard
            | OrthoKind::Haar => {
                if is_power_of_two(n) {
                    Ok(())
                } else {
                    Err(Error::NotPowerOfTwo {
                        len: n,
                        context: "fourier/hadamard/haar transforms need n = 2^d",
                    })
                }
            }
            OrthoKind::BlockDct { block } => {
                if block == 0 || !n.is_multiple_of(block) {
                    Err(Error::InvalidParameter(format!(
                        "block_dct needs n divisible by the block size {block} (got n = {n})"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

impl fmt::Display for OrthoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrthoKind::Identity => f.write_str("identity"),
            OrthoKind::Fourier => f.write_str("fourier"),
            OrthoKind::PermutedFourier => f.write_str("permuted_fourier"),
            OrthoKind::Hadamard => f.write_str("hadamard"),
            OrthoKind::Dct2 => f.write_str("dct2"),
            OrthoKind::BlockDct { block } if *block == DEFAULT_DCT_BLOCK => {
                f.write_str("block_dct")
            }
            OrthoKind::BlockDct { block } => write!(f, "block_dct:{block}"),
            OrthoKind::Haar => f.write_str("haar"),
        }
    }
}

impl FromStr for OrthoKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('-', "_");
        if let Some(b) = s.strip_prefix("block_dct:") {
            let block = b
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad block size '{b}'")))?;
            return Ok(OrthoKind::BlockDct { block });
        }
        Ok(match s.as_str() {
            "identity" | "id" => OrthoKind::Identity,
            "fourier" | "dft" => OrthoKind::Fourier,
            "permuted_fourier" => OrthoKind::PermutedFourier,
            "hadamard" => OrthoKind::Hadamard,
            "dct2" | "dct" => OrthoKind::Dct2,
            "block_dct" => OrthoKind::block_dct(),
            "haar" => OrthoKind::Haar,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown basis kind '{other}'"
                )))
            }
        })
    }
}

impl TryFrom<String> for OrthoKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OrthoKind> for String {
    fn from(k: OrthoKind) -> String {
        k.to_string()
    }
}

/// Builds the analysis operator of `kind` at length `n`.
pub fn ortho_operator<T: Real>(kind: OrthoKind, n: usize) -> Result<Op<T>> {
    kind.check_len(n)?;
    Ok(match kind {
        OrthoKind::Identity => Arc::new(Identity::new(n)),
        OrthoKind::Fourier => Arc::new(Fourier::new(n)?),
        OrthoKind::PermutedFourier => Arc::new(PermutedFourier::new(n)?),
        OrthoKind::Hadamard => Arc::new(Hadamard::new(n)?),
        OrthoKind::Dct2 => Arc::new(Dct2::new(n)?),
        OrthoKind::BlockDct { block } => Arc::new(BlockDct::new(n, block)?),
        OrthoKind::Haar => Arc::new(Haar::new(n)?),
    })
}

/// Applies the orthonormal transform `kind` (or its adjoint) to `v`.
pub fn orthobasis_apply<T: Real>(
    kind: OrthoKind,
    v: &[Complex<T>],
    adjoint: bool,
) -> Result<Vec<Complex<T>>> {
    let op = ortho_operator::<T>(kind, v.len())?;
    if adjoint {
        op.adjoint(v)
    } else {
        op.forward(v)
    }
}

/// `F̃`: the unitary DFT with columns reordered to `k = 0, +1, −1, …, n/2`.
#[derive(Debug, Clone)]
pub struct PermutedFourier<T> {
    fourier: Fourier<T>,
    /// Frequency (mod n) carried by each column.
    freq_of_col: Vec<usize>,
}

impl<T: Real> PermutedFourier<T> {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self::from_fourier(Fourier::new(n)?))
    }

    /// Non-power-of-two lengths fall back to an `O(n²)` DFT.
    pub fn with_direct_fallback(n: usize) -> Result<Self> {
        Ok(Self::from_fourier(Fourier::with_direct_fallback(n)?))
    }

    fn from_fourier(fourier: Fourier<T>) -> Self {
        let n = fourier.len();
        let freq_of_col = (0..n).map(|c| permuted_frequency(c, n)).collect();
        Self {
            fourier,
            freq_of_col,
        }
    }

    pub fn frequency_of_column(&self, c: usize) -> usize {
        self.freq_of_col[c]
    }
}

/// Column `c` of `F̃` is DFT column `0, 1, n−1, 2, n−2, …`.
fn permuted_frequency(c: usize, n: usize) -> usize {
    if c == 0 {
        0
    } else if c % 2 == 1 {
        c.div_ceil(2) % n
    } else {
        (n - c / 2) % n
    }
}

impl<T: Real> LinearOperator<T> for PermutedFourier<T> {
    fn rows(&self) -> usize {
        self.fourier.len()
    }
    fn cols(&self) -> usize {
        self.fourier.len()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut scattered = vec![Complex::new(T::zero(), T::zero()); x.len()];
        for (c, &k) in self.freq_of_col.iter().enumerate() {
            scattered[k] = x[c];
        }
        self.fourier.transform(&scattered, false)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let full = self.fourier.transform(y, true);
        self.freq_of_col.iter().map(|&k| full[k]).collect()
    }
    fn describe(&self) -> String {
        "F~".into()
    }
}

/// Normalized Sylvester–Hadamard transform `H_n / √n` (natural order).
#[derive(Debug, Clone)]
pub struct Hadamard {
    n: usize,
}

impl Hadamard {
    pub fn new(n: usize) -> Result<Self> {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                len: n,
                context: "hadamard transform",
            });
        }
        Ok(Self { n })
    }

    fn transform<T: Real>(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut buf = x.to_vec();
        let mut h = 1;
        while h < self.n {
            for start in (0..self.n).step_by(2 * h) {
                for i in start..start + h {
                    let a = buf[i];
                    let b = buf[i + h];
                    buf[i] = a + b;
                    buf[i + h] = a - b;
                }
            }
            h *= 2;
        }
        let s = T::one() / T::from_usize_lossy(self.n).sqrt();
        buf.iter_mut().for_each(|z| *z = *z * s);
        buf
    }
}

impl<T: Real> LinearOperator<T> for Hadamard {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.transform(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.transform(y)
    }
    fn describe(&self) -> String {
        "H".into()
    }
}

#[derive(Debug, Clone)]
enum DctKernel<T> {
    /// Length-`2n` FFT of the mirrored input.
    Mirrored {
        fft: Radix2Fft<T>,
        /// `e^{-iπk/(2n)}`, `k < n`.
        shift: Vec<Complex<T>>,
    },
    /// Dense cosine table, row-major `C[k][j]`.
    Direct(Vec<T>),
}

/// Orthonormal DCT-II: `C_{kj} = s_k cos(π(2j+1)k / 2n)` with
/// `s_0 = √(1/n)` and `s_k = √(2/n)` otherwise.
#[derive(Debug, Clone)]
pub struct Dct2<T> {
    n: usize,
    scale: Vec<T>,
    kernel: DctKernel<T>,
}

impl<T: Real> Dct2<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "DCT length must be positive".into(),
            ));
        }
        let nf = n as f64;
        let scale = (0..n)
            .map(|k| {
                T::lit(if k == 0 {
                    (1.0 / nf).sqrt()
                } else {
                    (2.0 / nf).sqrt()
                })
            })
            .collect();
        let kernel = if is_power_of_two(n) {
            DctKernel::Mirrored {
                fft: Radix2Fft::new(2 * n)?,
                shift: (0..n).map(|k| cis(-PI * k as f64 / (2.0 * nf))).collect(),
            }
        } else {
            let mut table = Vec::with_capacity(n * n);
            for k in 0..n {
                for j in 0..n {
                    table.push(T::lit(
                        (PI * (2 * j + 1) as f64 * k as f64 / (2.0 * nf)).cos(),
                    ));
                }
            }
            DctKernel::Direct(table)
        };
        Ok(Self { n, scale, kernel })
    }

    fn forward_impl(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        match &self.kernel {
            DctKernel::Mirrored { fft, shift } => {
                let mut buf = Vec::with_capacity(2 * n);
                buf.extend_from_slice(x);
                buf.extend(x.iter().rev().copied());
                fft.process(&mut buf, false);
                let half = T::lit(0.5);
                (0..n)
                    .map(|k| buf[k] * shift[k] * (half * self.scale[k]))
                    .collect()
            }
            DctKernel::Direct(table) => (0..n)
                .map(|k| {
                    let row = &table[k * n..(k + 1) * n];
                    let acc: Complex<T> = row.iter().zip(x).map(|(&c, &v)| v * c).sum();
                    acc * self.scale[k]
                })
                .collect(),
        }
    }

    fn adjoint_impl(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.n;
        match &self.kernel {
            DctKernel::Mirrored { fft, shift } => {
                let zero = Complex::new(T::zero(), T::zero());
                let mut up = vec![zero; 2 * n];
                let mut down = vec![zero; 2 * n];
                for k in 0..n {
                    let w = y[k] * self.scale[k];
                    up[k] = w * shift[k].conj();
                    down[k] = w * shift[k];
                }
                fft.process(&mut up, true);
                fft.process(&mut down, false);
                let half = T::lit(0.5);
                (0..n).map(|j| (up[j] + down[j]) * half).collect()
            }
            DctKernel::Direct(table) => {
                let mut out = vec![Complex::new(T::zero(), T::zero()); n];
                for k in 0..n {
                    let w = y[k] * self.scale[k];
                    for (j, o) in out.iter_mut().enumerate() {
                        *o = *o + w * table[k * n + j];
                    }
                }
                out
            }
        }
    }
}

impl<T: Real> LinearOperator<T> for Dct2<T> {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.forward_impl(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.adjoint_impl(y)
    }
    fn describe(&self) -> String {
        "C".into()
    }
}

/// Block DCT `Ĉ = I_{n/b} ⊗ C_b`.
#[derive(Debug, Clone)]
pub struct BlockDct<T> {
    n: usize,
    inner: Dct2<T>,
}

impl<T: Real> BlockDct<T> {
    pub fn new(n: usize, block: usize) -> Result<Self> {
        OrthoKind::BlockDct { block }.check_len(n)?;
        Ok(Self {
            n,
            inner: Dct2::new(block)?,
        })
    }

    pub fn block(&self) -> usize {
        self.inner.n
    }

    fn blockwise(&self, x: &[Complex<T>], adjoint: bool) -> Vec<Complex<T>> {
        x.chunks(self.inner.n)
            .flat_map(|c| {
                if adjoint {
                    self.inner.adjoint_impl(c)
                } else {
                    self.inner.forward_impl(c)
                }
            })
            .collect()
    }
}

impl<T: Real> LinearOperator<T> for BlockDct<T> {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.blockwise(x, false)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.blockwise(y, true)
    }
    fn describe(&self) -> String {
        format!("C^(b={})", self.inner.n)
    }
}

/// Orthonormal Haar analysis `W`, whose adjoint is built by
/// `W*_1 = [1]`, `W*_{2h} = (1/√2) [W*_h ⊗ [1;1] | I_h ⊗ [1;−1]]`.
///
/// Output ordering: coarsest coefficient first, finest details last.
#[derive(Debug, Clone)]
pub struct Haar {
    n: usize,
}

impl Haar {
    pub fn new(n: usize) -> Result<Self> {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                len: n,
                context: "haar transform",
            });
        }
        Ok(Self { n })
    }
}

impl<T: Real> LinearOperator<T> for Haar {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let r = T::FRAC_1_SQRT_2();
        let mut out = vec![Complex::new(T::zero(), T::zero()); self.n];
        let mut approx = x.to_vec();
        let mut len = self.n;
        while len > 1 {
            let half = len / 2;
            for i in 0..half {
                let (a, b) = (approx[2 * i], approx[2 * i + 1]);
                out[half + i] = (a - b) * r;
                approx[i] = (a + b) * r;
            }
            approx.truncate(half);
            len = half;
        }
        out[0] = approx[0];
        out
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let r = T::FRAC_1_SQRT_2();
        let mut approx = vec![y[0]];
        let mut len = 1;
        while len < self.n {
            let detail = &y[len..2 * len];
            approx = approx
                .iter()
                .zip(detail)
                .flat_map(|(&s, &d)| [(s + d) * r, (s - d) * r])
                .collect();
            len *= 2;
        }
        approx
    }
    fn describe(&self) -> String {
        "W".into()
    }
}
