//! Modulation sequences: seeded random diagonals and Rudin–Shapiro Golay pairs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::Radix2Fft;
use crate::rng::{seeded, stream};
use crate::scalar::{is_power_of_two, Real};

/// Law of an i.i.d. zero-mean, unit-variance diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    /// Uniform `±1`.
    Rademacher,
    /// Uniform on the unit circle.
    Steinhaus,
    /// Circular complex Gaussian, `E|ξ|² = 1`.
    Gaussian,
}

impl fmt::Display for RandomKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RandomKind::Rademacher => "rademacher",
            RandomKind::Steinhaus => "steinhaus",
            RandomKind::Gaussian => "gaussian",
        })
    }
}

impl FromStr for RandomKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rademacher" => Ok(RandomKind::Rademacher),
            "steinhaus" => Ok(RandomKind::Steinhaus),
            "gaussian" => Ok(RandomKind::Gaussian),
            other => Err(Error::InvalidParameter(format!(
                "unknown diagonal law '{other}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationKind {
    Random(RandomKind),
    GolayA,
    GolayB,
    /// All ones (no modulation).
    Constant,
    /// Caller-supplied values.
    Custom,
}

/// A diagonal modulation `ξ` (or `σ`, `λ`, `g̃`).
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationSeq<T> {
    values: Vec<Complex<T>>,
    kind: ModulationKind,
    seed: Option<u64>,
}

impl<T: Real> ModulationSeq<T> {
    pub fn ones(n: usize) -> Self {
        Self {
            values: vec![Complex::new(T::one(), T::zero()); n],
            kind: ModulationKind::Constant,
            seed: None,
        }
    }

    pub fn custom(values: Vec<Complex<T>>) -> Self {
        Self {
            values,
            kind: ModulationKind::Custom,
            seed: None,
        }
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Concatenation `[ξ_0ᵀ ξ_1ᵀ ⋯]ᵀ` of independent blocks.
    pub fn concat(parts: Vec<Self>) -> Self {
        let kind = parts.first().map_or(ModulationKind::Custom, |p| p.kind);
        let seed = parts.first().and_then(|p| p.seed);
        Self {
            values: parts.into_iter().flat_map(|p| p.values).collect(),
            kind,
            seed,
        }
    }
}

/// Draws `n` i.i.d. entries of the given law. Deterministic in `(kind, n, seed)`.
pub fn random_diagonal<T: Real>(kind: RandomKind, n: usize, seed: u64) -> ModulationSeq<T> {
    random_diagonal_on_stream(kind, n, seed, stream::DIAGONAL)
}

pub(crate) fn random_diagonal_on_stream<T: Real>(
    kind: RandomKind,
    n: usize,
    seed: u64,
    stream_id: u64,
) -> ModulationSeq<T> {
    let mut rng = seeded(seed, stream_id);
    let values = (0..n)
        .map(|_| match kind {
            RandomKind::Rademacher => {
                let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex::new(T::lit(s), T::zero())
            }
            RandomKind::Steinhaus => {
                let theta = 2.0 * PI * rng.random::<f64>();
                Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
            }
            RandomKind::Gaussian => {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(T::lit(re * FRAC_1_SQRT_2), T::lit(im * FRAC_1_SQRT_2))
            }
        })
        .collect();
    ModulationSeq {
        values,
        kind: ModulationKind::Random(kind),
        seed: Some(seed),
    }
}

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Two `±1` sequences with complementary aperiodic autocorrelations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayPair {
    a: Vec<i8>,
    b: Vec<i8>,
}

impl GolayPair {
    pub fn a(&self) -> &[i8] {
        &self.a
    }

    pub fn b(&self) -> &[i8] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a_modulation<T: Real>(&self) -> ModulationSeq<T> {
        bipolar_modulation(&self.a, ModulationKind::GolayA)
    }

    pub fn b_modulation<T: Real>(&self) -> ModulationSeq<T> {
        bipolar_modulation(&self.b, ModulationKind::GolayB)
    }
}

fn bipolar_modulation<T: Real>(s: &[i8], kind: ModulationKind) -> ModulationSeq<T> {
    ModulationSeq {
        values: s
            .iter()
            .map(|&v| Complex::new(T::lit(v as f64), T::zero()))
            .collect(),
        kind,
        seed: None,
    }
}

/// Rudin–Shapiro pair of length `2^d`: from `a = b = [1]`,
/// `a' = [a | b]`, `b' = [a | −b]`.
pub fn rudin_shapiro_pair(d: u32) -> GolayPair {
    let mut a = vec![1i8];
    let mut b = vec![1i8];
    for _ in 0..d {
        let mut na = a.clone();
        na.extend_from_slice(&b);
        let mut nb = a;
        nb.extend(b.iter().map(|&v| -v));
        a = na;
        b = nb;
    }
    GolayPair { a, b }
}

/// Outcome of an exact complementarity check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GolayCheck {
    pub ok: bool,
    /// Lag with the largest deviation from `2n·δ_k` (0 when the pair is complementary).
    pub worst_k: usize,
    /// `ρ_a(k) + ρ_b(k)` at `worst_k`.
    pub worst_sum: i64,
}

/// Aperiodic autocorrelation `ρ(k) = Σ_j s_j s_{j+k}`, `0 ≤ k < n`.
pub fn aperiodic_autocorrelation(s: &[i8]) -> Vec<i64> {
    let n = s.len();
    (0..n)
        .map(|k| {
            s[..n - k]
                .iter()
                .zip(&s[k..])
                .map(|(&x, &y)| (x as i32 * y as i32) as i64)
                .sum()
        })
        .collect()
}

/// Checks `ρ_a(k) + ρ_b(k) = 2n·δ_k` in integer arithmetic.
pub fn verify_golay_pair(a: &[i8], b: &[i8]) -> Result<GolayCheck> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
            context: "golay pair lengths".into(),
        });
    }
    if a.is_empty() {
        return Err(Error::InvalidParameter("empty sequences".into()));
    }
    if let Some(i) = a.iter().chain(b).position(|&v| v != 1 && v != -1) {
        return Err(Error::InvalidParameter(format!("entry {i} is not ±1")));
    }
    let n = a.len() as i64;
    let ra = aperiodic_autocorrelation(a);
    let rb = aperiodic_autocorrelation(b);
    let mut worst = GolayCheck {
        ok: true,
        worst_k: 0,
        worst_sum: 2 * n,
    };
    let mut worst_dev = 0i64;
    for (k, (x, y)) in ra.iter().zip(&rb).enumerate() {
        let sum = x + y;
        let target = if k == 0 { 2 * n } else { 0 };
        let dev = (sum - target).abs();
        if dev > worst_dev {
            worst_dev = dev;
            worst = GolayCheck {
                ok: false,
                worst_k: k,
                worst_sum: sum,
            };
        }
    }
    Ok(worst)
}

/// Oversampling factor of the unit-circle grid used by [`golay_poly_max`].
pub const POLY_OVERSAMPLE: usize = 8;

/// `|A(z_j)|²` on `z_j = e^{-2πij/(8n)}`, `j < 8n`, via a zero-padded FFT.
pub fn poly_grid_power<T: Real>(s: &[i8]) -> Result<Vec<T>> {
    let len = POLY_OVERSAMPLE * s.len();
    let fft = Radix2Fft::<T>::new(len)?;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    for (z, &v) in buf.iter_mut().zip(s) {
        *z = Complex::new(T::lit(v as f64), T::zero());
    }
    fft.process(&mut buf, false);
    Ok(buf.into_iter().map(|z| z.norm_sqr()).collect())
}

/// `max_j |A(z_j)|` over the 8×-oversampled unit-circle grid.
pub fn golay_poly_max<T: Real>(s: &[i8]) -> Result<T> {
    Ok(poly_grid_power::<T>(s)?
        .into_iter()
        .fold(T::zero(), T::max)
        .sqrt())
}

/// Peak-to-average power ratio of the time-domain pilot `p = F* λ`.
pub fn papr<T: Real>(lambda: &ModulationSeq<T>) -> Result<T> {
    papr_of(lambda.values())
}

pub fn papr_of<T: Real>(lambda: &[Complex<T>]) -> Result<T> {
    if !is_power_of_two(lambda.len()) {
        return Err(Error::NotPowerOfTwo {
            len: lambda.len(),
            context: "pilot length",
        });
    }
    let tol = T::lit(1e-9);
    if let Some((i, z)) = lambda
        .iter()
        .enumerate()
        .find(|(_, z)| (z.norm() - T::one()).abs() > tol)
    {
        return Err(Error::NotUnimodular {
            index: i,
            modulus: z.norm().as_f64(),
        });
    }
    // Unnormalized inverse transform plus Parseval for the mean keeps the
    // integer-valued peaks of bipolar pilots exact.
    let fft = Radix2Fft::<T>::new(lambda.len())?;
    let mut p = lambda.to_vec();
    fft.process(&mut p, true);
    let peak = p.iter().map(|z| z.norm_sqr()).fold(T::zero(), T::max);
    let energy = lambda.iter().map(|z| z.norm_sqr()).sum::<T>();
    Ok(peak / energy)
}
