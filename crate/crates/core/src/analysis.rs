//! Coherence and restricted-isometry diagnostics.

use std::fmt;

use num_complex::Complex;
use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{column, ortho_operator, DenseMatrix, Fourier, LinearOperator, OrthoKind};
use crate::rng::{seeded, stream};
use crate::scalar::{is_power_of_two, unit_vector, Real};
use crate::sequences::{rudin_shapiro_pair, ModulationSeq};

/// Largest supported `C(n, s)` for exhaustive support enumeration.
pub const EXACT_RIC_GUARD: u128 = 1_000_000;

/// Default largest `n` for [`modulated_coherence`].
pub const DEFAULT_COHERENCE_MAX_N: usize = 4096;

/// Numerical slack added to coherence bounds before comparison.
pub const COHERENCE_SLACK: f64 = 1e-12;

/// Largest entry magnitude.
pub fn coherence<T: Real>(m: &DenseMatrix<T>) -> T {
    m.entries().iter().map(|z| z.norm()).fold(T::zero(), T::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub mu: f64,
    /// Known upper bound for this basis, if one applies.
    pub bound: Option<f64>,
    pub n: usize,
    pub basis_kind: OrthoKind,
    pub passes: bool,
}

/// True when `lambda` is (real-valued and equal to) a member of the
/// Rudin–Shapiro pair of its length.
pub fn is_rudin_shapiro_member<T: Real>(lambda: &ModulationSeq<T>) -> bool {
    let n = lambda.len();
    if !is_power_of_two(n) {
        return false;
    }
    let pair = rudin_shapiro_pair(n.trailing_zeros());
    let matches = |s: &[i8]| {
        lambda
            .values()
            .iter()
            .zip(s)
            .all(|(z, &v)| z.im == T::zero() && z.re == T::lit(f64::from(v)))
    };
    matches(pair.a()) || matches(pair.b())
}

fn coherence_bound(kind: OrthoKind, n: usize, rudin_shapiro: bool) -> Option<f64> {
    let n = n as f64;
    match kind {
        OrthoKind::Identity => Some(1.0 / n.sqrt()),
        OrthoKind::Fourier => Some((2.0 / n).sqrt()),
        OrthoKind::Dct2 | OrthoKind::BlockDct { .. } => Some(2.0 / n.sqrt()),
        OrthoKind::Haar if rudin_shapiro => Some((2.0 / n).sqrt()),
        _ => None,
    }
}

/// `μ(F · Λ · T*)` where `T` is the analysis transform of `kind`.
pub fn modulated_coherence<T: Real>(
    lambda: &ModulationSeq<T>,
    kind: OrthoKind,
) -> Result<CoherenceReport> {
    modulated_coherence_with_limit(lambda, kind, DEFAULT_COHERENCE_MAX_N)
}

/// As [`modulated_coherence`], refusing lengths above `max_n`.
///
/// The matrix is scanned one column at a time through fast transforms, so
/// the cost is `n` transform pairs and memory stays `O(n)` per thread.
pub fn modulated_coherence_with_limit<T: Real>(
    lambda: &ModulationSeq<T>,
    kind: OrthoKind,
    max_n: usize,
) -> Result<CoherenceReport> {
    let n = lambda.len();
    if n > max_n {
        return Err(Error::InvalidParameter(format!(
            "coherence scan of n = {n} exceeds --max-n {max_n}"
        )));
    }
    let f = Fourier::<T>::new(n)?;
    let basis = ortho_operator::<T>(kind, n)?;
    let lam = lambda.values();
    let mu = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut v = basis.apply_adjoint(&unit_vector(n, j));
            for (x, l) in v.iter_mut().zip(lam) {
                *x = *x * *l;
            }
            f.apply(&v)
                .iter()
                .map(|z| z.norm().as_f64())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    if !mu.is_finite() {
        return Err(Error::Numerical("non-finite coherence".into()));
    }
    let bound = coherence_bound(kind, n, is_rudin_shapiro_member(lambda));
    Ok(CoherenceReport {
        mu,
        bound,
        n,
        basis_kind: kind,
        passes: bound.is_some_and(|b| mu <= b + COHERENCE_SLACK),
    })
}

/// Eigenvalues (ascending) of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The `k × k` complex problem is solved as the `2k × 2k` real symmetric
/// embedding `[[Re, −Im], [Im, Re]]`, whose spectrum is each eigenvalue twice.
pub fn hermitian_eigenvalues<T: Real>(h: &DenseMatrix<T>) -> Result<Vec<T>> {
    let k = h.rows();
    if h.cols() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: h.cols(),
            context: "hermitian eigenvalues of a non-square matrix".into(),
        });
    }
    let n = 2 * k;
    let mut a = vec![T::zero(); n * n];
    for i in 0..k {
        for j in 0..k {
            let z = h.get(i, j);
            a[i * n + j] = z.re;
            a[(i + k) * n + j + k] = z.re;
            a[i * n + j + k] = -z.im;
            a[(i + k) * n + j] = z.im;
        }
    }
    let mut eig = symmetric_jacobi(&mut a, n, T::lit(1e-12))?;
    eig.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    Ok(eig.into_iter().step_by(2).collect())
}

fn symmetric_jacobi<T: Real>(a: &mut [T], n: usize, tol: T) -> Result<Vec<T>> {
    const MAX_SWEEPS: usize = 100;
    let scale = a
        .iter()
        .fold(T::zero(), |acc, &x| acc.max(x.abs()))
        .max(T::min_positive_value());
    for _ in 0..MAX_SWEEPS {
        let off = (0..n)
            .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc.max(a[p * n + q].abs()));
        if off <= tol * scale {
            return Ok((0..n).map(|i| a[i * n + i]).collect());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (apq + apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = c * arp - s * arq;
                    a[r * n + q] = s * arp + c * arq;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = c * apr - s * aqr;
                    a[q * n + r] = s * apr + c * aqr;
                }
            }
        }
    }
    Err(Error::Numerical(
        "Jacobi eigenvalue iteration did not converge".into(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RicMethod {
    Exact,
    Sampled,
}

impl fmt::Display for RicMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RicMethod::Exact => "exact",
            RicMethod::Sampled => "sampled",
        })
    }
}

impl std::str::FromStr for RicMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" => Ok(RicMethod::Exact),
            "sampled" => Ok(RicMethod::Sampled),
            other => Err(Error::InvalidParameter(format!(
                "unknown ric method '{other}' (exact|sampled)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicReport {
    pub s: usize,
    pub delta_s: f64,
    pub method: RicMethod,
    pub supports_evaluated: u128,
    /// A support attaining `delta_s` (the first in enumeration order).
    pub worst_support: Vec<usize>,
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Lexicographic rank-`r` `k`-subset of `[n]`.
fn unrank_combination(mut r: u128, n: usize, k: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0;
    for slot in 0..k {
        let left = k - slot - 1;
        loop {
            let with_next = binomial(n - next - 1, left);
            if r < with_next {
                break;
            }
            r -= with_next;
            next += 1;
        }
        out.push(next);
        next += 1;
    }
    out
}

fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn eig_deviation<T: Real>(g: &DenseMatrix<T>) -> Result<f64> {
    let eig = hermitian_eigenvalues(g)?;
    let lo = eig.first().copied().unwrap_or(T::one());
    let hi = eig.last().copied().unwrap_or(T::one());
    Ok((T::one() - lo).max(hi - T::one()).as_f64())
}

/// Keeps the larger deviation; on ties the earlier support wins.
fn worse(a: (f64, Vec<usize>), b: (f64, Vec<usize>)) -> (f64, Vec<usize>) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

fn gram_on<T: Real>(g: &DenseMatrix<T>, support: &[usize]) -> DenseMatrix<T> {
    DenseMatrix::from_fn(support.len(), support.len(), |i, j| {
        g.get(support[i], support[j])
    })
}

/// `δ_s` of `m` by enumerating every size-`s` support.
pub fn exact_ric<T: Real>(m: &DenseMatrix<T>, s: usize) -> Result<RicReport> {
    let n = m.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= n (s = {s}, n = {n})"
        )));
    }
    let total = binomial(n, s);
    if total > EXACT_RIC_GUARD {
        return Err(Error::CombinatorialGuard {
            supports: total,
            guard: EXACT_RIC_GUARD,
        });
    }
    let gram = m.adjoint().matmul(m)?;
    const CHUNK: u128 = 2048;
    let chunks = total.div_ceil(CHUNK) as usize;
    let (delta, worst) = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<(f64, Vec<usize>)> {
            let start = c as u128 * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut support = unrank_combination(start, n, s);
            let mut best = (f64::NEG_INFINITY, Vec::new());
            for r in start..end {
                let dev = eig_deviation(&gram_on(&gram, &support))?;
                if dev > best.0 {
                    best = (dev, support.clone());
                }
                if r + 1 < end {
                    next_combination(&mut support, n);
                }
            }
            Ok(best)
        })
        .try_reduce(|| (f64::NEG_INFINITY, Vec::new()), |a, b| Ok(worse(a, b)))?;
    Ok(RicReport {
        s,
        delta_s: delta.max(0.0),
        method: RicMethod::Exact,
        supports_evaluated: total,
        worst_support: worst,
    })
}

/// Lower bound on `δ_s` of an implicit operator from `num_supports` uniformly
/// drawn supports; each support Gram costs `s` forward applies.
///
/// When `num_supports` reaches `C(n, s)` every support is evaluated and the
/// result is exact.
pub fn empirical_ric<T: Real>(
    a: &dyn LinearOperator<T>,
    s: usize,
    num_supports: usize,
    seed: u64,
) -> Result<RicReport> {
    let n = a.cols();
    if s == 0 || s > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= s <= n (s = {s}, n = {n})"
        )));
    }
    if num_supports == 0 {
        return Err(Error::InvalidParameter(
            "num_supports must be positive".into(),
        ));
    }
    let total = binomial(n, s);
    if (num_supports as u128) >= total {
        let columns: Vec<Vec<Complex<T>>> = (0..n).into_par_iter().map(|j| column(a, j)).collect();
        return exact_ric(&DenseMatrix::from_columns(a.rows(), &columns), s);
    }
    let mut rng = seeded(seed, stream::SUPPORTS);
    let supports: Vec<Vec<usize>> = (0..num_supports)
        .map(|_| {
            let mut ix = sample(&mut rng, n, s).into_vec();
            ix.sort_unstable();
            ix
        })
        .collect();
    let (delta, worst) = supports
        .into_par_iter()
        .map(|support| -> Result<(f64, Vec<usize>)> {
            let cols: Vec<Vec<Complex<T>>> = support.iter().map(|&j| column(a, j)).collect();
            let sub = DenseMatrix::from_columns(a.rows(), &cols);
            let g = sub.adjoint().matmul(&sub)?;
            Ok((eig_deviation(&g)?, support))
        })
        .try_reduce(|| (f64::NEG_INFINITY, Vec::new()), |x, y| Ok(worse(x, y)))?;
    Ok(RicReport {
        s,
        delta_s: delta.max(0.0),
        method: RicMethod::Sampled,
        supports_evaluated: num_supports as u128,
        worst_support: worst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::materialize;
    use crate::scalar::cplx;

    fn real_matrix(rows: usize, cols: usize, v: &[f64]) -> DenseMatrix<f64> {
        DenseMatrix::from_fn(rows, cols, |i, j| cplx(v[i * cols + j], 0.0))
    }

    #[test]
    fn coherence_examples() {
        let f4 = materialize(&Fourier::<f64>::new(4).unwrap()).unwrap();
        assert!((coherence(&f4) - 0.5).abs() < 1e-15);
        assert_eq!(coherence(&DenseMatrix::<f64>::identity(4)), 1.0);
    }

    #[test]
    fn unmodulated_fourier_is_maximally_coherent() {
        let r = modulated_coherence(&ModulationSeq::<f64>::ones(64), OrthoKind::Fourier).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-12);
        assert!(!r.passes);
    }

    #[test]
    fn golay_bounds_hold() {
        for d in 3..=8 {
            let lam = rudin_shapiro_pair(d).b_modulation::<f64>();
            for kind in [
                OrthoKind::Identity,
                OrthoKind::Fourier,
                OrthoKind::Dct2,
                OrthoKind::block_dct(),
                OrthoKind::Haar,
            ] {
                let r = modulated_coherence(&lam, kind).unwrap();
                assert!(r.passes, "d={d} {kind}: {} > {:?}", r.mu, r.bound);
            }
        }
    }

    #[test]
    fn haar_bound_needs_rudin_shapiro() {
        let mut v = rudin_shapiro_pair(5).a_modulation::<f64>().into_values();
        v[3] = -v[3];
        let r = modulated_coherence(&ModulationSeq::custom(v), OrthoKind::Haar).unwrap();
        assert_eq!(r.bound, None);
        assert!(!r.passes);
    }

    #[test]
    fn coherence_guard() {
        let lam = ModulationSeq::<f64>::ones(64);
        assert!(modulated_coherence_with_limit(&lam, OrthoKind::Fourier, 32).is_err());
    }

    #[test]
    fn jacobi_hermitian() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let h = DenseMatrix::from_row_major(
            2,
            2,
            vec![
                cplx(2.0, 0.0),
                cplx(0.0, 1.0),
                cplx(0.0, -1.0),
                cplx(2.0, 0.0),
            ],
        )
        .unwrap();
        let e: Vec<f64> = hermitian_eigenvalues(&h).unwrap();
        assert!((e[0] - 1.0).abs() < 1e-12 && (e[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn ric_examples() {
        let u = materialize(&Fourier::<f64>::new(8).unwrap()).unwrap();
        for s in 1..=3 {
            assert!(exact_ric(&u, s).unwrap().delta_s < 1e-12);
        }
        let dup = real_matrix(2, 2, &[1.0, 1.0, 0.0, 0.0]);
        assert!((exact_ric(&dup, 2).unwrap().delta_s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ric_guard() {
        let m = DenseMatrix::<f64>::identity(60);
        match exact_ric(&m, 6) {
            Err(Error::CombinatorialGuard { .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let n = 7;
        let k = 3;
        let mut c = unrank_combination(0, n, k);
        let mut r = 0u128;
        loop {
            assert_eq!(unrank_combination(r, n, k), c);
            r += 1;
            if !next_combination(&mut c, n) {
                break;
            }
        }
        assert_eq!(r, binomial(n, k));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(12, 2), 66);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        assert_eq!(binomial(1000, 500), u128::MAX);
    }
}
