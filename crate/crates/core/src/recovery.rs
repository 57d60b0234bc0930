//! Greedy sparse recovery on implicit operators.
//!
//! Correlation ties are broken by the lowest column index so that runs are
//! reproducible bit for bit.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{column, LinearOperator, SubsampleSet};
use crate::scalar::{inner, norm2, norm2_sqr, Real};

/// Relative residual at which the solvers stop early.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Default round cap for subspace pursuit.
pub const SP_MAX_ITER: usize = 50;

/// Value reported by [`nmse`] for an exact reconstruction.
pub const NMSE_FLOOR_DB: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Omp,
    Sp,
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Solver::Omp => "omp",
            Solver::Sp => "sp",
        })
    }
}

impl FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "omp" => Ok(Solver::Omp),
            "sp" => Ok(Solver::Sp),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver '{other}' (omp|sp)"
            ))),
        }
    }
}

impl Solver {
    /// Runs the solver with its default iteration cap.
    pub fn solve<T: Real>(
        self,
        a: &dyn LinearOperator<T>,
        y: &[Complex<T>],
        s: usize,
    ) -> Result<RecoveryResult<T>> {
        match self {
            Solver::Omp => omp(a, y, s),
            Solver::Sp => subspace_pursuit(a, y, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult<T> {
    /// Estimate, zero off `support`.
    pub xhat: Vec<Complex<T>>,
    pub support: SubsampleSet,
    /// `‖y − A·xhat‖₂`.
    pub residual_norm: T,
    pub iterations: usize,
    /// The solver stopped by its own rule rather than the iteration cap.
    pub converged: bool,
    /// Residual norm after the initial fit and each accepted round.
    pub residual_history: Vec<T>,
}

/// Householder QR least squares on explicit columns.
fn lsq_columns<T: Real>(cols: &[&[Complex<T>]], y: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    let k = cols.len();
    let m = y.len();
    if k > m {
        return Err(Error::RankDeficient { cols: k, rank: m });
    }
    let mut a: Vec<Vec<Complex<T>>> = cols.iter().map(|c| c.to_vec()).collect();
    let mut b = y.to_vec();
    let scale = a.iter().map(|c| norm2(c)).fold(T::zero(), T::max);
    let tol = T::lit(1e-10) * scale.max(T::min_positive_value());
    let mut diag = Vec::with_capacity(k);
    let mut rank = 0;
    for j in 0..k {
        let norm = norm2(&a[j][j..]);
        if norm <= tol {
            diag.push(Complex::new(T::zero(), T::zero()));
            continue;
        }
        rank += 1;
        let x0 = a[j][j];
        let phase = if x0.norm() > T::zero() {
            x0 / x0.norm()
        } else {
            Complex::new(T::one(), T::zero())
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex<T>> = a[j][j..].to_vec();
        v[0] = v[0] - alpha;
        let vv = norm2_sqr(&v);
        let reflect = |w: &mut [Complex<T>]| {
            let c = inner(&v, w) * (T::lit(2.0) / vv);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi = *wi - *vi * c;
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut b[j..]);
        diag.push(alpha);
    }
    if rank < k {
        return Err(Error::RankDeficient { cols: k, rank });
    }
    let mut z = vec![Complex::new(T::zero(), T::zero()); k];
    for i in (0..k).rev() {
        let mut acc = b[i];
        for j in i + 1..k {
            acc = acc - a[j][i] * z[j];
        }
        z[i] = acc / diag[i];
    }
    Ok(z)
}

/// Minimizes `‖y − A_S z‖₂` over `z ∈ C^|S|`.
pub fn lsq_on_support<T: Real>(
    a: &dyn LinearOperator<T>,
    y: &[Complex<T>],
    support: &SubsampleSet,
) -> Result<Vec<Complex<T>>> {
    check_inputs(a, y, support.len().max(1))?;
    if support.ambient() != a.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: support.ambient(),
            context: "support ambient dimension".into(),
        });
    }
    let cols: Vec<Vec<Complex<T>>> = support.indices().iter().map(|&j| column(a, j)).collect();
    let refs: Vec<&[Complex<T>]> = cols.iter().map(Vec::as_slice).collect();
    lsq_columns(&refs, y)
}

fn check_inputs<T: Real>(a: &dyn LinearOperator<T>, y: &[Complex<T>], s: usize) -> Result<()> {
    if y.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            got: y.len(),
            context: "measurement length".into(),
        });
    }
    if s == 0 || s > a.rows() || s > a.cols() {
        return Err(Error::InvalidParameter(format!(
            "sparsity s = {s} must satisfy 1 <= s <= min(m, n) = {}",
            a.rows().min(a.cols())
        )));
    }
    Ok(())
}

/// Least-squares coefficients and the matching residual.
type Fit<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

/// Columns of `A`, computed on first use.
struct ColumnCache<'a, T: Real> {
    a: &'a dyn LinearOperator<T>,
    cols: HashMap<usize, Vec<Complex<T>>>,
}

impl<'a, T: Real> ColumnCache<'a, T> {
    fn new(a: &'a dyn LinearOperator<T>) -> Self {
        Self {
            a,
            cols: HashMap::new(),
        }
    }

    /// Least squares on `support`, returning coefficients and residual.
    fn fit(&mut self, support: &[usize], y: &[Complex<T>]) -> Result<Fit<T>> {
        for &j in support {
            let a = self.a;
            self.cols.entry(j).or_insert_with(|| column(a, j));
        }
        let refs: Vec<&[Complex<T>]> = support.iter().map(|j| self.cols[j].as_slice()).collect();
        let z = lsq_columns(&refs, y)?;
        let mut r = y.to_vec();
        for (col, zj) in refs.iter().zip(&z) {
            for (ri, ci) in r.iter_mut().zip(col.iter()) {
                *ri = *ri - *ci * *zj;
            }
        }
        Ok((z, r))
    }

    /// Walks `ranked` in order and keeps up to `want` atoms whose columns
    /// stay linearly independent, then fits on them (sorted).
    fn fit_independent(
        &mut self,
        ranked: &[usize],
        want: usize,
        y: &[Complex<T>],
    ) -> Result<(Vec<usize>, Fit<T>)> {
        let mut kept: Vec<usize> = Vec::with_capacity(want);
        for &j in ranked {
            if kept.len() == want {
                break;
            }
            kept.push(j);
            match self.fit(&kept, y) {
                Ok(_) => {}
                Err(Error::RankDeficient { .. }) => {
                    kept.pop();
                }
                Err(e) => return Err(e),
            }
        }
        kept.sort_unstable();
        let (z, r) = self.fit(&kept, y)?;
        Ok((kept, (z, r)))
    }

    /// Fit on `support`, falling back to an independent subset taken in
    /// `ranked` order when the columns are dependent.
    fn fit_or_thin(
        &mut self,
        support: Vec<usize>,
        ranked: &[usize],
        y: &[Complex<T>],
    ) -> Result<(Vec<usize>, Fit<T>)> {
        match self.fit(&support, y) {
            Ok(fit) => Ok((support, fit)),
            Err(Error::RankDeficient { .. }) => self.fit_independent(ranked, support.len(), y),
            Err(e) => Err(e),
        }
    }
}

/// Indices of the `k` largest magnitudes among those `allowed`, ties to the
/// lowest index.
fn top_k<T: Real>(c: &[Complex<T>], k: usize, allowed: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut ix: Vec<usize> = (0..c.len()).filter(|&j| allowed(j)).collect();
    ix.sort_by(|&i, &j| {
        c[j].norm_sqr()
            .partial_cmp(&c[i].norm_sqr())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    ix.truncate(k);
    ix
}

fn finish<T: Real>(
    n: usize,
    support: &[usize],
    z: &[Complex<T>],
    residual: &[Complex<T>],
    iterations: usize,
    converged: bool,
    residual_history: Vec<T>,
) -> Result<RecoveryResult<T>> {
    let mut xhat = vec![Complex::new(T::zero(), T::zero()); n];
    for (&j, &v) in support.iter().zip(z) {
        xhat[j] = v;
    }
    let residual_norm = norm2(residual);
    if !residual_norm.is_finite() {
        return Err(Error::Numerical("non-finite residual".into()));
    }
    Ok(RecoveryResult {
        xhat,
        support: SubsampleSet::from_unsorted(support.to_vec(), n)?,
        residual_norm,
        iterations,
        converged,
        residual_history,
    })
}

/// Orthogonal matching pursuit with at most `s` atoms.
pub fn omp<T: Real>(
    a: &dyn LinearOperator<T>,
    y: &[Complex<T>],
    s: usize,
) -> Result<RecoveryResult<T>> {
    omp_with_max_iter(a, y, s, s)
}

pub fn omp_with_max_iter<T: Real>(
    a: &dyn LinearOperator<T>,
    y: &[Complex<T>],
    s: usize,
    max_iter: usize,
) -> Result<RecoveryResult<T>> {
    check_inputs(a, y, s)?;
    let tol = T::lit(RESIDUAL_TOL) * norm2(y);
    let mut cache = ColumnCache::new(a);
    let mut support: Vec<usize> = Vec::new();
    let mut z = Vec::new();
    let mut r = y.to_vec();
    let mut history = vec![norm2(&r)];
    let mut iterations = 0;
    let cap = max_iter.min(s);
    while iterations < cap && norm2(&r) > tol {
        let c = a.apply_adjoint(&r);
        let pick = top_k(&c, 1, |j| !support.contains(&j));
        let Some(&j) = pick.first() else { break };
        support.push(j);
        let (zn, rn) = match cache.fit(&support, y) {
            Ok(fit) => fit,
            // The best new atom lies in the span already chosen: nothing left to explain.
            Err(Error::RankDeficient { .. }) => {
                support.pop();
                break;
            }
            Err(e) => return Err(e),
        };
        z = zn;
        r = rn;
        history.push(norm2(&r));
        iterations += 1;
    }
    let converged = norm2(&r) <= tol || iterations == s;
    finish(a.cols(), &support, &z, &r, iterations, converged, history)
}

/// Subspace pursuit with the default round cap.
pub fn subspace_pursuit<T: Real>(
    a: &dyn LinearOperator<T>,
    y: &[Complex<T>],
    s: usize,
) -> Result<RecoveryResult<T>> {
    subspace_pursuit_with_max_iter(a, y, s, SP_MAX_ITER)
}

/// Subspace pursuit: expand the support with the `s` strongest residual
/// correlations, refit, prune back to `s` atoms and refit again. A round is
/// kept only if it lowers the residual.
pub fn subspace_pursuit_with_max_iter<T: Real>(
    a: &dyn LinearOperator<T>,
    y: &[Complex<T>],
    s: usize,
    max_iter: usize,
) -> Result<RecoveryResult<T>> {
    check_inputs(a, y, s)?;
    let m = a.rows();
    let tol = T::lit(RESIDUAL_TOL) * norm2(y);
    let mut cache = ColumnCache::new(a);

    let proxy = a.apply_adjoint(y);
    let mut support = top_k(&proxy, s, |_| true);
    support.sort_unstable();
    let (first, (mut z, mut r)) =
        cache.fit_or_thin(support, &top_k(&proxy, a.cols(), |_| true), y)?;
    support = first;
    let mut rnorm = norm2(&r);
    let mut history = vec![rnorm];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < max_iter {
        if rnorm <= tol {
            converged = true;
            break;
        }
        let c = a.apply_adjoint(&r);
        let room = s.min(m.saturating_sub(support.len()));
        let fresh = top_k(&c, room, |j| support.binary_search(&j).is_err());
        let mut merged = support.clone();
        merged.extend(&fresh);
        let ranked = merged.clone();
        merged.sort_unstable();
        let (merged, (wide, _)) = cache.fit_or_thin(merged, &ranked, y)?;
        let mut pruned: Vec<usize> = top_k(&wide, s, |_| true)
            .into_iter()
            .map(|i| merged[i])
            .collect();
        pruned.sort_unstable();
        let (zn, rn) = cache.fit(&pruned, y)?;
        let nn = norm2(&rn);
        if nn >= rnorm {
            converged = true;
            break;
        }
        support = pruned;
        z = zn;
        r = rn;
        rnorm = nn;
        history.push(rnorm);
        iterations += 1;
    }
    if rnorm <= tol {
        converged = true;
    }
    finish(a.cols(), &support, &z, &r, iterations, converged, history)
}

/// `10·log10(‖x − xhat‖² / ‖x‖²)` in dB, floored at [`NMSE_FLOOR_DB`].
pub fn nmse<T: Real>(x: &[Complex<T>], xhat: &[Complex<T>]) -> Result<f64> {
    if x.len() != xhat.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: xhat.len(),
            context: "nmse estimate length".into(),
        });
    }
    let reference = norm2_sqr(x).as_f64();
    if reference == 0.0 {
        return Err(Error::InvalidParameter("nmse of a zero reference".into()));
    }
    let err: f64 = x
        .iter()
        .zip(xhat)
        .map(|(a, b)| (*a - *b).norm_sqr().as_f64())
        .sum();
    if err == 0.0 {
        return Ok(NMSE_FLOOR_DB);
    }
    Ok((10.0 * (err / reference).log10()).max(NMSE_FLOOR_DB))
}
