//! Unit-norm tight frames (UTFs) as fast operators, and their verification.
//!
//! An `m × ñ` matrix is a UTF iff its columns have unit norm and the rows of
//! `√(m/ñ)·V` are orthonormal; equivalently its nonzero singular values all
//! equal `√(ñ/m)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operators::{
    compose, identity, scaled, BlockDiagonal, Fourier, HStack, Hadamard, Integrator,
    LinearOperator, Op, Subsample, SubsampleSet,
};
use crate::scalar::{unit_vector, Real};

/// The unitary `E` behind partial-unitary and block UTFs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitaryBase {
    Fourier,
    Hadamard,
}

impl UnitaryBase {
    pub fn operator<T: Real>(self, n: usize) -> Result<Op<T>> {
        Ok(match self {
            UnitaryBase::Fourier => Arc::new(Fourier::new(n)?),
            UnitaryBase::Hadamard => Arc::new(Hadamard::new(n)?),
        })
    }
}

impl fmt::Display for UnitaryBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UnitaryBase::Fourier => "fourier",
            UnitaryBase::Hadamard => "hadamard",
        })
    }
}

impl FromStr for UnitaryBase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fourier" => Ok(UnitaryBase::Fourier),
            "hadamard" => Ok(UnitaryBase::Hadamard),
            other => Err(Error::InvalidParameter(format!(
                "unknown base '{other}' (expected fourier or hadamard)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UtfKind {
    P1,
    P2,
    P3,
    P4,
    PartialUnitary,
}

/// Parameters for each frame family.
#[derive(Debug, Clone, PartialEq)]
pub enum UtfSpec {
    /// `I_m ⊗ 1_qᵀ` (`m × mq`).
    P1 { m: usize, q: usize },
    /// `1_Lᵀ ⊗ F*` with an `m`-point DFT (`m × mL`).
    P2 { m: usize, l: usize },
    /// `1_Lᵀ ⊗ I_m` (`m × mL`).
    P3 { m: usize, l: usize },
    /// `√(q/p) · I_L ⊗ (R_Ω E)` with `Ω ⊂ [q]`, `|Ω| = p` (`pL × qL`).
    P4 {
        l: usize,
        omega: SubsampleSet,
        base: UnitaryBase,
    },
    /// `√(n/m) · R_Ω E` with `Ω ⊂ [n]`.
    PartialUnitary {
        omega: SubsampleSet,
        base: UnitaryBase,
    },
}

/// A UTF operator together with its frame bound `ñ/m`.
#[derive(Debug, Clone)]
pub struct UtfOperator<T: Real> {
    op: Op<T>,
    frame_bound: Ratio<usize>,
    kind: UtfKind,
}

impl<T: Real> UtfOperator<T> {
    pub fn op(&self) -> &Op<T> {
        &self.op
    }

    pub fn kind(&self) -> UtfKind {
        self.kind
    }

    /// Exact frame bound `ñ/m`.
    pub fn frame_bound(&self) -> Ratio<usize> {
        self.frame_bound
    }

    /// Same frame family and bound, different (equivalent) realization.
    pub(crate) fn with_op(self, op: Op<T>) -> Self {
        Self { op, ..self }
    }

    pub fn rows(&self) -> usize {
        self.op.rows()
    }

    pub fn cols(&self) -> usize {
        self.op.cols()
    }
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

fn sqrt_ratio<T: Real>(num: usize, den: usize) -> T {
    (T::from_usize_lossy(num) / T::from_usize_lossy(den)).sqrt()
}

/// Builds one of the frame families without densifying it.
pub fn build_utf<T: Real>(spec: &UtfSpec) -> Result<UtfOperator<T>> {
    let (op, kind): (Op<T>, UtfKind) = match spec {
        &UtfSpec::P1 { m, q } => (Arc::new(Integrator::new(m, q)?), UtfKind::P1),
        &UtfSpec::P2 { m, l } => {
            positive("L", l)?;
            let fi: Op<T> = Arc::new(Fourier::inverse(m)?);
            (Arc::new(HStack::repeat(l, fi)?), UtfKind::P2)
        }
        &UtfSpec::P3 { m, l } => {
            positive("m", m)?;
            positive("L", l)?;
            (Arc::new(HStack::repeat(l, identity(m))?), UtfKind::P3)
        }
        UtfSpec::P4 { l, omega, base } => {
            positive("L", *l)?;
            let q = omega.ambient();
            let p = omega.len();
            positive("p", p)?;
            let block = compose(vec![
                Arc::new(Subsample::new(omega.clone())),
                base.operator(q)?,
            ])?;
            let diag: Op<T> = Arc::new(BlockDiagonal::kron_identity(*l, block)?);
            (scaled(diag, sqrt_ratio(q, p)), UtfKind::P4)
        }
        UtfSpec::PartialUnitary { omega, base } => {
            let n = omega.ambient();
            let m = omega.len();
            positive("m", m)?;
            let inner = compose(vec![
                Arc::new(Subsample::new(omega.clone())),
                base.operator(n)?,
            ])?;
            (scaled(inner, sqrt_ratio(n, m)), UtfKind::PartialUnitary)
        }
    };
    let frame_bound = Ratio::new(op.cols(), op.rows());
    Ok(UtfOperator {
        op,
        frame_bound,
        kind,
    })
}

/// Result of [`verify_utf`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtfCheck<T> {
    pub is_utf: bool,
    /// `max_j | ‖v_j‖ − 1 |`.
    pub max_column_norm_dev: T,
    /// `max_{ij} |(m/ñ)·(V V*)_{ij} − δ_{ij}|`.
    pub max_row_gram_dev: T,
}

/// Checks both UTF conditions using `m` adjoint applies (one per row).
pub fn verify_utf<T: Real>(op: &dyn LinearOperator<T>, tol: T) -> UtfCheck<T> {
    let (m, ntilde) = op.dims();
    // rows[i] = V* e_i, the conjugate of row i.
    let rows: Vec<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|i| op.apply_adjoint(&unit_vector(m, i)))
        .collect();

    let mut col_sq = vec![T::zero(); ntilde];
    for r in &rows {
        for (c, z) in col_sq.iter_mut().zip(r) {
            *c = *c + z.norm_sqr();
        }
    }
    let max_column_norm_dev = col_sq
        .iter()
        .map(|c| (c.sqrt() - T::one()).abs())
        .fold(T::zero(), T::max);

    let scale = T::from_usize_lossy(m) / T::from_usize_lossy(ntilde);
    let max_row_gram_dev = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut worst = T::zero();
            for j in i..m {
                let g: Complex<T> = rows[i]
                    .iter()
                    .zip(&rows[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex<T>>()
                    * scale;
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g - Complex::new(target, T::zero())).norm());
            }
            worst
        })
        .reduce(T::zero, T::max);

    UtfCheck {
        is_utf: max_column_norm_dev <= tol && max_row_gram_dev <= tol,
        max_column_norm_dev,
        max_row_gram_dev,
    }
}
