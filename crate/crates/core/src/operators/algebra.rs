//! Structural operators: identity, diagonal, scaling, products, adjoints,
//! block-diagonal stacking, row-wise concatenation and the integrator.

use std::sync::Arc;

use num_complex::Complex;

use super::{LinearOperator, Op};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct Identity {
    n: usize,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl<T: Real> LinearOperator<T> for Identity {
    fn rows(&self) -> usize {
        self.n
    }
    fn cols(&self) -> usize {
        self.n
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        x.to_vec()
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        y.to_vec()
    }
    fn describe(&self) -> String {
        "I".into()
    }
}

pub fn identity<T: Real>(n: usize) -> Op<T> {
    Arc::new(Identity::new(n))
}

/// `diag(d)`.
#[derive(Debug, Clone)]
pub struct Diagonal<T> {
    entries: Vec<Complex<T>>,
    label: String,
}

impl<T: Real> Diagonal<T> {
    pub fn new(entries: Vec<Complex<T>>) -> Self {
        Self::labelled(entries, "D")
    }

    pub fn labelled(entries: Vec<Complex<T>>, label: impl Into<String>) -> Self {
        Self {
            entries,
            label: label.into(),
        }
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }
}

impl<T: Real> LinearOperator<T> for Diagonal<T> {
    fn rows(&self) -> usize {
        self.entries.len()
    }
    fn cols(&self) -> usize {
        self.entries.len()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        x.iter().zip(&self.entries).map(|(a, d)| a * d).collect()
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        y.iter()
            .zip(&self.entries)
            .map(|(a, d)| a * d.conj())
            .collect()
    }
    fn describe(&self) -> String {
        self.label.clone()
    }
}

pub fn diagonal<T: Real>(entries: Vec<Complex<T>>) -> Op<T> {
    Arc::new(Diagonal::new(entries))
}

/// `c · A` for a real `c`.
#[derive(Debug, Clone)]
pub struct Scaled<T: Real> {
    inner: Op<T>,
    factor: T,
}

impl<T: Real> Scaled<T> {
    pub fn new(inner: Op<T>, factor: T) -> Self {
        Self { inner, factor }
    }
}

impl<T: Real> LinearOperator<T> for Scaled<T> {
    fn rows(&self) -> usize {
        self.inner.rows()
    }
    fn cols(&self) -> usize {
        self.inner.cols()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut y = self.inner.apply(x);
        y.iter_mut().for_each(|z| *z = *z * self.factor);
        y
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut x = self.inner.apply_adjoint(y);
        x.iter_mut().for_each(|z| *z = *z * self.factor);
        x
    }
    fn describe(&self) -> String {
        format!("{:.4}·{}", self.factor, self.inner.describe())
    }
}

pub fn scaled<T: Real>(inner: Op<T>, factor: T) -> Op<T> {
    Arc::new(Scaled::new(inner, factor))
}

/// Lazy product `A_0 · A_1 ⋯ A_{k−1}`; forward applies right to left.
#[derive(Debug, Clone)]
pub struct Compose<T: Real> {
    ops: Vec<Op<T>>,
}

impl<T: Real> Compose<T> {
    pub fn new(ops: Vec<Op<T>>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::InvalidParameter(
                "cannot compose an empty operator list".into(),
            ));
        }
        for (i, pair) in ops.windows(2).enumerate() {
            if pair[0].cols() != pair[1].rows() {
                return Err(Error::ComposeMismatch {
                    left: i,
                    right: i + 1,
                    left_dims: pair[0].dims(),
                    right_dims: pair[1].dims(),
                });
            }
        }
        Ok(Self { ops })
    }

    pub fn factors(&self) -> &[Op<T>] {
        &self.ops
    }
}

impl<T: Real> LinearOperator<T> for Compose<T> {
    fn rows(&self) -> usize {
        self.ops[0].rows()
    }
    fn cols(&self) -> usize {
        self.ops[self.ops.len() - 1].cols()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut stages = self.ops.iter().rev();
        let mut v = stages.next().expect("non-empty composition").apply(x);
        for op in stages {
            v = op.apply(&v);
        }
        v
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut stages = self.ops.iter();
        let mut v = stages
            .next()
            .expect("non-empty composition")
            .apply_adjoint(y);
        for op in stages {
            v = op.apply_adjoint(&v);
        }
        v
    }
    fn describe(&self) -> String {
        self.ops
            .iter()
            .map(|o| o.describe())
            .collect::<Vec<_>>()
            .join("·")
    }
}

/// Composes `ops` (leftmost first), checking that adjacent shapes chain.
pub fn compose<T: Real>(ops: Vec<Op<T>>) -> Result<Op<T>> {
    Ok(Arc::new(Compose::new(ops)?))
}

/// `A*` of a wrapped operator.
#[derive(Debug, Clone)]
pub struct Adjoint<T: Real> {
    inner: Op<T>,
}

impl<T: Real> Adjoint<T> {
    pub fn new(inner: Op<T>) -> Self {
        Self { inner }
    }
}

impl<T: Real> LinearOperator<T> for Adjoint<T> {
    fn rows(&self) -> usize {
        self.inner.cols()
    }
    fn cols(&self) -> usize {
        self.inner.rows()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        self.inner.apply_adjoint(x)
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.inner.apply(y)
    }
    fn describe(&self) -> String {
        format!("({})*", self.inner.describe())
    }
}

/// `diag([A_0, …, A_{L−1}])`.
#[derive(Debug, Clone)]
pub struct BlockDiagonal<T: Real> {
    blocks: Vec<Op<T>>,
    row_offsets: Vec<usize>,
    col_offsets: Vec<usize>,
}

impl<T: Real> BlockDiagonal<T> {
    pub fn new(blocks: Vec<Op<T>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidParameter(
                "block diagonal needs at least one block".into(),
            ));
        }
        let mut row_offsets = vec![0];
        let mut col_offsets = vec![0];
        for b in &blocks {
            row_offsets.push(row_offsets.last().unwrap() + b.rows());
            col_offsets.push(col_offsets.last().unwrap() + b.cols());
        }
        Ok(Self {
            blocks,
            row_offsets,
            col_offsets,
        })
    }

    /// `I_L ⊗ A`.
    pub fn kron_identity(copies: usize, block: Op<T>) -> Result<Self> {
        Self::new(vec![block; copies])
    }
}

impl<T: Real> LinearOperator<T> for BlockDiagonal<T> {
    fn rows(&self) -> usize {
        *self.row_offsets.last().unwrap()
    }
    fn cols(&self) -> usize {
        *self.col_offsets.last().unwrap()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.rows());
        for (i, b) in self.blocks.iter().enumerate() {
            out.extend(b.apply(&x[self.col_offsets[i]..self.col_offsets[i + 1]]));
        }
        out
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut out = Vec::with_capacity(self.cols());
        for (i, b) in self.blocks.iter().enumerate() {
            out.extend(b.apply_adjoint(&y[self.row_offsets[i]..self.row_offsets[i + 1]]));
        }
        out
    }
    fn describe(&self) -> String {
        format!(
            "blkdiag[{}×{}]",
            self.blocks.len(),
            self.blocks[0].describe()
        )
    }
}

/// Row-wise concatenation `[A_0 A_1 ⋯ A_{L−1}]`: forward sums the block applies.
#[derive(Debug, Clone)]
pub struct HStack<T: Real> {
    blocks: Vec<Op<T>>,
    col_offsets: Vec<usize>,
}

impl<T: Real> HStack<T> {
    pub fn new(blocks: Vec<Op<T>>) -> Result<Self> {
        let rows = blocks
            .first()
            .ok_or_else(|| Error::InvalidParameter("hstack needs at least one block".into()))?
            .rows();
        let mut col_offsets = vec![0];
        for (i, b) in blocks.iter().enumerate() {
            if b.rows() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    got: b.rows(),
                    context: format!("row count of hstack block {i}"),
                });
            }
            col_offsets.push(col_offsets.last().unwrap() + b.cols());
        }
        Ok(Self {
            blocks,
            col_offsets,
        })
    }

    /// `1_Lᵀ ⊗ A`.
    pub fn repeat(copies: usize, block: Op<T>) -> Result<Self> {
        Self::new(vec![block; copies])
    }
}

impl<T: Real> LinearOperator<T> for HStack<T> {
    fn rows(&self) -> usize {
        self.blocks[0].rows()
    }
    fn cols(&self) -> usize {
        *self.col_offsets.last().unwrap()
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let mut acc = vec![Complex::new(T::zero(), T::zero()); self.rows()];
        for (i, b) in self.blocks.iter().enumerate() {
            let part = b.apply(&x[self.col_offsets[i]..self.col_offsets[i + 1]]);
            for (a, p) in acc.iter_mut().zip(part) {
                *a = *a + p;
            }
        }
        acc
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        self.blocks
            .iter()
            .flat_map(|b| b.apply_adjoint(y))
            .collect()
    }
    fn describe(&self) -> String {
        format!("[{} ×{}]", self.blocks[0].describe(), self.blocks.len())
    }
}

/// Integrate-and-dump `I_m ⊗ 1_qᵀ`: sums consecutive blocks of `q` samples.
#[derive(Debug, Clone)]
pub struct Integrator {
    m: usize,
    q: usize,
}

impl Integrator {
    pub fn new(m: usize, q: usize) -> Result<Self> {
        if m == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!(
                "integrator needs positive m and q (got m = {m}, q = {q})"
            )));
        }
        Ok(Self { m, q })
    }
}

impl<T: Real> LinearOperator<T> for Integrator {
    fn rows(&self) -> usize {
        self.m
    }
    fn cols(&self) -> usize {
        self.m * self.q
    }
    fn apply(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        x.chunks(self.q).map(|c| c.iter().copied().sum()).collect()
    }
    fn apply_adjoint(&self, y: &[Complex<T>]) -> Vec<Complex<T>> {
        y.iter()
            .flat_map(|&v| std::iter::repeat_n(v, self.q))
            .collect()
    }
    fn describe(&self) -> String {
        "P1".into()
    }
}
