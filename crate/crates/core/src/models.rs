//! Sensing-model builders.
//!
//! Each builder returns a [`SensingModel`] whose operator is the lazy product
//! `U · D · B` of a unit-norm tight frame, a diagonal modulation and a
//! column-orthonormal matrix, with the three factors kept for diagnostics.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{build_utf, UnitaryBase, UtfOperator, UtfSpec};
use crate::operators::{
    adjoint_of, compose, ortho_operator, BlockDiagonal, Diagonal, Fourier, Op, OrthoKind,
    PermutedFourier, Subsample, SubsampleSet,
};
use crate::scalar::{is_power_of_two, Real};
use crate::sequences::{random_diagonal, rudin_shapiro_pair, ModulationSeq, RandomKind};

/// Named sensing models, with their command-line identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelId {
    #[serde(rename = "rd")]
    RandomDemodulation,
    #[serde(rename = "rp")]
    RandomProbing,
    #[serde(rename = "cmux")]
    CompressiveMultiplexing,
    #[serde(rename = "asub")]
    ArbitrarySubsampled,
    #[serde(rename = "bdiag")]
    BlockDiagonal,
    #[serde(rename = "golay-conv")]
    GolayConvolutional,
    #[serde(rename = "ofdm")]
    Ofdm,
}

impl ModelId {
    pub const ALL: [ModelId; 7] = [
        ModelId::RandomDemodulation,
        ModelId::RandomProbing,
        ModelId::CompressiveMultiplexing,
        ModelId::ArbitrarySubsampled,
        ModelId::BlockDiagonal,
        ModelId::GolayConvolutional,
        ModelId::Ofdm,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelId::RandomDemodulation => "rd",
            ModelId::RandomProbing => "rp",
            ModelId::CompressiveMultiplexing => "cmux",
            ModelId::ArbitrarySubsampled => "asub",
            ModelId::BlockDiagonal => "bdiag",
            ModelId::GolayConvolutional => "golay-conv",
            ModelId::Ofdm => "ofdm",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        ModelId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown model '{s}' (expected rd, rp, cmux, asub, bdiag, golay-conv or ofdm)"
                ))
            })
    }
}

/// Where the diagonal `D` comes from.
#[derive(Debug, Clone)]
pub enum DiagonalSource<T> {
    Seeded { kind: RandomKind, seed: u64 },
    Explicit(ModulationSeq<T>),
}

impl<T: Real> DiagonalSource<T> {
    pub fn rademacher(seed: u64) -> Self {
        DiagonalSource::Seeded {
            kind: RandomKind::Rademacher,
            seed,
        }
    }

    pub fn gaussian(seed: u64) -> Self {
        DiagonalSource::Seeded {
            kind: RandomKind::Gaussian,
            seed,
        }
    }

    fn draw(&self, n: usize) -> Result<ModulationSeq<T>> {
        match self {
            &DiagonalSource::Seeded { kind, seed } => Ok(random_diagonal(kind, n, seed)),
            DiagonalSource::Explicit(seq) if seq.len() == n => Ok(seq.clone()),
            DiagonalSource::Explicit(seq) => Err(Error::DimensionMismatch {
                expected: n,
                got: seq.len(),
                context: "explicit diagonal length".into(),
            }),
        }
    }
}

/// Sparsifying basis `Ψ`: either an analysis transform `T` or its adjoint.
///
/// Signals "sparse in basis k" use the synthesis convention `Ψ = T_k*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Basis {
    pub kind: OrthoKind,
    pub adjoint: bool,
}

impl Basis {
    pub fn synthesis(kind: OrthoKind) -> Self {
        Self {
            kind,
            adjoint: true,
        }
    }

    pub fn analysis(kind: OrthoKind) -> Self {
        Self {
            kind,
            adjoint: false,
        }
    }

    pub fn identity() -> Self {
        Self::synthesis(OrthoKind::Identity)
    }

    pub fn operator<T: Real>(&self, n: usize) -> Result<Op<T>> {
        let t = ortho_operator(self.kind, n)?;
        Ok(if self.adjoint && self.kind != OrthoKind::Identity {
            adjoint_of(t)
        } else {
            t
        })
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.adjoint {
            write!(f, "{}*", self.kind)
        } else {
            write!(f, "{}", self.kind)
        }
    }
}

/// Deterministic phase modulation `Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Lambda {
    /// `Λ = I`.
    None,
    /// `Λ = diag(a)` for the Rudin–Shapiro `a` sequence.
    Golay,
}

impl Lambda {
    fn values<T: Real>(self, n: usize) -> Result<ModulationSeq<T>> {
        match self {
            Lambda::None => Ok(ModulationSeq::ones(n)),
            Lambda::Golay => {
                if !is_power_of_two(n) {
                    return Err(Error::NotPowerOfTwo {
                        len: n,
                        context: "golay modulation length",
                    });
                }
                Ok(rudin_shapiro_pair(n.trailing_zeros()).a_modulation())
            }
        }
    }
}

impl fmt::Display for Lambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lambda::None => "none",
            Lambda::Golay => "golay",
        })
    }
}

impl FromStr for Lambda {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "identity" => Ok(Lambda::None),
            "golay" => Ok(Lambda::Golay),
            other => Err(Error::InvalidParameter(format!(
                "unknown lambda '{other}' (none|golay)"
            ))),
        }
    }
}

/// `(m, ñ, n)`: measurements, frame width, signal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelDims {
    pub m: usize,
    pub ntilde: usize,
    pub n: usize,
}

/// `A = U · D · B` with its factors.
#[derive(Debug, Clone)]
pub struct SensingModel<T: Real> {
    id: ModelId,
    op: Op<T>,
    utf: UtfOperator<T>,
    diag: ModulationSeq<T>,
    basis: Op<T>,
    basis_desc: String,
}

impl<T: Real> SensingModel<T> {
    fn assemble(
        id: ModelId,
        utf: UtfOperator<T>,
        diag: ModulationSeq<T>,
        basis: Op<T>,
        basis_desc: String,
    ) -> Result<Self> {
        let d: Op<T> = Arc::new(Diagonal::labelled(diag.values().to_vec(), "D"));
        let op = compose(vec![utf.op().clone(), d, basis.clone()])?;
        Ok(Self {
            id,
            op,
            utf,
            diag,
            basis,
            basis_desc,
        })
    }

    pub fn id(&self) -> ModelId {
        self.id
    }

    /// The composed operator `A`.
    pub fn op(&self) -> &Op<T> {
        &self.op
    }

    pub fn utf(&self) -> &UtfOperator<T> {
        &self.utf
    }

    pub fn diag(&self) -> &ModulationSeq<T> {
        &self.diag
    }

    /// The column-orthonormal factor `B`.
    pub fn basis(&self) -> &Op<T> {
        &self.basis
    }

    pub fn basis_desc(&self) -> &str {
        &self.basis_desc
    }

    pub fn dims(&self) -> ModelDims {
        ModelDims {
            m: self.utf.rows(),
            ntilde: self.utf.cols(),
            n: self.basis.cols(),
        }
    }
}

fn check_pow2(n: usize, context: &'static str) -> Result<()> {
    if is_power_of_two(n) {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo { len: n, context })
    }
}

fn nonzero(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        Err(Error::InvalidParameter(format!("{name} must be positive")))
    } else {
        Ok(())
    }
}

/// Optional `F·Λ·Ψ` replacement for the permuted DFT in random demodulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DemodTail {
    pub lambda: Lambda,
    pub psi: Basis,
}

/// `A = P1 · Σ · F̃` (or `P1 · Σ · F · Λ · Ψ` with a tail), `n = m q`.
///
/// Without a tail, lengths that are not powers of two use a direct DFT.
pub fn random_demodulation<T: Real>(
    m: usize,
    q: usize,
    diag: DiagonalSource<T>,
    tail: Option<DemodTail>,
) -> Result<SensingModel<T>> {
    nonzero("m", m)?;
    nonzero("q", q)?;
    let n = m * q;
    let utf = build_utf(&UtfSpec::P1 { m, q })?;
    let (basis, desc): (Op<T>, String) = match tail {
        None => (
            Arc::new(PermutedFourier::with_direct_fallback(n)?),
            "F~".into(),
        ),
        Some(t) => {
            check_pow2(n, "random demodulation with a basis tail")?;
            let lam: Op<T> = Arc::new(Diagonal::labelled(t.lambda.values(n)?.into_values(), "Λ"));
            (
                compose(vec![Arc::new(Fourier::new(n)?), lam, t.psi.operator(n)?])?,
                format!("F·Λ({})·Ψ({})", t.lambda, t.psi),
            )
        }
    };
    SensingModel::assemble(ModelId::RandomDemodulation, utf, diag.draw(n)?, basis, desc)
}

/// `A = P2 · diag(g̃) · (I_L ⊗ F_(1:q))` with `m`-point DFTs, `ñ = mL`, `n = qL`.
pub fn random_probing<T: Real>(
    m: usize,
    q: usize,
    l: usize,
    diag: DiagonalSource<T>,
) -> Result<SensingModel<T>> {
    check_pow2(m, "random probing channel length m")?;
    nonzero("q", q)?;
    nonzero("L", l)?;
    if q > m {
        return Err(Error::InvalidParameter(format!(
            "random probing needs q <= m (q = {q}, m = {m})"
        )));
    }
    let utf = build_utf(&UtfSpec::P2 { m, l })?;
    let first_cols = adjoint_of(Arc::new(Subsample::new(SubsampleSet::contiguous(q, m)?)));
    let fq = compose(vec![Arc::new(Fourier::new(m)?), first_cols])?;
    let q_op: Op<T> = Arc::new(BlockDiagonal::kron_identity(l, fq)?);
    SensingModel::assemble(
        ModelId::RandomProbing,
        utf,
        diag.draw(m * l)?,
        q_op,
        "I_L⊗F_(1:q)".into(),
    )
}

/// `A = P3 · diag(σ̃) · blkdiag(Ψ_0, …, Ψ_{L−1})`, `n = mL`.
///
/// `bases` holds one basis per channel, or a single basis shared by all.
pub fn compressive_multiplexing<T: Real>(
    m: usize,
    l: usize,
    diag: DiagonalSource<T>,
    bases: &[Basis],
) -> Result<SensingModel<T>> {
    nonzero("m", m)?;
    nonzero("L", l)?;
    let per_channel: Vec<Basis> = match bases.len() {
        0 => vec![Basis::analysis(OrthoKind::Fourier); l],
        1 => vec![bases[0]; l],
        k if k == l => bases.to_vec(),
        k => {
            return Err(Error::InvalidParameter(format!(
                "expected 1 or L = {l} channel bases, got {k}"
            )))
        }
    };
    let utf = build_utf(&UtfSpec::P3 { m, l })?;
    let blocks = per_channel
        .iter()
        .map(|b| b.operator(m))
        .collect::<Result<Vec<_>>>()?;
    let desc = per_channel
        .iter()
        .map(|b| b.to_string())
        .collect::<Vec<_>>()
        .join(",");
    let basis: Op<T> = Arc::new(BlockDiagonal::new(blocks)?);
    SensingModel::assemble(
        ModelId::CompressiveMultiplexing,
        utf,
        diag.draw(m * l)?,
        basis,
        format!("blkdiag[{desc}]"),
    )
}

/// `A = √(n/m) · R_Ω · E · D · Ψ` for any (deterministic) `Ω ⊂ [n]`.
pub fn arbitrary_subsampled<T: Real>(
    omega: &SubsampleSet,
    base: UnitaryBase,
    psi: Basis,
    diag: DiagonalSource<T>,
) -> Result<SensingModel<T>> {
    let n = omega.ambient();
    let utf = build_utf(&UtfSpec::PartialUnitary {
        omega: omega.clone(),
        base,
    })?;
    SensingModel::assemble(
        ModelId::ArbitrarySubsampled,
        utf,
        diag.draw(n)?,
        psi.operator(n)?,
        format!("Ψ({psi})"),
    )
}

/// `A = P4 · diag(ξ̃) · Ψ` with `P4 = √(q/p) · I_L ⊗ (R_Ω E)`, `Ω ⊂ [q]`.
pub fn block_diagonal<T: Real>(
    omega: &SubsampleSet,
    l: usize,
    base: UnitaryBase,
    psi: Basis,
    diag: DiagonalSource<T>,
) -> Result<SensingModel<T>> {
    nonzero("L", l)?;
    let n = omega.ambient() * l;
    let utf = build_utf(&UtfSpec::P4 {
        l,
        omega: omega.clone(),
        base,
    })?;
    SensingModel::assemble(
        ModelId::BlockDiagonal,
        utf,
        diag.draw(n)?,
        psi.operator(n)?,
        format!("Ψ({psi})"),
    )
}

/// `A = √(n/m) · R_Ω · F* · D · F · Λ · Ψ`, `n = 2^d`.
///
/// With `Λ = I` and `Ψ = I` this is the partial random circulant
/// `(1/√m) R_Ω H_ε` with `ε = F* ξ`.
pub fn golay_convolutional<T: Real>(
    omega: &SubsampleSet,
    golay_d: u32,
    lambda: Lambda,
    psi: Basis,
    diag: DiagonalSource<T>,
) -> Result<SensingModel<T>> {
    let n = 1usize << golay_d;
    if omega.ambient() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: omega.ambient(),
            context: "Ω ambient dimension vs 2^golay_d".into(),
        });
    }
    let utf = build_utf(&UtfSpec::PartialUnitary {
        omega: omega.clone(),
        base: UnitaryBase::Fourier,
    })?;
    // U = √(n/m) R_Ω F*: conjugate the partial-Fourier frame's DFT.
    let utf = conjugate_partial_fourier(utf, omega)?;
    let lam: Op<T> = Arc::new(Diagonal::labelled(lambda.values(n)?.into_values(), "Λ"));
    let basis = compose(vec![Arc::new(Fourier::new(n)?), lam, psi.operator(n)?])?;
    SensingModel::assemble(
        ModelId::GolayConvolutional,
        utf,
        diag.draw(n)?,
        basis,
        format!("F·Λ({lambda})·Ψ({psi})"),
    )
}

fn conjugate_partial_fourier<T: Real>(
    utf: UtfOperator<T>,
    omega: &SubsampleSet,
) -> Result<UtfOperator<T>> {
    let n = omega.ambient();
    let m = omega.len();
    let inner = compose(vec![
        Arc::new(Subsample::new(omega.clone())),
        Arc::new(Fourier::inverse(n)?),
    ])?;
    let op = crate::operators::scaled(
        inner,
        (T::from_usize_lossy(n) / T::from_usize_lossy(m)).sqrt(),
    );
    Ok(utf.with_op(op))
}

/// OFDM pilot scheme `A = P1 · Σ · F* · Λ · F`, `n = m q = 2^d`.
pub fn ofdm_model<T: Real>(
    n: usize,
    m: usize,
    golay_d: u32,
    lambda: Lambda,
    diag: DiagonalSource<T>,
) -> Result<SensingModel<T>> {
    if n != 1usize << golay_d {
        return Err(Error::InvalidParameter(format!(
            "ofdm needs n = 2^golay_d (n = {n}, d = {golay_d})"
        )));
    }
    nonzero("m", m)?;
    if !n.is_multiple_of(m) {
        return Err(Error::InvalidParameter(format!(
            "ofdm needs m | n (m = {m}, n = {n})"
        )));
    }
    let utf = build_utf(&UtfSpec::P1 { m, q: n / m })?;
    let lam: Op<T> = Arc::new(Diagonal::labelled(lambda.values(n)?.into_values(), "Λ"));
    let basis = compose(vec![
        Arc::new(Fourier::inverse(n)?),
        lam,
        Arc::new(Fourier::new(n)?),
    ])?;
    SensingModel::assemble(
        ModelId::Ofdm,
        utf,
        diag.draw(n)?,
        basis,
        format!("F*·Λ({lambda})·F"),
    )
}

/// How a deterministic (or random) subsampler is chosen.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OmegaChoice {
    /// `{0, …, m−1}`.
    #[default]
    Contiguous,
    /// `{⌊jn/m⌋}`.
    Stride,
    /// Uniform random subset drawn from the model seed.
    Random,
    Explicit(Vec<usize>),
}

impl OmegaChoice {
    pub fn resolve(&self, m: usize, n: usize, seed: u64) -> Result<SubsampleSet> {
        match self {
            OmegaChoice::Contiguous => SubsampleSet::contiguous(m, n),
            OmegaChoice::Stride => SubsampleSet::uniform_stride(m, n),
            OmegaChoice::Random => SubsampleSet::random(m, n, seed),
            OmegaChoice::Explicit(ix) => {
                let set = SubsampleSet::from_unsorted(ix.clone(), n)?;
                if set.len() != m {
                    return Err(Error::InvalidIndexSet(format!(
                        "explicit Ω has {} indices, expected {m}",
                        set.len()
                    )));
                }
                Ok(set)
            }
        }
    }
}

impl fmt::Display for OmegaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaChoice::Contiguous => f.write_str("contiguous"),
            OmegaChoice::Stride => f.write_str("stride"),
            OmegaChoice::Random => f.write_str("random"),
            OmegaChoice::Explicit(ix) => write!(f, "explicit[{}]", ix.len()),
        }
    }
}

impl FromStr for OmegaChoice {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "contiguous" => Ok(OmegaChoice::Contiguous),
            "stride" => Ok(OmegaChoice::Stride),
            "random" => Ok(OmegaChoice::Random),
            other => Err(Error::InvalidParameter(format!(
                "unknown Ω choice '{other}' (contiguous|stride|random)"
            ))),
        }
    }
}

/// Declarative model selection shared by the CLI and the experiment harness.
///
/// Model parameters derived from `(n, m)`:
/// `rd`: `q = n/m`; `rp`: `q = n/L` (default `L = max(2, n/m)`); `cmux`: `L = n/m`;
/// `bdiag`: `p = m/L`, `q = n/L` (default `L = 4`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub id: ModelId,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    /// Sparsity basis `Ψ = T*`; `None` keeps the model's own default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<OrthoKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Lambda>,
    #[serde(default)]
    pub omega: OmegaChoice,
    #[serde(default = "default_base")]
    pub base: UnitaryBase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<RandomKind>,
}

fn default_base() -> UnitaryBase {
    UnitaryBase::Fourier
}

impl ModelSpec {
    pub fn new(id: ModelId, n: usize, m: usize) -> Self {
        Self {
            id,
            n,
            m,
            l: None,
            basis: None,
            lambda: None,
            omega: OmegaChoice::Contiguous,
            base: UnitaryBase::Fourier,
            diag: None,
        }
    }

    pub fn with_basis(mut self, kind: OrthoKind) -> Self {
        self.basis = Some(kind);
        self
    }

    pub fn with_lambda(mut self, lambda: Lambda) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_omega(mut self, omega: OmegaChoice) -> Self {
        self.omega = omega;
        self
    }

    pub fn with_l(mut self, l: usize) -> Self {
        self.l = Some(l);
        self
    }

    fn psi(&self) -> Basis {
        Basis::synthesis(self.basis.unwrap_or(OrthoKind::Identity))
    }

    fn divide(&self, what: &str, a: usize, b: usize) -> Result<usize> {
        if b == 0 || !a.is_multiple_of(b) {
            return Err(Error::InvalidParameter(format!(
                "model {}: {what} requires {b} to divide {a}",
                self.id
            )));
        }
        Ok(a / b)
    }

    /// Builds the model; `seed` drives the diagonal (and a random `Ω`).
    pub fn build<T: Real>(&self, seed: u64) -> Result<SensingModel<T>> {
        let (n, m) = (self.n, self.m);
        nonzero("n", n)?;
        nonzero("m", m)?;
        if m > n {
            return Err(Error::InvalidParameter(format!(
                "need m <= n (m = {m}, n = {n})"
            )));
        }
        let diag = |default: RandomKind| DiagonalSource::Seeded {
            kind: self.diag.unwrap_or(default),
            seed,
        };
        let radem = RandomKind::Rademacher;
        match self.id {
            ModelId::RandomDemodulation => {
                let q = self.divide("q = n/m", n, m)?;
                let tail = if self.basis.is_some() || self.lambda.is_some() {
                    Some(DemodTail {
                        lambda: self.lambda.unwrap_or(Lambda::None),
                        psi: self.psi(),
                    })
                } else {
                    None
                };
                random_demodulation(m, q, diag(radem), tail)
            }
            ModelId::RandomProbing => {
                let l = self.l.unwrap_or((n / m).max(2));
                let q = self.divide("q = n/L", n, l)?;
                random_probing(m, q, l, diag(RandomKind::Gaussian))
            }
            ModelId::CompressiveMultiplexing => {
                let l = self.divide("L = n/m", n, m)?;
                let bases: Vec<Basis> = self.basis.map(Basis::synthesis).into_iter().collect();
                compressive_multiplexing(m, l, diag(radem), &bases)
            }
            ModelId::ArbitrarySubsampled => {
                let omega = self.omega.resolve(m, n, seed)?;
                arbitrary_subsampled(&omega, self.base, self.psi(), diag(radem))
            }
            ModelId::BlockDiagonal => {
                let l = self.l.unwrap_or(4);
                let p = self.divide("p = m/L", m, l)?;
                let q = self.divide("q = n/L", n, l)?;
                let omega = self.omega.resolve(p, q, seed)?;
                block_diagonal(&omega, l, self.base, self.psi(), diag(radem))
            }
            ModelId::GolayConvolutional => {
                check_pow2(n, "golay-conv signal length")?;
                let omega = self.omega.resolve(m, n, seed)?;
                golay_convolutional(
                    &omega,
                    n.trailing_zeros(),
                    self.lambda.unwrap_or(Lambda::Golay),
                    self.psi(),
                    diag(radem),
                )
            }
            ModelId::Ofdm => {
                check_pow2(n, "ofdm carrier count")?;
                ofdm_model(
                    n,
                    m,
                    n.trailing_zeros(),
                    self.lambda.unwrap_or(Lambda::Golay),
                    diag(radem),
                )
            }
        }
    }
}
