//! Seeded Monte-Carlo experiments with CSV output.
//!
//! Every result is a pure function of its [`ExperimentConfig`]: trial `t`
//! draws all of its randomness from seed `base_seed + t`, trials run in
//! parallel but are collected in index order, and all aggregates are taken
//! over the collected arrays.

mod channel;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex;
use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use channel::{add_awgn, attc_channel, noise_variance, ATTC_TAPS};
pub use table::{
    config_echo, read_csv, read_csv_file, round_sig, write_csv, write_csv_file, ResultRow,
    NOISE_CONVENTION, SIGNIFICANT_DIGITS,
};

use crate::analysis::{empirical_ric, exact_ric, modulated_coherence_with_limit, RicMethod};
use crate::error::{Error, Result};
use crate::models::{Lambda, ModelId, ModelSpec, OmegaChoice};
use crate::operators::{materialize, LinearOperator, Op, OrthoKind, SubsampleSet};
use crate::recovery::{nmse, Solver};
use crate::rng::{seeded, stream};
use crate::scalar::is_power_of_two;
use crate::sequences::{
    papr, random_diagonal_on_stream, rudin_shapiro_pair, ModulationSeq, RandomKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Coherence,
    Ric,
    Recover,
    PhaseTransition,
    BasisCompat,
    Ofdm,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Coherence => "coherence",
            ExperimentKind::Ric => "ric",
            ExperimentKind::Recover => "recover",
            ExperimentKind::PhaseTransition => "phase-transition",
            ExperimentKind::BasisCompat => "basis-compat",
            ExperimentKind::Ofdm => "ofdm",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            ExperimentKind::Coherence,
            ExperimentKind::Ric,
            ExperimentKind::Recover,
            ExperimentKind::PhaseTransition,
            ExperimentKind::BasisCompat,
            ExperimentKind::Ofdm,
        ]
        .into_iter()
        .find(|k| k.as_str() == s.trim())
        .ok_or_else(|| Error::InvalidParameter(format!("unknown experiment '{s}'")))
    }
}

/// Serializes SNR lists with `+∞` written as the string `"inf"`.
mod snr_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Snr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|&x| {
                if x.is_finite() {
                    Snr::Finite(x)
                } else {
                    Snr::Named(format!("{x}"))
                }
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<Snr>::deserialize(d)?
            .into_iter()
            .map(|v| match v {
                Snr::Finite(x) => Ok(x),
                Snr::Named(s) => s.parse().map_err(serde::de::Error::custom),
            })
            .collect()
    }
}

/// Parses a comma-separated SNR list; `inf` means noiseless.
pub fn parse_snr_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad SNR value '{t}'")))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub model: ModelId,
    pub n: Vec<usize>,
    pub m: Vec<usize>,
    pub s: Vec<usize>,
    #[serde(with = "snr_list")]
    pub snr_db: Vec<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub solver: Solver,
    /// Sparsity bases (coherence, basis-compat) or the model basis (first
    /// entry, other experiments). Empty keeps each model's default.
    pub bases: Vec<OrthoKind>,
    pub lambda: Option<Lambda>,
    pub omega: OmegaChoice,
    pub l: Option<usize>,
    pub ric_method: RicMethod,
    pub num_supports: usize,
    /// Largest `n` scanned by the coherence report.
    pub max_n: usize,
    /// Adds a wall-clock `mean_runtime_ms` column (not reproducible).
    pub timing: bool,
    /// Destination file; not part of the echoed configuration.
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for `kind`.
    pub fn new(kind: ExperimentKind) -> Self {
        let mut cfg = Self {
            kind,
            model: ModelId::RandomDemodulation,
            n: vec![256],
            m: vec![64],
            s: vec![4],
            snr_db: vec![f64::INFINITY],
            trials: 100,
            base_seed: 0,
            solver: Solver::Sp,
            bases: Vec::new(),
            lambda: None,
            omega: OmegaChoice::Contiguous,
            l: None,
            ric_method: RicMethod::Exact,
            num_supports: 500,
            max_n: crate::analysis::DEFAULT_COHERENCE_MAX_N,
            timing: false,
            out: None,
        };
        match kind {
            ExperimentKind::Coherence => {
                cfg.n = (3..=10).map(|d| 1 << d).collect();
                cfg.bases = vec![
                    OrthoKind::Identity,
                    OrthoKind::Fourier,
                    OrthoKind::Dct2,
                    OrthoKind::block_dct(),
                    OrthoKind::Haar,
                ];
                cfg.lambda = Some(Lambda::Golay);
                cfg.trials = 1;
            }
            ExperimentKind::Ric => {
                cfg.n = vec![64];
                cfg.m = vec![16];
                cfg.s = vec![2];
                cfg.trials = 1;
            }
            ExperimentKind::Recover => cfg.trials = 1,
            ExperimentKind::PhaseTransition => {
                cfg.m = vec![16, 32, 48, 64, 96, 128];
                cfg.s = vec![2, 4, 8];
            }
            ExperimentKind::BasisCompat => {
                cfg.model = ModelId::GolayConvolutional;
                cfg.bases = vec![
                    OrthoKind::Identity,
                    OrthoKind::Fourier,
                    OrthoKind::Dct2,
                    OrthoKind::Haar,
                ];
            }
            ExperimentKind::Ofdm => {
                cfg.model = ModelId::Ofdm;
                cfg.n = vec![1024];
                cfg.m = vec![64];
                cfg.s = vec![6];
                cfg.snr_db = vec![0.0, 10.0, 20.0, 30.0];
                cfg.lambda = Some(Lambda::Golay);
            }
        }
        cfg
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: &[usize]| -> Result<()> {
            if v.is_empty() || v.contains(&0) {
                Err(Error::InvalidParameter(format!(
                    "{name} grid must be non-empty and positive"
                )))
            } else {
                Ok(())
            }
        };
        positive("n", &self.n)?;
        if self.kind != ExperimentKind::Coherence {
            positive("m", &self.m)?;
            positive("s", &self.s)?;
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.snr_db.is_empty()
            || self
                .snr_db
                .iter()
                .any(|x| x.is_nan() || *x == f64::NEG_INFINITY)
        {
            return Err(Error::InvalidParameter(
                "snr grid must be non-empty, finite or +inf".into(),
            ));
        }
        if self.kind == ExperimentKind::Ric
            && self.ric_method == RicMethod::Sampled
            && self.num_supports == 0
        {
            return Err(Error::InvalidParameter(
                "num_supports must be positive".into(),
            ));
        }
        Ok(())
    }

    fn model_spec(&self, n: usize, m: usize) -> ModelSpec {
        ModelSpec {
            id: self.model,
            n,
            m,
            l: self.l,
            basis: self.bases.first().copied(),
            lambda: self.lambda,
            omega: self.omega.clone(),
            base: crate::frames::UnitaryBase::Fourier,
            diag: None,
        }
    }

    fn cells(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for &n in &self.n {
            for &m in &self.m {
                for &s in &self.s {
                    out.push((n, m, s));
                }
            }
        }
        out
    }

    fn base_row(&self, n: usize, m: usize, s: usize) -> ResultRow {
        let mut row = ResultRow::new(self.kind, n);
        row.model = Some(self.model);
        row.m = Some(m);
        row.s = Some(s);
        row.trials = Some(self.trials);
        row.base_seed = Some(self.base_seed);
        row
    }

    fn trial_seed(&self, t: usize) -> u64 {
        self.base_seed.wrapping_add(t as u64)
    }
}

/// Runs the experiment named by `cfg.kind`.
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match cfg.kind {
        ExperimentKind::Coherence => run_coherence_report(cfg),
        ExperimentKind::Ric => run_ric(cfg),
        ExperimentKind::Recover => run_recover(cfg),
        ExperimentKind::PhaseTransition => run_phase_transition(cfg),
        ExperimentKind::BasisCompat => run_basis_compatibility(cfg),
        ExperimentKind::Ofdm => run_ofdm_experiment(cfg),
    }
}

/// `s`-sparse vector with uniform support and circular Gaussian amplitudes.
pub fn random_sparse_signal(
    n: usize,
    s: usize,
    seed: u64,
) -> Result<(Vec<Complex<f64>>, SubsampleSet)> {
    if s > n {
        return Err(Error::InvalidParameter(format!(
            "sparsity {s} exceeds length {n}"
        )));
    }
    let mut rng = seeded(seed, stream::SIGNAL);
    let support = SubsampleSet::from_unsorted(sample(&mut rng, n, s).into_vec(), n)?;
    let mut x = vec![Complex::new(0.0, 0.0); n];
    for &j in support.indices() {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        x[j] = Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
    }
    Ok((x, support))
}

struct Outcome {
    exact_support: bool,
    nmse_db: f64,
    residual_norm: f64,
    iterations: usize,
    runtime_ms: f64,
}

fn recover_once(
    a: &dyn LinearOperator<f64>,
    x: &[Complex<f64>],
    support: &SubsampleSet,
    snr_db: f64,
    s: usize,
    solver: Solver,
    seed: u64,
) -> Result<Outcome> {
    let y = add_awgn(&a.forward(x)?, snr_db, seed);
    let start = Instant::now();
    let r = solver.solve(a, &y, s)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(Outcome {
        exact_support: &r.support == support,
        nmse_db: nmse(x, &r.xhat)?,
        residual_norm: r.residual_norm,
        iterations: r.iterations,
        runtime_ms,
    })
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn fill_aggregates(row: &mut ResultRow, outcomes: &[Outcome], timing: bool) {
    let k = outcomes.len() as f64;
    row.success_rate = Some(outcomes.iter().filter(|o| o.exact_support).count() as f64 / k);
    row.median_nmse_db = Some(median(outcomes.iter().map(|o| o.nmse_db).collect()));
    if timing {
        row.mean_runtime_ms = Some(outcomes.iter().map(|o| o.runtime_ms).sum::<f64>() / k);
    }
    if let [only] = outcomes {
        row.residual_norm = Some(only.residual_norm);
        row.iterations = Some(only.iterations);
    }
}

fn finalize(rows: Vec<ResultRow>) -> Vec<ResultRow> {
    rows.into_iter().map(ResultRow::rounded).collect()
}

/// Coherence of `F · Λ · T*` for every `n` and basis, with its known bound.
pub fn run_coherence_report(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let lambda = cfg.lambda.unwrap_or(Lambda::Golay);
    let bases = if cfg.bases.is_empty() {
        ExperimentConfig::new(ExperimentKind::Coherence).bases
    } else {
        cfg.bases.clone()
    };
    let mut rows = Vec::new();
    for &n in &cfg.n {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                len: n,
                context: "coherence report length",
            });
        }
        let d = n.trailing_zeros();
        let seq: ModulationSeq<f64> = match lambda {
            Lambda::Golay => rudin_shapiro_pair(d).a_modulation(),
            Lambda::None => ModulationSeq::ones(n),
        };
        for &kind in &bases {
            let report = modulated_coherence_with_limit(&seq, kind, cfg.max_n)?;
            let mut row = ResultRow::new(cfg.kind, n);
            row.d = Some(d);
            row.basis = Some(kind);
            row.lambda = Some(lambda);
            row.mu = Some(report.mu);
            row.bound = report.bound;
            row.pass = Some(report.passes);
            rows.push(row);
        }
    }
    Ok(finalize(rows))
}

/// Restricted isometry constant per `(n, m, s)` cell, averaged over trials.
pub fn run_ric(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (n, m, s) in cfg.cells() {
        let spec = cfg.model_spec(n, m);
        let reports = (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let seed = cfg.trial_seed(t);
                let model = spec.build::<f64>(seed)?;
                match cfg.ric_method {
                    RicMethod::Exact => exact_ric(&materialize(model.op().as_ref())?, s),
                    RicMethod::Sampled => {
                        empirical_ric(model.op().as_ref(), s, cfg.num_supports, seed)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut row = cfg.base_row(n, m, s);
        row.ric_method = Some(cfg.ric_method);
        row.delta_s = Some(reports.iter().map(|r| r.delta_s).sum::<f64>() / reports.len() as f64);
        row.supports_evaluated = Some(reports[0].supports_evaluated.min(u64::MAX as u128) as u64);
        rows.push(row);
    }
    Ok(finalize(rows))
}

/// Builds the sensing operator for one trial.
pub trait OperatorFactory: Sync {
    fn build(&self, n: usize, m: usize, seed: u64) -> Result<Op<f64>>;
}

impl<F> OperatorFactory for F
where
    F: Fn(usize, usize, u64) -> Result<Op<f64>> + Sync,
{
    fn build(&self, n: usize, m: usize, seed: u64) -> Result<Op<f64>> {
        self(n, m, seed)
    }
}

fn sweep_with(cfg: &ExperimentConfig, factory: &dyn OperatorFactory) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    for (n, m, s) in cfg.cells() {
        if s > m || s > n {
            return Err(Error::InvalidParameter(format!(
                "need s <= m (s = {s}, m = {m})"
            )));
        }
        for &snr in &cfg.snr_db {
            let outcomes = (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let seed = cfg.trial_seed(t);
                    let a = factory.build(n, m, seed)?;
                    let (x, support) = random_sparse_signal(n, s, seed)?;
                    recover_once(a.as_ref(), &x, &support, snr, s, cfg.solver, seed)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut row = cfg.base_row(n, m, s);
            row.snr_db = Some(snr);
            row.solver = Some(cfg.solver);
            row.basis = cfg.bases.first().copied();
            row.lambda = cfg.lambda;
            fill_aggregates(&mut row, &outcomes, cfg.timing);
            rows.push(row);
        }
    }
    Ok(finalize(rows))
}

fn model_factory(
    cfg: &ExperimentConfig,
) -> impl Fn(usize, usize, u64) -> Result<Op<f64>> + Sync + '_ {
    move |n, m, seed| Ok(cfg.model_spec(n, m).build::<f64>(seed)?.op().clone())
}

/// Recovery of random sparse signals for every `(n, m, s, snr)` cell.
pub fn run_recover(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    sweep_with(cfg, &model_factory(cfg))
}

/// Noiseless exact-support success rate over the `(m, s)` grid.
pub fn run_phase_transition(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_phase_transition_with(cfg, &model_factory(cfg))
}

/// As [`run_phase_transition`] with a caller-supplied operator per trial.
pub fn run_phase_transition_with(
    cfg: &ExperimentConfig,
    factory: &dyn OperatorFactory,
) -> Result<Vec<ResultRow>> {
    let mut noiseless = cfg.clone();
    noiseless.snr_db = vec![f64::INFINITY];
    sweep_with(&noiseless, factory)
}

/// Convolutional sensing schemes compared by the basis-compatibility study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Random circulant, random rows.
    RandomRandom,
    /// Random circulant, contiguous rows.
    DeterministicRandom,
    /// Golay phase modulation before the random circulant, contiguous rows.
    DeterministicRandomGolay,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [
        Scheme::RandomRandom,
        Scheme::DeterministicRandom,
        Scheme::DeterministicRandomGolay,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::RandomRandom => "R+R",
            Scheme::DeterministicRandom => "D+R",
            Scheme::DeterministicRandomGolay => "D+R+Golay-PM",
        }
    }

    pub fn spec(self, n: usize, m: usize, basis: OrthoKind) -> ModelSpec {
        let (lambda, omega) = match self {
            Scheme::RandomRandom => (Lambda::None, OmegaChoice::Random),
            Scheme::DeterministicRandom => (Lambda::None, OmegaChoice::Contiguous),
            Scheme::DeterministicRandomGolay => (Lambda::Golay, OmegaChoice::Contiguous),
        };
        ModelSpec::new(ModelId::GolayConvolutional, n, m)
            .with_lambda(lambda)
            .with_omega(omega)
            .with_basis(basis)
    }
}

/// Noiseless recovery rate for each scheme and sparsity basis.
pub fn run_basis_compatibility(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let bases = if cfg.bases.is_empty() {
        ExperimentConfig::new(ExperimentKind::BasisCompat).bases
    } else {
        cfg.bases.clone()
    };
    let mut rows = Vec::new();
    for (n, m, s) in cfg.cells() {
        for scheme in Scheme::ALL {
            for &basis in &bases {
                let spec = scheme.spec(n, m, basis);
                let outcomes = (0..cfg.trials)
                    .into_par_iter()
                    .map(|t| {
                        let seed = cfg.trial_seed(t);
                        let model = spec.build::<f64>(seed)?;
                        let (x, support) = random_sparse_signal(n, s, seed)?;
                        recover_once(
                            model.op().as_ref(),
                            &x,
                            &support,
                            f64::INFINITY,
                            s,
                            cfg.solver,
                            seed,
                        )
                    })
                    .collect::<Result<Vec<_>>>()?;
                let mut row = cfg.base_row(n, m, s);
                row.model = Some(ModelId::GolayConvolutional);
                row.scheme = Some(scheme.label().to_string());
                row.basis = Some(basis);
                row.lambda = spec.lambda;
                row.solver = Some(cfg.solver);
                fill_aggregates(&mut row, &outcomes, cfg.timing);
                rows.push(row);
            }
        }
    }
    Ok(finalize(rows))
}

/// Sparse channel estimation with a Golay pilot: one row per SNR with the
/// exact-support rate, median NMSE and the pilot PAPRs.
pub fn run_ofdm_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let lambda = cfg.lambda.unwrap_or(Lambda::Golay);
    let mut rows = Vec::new();
    for (n, m, s) in cfg.cells() {
        if !is_power_of_two(n) {
            return Err(Error::NotPowerOfTwo {
                len: n,
                context: "ofdm carrier count",
            });
        }
        let d = n.trailing_zeros();
        let x = attc_channel::<f64>(n)?;
        let support = SubsampleSet::new(ATTC_TAPS.iter().map(|t| t.0).collect(), n)?;
        let golay_papr = papr(&rudin_shapiro_pair(d).a_modulation::<f64>())?;
        let random_pilot = random_diagonal_on_stream::<f64>(
            RandomKind::Steinhaus,
            n,
            cfg.base_seed,
            stream::PILOT,
        );
        let random_papr = papr(&random_pilot)?;
        let spec = ModelSpec::new(ModelId::Ofdm, n, m).with_lambda(lambda);
        let models = (0..cfg.trials)
            .into_par_iter()
            .map(|t| spec.build::<f64>(cfg.trial_seed(t)))
            .collect::<Result<Vec<_>>>()?;
        for &snr in &cfg.snr_db {
            let outcomes = models
                .par_iter()
                .enumerate()
                .map(|(t, model)| {
                    recover_once(
                        model.op().as_ref(),
                        &x,
                        &support,
                        snr,
                        s,
                        cfg.solver,
                        cfg.trial_seed(t),
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let mut row = cfg.base_row(n, m, s);
            row.model = Some(ModelId::Ofdm);
            row.d = Some(d);
            row.lambda = Some(lambda);
            row.snr_db = Some(snr);
            row.solver = Some(cfg.solver);
            row.papr_golay = Some(golay_papr);
            row.papr_random = Some(random_papr);
            fill_aggregates(&mut row, &outcomes, cfg.timing);
            rows.push(row);
        }
    }
    Ok(finalize(rows))
}
