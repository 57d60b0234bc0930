use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, ExperimentKind};
use crate::analysis::RicMethod;
use crate::error::Result;
use crate::models::{Lambda, ModelId};
use crate::operators::OrthoKind;
use crate::recovery::Solver;

/// Noise convention echoed into every CSV header.
pub const NOISE_CONVENTION: &str =
    "w ~ CN(0, sigma^2 I), sigma^2 = ||y_clean||^2 / (m * 10^(snr_db/10))";

/// Significant digits kept in every floating-point output column.
pub const SIGNIFICANT_DIGITS: usize = 9;

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .unwrap_or(x)
}

/// One flat output record. Columns that do not apply to an experiment are
/// left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub model: Option<ModelId>,
    pub n: usize,
    pub m: Option<usize>,
    pub s: Option<usize>,
    pub d: Option<u32>,
    pub basis: Option<OrthoKind>,
    pub scheme: Option<String>,
    pub lambda: Option<Lambda>,
    pub snr_db: Option<f64>,
    pub solver: Option<Solver>,
    pub trials: Option<usize>,
    pub base_seed: Option<u64>,
    pub success_rate: Option<f64>,
    pub median_nmse_db: Option<f64>,
    pub mean_runtime_ms: Option<f64>,
    pub mu: Option<f64>,
    pub bound: Option<f64>,
    pub pass: Option<bool>,
    pub delta_s: Option<f64>,
    pub ric_method: Option<RicMethod>,
    pub supports_evaluated: Option<u64>,
    pub residual_norm: Option<f64>,
    pub iterations: Option<usize>,
    pub papr_golay: Option<f64>,
    pub papr_random: Option<f64>,
}

impl ResultRow {
    pub fn new(experiment: ExperimentKind, n: usize) -> Self {
        Self {
            experiment,
            model: None,
            n,
            m: None,
            s: None,
            d: None,
            basis: None,
            scheme: None,
            lambda: None,
            snr_db: None,
            solver: None,
            trials: None,
            base_seed: None,
            success_rate: None,
            median_nmse_db: None,
            mean_runtime_ms: None,
            mu: None,
            bound: None,
            pass: None,
            delta_s: None,
            ric_method: None,
            supports_evaluated: None,
            residual_norm: None,
            iterations: None,
            papr_golay: None,
            papr_random: None,
        }
    }

    /// Every float column rounded to [`SIGNIFICANT_DIGITS`] digits.
    pub fn rounded(mut self) -> Self {
        for v in [
            &mut self.snr_db,
            &mut self.success_rate,
            &mut self.median_nmse_db,
            &mut self.mean_runtime_ms,
            &mut self.mu,
            &mut self.bound,
            &mut self.delta_s,
            &mut self.residual_norm,
            &mut self.papr_golay,
            &mut self.papr_random,
        ] {
            *v = v.map(round_sig);
        }
        self
    }
}

#[derive(Serialize)]
struct Echo<'a> {
    config: &'a ExperimentConfig,
    noise: &'static str,
}

/// The `#` comment line that opens every CSV.
pub fn config_echo(cfg: &ExperimentConfig) -> Result<String> {
    let json = serde_json::to_string(&Echo {
        config: cfg,
        noise: NOISE_CONVENTION,
    })
    .map_err(|e| crate::Error::Io(e.to_string()))?;
    Ok(format!("# {json}"))
}

/// Writes the config echo, a header line and one line per row (LF endings).
pub fn write_csv<W: Write>(mut out: W, cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(crate::Error::InvalidParameter(
            "no result rows to write".into(),
        ));
    }
    writeln!(out, "{}", config_echo(cfg)?)?;
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .has_headers(true)
        .from_writer(out);
    for row in rows {
        w.serialize(row.clone().rounded())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv_file(path: &Path, cfg: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    let mut buf = Vec::new();
    write_csv(&mut buf, cfg, rows)?;
    std::fs::write(path, buf)?;
    Ok(())
}

/// Parses a CSV produced by [`write_csv`]; returns the echo line (without
/// the leading `# `) and the rows.
pub fn read_csv<R: Read>(input: R) -> Result<(String, Vec<ResultRow>)> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let echo = first
        .strip_prefix("# ")
        .ok_or_else(|| crate::Error::Io("missing '# ' config line".into()))?
        .trim_end()
        .to_string();
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let rows = r
        .deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()?;
    Ok((echo, rows))
}

pub fn read_csv_file(path: &Path) -> Result<(String, Vec<ResultRow>)> {
    read_csv(File::open(path)?)
}
