use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modframe::analysis::RicMethod;
use modframe::experiments::{self, ExperimentConfig, ExperimentKind};
use modframe::models::{Lambda, ModelId, OmegaChoice};
use modframe::operators::OrthoKind;
use modframe::recovery::Solver;
use modframe::sequences::{rudin_shapiro_pair, verify_golay_pair};
use modframe::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "modframe",
    version,
    about = "Structured compressed sensing experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a Rudin–Shapiro Golay pair of length 2^d.
    Golay(GolayArgs),
    /// Coherence of Golay-modulated Fourier matrices against sparsity bases.
    Coherence(Common),
    /// Restricted isometry constant of a sensing model.
    Ric(RicArgs),
    /// Recover random sparse signals with a greedy solver.
    Recover(Common),
    /// Exact-support success rate over an (m, s) grid.
    PhaseTransition(Common),
    /// Recovery rate of convolutional schemes across sparsity bases.
    BasisCompat(Common),
    /// Sparse OFDM channel estimation with a Golay pilot.
    Ofdm(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    A,
    B,
    Both,
}

#[derive(Args)]
struct GolayArgs {
    /// Sequence length exponent.
    #[arg(long)]
    d: u32,
    /// Member to write; `both` writes `a,b` per line.
    #[arg(long, value_enum, default_value = "a")]
    emit: Emit,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RicArgs {
    #[command(flatten)]
    common: Common,
    /// exact (every support) or sampled
    #[arg(long, value_parser = parse_with::<RicMethod>)]
    method: Option<RicMethod>,
    /// Supports drawn by the sampled method.
    #[arg(long)]
    supports: Option<usize>,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Default)]
struct Common {
    /// Signal lengths (comma list).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    /// Length exponents, an alternative to --n (n = 2^d).
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u32>>,
    /// Measurement counts (comma list).
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<usize>>,
    /// Sparsity levels (comma list).
    #[arg(long, value_delimiter = ',')]
    s: Option<Vec<usize>>,
    /// rd, rp, cmux, asub, bdiag, golay-conv or ofdm.
    #[arg(long, value_parser = parse_with::<ModelId>)]
    model: Option<ModelId>,
    /// Sparsity bases (comma list): identity, fourier, permuted_fourier,
    /// hadamard, dct2, block_dct[:B], haar.
    #[arg(long, value_delimiter = ',', value_parser = parse_with::<OrthoKind>)]
    basis: Option<Vec<OrthoKind>>,
    /// Deterministic phase modulation: none or golay.
    #[arg(long, value_parser = parse_with::<Lambda>)]
    lambda: Option<Lambda>,
    /// Row subset: contiguous, stride or random.
    #[arg(long, value_parser = parse_with::<OmegaChoice>)]
    omega: Option<OmegaChoice>,
    /// Number of channels or blocks.
    #[arg(long)]
    l: Option<usize>,
    /// Base seed; trial t uses seed + t.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials per cell
    #[arg(long)]
    trials: Option<usize>,
    /// SNR grid in dB (comma list, `inf` for noiseless).
    #[arg(long = "snr-db", value_delimiter = ',', allow_hyphen_values = true)]
    snr_db: Option<Vec<f64>>,
    /// omp or sp.
    #[arg(long, value_parser = parse_with::<Solver>)]
    solver: Option<Solver>,
    /// Largest n for coherence scans.
    #[arg(long = "max-n")]
    max_n: Option<usize>,
    /// Add a wall-clock runtime column.
    #[arg(long)]
    timing: bool,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn config(self, kind: ExperimentKind) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::new(kind);
        match (self.n, self.d) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParameter("give --n or --d, not both".into()))
            }
            (Some(n), None) => cfg.n = n,
            (None, Some(d)) => {
                cfg.n =
                    d.into_iter()
                        .map(|d| {
                            1usize.checked_shl(d).filter(|_| d < 40).ok_or_else(|| {
                                Error::InvalidParameter(format!("--d {d} is too large"))
                            })
                        })
                        .collect::<Result<_, _>>()?
            }
            (None, None) => {}
        }
        if let Some(m) = self.m {
            cfg.m = m;
        }
        if let Some(s) = self.s {
            cfg.s = s;
        }
        if let Some(model) = self.model {
            cfg.model = model;
        }
        if let Some(b) = self.basis {
            cfg.bases = b;
        }
        if self.lambda.is_some() {
            cfg.lambda = self.lambda;
        }
        if let Some(o) = self.omega {
            cfg.omega = o;
        }
        cfg.l = self.l.or(cfg.l);
        if let Some(seed) = self.seed {
            cfg.base_seed = seed;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(snr) = self.snr_db {
            cfg.snr_db = snr;
        }
        if let Some(solver) = self.solver {
            cfg.solver = solver;
        }
        if let Some(max_n) = self.max_n {
            cfg.max_n = max_n;
        }
        cfg.timing = self.timing;
        cfg.out = self.out;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn emit(out: Option<&PathBuf>, bytes: &[u8]) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn golay(args: GolayArgs) -> Result<(), Error> {
    if args.d > 30 {
        return Err(Error::InvalidParameter(format!(
            "--d {} is too large",
            args.d
        )));
    }
    let pair = rudin_shapiro_pair(args.d);
    let check = verify_golay_pair(pair.a(), pair.b())?;
    if !check.ok {
        return Err(Error::Numerical(format!(
            "pair fails complementarity at lag {}",
            check.worst_k
        )));
    }
    let mut text = String::with_capacity(pair.len() * 6);
    for (a, b) in pair.a().iter().zip(pair.b()) {
        let line = match args.emit {
            Emit::A => format!("{a}\n"),
            Emit::B => format!("{b}\n"),
            Emit::Both => format!("{a},{b}\n"),
        };
        text.push_str(&line);
    }
    emit(args.out.as_ref(), text.as_bytes())
}

fn experiment(cfg: ExperimentConfig) -> Result<(), Error> {
    let rows = experiments::run(&cfg)?;
    let mut buf = Vec::new();
    experiments::write_csv(&mut buf, &cfg, &rows)?;
    emit(cfg.out.as_ref(), &buf)
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Golay(args) => golay(args),
        Command::Coherence(c) => experiment(c.config(ExperimentKind::Coherence)?),
        Command::Ric(args) => {
            let mut cfg = args.common.config(ExperimentKind::Ric)?;
            if let Some(method) = args.method {
                cfg.ric_method = method;
            }
            if let Some(k) = args.supports {
                cfg.num_supports = k;
            }
            cfg.validate()?;
            experiment(cfg)
        }
        Command::Recover(c) => experiment(c.config(ExperimentKind::Recover)?),
        Command::PhaseTransition(c) => experiment(c.config(ExperimentKind::PhaseTransition)?),
        Command::BasisCompat(c) => experiment(c.config(ExperimentKind::BasisCompat)?),
        Command::Ofdm(c) => experiment(c.config(ExperimentKind::Ofdm)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("modframe: {e}");
            ExitCode::from(if e.is_config_error() {
                EXIT_CONFIG
            } else {
                EXIT_NUMERICAL
            })
        }
    }
}
