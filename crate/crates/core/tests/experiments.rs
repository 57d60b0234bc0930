mod common;

use std::sync::Arc;

use common::*;
use modframe::experiments::{
    read_csv, round_sig, run, run_basis_compatibility, run_coherence_report, run_ofdm_experiment,
    run_phase_transition, run_phase_transition_with, write_csv, ExperimentConfig, ExperimentKind,
    ResultRow,
};
use modframe::models::ModelId;
use modframe::operators::{DenseOperator, Op, OrthoKind};
use modframe::Result;

fn csv_bytes(cfg: &ExperimentConfig) -> Vec<u8> {
    let rows = run(cfg).unwrap();
    let mut buf = Vec::new();
    write_csv(&mut buf, cfg, &rows).unwrap();
    buf
}

fn small(kind: ExperimentKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    match kind {
        ExperimentKind::Coherence => cfg.n = vec![8, 16, 32],
        ExperimentKind::Ofdm => {
            cfg.n = vec![256];
            cfg.m = vec![32];
            cfg.trials = 12;
        }
        ExperimentKind::Ric => cfg.trials = 3,
        _ => {
            cfg.n = vec![64];
            cfg.m = vec![16, 32];
            cfg.s = vec![2, 3];
            cfg.trials = 12;
            cfg.snr_db = vec![10.0, f64::INFINITY];
        }
    }
    cfg.base_seed = 1234;
    cfg
}

const KINDS: [ExperimentKind; 6] = [
    ExperimentKind::Coherence,
    ExperimentKind::Ric,
    ExperimentKind::Recover,
    ExperimentKind::PhaseTransition,
    ExperimentKind::BasisCompat,
    ExperimentKind::Ofdm,
];

#[test]
fn csv_round_trip() {
    for kind in KINDS {
        let cfg = small(kind);
        let rows = run(&cfg).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &cfg, &rows).unwrap();
        let (echo, back) = read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rows, "{kind}");
        let json: serde_json::Value = serde_json::from_str(&echo).unwrap();
        let parsed: ExperimentConfig = serde_json::from_value(json["config"].clone()).unwrap();
        assert_eq!(parsed, cfg);
        assert!(json["noise"].as_str().unwrap().contains("sigma^2"));
    }
}

#[test]
fn csv_layout() {
    let bytes = csv_bytes(&small(ExperimentKind::Ofdm));
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# {"));
    assert!(lines.next().unwrap().starts_with("experiment,model,n,m,s"));
    for line in lines {
        for field in line.split(',') {
            if field.contains('.') || field.contains('e') {
                if let Ok(v) = field.parse::<f64>() {
                    assert_eq!(round_sig(v), v, "{field}");
                }
            }
        }
    }
}

#[test]
fn byte_identical_across_thread_counts() {
    for kind in KINDS {
        let cfg = small(kind);
        let one = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let four = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = one.install(|| csv_bytes(&cfg));
        let b = four.install(|| csv_bytes(&cfg));
        let c = csv_bytes(&cfg);
        assert_eq!(a, b, "{kind}");
        assert_eq!(a, c, "{kind}");
    }
}

#[test]
fn different_seeds_give_different_results() {
    let mut cfg = small(ExperimentKind::Recover);
    let a = run(&cfg).unwrap();
    cfg.base_seed += 1;
    let b = run(&cfg).unwrap();
    assert_ne!(a, b);
}

#[test]
fn ofdm_sweep_properties() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ofdm);
    cfg.base_seed = 7;
    let rows = run_ofdm_experiment(&cfg).unwrap();
    assert_eq!(rows.len(), 4);
    let rates: Vec<f64> = rows.iter().map(|r| r.success_rate.unwrap()).collect();
    assert!(rates.windows(2).all(|w| w[1] >= w[0] - 0.03), "{rates:?}");
    for r in &rows {
        assert!(r.papr_golay.unwrap() <= 2.0);
        assert!(r.papr_random.unwrap() > r.papr_golay.unwrap());
    }
}

#[test]
fn random_phase_pilot_has_higher_papr() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ofdm);
    cfg.trials = 1;
    cfg.snr_db = vec![30.0];
    let higher = (0..100)
        .filter(|&seed| {
            cfg.base_seed = seed;
            let row = &run_ofdm_experiment(&cfg).unwrap()[0];
            row.papr_random.unwrap() > row.papr_golay.unwrap()
        })
        .count();
    assert!(higher >= 95, "{higher}");
}

#[test]
fn coherence_report_rows() {
    let rows = run_coherence_report(&ExperimentConfig::new(ExperimentKind::Coherence)).unwrap();
    assert_eq!(rows.len(), 8 * 5);
    for r in &rows {
        assert_eq!(r.pass, Some(true), "{r:?}");
        let n = r.n as f64;
        match r.basis.unwrap() {
            OrthoKind::Identity => assert_eq!(r.mu.unwrap(), round_sig(1.0 / n.sqrt())),
            OrthoKind::Fourier => assert!(r.mu.unwrap() <= round_sig((2.0 / n).sqrt())),
            _ => {}
        }
    }
}

fn success(rows: &[ResultRow], m: usize, s: usize) -> f64 {
    rows.iter()
        .find(|r| r.m == Some(m) && r.s == Some(s))
        .unwrap()
        .success_rate
        .unwrap()
}

/// Measurement count at which the success curve first reaches 1/2, by linear
/// interpolation on the grid.
fn half_contour(rows: &[ResultRow], ms: &[usize], s: usize) -> f64 {
    let mut prev = (ms[0] as f64, success(rows, ms[0], s));
    if prev.1 >= 0.5 {
        return prev.0;
    }
    for &m in &ms[1..] {
        let cur = (m as f64, success(rows, m, s));
        if cur.1 >= 0.5 {
            return prev.0 + (0.5 - prev.1) * (cur.0 - prev.0) / (cur.1 - prev.1);
        }
        prev = cur;
    }
    f64::INFINITY
}

#[test]
fn phase_transition_trend_and_gaussian_baseline() {
    let ms = vec![8, 16, 32, 64, 128];
    let mut cfg = ExperimentConfig::new(ExperimentKind::PhaseTransition);
    cfg.n = vec![256];
    cfg.m = ms.clone();
    cfg.s = vec![4, 8];
    cfg.trials = 200;
    cfg.base_seed = 99;
    cfg.model = ModelId::RandomDemodulation;
    let rd = run_phase_transition(&cfg).unwrap();
    for &s in &cfg.s {
        let rates: Vec<f64> = ms.iter().map(|&m| success(&rd, m, s)).collect();
        assert!(
            rates.windows(2).all(|w| w[1] >= w[0] - 0.03),
            "s={s}: {rates:?}"
        );
    }
    let gaussian = |n: usize, m: usize, seed: u64| -> Result<Op<f64>> {
        Ok(Arc::new(DenseOperator::new(from_na(&gaussian_matrix(
            m, n, seed,
        )))))
    };
    let base = run_phase_transition_with(&cfg, &gaussian).unwrap();
    for &s in &cfg.s {
        let (a, b) = (half_contour(&rd, &ms, s), half_contour(&base, &ms, s));
        assert!((a - b).abs() <= 0.25 * b, "s={s}: rd {a} vs gaussian {b}");
    }
}

#[test]
fn full_sampling_single_atom() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::PhaseTransition);
    cfg.n = vec![64];
    cfg.m = vec![64];
    cfg.s = vec![1];
    cfg.trials = 50;
    for model in [
        ModelId::RandomDemodulation,
        ModelId::ArbitrarySubsampled,
        ModelId::GolayConvolutional,
        ModelId::Ofdm,
    ] {
        cfg.model = model;
        assert_eq!(
            run_phase_transition(&cfg).unwrap()[0].success_rate,
            Some(1.0),
            "{model}"
        );
    }
}

#[test]
fn identity_sparse_signals_survive_deterministic_rows() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::BasisCompat);
    cfg.trials = 100;
    cfg.bases = vec![OrthoKind::Identity];
    let rows = run_basis_compatibility(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!(r.success_rate.unwrap() > 0.9, "{r:?}");
    }
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ofdm);
    cfg.n = vec![1000];
    assert!(run(&cfg).is_err());
    let mut cfg = ExperimentConfig::new(ExperimentKind::PhaseTransition);
    cfg.s = vec![100];
    cfg.m = vec![64];
    assert!(run(&cfg).is_err());
    let mut cfg = ExperimentConfig::new(ExperimentKind::Ofdm);
    cfg.n = vec![128];
    cfg.m = vec![16];
    assert!(run(&cfg).unwrap_err().is_config_error());
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn rounding_is_idempotent_and_close(v in prop::num::f64::NORMAL) {
            let r = round_sig(v);
            prop_assert_eq!(round_sig(r), r);
            prop_assert!((r - v).abs() <= 5e-9 * v.abs());
        }
    }
}
