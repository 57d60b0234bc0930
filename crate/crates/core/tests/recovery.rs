mod common;

use common::*;
use modframe::experiments::random_sparse_signal;
use modframe::models::{ModelId, ModelSpec};
use modframe::operators::{DenseOperator, LinearOperator};
use modframe::recovery::{lsq_on_support, nmse, omp, subspace_pursuit, RecoveryResult, Solver};

fn check_invariants(a: &dyn LinearOperator<f64>, y: &[C], s: usize, r: &RecoveryResult<f64>) {
    assert!(r.support.len() <= s);
    for (j, v) in r.xhat.iter().enumerate() {
        if !r.support.contains(j) {
            assert_eq!(*v, C::new(0.0, 0.0));
        }
    }
    let ax = a.apply(&r.xhat);
    let resid: Vec<C> = y.iter().zip(&ax).map(|(p, q)| p - q).collect();
    assert!((norm(&resid) - r.residual_norm).abs() <= 1e-9 * norm(y).max(1.0));
}

#[test]
fn invariants_hold_on_random_instances() {
    for trial in 0..1000u64 {
        let a = DenseOperator::new(from_na(&gaussian_matrix(16, 32, trial)));
        let s = 1 + (trial % 5) as usize;
        let (x, _) = random_sparse_signal(32, s, trial).unwrap();
        let mut y = a.apply(&x);
        if trial % 2 == 1 {
            y = modframe::experiments::add_awgn(&y, 15.0, trial);
        }
        for solver in [Solver::Omp, Solver::Sp] {
            let r = solver.solve(&a, &y, s).unwrap();
            check_invariants(&a, &y, s, &r);
        }
    }
}

#[test]
fn demodulation_monte_carlo() {
    let (mut omp_hits, mut sp_hits) = (0, 0);
    let trials = 200;
    for seed in 0..trials {
        let model = ModelSpec::new(ModelId::RandomDemodulation, 64, 32)
            .build::<f64>(seed)
            .unwrap();
        let a = model.op().as_ref();
        let (x, support) = random_sparse_signal(64, 3, seed).unwrap();
        let y = a.apply(&x);
        let r = omp(a, &y, 3).unwrap();
        if r.support == support {
            omp_hits += 1;
            assert!(nmse(&x, &r.xhat).unwrap() < -160.0);
        }
        if subspace_pursuit(a, &y, 3).unwrap().support == support {
            sp_hits += 1;
        }
    }
    let (po, ps) = (
        omp_hits as f64 / trials as f64,
        sp_hits as f64 / trials as f64,
    );
    assert!(po >= 0.95, "omp {po}");
    assert!((po - ps).abs() <= 0.05, "omp {po} vs sp {ps}");
}

#[test]
fn exact_support_gives_exact_values() {
    for seed in 0..50 {
        let a = DenseOperator::new(from_na(&gaussian_matrix(20, 40, seed)));
        let (x, support) = random_sparse_signal(40, 4, seed).unwrap();
        let y = a.apply(&x);
        for solver in [Solver::Omp, Solver::Sp] {
            let r = solver.solve(&a, &y, 4).unwrap();
            if r.support == support {
                assert!(max_diff(&r.xhat, &x) <= 1e-8 * norm(&x));
                assert!(r.converged);
            }
        }
        let z = lsq_on_support(&a, &y, &support).unwrap();
        let restricted: Vec<C> = support.indices().iter().map(|&j| x[j]).collect();
        assert!(max_diff(&z, &restricted) <= 1e-8 * norm(&x));
    }
}

#[test]
fn subspace_pursuit_residuals_never_increase() {
    for seed in 0..200 {
        let a = DenseOperator::new(from_na(&gaussian_matrix(12, 40, seed)));
        let (x, _) = random_sparse_signal(40, 5, seed).unwrap();
        let y = modframe::experiments::add_awgn(&a.apply(&x), 5.0, seed);
        let r = subspace_pursuit(&a, &y, 5).unwrap();
        assert_eq!(r.residual_history.len(), r.iterations + 1);
        assert!(r.residual_history.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*r.residual_history.last().unwrap(), r.residual_norm);
    }
}

#[test]
fn orthonormal_columns_recover_in_s_steps() {
    let f = modframe::operators::Fourier::<f64>::new(32).unwrap();
    let (x, support) = random_sparse_signal(32, 6, 3).unwrap();
    let r = omp(&f, &f.apply(&x), 6).unwrap();
    assert_eq!(r.support, support);
    assert_eq!(r.iterations, 6);
}

#[test]
fn solvers_are_deterministic() {
    let a = DenseOperator::new(from_na(&gaussian_matrix(16, 48, 5)));
    let (x, _) = random_sparse_signal(48, 5, 5).unwrap();
    let y = modframe::experiments::add_awgn(&a.apply(&x), 10.0, 5);
    for solver in [Solver::Omp, Solver::Sp] {
        let r1 = solver.solve(&a, &y, 5).unwrap();
        let r2 = std::thread::spawn({
            let a = a.clone();
            let y = y.clone();
            move || solver.solve(&a, &y, 5).unwrap()
        })
        .join()
        .unwrap();
        assert_eq!(r1, r2);
    }
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn solver_results_are_consistent(m in 4usize..24, extra in 0usize..24, s in 1usize..4, seed in any::<u64>()) {
            let n = m + extra;
            let s = s.min(m);
            let a = DenseOperator::new(from_na(&gaussian_matrix(m, n, seed)));
            let (x, _) = random_sparse_signal(n, s, seed).unwrap();
            let y = a.apply(&x);
            for r in [omp(&a, &y, s).unwrap(), subspace_pursuit(&a, &y, s).unwrap()] {
                check_invariants(&a, &y, s, &r);
                prop_assert!(r.residual_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            }
        }
    }
}
