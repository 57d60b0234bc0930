#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use modframe::operators::{
    compose, materialize, ortho_operator, Adjoint, BlockDiagonal, Circulant, DenseMatrix, Diagonal,
    Fourier, HStack, Identity, Integrator, LinearOperator, Op, OrthoKind, PermutedFourier, Scaled,
    Subsample, SubsampleSet,
};
use modframe::rng::seeded;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type C = Complex<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    seeded(seed, 99)
}

pub fn cvec(rng: &mut ChaCha8Rng, n: usize) -> Vec<C> {
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C::new(re, im)
        })
        .collect()
}

pub fn norm(v: &[C]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn dot(u: &[C], v: &[C]) -> C {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn max_diff(u: &[C], v: &[C]) -> f64 {
    assert_eq!(u.len(), v.len());
    u.iter()
        .zip(v)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max)
}

pub fn to_na(m: &DenseMatrix<f64>) -> DMatrix<C> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn na_max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn na_diag(d: &[C]) -> DMatrix<C> {
    DMatrix::from_fn(d.len(), d.len(), |i, j| {
        if i == j {
            d[i]
        } else {
            C::new(0.0, 0.0)
        }
    })
}

pub fn dense_of(op: &dyn LinearOperator<f64>) -> DMatrix<C> {
    to_na(&materialize(op).unwrap())
}

/// Unitary DFT straight from its definition.
pub fn dft(n: usize) -> DMatrix<C> {
    let s = 1.0 / (n as f64).sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        C::from_polar(s, -2.0 * PI * ((j * k) % n) as f64 / n as f64)
    })
}

pub fn idft(n: usize) -> DMatrix<C> {
    dft(n).adjoint()
}

/// Analysis DCT-II from the cosine table.
pub fn dct2(n: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |k, j| {
        let c = if k == 0 {
            (1.0 / n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
        };
        C::new(
            c * (PI * (2 * j + 1) as f64 * k as f64 / (2 * n) as f64).cos(),
            0.0,
        )
    })
}

pub fn hadamard(n: usize) -> DMatrix<C> {
    DMatrix::from_fn(n, n, |i, j| {
        let sign = if (i & j).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        C::new(sign / (n as f64).sqrt(), 0.0)
    })
}

/// Synthesis Haar matrix `W*` from the doubling recursion.
pub fn haar_synthesis(n: usize) -> DMatrix<C> {
    let mut w = DMatrix::from_element(1, 1, C::new(1.0, 0.0));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    while w.nrows() < n {
        let h = w.nrows();
        let mut next = DMatrix::from_element(2 * h, 2 * h, C::new(0.0, 0.0));
        for i in 0..h {
            for j in 0..h {
                next[(2 * i, j)] = w[(i, j)] * r;
                next[(2 * i + 1, j)] = w[(i, j)] * r;
            }
            next[(2 * i, h + i)] = C::new(r, 0.0);
            next[(2 * i + 1, h + i)] = C::new(-r, 0.0);
        }
        w = next;
    }
    w
}

/// Block-diagonal placement of `blocks`.
pub fn blkdiag(blocks: &[DMatrix<C>]) -> DMatrix<C> {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::from_element(rows, cols, C::new(0.0, 0.0));
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), b.shape()).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn hstack(blocks: &[DMatrix<C>]) -> DMatrix<C> {
    let rows = blocks[0].nrows();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::from_element(rows, cols, C::new(0.0, 0.0));
    let mut c = 0;
    for b in blocks {
        out.view_mut((0, c), b.shape()).copy_from(b);
        c += b.ncols();
    }
    out
}

/// Rows `omega` of the identity.
pub fn selector(omega: &[usize], n: usize) -> DMatrix<C> {
    DMatrix::from_fn(omega.len(), n, |i, j| {
        C::new(if omega[i] == j { 1.0 } else { 0.0 }, 0.0)
    })
}

/// `H_r` with entry `(j, k) = r[(j − k) mod n]`.
pub fn circulant(r: &[C]) -> DMatrix<C> {
    let n = r.len();
    DMatrix::from_fn(n, n, |j, k| r[(j + n - k) % n])
}

/// Dense analysis matrix for `kind`, built independently of the library.
pub fn analysis_matrix(kind: OrthoKind, n: usize) -> DMatrix<C> {
    match kind {
        OrthoKind::Identity => DMatrix::identity(n, n),
        OrthoKind::Fourier => dft(n),
        OrthoKind::PermutedFourier => {
            let f = dft(n);
            // Column c carries frequency 0, +1, -1, +2, ... in turn.
            DMatrix::from_fn(n, n, |j, c| {
                let freq = if c == 0 {
                    0
                } else if c % 2 == 1 {
                    c.div_ceil(2)
                } else {
                    n - c / 2
                };
                f[(j, freq % n)]
            })
        }
        OrthoKind::Hadamard => hadamard(n),
        OrthoKind::Dct2 => dct2(n),
        OrthoKind::BlockDct { block } => {
            let b = dct2(block);
            blkdiag(&vec![b; n / block])
        }
        OrthoKind::Haar => haar_synthesis(n).adjoint(),
    }
}

pub const ALL_KINDS: [OrthoKind; 7] = [
    OrthoKind::Identity,
    OrthoKind::Fourier,
    OrthoKind::PermutedFourier,
    OrthoKind::Hadamard,
    OrthoKind::Dct2,
    OrthoKind::BlockDct { block: 8 },
    OrthoKind::Haar,
];

fn kind_fits(kind: OrthoKind, n: usize) -> bool {
    kind.check_len(n).is_ok()
}

/// A named operator together with its independently built dense matrix.
pub struct Case {
    pub name: String,
    pub op: Op<f64>,
    pub dense: DMatrix<C>,
}

/// One instance of every operator constructor, with dense oracles.
pub fn operator_cases(seed: u64) -> Vec<Case> {
    let mut rng = rng(seed);
    let mut cases = Vec::new();
    let mut push =
        |name: String, op: Op<f64>, dense: DMatrix<C>| cases.push(Case { name, op, dense });

    for n in [2usize, 8, 16, 32] {
        for kind in ALL_KINDS {
            if kind_fits(kind, n) {
                push(
                    format!("{kind} n={n}"),
                    ortho_operator(kind, n).unwrap(),
                    analysis_matrix(kind, n),
                );
            }
        }
    }
    push(
        "fourier inverse n=16".into(),
        Arc::new(Fourier::inverse(16).unwrap()),
        idft(16),
    );
    push(
        "direct fourier n=12".into(),
        Arc::new(Fourier::with_direct_fallback(12).unwrap()),
        dft(12),
    );
    push(
        "direct permuted fourier n=12".into(),
        Arc::new(PermutedFourier::with_direct_fallback(12).unwrap()),
        analysis_matrix(OrthoKind::PermutedFourier, 12),
    );
    push(
        "identity n=5".into(),
        Arc::new(Identity::new(5)),
        DMatrix::identity(5, 5),
    );

    let d = cvec(&mut rng, 8);
    push(
        "diagonal n=8".into(),
        Arc::new(Diagonal::new(d.clone())),
        na_diag(&d),
    );

    let r = cvec(&mut rng, 16);
    push(
        "circulant n=16".into(),
        Arc::new(Circulant::new(&r).unwrap()),
        circulant(&r),
    );

    let omega = SubsampleSet::new(vec![1, 4, 5, 11], 12).unwrap();
    push(
        "subsample 4 of 12".into(),
        Arc::new(Subsample::new(omega.clone())),
        selector(omega.indices(), 12),
    );

    let f8: Op<f64> = Arc::new(Fourier::new(8).unwrap());
    push(
        "scaled fourier".into(),
        Arc::new(Scaled::new(f8.clone(), 2.5)),
        dft(8) * C::new(2.5, 0.0),
    );
    push(
        "adjoint fourier".into(),
        Arc::new(Adjoint::new(f8.clone())),
        idft(8),
    );

    let chain = compose(vec![
        Arc::new(Subsample::new(SubsampleSet::new(vec![0, 3, 6], 8).unwrap())),
        f8.clone(),
        Arc::new(Diagonal::new(d.clone())),
        ortho_operator(OrthoKind::Haar, 8).unwrap(),
    ])
    .unwrap();
    push(
        "compose R F D W".into(),
        chain,
        selector(&[0, 3, 6], 8) * dft(8) * na_diag(&d) * analysis_matrix(OrthoKind::Haar, 8),
    );

    let h4 = ortho_operator(OrthoKind::Hadamard, 4).unwrap();
    push(
        "block diagonal [F8, H4]".into(),
        Arc::new(BlockDiagonal::new(vec![f8.clone(), h4.clone()]).unwrap()),
        blkdiag(&[dft(8), hadamard(4)]),
    );
    push(
        "hstack [F4, H4, I4]".into(),
        Arc::new(
            HStack::new(vec![
                Arc::new(Fourier::new(4).unwrap()),
                h4,
                Arc::new(Identity::new(4)),
            ])
            .unwrap(),
        ),
        hstack(&[dft(4), hadamard(4), DMatrix::identity(4, 4)]),
    );
    push(
        "integrator m=3 q=4".into(),
        Arc::new(Integrator::new(3, 4).unwrap()),
        DMatrix::from_fn(3, 12, |i, j| {
            C::new(if j / 4 == i { 1.0 } else { 0.0 }, 0.0)
        }),
    );
    cases
}

/// Outcome of one operator property check.
pub struct Check {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.worst <= self.tol
    }
}

/// The full operator property suite: unitarity, round trips, adjoint
/// identity, materialization, circulant and composition agreement.
pub fn operator_property_suite(seed: u64) -> Vec<Check> {
    let mut rng = rng(seed);
    let mut checks = Vec::new();

    // Unitarity and round trip, 100 random vectors per size.
    for kind in ALL_KINDS {
        let mut unit = 0.0f64;
        let mut round = 0.0f64;
        for d in 1..=10 {
            let n = 1usize << d;
            if !kind_fits(kind, n) {
                continue;
            }
            let t = ortho_operator::<f64>(kind, n).unwrap();
            for _ in 0..100 {
                let v = cvec(&mut rng, n);
                let tv = t.apply(&v);
                unit = unit.max((norm(&tv) - norm(&v)).abs() / norm(&v));
                round = round.max(max_diff(&t.apply_adjoint(&tv), &v) / norm(&v));
            }
        }
        checks.push(Check {
            name: format!("unitarity {kind}"),
            worst: unit,
            tol: 1e-11,
        });
        checks.push(Check {
            name: format!("round trip {kind}"),
            worst: round,
            tol: 1e-11,
        });
    }

    for case in operator_cases(seed) {
        let (rows, cols) = case.op.dims();
        let mut adj = 0.0f64;
        let mut fwd = 0.0f64;
        for _ in 0..20 {
            let u = cvec(&mut rng, cols);
            let v = cvec(&mut rng, rows);
            let lhs = dot(&case.op.apply(&u), &v);
            let rhs = dot(&u, &case.op.apply_adjoint(&v));
            adj = adj.max((lhs - rhs).norm() / (norm(&u) * norm(&v)));
            let oracle: Vec<C> = (&case.dense * nalgebra::DVector::from_vec(u.clone()))
                .iter()
                .copied()
                .collect();
            fwd = fwd.max(max_diff(&case.op.apply(&u), &oracle) / norm(&u));
        }
        let mat = dense_of(case.op.as_ref());
        checks.push(Check {
            name: format!("adjoint identity {}", case.name),
            worst: adj,
            tol: 1e-10,
        });
        checks.push(Check {
            name: format!("forward vs oracle {}", case.name),
            worst: fwd,
            tol: 1e-10,
        });
        checks.push(Check {
            name: format!("materialize {}", case.name),
            worst: na_max_diff(&mat, &case.dense),
            tol: 1e-10,
        });
    }

    for n in [2usize, 4, 8, 16, 32] {
        let r = cvec(&mut rng, n);
        let v = cvec(&mut rng, n);
        let fast = modframe::operators::circulant_apply(&r, &v).unwrap();
        let slow: Vec<C> = (circulant(&r) * nalgebra::DVector::from_vec(v.clone()))
            .iter()
            .copied()
            .collect();
        checks.push(Check {
            name: format!("circulant vs dense n={n}"),
            worst: max_diff(&fast, &slow) / norm(&v),
            tol: 1e-10,
        });
    }

    checks
}

/// Rayleigh quotient `‖M_S x‖² / ‖x‖²` with `x` given as interleaved real parts.
fn rayleigh(cols: &[Vec<C>], x: &[f64]) -> f64 {
    let rows = cols[0].len();
    let mut y = vec![C::new(0.0, 0.0); rows];
    let mut xx = 0.0;
    for (k, col) in cols.iter().enumerate() {
        let c = C::new(x[2 * k], x[2 * k + 1]);
        xx += c.norm_sqr();
        for (yi, ai) in y.iter_mut().zip(col) {
            *yi += ai * c;
        }
    }
    y.iter().map(|z| z.norm_sqr()).sum::<f64>() / xx
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= len);
    x
}

/// Compass search on the unit sphere from `x`, maximizing `sign · rayleigh`.
fn refine(cols: &[Vec<C>], x: Vec<f64>, sign: f64) -> f64 {
    let mut x = normalized(x);
    let mut best = sign * rayleigh(cols, &x);
    let mut h = 0.1;
    let mut budget = 200_000;
    while h > 1e-12 && budget > 0 {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut t = x.clone();
                t[k] += dir * h;
                let t = normalized(t);
                let v = sign * rayleigh(cols, &t);
                budget -= 1;
                if v > best {
                    best = v;
                    x = t;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    sign * best
}

/// `max_S sup_x |‖M x‖² − 1|` over unit `x` supported on `S`, estimated by
/// `draws` random directions per support and a pattern-search polish of the
/// best upper and lower candidates. Never uses an eigen-solver.
pub fn ric_direction_oracle(m: &DMatrix<C>, s: usize, draws: usize, seed: u64) -> f64 {
    let n = m.ncols();
    let mut rng = rng(seed);
    let mut support: Vec<usize> = (0..s).collect();
    let mut worst = 0.0f64;
    loop {
        let cols: Vec<Vec<C>> = support
            .iter()
            .map(|&j| m.column(j).iter().copied().collect())
            .collect();
        let (mut hi, mut lo) = ((f64::NEG_INFINITY, Vec::new()), (f64::INFINITY, Vec::new()));
        for _ in 0..draws {
            let x: Vec<f64> = (0..2 * s)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let q = rayleigh(&cols, &x);
            if q > hi.0 {
                hi = (q, x.clone());
            }
            if q < lo.0 {
                lo = (q, x);
            }
        }
        let top = refine(&cols, hi.1, 1.0);
        let bottom = refine(&cols, lo.1, -1.0);
        worst = worst.max(top - 1.0).max(1.0 - bottom);
        // Next support in lexicographic order.
        let mut i = s;
        loop {
            if i == 0 {
                return worst;
            }
            i -= 1;
            if support[i] < n - s + i {
                support[i] += 1;
                for j in i + 1..s {
                    support[j] = support[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// `δ_s` by nalgebra's Hermitian eigen-solver over every support.
pub fn ric_eigen_oracle(m: &DMatrix<C>, s: usize) -> f64 {
    let n = m.ncols();
    let gram = m.adjoint() * m;
    let mut worst = 0.0f64;
    let mut support: Vec<usize> = (0..s).collect();
    loop {
        let g = DMatrix::from_fn(s, s, |i, j| gram[(support[i], support[j])]);
        let eig = nalgebra::SymmetricEigen::new(g).eigenvalues;
        for e in eig.iter() {
            worst = worst.max((e - 1.0).abs());
        }
        let mut i = s;
        loop {
            if i == 0 {
                return worst;
            }
            i -= 1;
            if support[i] < n - s + i {
                support[i] += 1;
                for j in i + 1..s {
                    support[j] = support[j - 1] + 1;
                }
                break;
            }
        }
    }
}

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<C> {
    let mut rng = rng(seed);
    let scale = 1.0 / (2.0 * rows as f64).sqrt();
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        C::new(re * scale, im * scale)
    })
}

pub fn from_na(m: &DMatrix<C>) -> DenseMatrix<f64> {
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}
