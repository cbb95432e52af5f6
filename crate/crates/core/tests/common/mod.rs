//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use periodic_parareal::linalg::{BlockCyclicSystem, Spectrum};
use periodic_parareal::{BlockVector, PeriodicProblem, TimeGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}

pub fn random_blocks(rng: &mut ChaCha8Rng, n: usize, d: usize) -> BlockVector<f64> {
    BlockVector::from_flat((0..n * d).map(|_| rng.random_range(-1.0..1.0)).collect(), d).unwrap()
}

/// Random `(Q, C)` with `Q` diagonally dominant enough that every
/// `Q - C e^{-i theta}` is invertible.
pub fn random_pair(rng: &mut ChaCha8Rng, d: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let c = random_matrix(rng, d, d);
    let q = random_matrix(rng, d, d) + DMatrix::identity(d, d) * (2.0 * d as f64 + 1.0);
    (q, c)
}

/// The `Nd x Nd` matrix with `Q` on the block diagonal and `-C` on the cyclic
/// block subdiagonal.
pub fn materialize(sys: &BlockCyclicSystem) -> DMatrix<f64> {
    let (n, d) = (sys.num_blocks(), sys.block_dim());
    let mut g = DMatrix::zeros(n * d, n * d);
    for b in 0..n {
        g.view_mut((b * d, b * d), (d, d)).copy_from(sys.diag_block());
        let prev = (b + n - 1) % n;
        let mut off = g.view_mut((b * d, prev * d), (d, d));
        off -= sys.offdiag_block();
    }
    g
}

/// `F (x) I_d` with `F_{jq} = exp(-i 2 pi p_j q / N) / sqrt(N)`, built entry
/// by entry.
pub fn dft_matrix(spectrum: &Spectrum, d: usize) -> DMatrix<Complex64> {
    let n = spectrum.len();
    let mut f = DMatrix::zeros(n * d, n * d);
    for (j, &p) in spectrum.indices().iter().enumerate() {
        for q in 0..n {
            let v = Complex64::from_polar(1.0 / (n as f64).sqrt(), -2.0 * PI * (p * q as i64) as f64 / n as f64);
            for c in 0..d {
                f[(j * d + c, q * d + c)] = v;
            }
        }
    }
    f
}

pub fn to_cvec(x: &BlockVector<f64>) -> DVector<Complex64> {
    DVector::from_iterator(x.as_slice().len(), x.as_slice().iter().map(|&v| Complex64::new(v, 0.0)))
}

pub fn max_rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}

/// Periodic implicit Euler solution of a LINEAR problem on every fine point,
/// from one dense solve of the `N_f d` cyclic system. Element `i` is
/// `u(t_i)`, `i = 0..N_f`, with `u(t_0) = u(t_{N_f})`.
pub fn dense_fine_periodic(problem: &PeriodicProblem, grid: &TimeGrid) -> Vec<DVector<f64>> {
    let nf = grid.num_fine_steps();
    let d = problem.dim();
    let h = grid.fine_step();
    let c = problem.mass() / h;
    let k = problem.stiffness(&DVector::zeros(d));
    let mut a = DMatrix::zeros(nf * d, nf * d);
    let mut rhs = DVector::zeros(nf * d);
    // unknown i holds u(t_{i+1})
    for i in 0..nf {
        a.view_mut((i * d, i * d), (d, d)).copy_from(&(&c + &k));
        let prev = (i + nf - 1) % nf;
        let mut off = a.view_mut((i * d, prev * d), (d, d));
        off -= &c;
        rhs.rows_mut(i * d, d).copy_from(&problem.rhs(grid.fine_point(i + 1)));
    }
    let x = a.lu().solve(&rhs).expect("periodic system is regular");
    let mut out = vec![x.rows((nf - 1) * d, d).into_owned()];
    out.extend((0..nf).map(|i| x.rows(i * d, d).into_owned()));
    out
}

/// Values of a fine-point sequence at the synchronization points.
pub fn at_sync_points(values: &[DVector<f64>], grid: &TimeGrid) -> BlockVector<f64> {
    let m = grid.fine_steps_per_window();
    let d = values[0].len();
    let flat = (0..grid.num_windows()).flat_map(|n| values[n * m].iter().copied().collect::<Vec<_>>()).collect();
    BlockVector::from_flat(flat, d).unwrap()
}

/// One implicit Euler step of the scalar equation `m u' + kappa(|u|) u = j`
/// solved by bisection; `x -> kappa(|x|) x` is strictly increasing.
pub fn scalar_euler_bisection(m: f64, h: f64, u_prev: f64, load: f64, kappa: impl Fn(f64) -> f64) -> f64 {
    let c = m / h;
    let f = |x: f64| c * x + kappa(x.abs()) * x - c * u_prev - load;
    let mut span = 1.0 + u_prev.abs() + load.abs() / c;
    while f(-span) > 0.0 || f(span) < 0.0 {
        span *= 2.0;
    }
    let (mut lo, mut hi) = (-span, span);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-17 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Scalar periodic steady state by repeated bisection-based periods from
/// `u(0) = 0`: returns the last period's values at the synchronization
/// points and the number of periods until `|u(kT) - u((k-1)T)|` drops below
/// `a_tol + r_tol |u(kT)|`.
pub fn scalar_steady_state(
    m: f64,
    kappa: impl Fn(f64) -> f64 + Copy,
    j: impl Fn(f64) -> f64,
    grid: &TimeGrid,
    a_tol: f64,
    r_tol: f64,
    max_periods: usize,
) -> (Vec<f64>, usize) {
    let h = grid.fine_step();
    let per_window = grid.fine_steps_per_window();
    let mut start = 0.0_f64;
    for k in 1..=max_periods {
        let base = (k - 1) as f64 * grid.period();
        let mut u = start;
        let mut samples = Vec::new();
        for i in 0..grid.num_fine_steps() {
            if i % per_window == 0 {
                samples.push(u);
            }
            let t = base + (i + 1) as f64 * h;
            u = scalar_euler_bisection(m, h, u, j(t), kappa);
        }
        let done = (u - start).abs() < a_tol + r_tol * u.abs();
        start = u;
        if done {
            return (samples, k);
        }
    }
    panic!("no steady state within {max_periods} periods");
}
