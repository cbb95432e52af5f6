//! Error norms used by every termination test, and linear-solve accounting.

use serde::{Deserialize, Serialize};

use crate::block::BlockVector;

/// Absolute/relative tolerance pair of the mixed norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub a_tol: f64,
    pub r_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            a_tol: 1e-6,
            r_tol: 1e-3,
        }
    }
}

impl Tolerances {
    /// Tolerances used when comparing solutions produced by different methods.
    pub const CROSS_METHOD: Tolerances = Tolerances {
        a_tol: 2.5e-5,
        r_tol: 2.5e-2,
    };
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `||u - v||_2 / (a_tol + r_tol ||u||_2)`.
///
/// Not symmetric: the relative part is scaled by the first argument.
pub fn mixed_norm(u: &[f64], v: &[f64], tol: Tolerances) -> f64 {
    assert_eq!(u.len(), v.len(), "mixed_norm: length mismatch");
    let diff = u
        .iter()
        .zip(v)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / (tol.a_tol + tol.r_tol * euclid(u))
}

/// Largest jump of a Parareal iterate at the synchronization points.
///
/// `fine` holds `F(T_n, T_{n-1}, U_{n-1})` in block `n - 1` for `n = 1..N`.
/// Interior points compare `U_n` with `F_n`; the periodicity jump compares
/// `U_0` with `F_N`.
pub fn pp_error(coarse: &BlockVector<f64>, fine: &BlockVector<f64>, tol: Tolerances) -> f64 {
    assert_eq!(coarse.num_blocks(), fine.num_blocks());
    let n = coarse.num_blocks();
    let interior = (1..n)
        .map(|i| mixed_norm(coarse.block(i), fine.block(i - 1), tol))
        .fold(0.0, f64::max);
    let wrap = mixed_norm(coarse.block(0), fine.block(n - 1), tol);
    interior.max(wrap)
}

/// Blockwise maximum of `mixed_norm(new_n, old_n)`.
pub fn inner_error(new: &BlockVector<f64>, old: &BlockVector<f64>, tol: Tolerances) -> f64 {
    assert_eq!(new.num_blocks(), old.num_blocks());
    (0..new.num_blocks())
        .map(|i| mixed_norm(new.block(i), old.block(i), tol))
        .fold(0.0, f64::max)
}

/// Linear-solve tally of one worker.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    /// Factorization followed by a solve.
    pub factor_solves: u64,
    /// Solve reusing an existing factorization.
    pub cached_resolves: u64,
}

impl Tally {
    pub fn record_factor_solve(&mut self) {
        self.factor_solves += 1;
    }

    pub fn record_cached_resolve(&mut self) {
        self.cached_resolves += 1;
    }

    pub fn linear_solves(&self) -> u64 {
        self.factor_solves + self.cached_resolves
    }

    pub fn merge(&mut self, other: &Tally) {
        self.factor_solves += other.factor_solves;
        self.cached_resolves += other.cached_resolves;
    }
}

/// Per-worker linear-solve counters.
///
/// `effective` is the largest count of any single worker (the critical path
/// when every worker runs concurrently), `total` the sum over workers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveCounter {
    per_worker: Vec<Tally>,
}

impl SolveCounter {
    pub fn new(workers: usize) -> Self {
        assert!(workers >= 1, "SolveCounter needs at least one worker");
        Self {
            per_worker: vec![Tally::default(); workers],
        }
    }

    pub fn workers(&self) -> usize {
        self.per_worker.len()
    }

    pub fn worker(&mut self, w: usize) -> &mut Tally {
        &mut self.per_worker[w]
    }

    pub fn per_worker(&self) -> &[Tally] {
        &self.per_worker
    }

    /// Tally for work done outside a parallel section.
    pub fn main(&mut self) -> &mut Tally {
        &mut self.per_worker[0]
    }

    pub fn effective(&self) -> u64 {
        self.per_worker
            .iter()
            .map(Tally::linear_solves)
            .max()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.per_worker.iter().map(Tally::linear_solves).sum()
    }

    pub fn factor_solves(&self) -> u64 {
        self.per_worker.iter().map(|t| t.factor_solves).sum()
    }

    pub fn cached_resolves(&self) -> u64 {
        self.per_worker.iter().map(|t| t.cached_resolves).sum()
    }
}
