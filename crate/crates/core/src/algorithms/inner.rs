//! Linear iteration `H U^(s+1) = H U^(s) - R(U^(s))` with a constant
//! block-cyclic `H`, solved in the frequency domain.
//!
//! With `H` equal to the Jacobian at `U^(0)` this is the simplified Newton
//! method; any other constant `H` gives an additive splitting.

use crate::algorithms::coarse::CoarseSystem;
use crate::algorithms::OuterConfig;
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::linalg::MhSolver;
use crate::metrics::{inner_error, SolveCounter};
use crate::parallel::WorkerPool;

/// Consecutive error increases after which the iteration is abandoned.
pub(crate) const DIVERGENCE_RISES: usize = 5;

#[derive(Debug, Clone)]
pub(crate) struct InnerOutcome {
    pub iterate: BlockVector<f64>,
    pub iterations: usize,
    pub errors: Vec<f64>,
    /// `||U^(1) - U^(0)||_2`.
    pub first_step: f64,
}

/// Run the iteration from `u0`. When `exact` is set, `H` is the Jacobian of
/// an affine `R`, so the first iterate is the root and the loop stops there.
#[allow(clippy::too_many_arguments)]
pub(crate) fn frozen_iteration(
    sys: &CoarseSystem<'_>,
    solver: &mut MhSolver,
    u0: BlockVector<f64>,
    exact: bool,
    outer: usize,
    cfg: &OuterConfig,
    pool: &WorkerPool,
    counter: &mut SolveCounter,
) -> Result<InnerOutcome> {
    let tol = cfg.tolerances();
    let mut u = u0;
    let mut errors = Vec::new();
    let mut first_step = 0.0;
    let mut rises = 0;
    for s in 0..cfg.max_inner {
        let h = solver.system().apply(&u)?.sub(&sys.residual(&u)?);
        let next = solver.solve(&h, pool, counter)?;
        let err = inner_error(&next, &u, tol);
        if s == 0 {
            first_step = next.sub(&u).norm();
        }
        if let Some(&prev) = errors.last() {
            rises = if err > prev { rises + 1 } else { 0 };
        }
        errors.push(err);
        u = next;
        if exact || err < 1.0 {
            return Ok(InnerOutcome {
                iterate: u,
                iterations: s + 1,
                errors,
                first_step,
            });
        }
        if !err.is_finite() || rises >= DIVERGENCE_RISES {
            return Err(Error::Diverged {
                outer,
                rises,
                last_error: err,
            });
        }
    }
    Err(Error::InnerNotConverged {
        outer,
        cap: cfg.max_inner,
        last_error: errors.last().copied().unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testing::random_linear;
    use crate::grid::TimeGrid;
    use crate::linalg::{build_spectrum, BlockCyclicSystem};
    use crate::models::rl_circuit_1d;
    use crate::propagators::CoarseScheme;
    use nalgebra::{DMatrix, DVector};

    #[test]
    fn factors_are_reused_across_newton_steps() {
        let p = rl_circuit_1d();
        let grid = TimeGrid::new(10, 1, p.period()).unwrap();
        let b = BlockVector::zeros(10, 1);
        let sys = CoarseSystem::new(&p, &grid, &b, CoarseScheme::ImplicitEuler).unwrap();
        let z = DVector::from_element(1, 0.15);
        let mut solver = MhSolver::new(sys.newton_matrix(&z).unwrap(), build_spectrum(10, p.period())).unwrap();
        let pool = WorkerPool::new(3).unwrap();
        let mut counter = pool.counter();
        let out = frozen_iteration(
            &sys,
            &mut solver,
            sys.initial_iterate(z.as_slice()),
            false,
            0,
            &OuterConfig::default(),
            &pool,
            &mut counter,
        )
        .unwrap();
        assert!(out.iterations >= 2);
        assert_eq!(counter.factor_solves(), 10);
        assert_eq!(counter.cached_resolves(), 10 * (out.iterations as u64 - 1));
        assert!(sys.residual(&out.iterate).unwrap().norm() < 1e-6);
    }

    #[test]
    fn affine_residual_needs_one_step() {
        let p = random_linear(2, 3);
        let grid = TimeGrid::new(6, 1, 1.0).unwrap();
        let b = BlockVector::from_flat(crate::algorithms::testing::lcg(9, 12), 2).unwrap();
        let sys = CoarseSystem::new(&p, &grid, &b, CoarseScheme::ImplicitEuler).unwrap();
        let (g, _) = sys.linear_system().unwrap();
        let mut solver = MhSolver::new(g, build_spectrum(6, 1.0)).unwrap();
        let pool = WorkerPool::default();
        let mut counter = pool.counter();
        let out = frozen_iteration(
            &sys,
            &mut solver,
            sys.initial_iterate(&[0.0, 0.0]),
            true,
            0,
            &OuterConfig::default(),
            &pool,
            &mut counter,
        )
        .unwrap();
        assert_eq!(out.iterations, 1);
        assert!(sys.residual(&out.iterate).unwrap().norm() < 1e-10);
    }

    #[test]
    fn growing_errors_abort() {
        // H = 0.2 Q without coupling: I - H^{-1} G has spectral radius > 1.
        // A negligible rTol keeps the mixed norm from saturating as U grows.
        let cfg = OuterConfig {
            r_tol: 1e-30,
            ..OuterConfig::default()
        };
        let p = random_linear(1, 4);
        let grid = TimeGrid::new(2, 1, 1.0).unwrap();
        let b = BlockVector::zeros(2, 1);
        let sys = CoarseSystem::new(&p, &grid, &b, CoarseScheme::ImplicitEuler).unwrap();
        let (g, _) = sys.linear_system().unwrap();
        let h = BlockCyclicSystem::new(
            g.diag_block() * 0.2,
            DMatrix::zeros(1, 1),
            2,
        )
        .unwrap();
        let mut solver = MhSolver::new(h, build_spectrum(2, 1.0)).unwrap();
        let pool = WorkerPool::default();
        let mut counter = pool.counter();
        let r = frozen_iteration(
            &sys,
            &mut solver,
            BlockVector::zeros(2, 1),
            false,
            3,
            &cfg,
            &pool,
            &mut counter,
        );
        assert!(matches!(r, Err(Error::Diverged { outer: 3, .. })), "{r:?}");
    }
}
