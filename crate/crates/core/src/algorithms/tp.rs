//! All-at-once time-periodic solve on the fine grid.

use crate::algorithms::coarse::CoarseSystem;
use crate::algorithms::inner::frozen_iteration;
use crate::algorithms::mh::{reuse_or_rebuild, InnerMatrix};
use crate::algorithms::{sync_times, SolverSettings};
use crate::block::BlockVector;
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::metrics::inner_error;
use crate::problem::PeriodicProblem;
use crate::propagators::CoarseScheme;
use crate::report::SolverReport;

/// TP MH: implicit Euler over all `N_f` fine steps of one period, coupled by
/// periodicity, solved by simplified Newton from `u^(0) = [z, ..., z]` with
/// the block-circulant Jacobian `diag(M/dt + K_d(z))`.
///
/// Block `m` of the solution is `u(t_m)`; block 0 is `u(t_{N_f}) = u(0)`.
/// The report has one outer iteration whose inner count is the number of
/// Newton steps.
pub fn tp_mh(problem: &PeriodicProblem, grid: &TimeGrid, settings: &SolverSettings) -> Result<SolverReport> {
    tp_driver(problem, grid, settings, InnerMatrix::Newton, "tp_mh")
}

pub(crate) fn tp_driver(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    settings: &SolverSettings,
    inner: InnerMatrix<'_>,
    method: &str,
) -> Result<SolverReport> {
    settings.validate()?;
    let fine = grid.as_fine_windows();
    let (nf, d) = (fine.num_windows(), problem.dim());
    let outer = &settings.outer;
    let pool = &settings.pool;
    let mut counter = pool.counter();

    let b = BlockVector::zeros(nf, d);
    let sys = CoarseSystem::new(problem, &fine, &b, CoarseScheme::ImplicitEuler)?;
    let z = outer.z_choice.resolve(d, None)?;
    let h = inner.build(&sys, &z)?;
    let exact = inner.is_exact(&sys, &h)?;
    let mut slot = None;
    let solver = reuse_or_rebuild(&mut slot, h, &fine)?;
    let u0 = sys.initial_iterate(&z);
    let out = frozen_iteration(&sys, solver, u0.clone(), exact, 0, outer, pool, &mut counter)?;

    let final_error = if exact {
        // One confirming step with the cached factors: for an affine residual
        // it only moves the iterate by rounding.
        let h = solver.system().apply(&out.iterate)?.sub(&sys.residual(&out.iterate)?);
        let check = solver.solve(&h, pool, &mut counter)?;
        inner_error(&check, &out.iterate, outer.tolerances())
    } else {
        *out.errors.last().expect("at least one inner iteration ran")
    };

    let iterates = outer.record_iterates.then(|| vec![u0, out.iterate.clone()]);
    Ok(SolverReport {
        method: method.to_string(),
        converged: final_error < 1.0,
        outer_iterations: 1,
        inner_iterations: vec![out.iterations],
        error_history: vec![final_error],
        inner_error_history: vec![out.errors],
        newton_first_step: Some(out.first_step),
        solution: out.iterate,
        times: sync_times(&fine),
        counters: counter,
        iterate_history: iterates,
    })
}
