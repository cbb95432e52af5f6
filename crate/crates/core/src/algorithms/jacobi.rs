//! PP-PC with a Jacobi fixed point on the periodic coarse system.

use crate::algorithms::defects::{assemble_defects, coarse_sweep};
use crate::algorithms::{sync_times, SolverSettings};
use crate::block::BlockVector;
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::metrics::{inner_error, pp_error};
use crate::problem::PeriodicProblem;
use crate::report::SolverReport;

/// PP-PC where each outer iteration solves the periodic coarse problem
/// `U_m = G(T_m, T_{m-1}, U_{m-1}) + b'_m` by the sweep
/// `U^(s+1)_m = G(T_m, T_{m-1}, U^(s)_{m-1}) + b'_m`, all `N` coarse steps
/// of a sweep in parallel, warm started from the previous outer iterate.
///
/// The PP error of the current iterate is available before every update, so
/// the error history starts with the error of `U^(0) = 0`. Reaching
/// `max_inner` ends the sweep without failing the run: the outer iteration
/// still makes progress and is judged by the PP error.
pub fn pp_pc_jacobi(problem: &PeriodicProblem, grid: &TimeGrid, settings: &SolverSettings) -> Result<SolverReport> {
    settings.validate()?;
    let outer = &settings.outer;
    let tol = outer.tolerances();
    let (n, d) = (grid.num_windows(), problem.dim());
    let mut counter = settings.pool.counter();

    let mut u = BlockVector::zeros(n, d);
    let mut iterates = outer.record_iterates.then(|| vec![u.clone()]);
    let mut errors = Vec::new();
    let mut inner_iterations = Vec::new();
    let mut inner_errors = Vec::new();
    let mut converged = false;

    loop {
        let defects = assemble_defects(problem, grid, &u, settings, &mut counter)?;
        let eps = pp_error(&u, &defects.fine, tol);
        errors.push(eps);
        let k = errors.len() - 1;
        if eps < 1.0 {
            converged = true;
            break;
        }
        if k >= outer.max_outer {
            break;
        }

        let shift = defects.paired_b();
        let mut v = u.clone();
        let mut sweep_errors = Vec::new();
        for _ in 0..outer.max_inner {
            // coarse value of window n + 1 lands in block (n + 1) mod N
            let g = coarse_sweep(problem, grid, &v, settings, &mut counter)?.rotate_blocks(n - 1);
            let next = BlockVector::from_flat(
                g.as_slice().iter().zip(shift.as_slice()).map(|(a, b)| a + b).collect(),
                d,
            )?;
            let err = inner_error(&next, &v, tol);
            sweep_errors.push(err);
            v = next;
            if err < 1.0 {
                break;
            }
        }
        if sweep_errors.last().is_some_and(|&e| e >= 1.0) {
            log::warn!(
                "pp_pc_jacobi: inner sweep of outer iteration {} stopped at the cap {} (error {:.3e})",
                k + 1,
                outer.max_inner,
                sweep_errors.last().copied().unwrap_or(f64::NAN)
            );
        }
        inner_iterations.push(sweep_errors.len());
        inner_errors.push(sweep_errors);
        u = v;
        if let Some(it) = iterates.as_mut() {
            it.push(u.clone());
        }
    }

    Ok(SolverReport {
        method: "pp_pc_jacobi".into(),
        converged,
        outer_iterations: errors.len() - 1,
        inner_iterations,
        error_history: errors,
        inner_error_history: inner_errors,
        newton_first_step: None,
        solution: u,
        times: sync_times(grid),
        counters: counter,
        iterate_history: iterates,
    })
}
