//! Classical time stepping until the periodic steady state is reached.

use crate::algorithms::{sync_times, SolverSettings};
use crate::block::BlockVector;
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::metrics::mixed_norm;
use crate::problem::PeriodicProblem;
use crate::propagators::propagate_fine;
use crate::report::SolverReport;

/// Integrate from `u(0) = 0` with the fine step, one period at a time, until
/// `||u(kT) - u((k-1)T)||_* < 1`.
///
/// The solution holds the values of the last period at `(k-1)T + T_n`, so
/// block 0 is `u((k-1)T)`. All solves run on worker 0.
pub fn sequential_steady_state(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    settings: &SolverSettings,
) -> Result<SolverReport> {
    settings.validate()?;
    let outer = &settings.outer;
    let tol = outer.tolerances();
    let (n, d) = (grid.num_windows(), problem.dim());
    let period = grid.period();
    let mut counter = settings.pool.counter();

    let mut start = nalgebra::DVector::zeros(d);
    let mut values = BlockVector::zeros(n, d);
    let mut iterates = outer.record_iterates.then(Vec::new);
    let mut errors = Vec::new();
    let mut converged = false;

    for k in 1..=outer.max_outer {
        let base = (k - 1) as f64 * period;
        let mut u = start.clone();
        for w in 0..n {
            values.set_block(w, &u);
            let t0 = base + grid.sync_point(w);
            let t1 = base + grid.sync_point(w + 1);
            u = propagate_fine(problem, t0, &u, t1, grid, &settings.propagator, counter.main())?;
        }
        let eps = mixed_norm(u.as_slice(), start.as_slice(), tol);
        errors.push(eps);
        if let Some(it) = iterates.as_mut() {
            it.push(values.clone());
        }
        start = u;
        if eps < 1.0 {
            converged = true;
            break;
        }
    }

    Ok(SolverReport {
        method: "sequential".into(),
        converged,
        outer_iterations: errors.len(),
        inner_iterations: Vec::new(),
        error_history: errors,
        inner_error_history: Vec::new(),
        newton_first_step: None,
        solution: values,
        times: sync_times(grid),
        counters: counter,
        iterate_history: iterates,
    })
}
