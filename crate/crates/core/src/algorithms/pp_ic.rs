//! Periodic Parareal with an initial-value coarse problem.

use crate::algorithms::defects::assemble_defects;
use crate::algorithms::{sync_times, SolverSettings};
use crate::block::BlockVector;
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::metrics::pp_error;
use crate::problem::PeriodicProblem;
use crate::propagators::propagate_coarse;
use crate::report::SolverReport;

/// PP-IC:
///
/// ```text
/// U_0^(k+1) = U_N^(k)
/// U_n^(k+1) = F(T_n, T_{n-1}, U_{n-1}^(k)) + G(T_n, T_{n-1}, U_{n-1}^(k+1)) - G(T_n, T_{n-1}, U_{n-1}^(k))
/// ```
///
/// Fine and coarse values of iterate `k` run in parallel; the coarse
/// correction sweep is sequential because it chains the new values. The
/// error history starts with the PP error of `U^(0) = 0`.
pub fn pp_ic(problem: &PeriodicProblem, grid: &TimeGrid, settings: &SolverSettings) -> Result<SolverReport> {
    settings.validate()?;
    let outer = &settings.outer;
    let tol = outer.tolerances();
    let (n, d) = (grid.num_windows(), problem.dim());
    let mut counter = settings.pool.counter();

    // U_0..U_{N-1}, plus the end value U_N carried to the next iteration
    let mut u = BlockVector::zeros(n, d);
    let mut u_end = u.block_vector(0);
    let mut iterates = outer.record_iterates.then(|| vec![u.clone()]);
    let mut errors = Vec::new();
    let mut converged = false;

    loop {
        let defects = assemble_defects(problem, grid, &u, settings, &mut counter)?;
        let eps = pp_error(&u, &defects.fine, tol);
        errors.push(eps);
        if eps < 1.0 {
            converged = true;
            break;
        }
        if errors.len() > outer.max_outer {
            break;
        }

        let mut next = BlockVector::zeros(n, d);
        next.set_block(0, &u_end);
        let tally = counter.main();
        let mut prev = u_end.clone();
        for w in 1..=n {
            let g = propagate_coarse(problem, grid.sync_point(w - 1), &prev, grid.sync_point(w), &settings.propagator, tally)?;
            let value = g + defects.b.block_vector(w - 1);
            if w < n {
                next.set_block(w, &value);
            }
            prev = value;
        }
        u_end = prev;
        u = next;
        if let Some(it) = iterates.as_mut() {
            it.push(u.clone());
        }
    }

    Ok(SolverReport {
        method: "pp_ic".into(),
        converged,
        outer_iterations: errors.len() - 1,
        inner_iterations: Vec::new(),
        error_history: errors,
        inner_error_history: Vec::new(),
        newton_first_step: None,
        solution: u,
        times: sync_times(grid),
        counters: counter,
        iterate_history: iterates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::sequential_steady_state;
    use crate::algorithms::testing::scalar_linear;
    use crate::metrics::Tolerances;

    #[test]
    fn zero_forcing_converges_at_the_initial_check() {
        let p = scalar_linear(1.0, 1.0, |_| 0.0, 1.0);
        let grid = TimeGrid::new(4, 2, 1.0).unwrap();
        let r = pp_ic(&p, &grid, &SolverSettings::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.outer_iterations, 0);
    }

    #[test]
    fn coarse_equal_fine_matches_sequential_and_decreases() {
        let p = scalar_linear(0.2, 1.0, |t| (2.0 * std::f64::consts::PI * t).sin(), 1.0);
        let grid = TimeGrid::new(5, 1, 1.0).unwrap();
        let s = SolverSettings::default();
        let r = pp_ic(&p, &grid, &s).unwrap();
        assert!(r.converged);
        for w in r.error_history.windows(2).skip(1) {
            assert!(w[1] <= w[0], "{:?}", r.error_history);
        }
        let seq = sequential_steady_state(&p, &grid, &s).unwrap();
        assert!(r.distance_to(&seq, Tolerances::CROSS_METHOD).unwrap() < 1.0);
    }
}
