//! PP-PC with a multi-harmonic coarse correction.

use nalgebra::DVector;

use crate::algorithms::coarse::CoarseSystem;
use crate::algorithms::defects::{assemble_defects, Defects};
use crate::algorithms::inner::frozen_iteration;
use crate::algorithms::{sync_times, SolverSettings};
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::{build_spectrum, BlockCyclicSystem, MhSolver};
use crate::metrics::pp_error;
use crate::problem::PeriodicProblem;
use crate::report::SolverReport;

/// Matrix of the inner iteration.
#[derive(Debug, Clone, Copy)]
pub(crate) enum InnerMatrix<'h> {
    /// Jacobian at the initial iterate, `diag = C + K_d(Z)`.
    Newton,
    /// User supplied constant splitting matrix.
    Fixed(&'h BlockCyclicSystem),
}

impl InnerMatrix<'_> {
    pub(crate) fn build(&self, sys: &CoarseSystem<'_>, z: &[f64]) -> Result<BlockCyclicSystem> {
        match self {
            InnerMatrix::Newton => sys.newton_matrix(&DVector::from_column_slice(z)),
            InnerMatrix::Fixed(h) => {
                if h.num_blocks() != sys.num_blocks() || h.block_dim() != sys.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: sys.num_blocks() * sys.dim(),
                        found: h.num_blocks() * h.block_dim(),
                    });
                }
                Ok((*h).clone())
            }
        }
    }

    /// One step solves an affine residual exactly.
    pub(crate) fn is_exact(&self, sys: &CoarseSystem<'_>, h: &BlockCyclicSystem) -> Result<bool> {
        if !sys.problem().is_linear() {
            return Ok(false);
        }
        Ok(match self {
            InnerMatrix::Newton => true,
            InnerMatrix::Fixed(_) => &sys.linear_system()?.0 == h,
        })
    }
}

/// Keep the factored solver when the frozen matrix has not changed.
pub(crate) fn reuse_or_rebuild<'s>(
    solver: &'s mut Option<MhSolver>,
    h: BlockCyclicSystem,
    grid: &TimeGrid,
) -> Result<&'s mut MhSolver> {
    let keep = solver.as_ref().is_some_and(|s| s.system() == &h);
    if !keep {
        *solver = Some(MhSolver::new(h, build_spectrum(grid.num_windows(), grid.period()))?);
    }
    Ok(solver.as_mut().expect("solver was just set"))
}

pub(crate) fn pp_mh_driver(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    settings: &SolverSettings,
    inner: InnerMatrix<'_>,
    method: &str,
) -> Result<SolverReport> {
    settings.validate()?;
    let outer = &settings.outer;
    let (n, d) = (grid.num_windows(), problem.dim());
    let tol = outer.tolerances();
    let mut counter = settings.pool.counter();

    let mut u = BlockVector::zeros(n, d);
    let mut defects = Defects::zero(n, d);
    let mut previous: Option<BlockVector<f64>> = None;
    let mut solver: Option<MhSolver> = None;
    let mut iterates = outer.record_iterates.then(|| vec![u.clone()]);
    let mut inner_iterations = Vec::new();
    let mut inner_errors = Vec::new();
    let mut errors = Vec::new();
    let mut first_step = None;
    let mut converged = false;

    while errors.len() < outer.max_outer {
        let k = errors.len();
        let sys = CoarseSystem::new(problem, grid, &defects.b, settings.propagator.coarse_scheme)?;
        let z = outer.z_choice.resolve(d, previous.as_ref())?;
        let h = inner.build(&sys, &z)?;
        let exact = inner.is_exact(&sys, &h)?;
        let mh = reuse_or_rebuild(&mut solver, h, grid)?;
        let out = frozen_iteration(&sys, mh, sys.initial_iterate(&z), exact, k, outer, &settings.pool, &mut counter)?;
        first_step.get_or_insert(out.first_step);
        inner_iterations.push(out.iterations);
        inner_errors.push(out.errors);
        u = out.iterate;

        defects = assemble_defects(problem, grid, &u, settings, &mut counter)?;
        let eps = pp_error(&u, &defects.fine, tol);
        errors.push(eps);
        log::debug!("{method}: outer {} eps_pp = {eps:.3e}", k + 1);
        if let Some(it) = iterates.as_mut() {
            it.push(u.clone());
        }
        previous = Some(u.clone());
        if eps < 1.0 {
            converged = true;
            break;
        }
    }

    Ok(SolverReport {
        method: method.to_string(),
        converged,
        outer_iterations: errors.len(),
        inner_iterations,
        error_history: errors,
        inner_error_history: inner_errors,
        newton_first_step: first_step,
        solution: u,
        times: sync_times(grid),
        counters: counter,
        iterate_history: iterates,
    })
}

/// Nonlinear PP-PC MH: each outer iteration solves the periodic coarse
/// system by simplified Newton with the frozen block-circulant Jacobian
/// `diag(C + K_d(Z))`, whose frequency blocks are factored once.
///
/// The first outer iteration starts from zero defects, so the initial
/// iterate is never propagated and the error history holds one entry per
/// outer iteration.
pub fn pppc_mh_newton(problem: &PeriodicProblem, grid: &TimeGrid, settings: &SolverSettings) -> Result<SolverReport> {
    pp_mh_driver(problem, grid, settings, InnerMatrix::Newton, "pp_pc_mh")
}

/// Linear PP-PC MH: the periodic coarse system `G U = r` with
/// `r_n = Q b_n + j(T_n)` is solved directly in the frequency domain.
pub fn linear_pppc_mh(problem: &PeriodicProblem, grid: &TimeGrid, settings: &SolverSettings) -> Result<SolverReport> {
    settings.validate()?;
    if !problem.is_linear() {
        return Err(Error::NotLinear);
    }
    let outer = &settings.outer;
    let (n, d) = (grid.num_windows(), problem.dim());
    let tol = outer.tolerances();
    let mut counter = settings.pool.counter();

    let mut u = BlockVector::zeros(n, d);
    let mut defects = Defects::zero(n, d);
    let mut solver: Option<MhSolver> = None;
    let mut iterates = outer.record_iterates.then(|| vec![u.clone()]);
    let mut errors = Vec::new();
    let mut converged = false;

    while errors.len() < outer.max_outer {
        let sys = CoarseSystem::new(problem, grid, &defects.b, settings.propagator.coarse_scheme)?;
        let (g, r) = sys.linear_system()?;
        u = reuse_or_rebuild(&mut solver, g, grid)?.solve(&r, &settings.pool, &mut counter)?;
        defects = assemble_defects(problem, grid, &u, settings, &mut counter)?;
        let eps = pp_error(&u, &defects.fine, tol);
        errors.push(eps);
        if let Some(it) = iterates.as_mut() {
            it.push(u.clone());
        }
        if eps < 1.0 {
            converged = true;
            break;
        }
    }

    Ok(SolverReport {
        method: "linear_pp_pc_mh".into(),
        converged,
        outer_iterations: errors.len(),
        inner_iterations: vec![1; errors.len()],
        error_history: errors,
        inner_error_history: Vec::new(),
        newton_first_step: None,
        solution: u,
        times: sync_times(grid),
        counters: counter,
        iterate_history: iterates,
    })
}
