//! Additive splitting `H U^(s+1) = [H - G(U^(s))] U^(s) + r(U^(s))` with a
//! constant block-cyclic `H`.

use serde::{Deserialize, Serialize};

use crate::algorithms::mh::{pp_mh_driver, InnerMatrix};
use crate::algorithms::tp::tp_driver;
use crate::algorithms::SolverSettings;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::BlockCyclicSystem;
use crate::problem::PeriodicProblem;
use crate::report::SolverReport;

/// Which periodic system the splitting is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplittingMode {
    /// The coarse system of every PP-PC iteration (`N` blocks).
    #[default]
    ParallelInTime,
    /// The all-at-once fine system (`N_f` blocks).
    TimePeriodic,
}

/// Run the splitting iteration with a user supplied `H`.
///
/// `H` must have `N` blocks in PP mode and `N_f` blocks in TP mode. With
/// `diag(H) = C + K_d(Z)` this is exactly the simplified Newton method.
pub fn splitting_iteration(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    h: &BlockCyclicSystem,
    mode: SplittingMode,
    settings: &SolverSettings,
) -> Result<SolverReport> {
    match mode {
        SplittingMode::ParallelInTime => pp_mh_driver(problem, grid, settings, InnerMatrix::Fixed(h), "splitting"),
        SplittingMode::TimePeriodic => tp_driver(problem, grid, settings, InnerMatrix::Fixed(h), "splitting"),
    }
}

/// `H` with diagonal `M/dt + K(x_bar)` and coupling `M/dt`, the matrix of a
/// linearization at a fixed state `x_bar`.
pub fn linearized_splitting_matrix(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    mode: SplittingMode,
    x_bar: &[f64],
) -> Result<BlockCyclicSystem> {
    if x_bar.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: x_bar.len(),
        });
    }
    let (n, dt) = match mode {
        SplittingMode::ParallelInTime => (grid.num_windows(), grid.coarse_step()),
        SplittingMode::TimePeriodic => (grid.num_fine_steps(), grid.fine_step()),
    };
    let c = problem.mass() / dt;
    let k = problem.stiffness(&nalgebra::DVector::from_column_slice(x_bar));
    BlockCyclicSystem::new(&c + k, c, n)
}
