//! Solver drivers.
//!
//! Every driver takes the problem, a [`TimeGrid`] and [`SolverSettings`] and
//! returns a [`SolverReport`](crate::SolverReport). Hitting `max_outer` is not
//! an error: the report comes back with `converged == false`.

mod coarse;
mod defects;
mod inner;
mod jacobi;
mod mh;
mod pp_ic;
mod sequential;
mod splitting;
mod sweep;
mod tp;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::metrics::Tolerances;
use crate::parallel::WorkerPool;
use crate::propagators::PropagatorConfig;

pub use coarse::residual_r;
pub use defects::{assemble_defects, Defects};
pub use jacobi::pp_pc_jacobi;
pub use mh::{linear_pppc_mh, pppc_mh_newton};
pub use pp_ic::pp_ic;
pub use sequential::sequential_steady_state;
pub use splitting::{linearized_splitting_matrix, splitting_iteration, SplittingMode};
pub use sweep::{z_sweep, SweepRow};
pub use tp::tp_mh;

/// Linearization point `Z` of the simplified Newton iteration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZChoice {
    #[default]
    Zero,
    /// Blockwise mean of the previous outer iterate (zero before the first).
    MeanOfPreviousIterate,
    User(Vec<f64>),
}

impl ZChoice {
    /// Resolve to a `d`-vector. `previous` is the last outer iterate, if any.
    pub fn resolve(&self, dim: usize, previous: Option<&crate::BlockVector<f64>>) -> Result<Vec<f64>> {
        match self {
            ZChoice::Zero => Ok(vec![0.0; dim]),
            ZChoice::MeanOfPreviousIterate => Ok(previous.map_or(vec![0.0; dim], |u| u.mean_block())),
            ZChoice::User(z) if z.len() == dim => Ok(z.clone()),
            ZChoice::User(z) if z.len() == 1 => Ok(vec![z[0]; dim]),
            ZChoice::User(z) => Err(Error::DimensionMismatch {
                expected: dim,
                found: z.len(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OuterConfig {
    /// Cap on Parareal iterations (periods for sequential stepping).
    pub max_outer: usize,
    /// Cap on Newton / fixed-point iterations per outer iteration.
    pub max_inner: usize,
    pub a_tol: f64,
    pub r_tol: f64,
    pub z_choice: ZChoice,
    /// Keep every outer iterate in the report.
    pub record_iterates: bool,
}

impl Default for OuterConfig {
    fn default() -> Self {
        let tol = Tolerances::default();
        Self {
            max_outer: 50,
            max_inner: 100,
            a_tol: tol.a_tol,
            r_tol: tol.r_tol,
            z_choice: ZChoice::Zero,
            record_iterates: false,
        }
    }
}

impl OuterConfig {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            a_tol: self.a_tol,
            r_tol: self.r_tol,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a_tol > 0.0 && self.r_tol > 0.0) {
            return Err(Error::InvalidArgument("a_tol and r_tol must be positive".into()));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidArgument("iteration caps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything a driver needs besides the problem and the grid.
#[derive(Debug, Clone, Default)]
pub struct SolverSettings {
    pub outer: OuterConfig,
    pub propagator: PropagatorConfig,
    pub pool: WorkerPool,
}

impl SolverSettings {
    pub fn with_workers(workers: usize) -> Result<Self> {
        Ok(Self {
            pool: WorkerPool::new(workers)?,
            ..Self::default()
        })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        self.outer.validate()?;
        self.propagator.validate()
    }
}

/// Synchronization times `T_0..T_{N-1}` of a grid.
pub(crate) fn sync_times(grid: &TimeGrid) -> Vec<f64> {
    (0..grid.num_windows()).map(|n| grid.sync_point(n)).collect()
}
