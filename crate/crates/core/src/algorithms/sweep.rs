//! Newton iteration counts of TP MH over constant initial guesses.

use log::warn;
use serde::Serialize;

use crate::algorithms::{tp_mh, SolverSettings, ZChoice};
use crate::error::Result;
use crate::grid::TimeGrid;
use crate::models::newton_radius;
use crate::problem::PeriodicProblem;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub z: f64,
    pub newton_iterations: usize,
    /// `||U^(1) - U^(0)||_2`; NaN when the run failed before the first step.
    pub rho1: f64,
    /// `delta0 * rho1`, when `delta0` is known.
    pub h0: Option<f64>,
    /// Radius of the convergence ball; `None` when `h0` is unknown or above 1/2.
    pub rho: Option<f64>,
    pub converged: bool,
}

/// Run [`tp_mh`] from `u^(0) = [z, ..., z]` for every `z`. Solver failures
/// (divergence, inner cap) become rows with `converged == false`; invalid
/// settings are still returned as errors.
pub fn z_sweep(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    zs: &[f64],
    delta0: Option<f64>,
    settings: &SolverSettings,
) -> Result<Vec<SweepRow>> {
    settings.validate()?;
    let mut rows = Vec::with_capacity(zs.len());
    for &z in zs {
        let mut s = settings.clone();
        s.outer.z_choice = ZChoice::User(vec![z]);
        let row = match tp_mh(problem, grid, &s) {
            Ok(report) => {
                let rho1 = report.newton_first_step.unwrap_or(f64::NAN);
                SweepRow {
                    z,
                    newton_iterations: report.inner_iterations.first().copied().unwrap_or(0),
                    rho1,
                    h0: delta0.map(|d| d * rho1),
                    rho: delta0.and_then(|d| newton_radius(d, rho1)),
                    converged: report.converged,
                }
            }
            Err(e) => {
                warn!("z = {z}: {e}");
                SweepRow {
                    z,
                    newton_iterations: 0,
                    rho1: f64::NAN,
                    h0: None,
                    rho: None,
                    converged: false,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}
