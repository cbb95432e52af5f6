//! Result record shared by all solver drivers.

use serde::Serialize;

use crate::block::BlockVector;
use crate::metrics::{mixed_norm, SolveCounter, Tolerances};

#[derive(Debug, Clone, Serialize)]
pub struct SolverReport {
    /// Driver name, e.g. `"pp_pc_mh"`.
    pub method: String,
    pub converged: bool,
    /// Parareal iterations, or periods for sequential time stepping.
    pub outer_iterations: usize,
    /// Newton / fixed-point iteration count per outer iteration.
    pub inner_iterations: Vec<usize>,
    /// Governing error per iteration. Drivers that can evaluate the error of
    /// the initial iterate record it as the first entry.
    pub error_history: Vec<f64>,
    /// Inner errors per outer iteration.
    pub inner_error_history: Vec<Vec<f64>>,
    /// `||U^(1) - U^(0)||_2` of the first simplified Newton step, when one ran.
    pub newton_first_step: Option<f64>,
    /// Solution values, block `n` at `times[n]`.
    pub solution: BlockVector<f64>,
    pub times: Vec<f64>,
    pub counters: SolveCounter,
    /// Outer iterates `U^(0), U^(1), ...` when requested by the config.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterate_history: Option<Vec<BlockVector<f64>>>,
}

impl SolverReport {
    pub fn final_error(&self) -> Option<f64> {
        self.error_history.last().copied()
    }

    /// Solution values at `times` (matched to within `1e-9` of the period
    /// scale), or `None` if a time is not present.
    pub fn values_at(&self, times: &[f64]) -> Option<BlockVector<f64>> {
        let scale = self.times.iter().fold(0.0_f64, |a, t| a.max(t.abs())).max(1.0);
        let mut out = Vec::with_capacity(times.len());
        for &t in times {
            let idx = self
                .times
                .iter()
                .position(|&s| (s - t).abs() <= 1e-9 * scale)?;
            out.push(self.solution.block(idx).to_vec());
        }
        Some(BlockVector::from_blocks(out))
    }

    /// Largest blockwise mixed-norm distance to `other` at the times both
    /// reports share, with `self` as the reference. `None` if no time is shared.
    pub fn distance_to(&self, other: &SolverReport, tol: Tolerances) -> Option<f64> {
        let scale = self.times.iter().fold(0.0_f64, |a, t| a.max(t.abs())).max(1.0);
        let mut worst: Option<f64> = None;
        for (i, &t) in self.times.iter().enumerate() {
            if let Some(j) = other.times.iter().position(|&s| (s - t).abs() <= 1e-9 * scale) {
                let e = mixed_norm(self.solution.block(i), other.solution.block(j), tol);
                worst = Some(worst.map_or(e, |w| w.max(e)));
            }
        }
        worst
    }
}
