use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Equidistant coarse partition of `[0, T]` into `N` windows, each refined
/// into `fine_steps_per_window` fine steps.
///
/// All time points are computed from their integer index (`n * T / N`),
/// never accumulated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    num_windows: usize,
    fine_steps_per_window: usize,
    period: f64,
}

impl TimeGrid {
    pub fn new(num_windows: usize, fine_steps_per_window: usize, period: f64) -> Result<Self> {
        if num_windows == 0 {
            return Err(Error::InvalidArgument("number of windows must be positive".into()));
        }
        if fine_steps_per_window == 0 {
            return Err(Error::InvalidArgument(
                "fine steps per window must be positive".into(),
            ));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidArgument(format!("period must be positive, got {period}")));
        }
        Ok(Self {
            num_windows,
            fine_steps_per_window,
            period,
        })
    }

    /// Grid whose fine step is as close as possible to `fine_step` while
    /// dividing every window evenly.
    pub fn with_fine_step(num_windows: usize, fine_step: f64, period: f64) -> Result<Self> {
        let per_window = (period / num_windows as f64 / fine_step).round().max(1.0) as usize;
        Self::new(num_windows, per_window, period)
    }

    pub fn num_windows(&self) -> usize {
        self.num_windows
    }

    pub fn fine_steps_per_window(&self) -> usize {
        self.fine_steps_per_window
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `Delta T = T / N`.
    pub fn coarse_step(&self) -> f64 {
        self.period / self.num_windows as f64
    }

    /// `delta T = T / N_f`.
    pub fn fine_step(&self) -> f64 {
        self.period / self.num_fine_steps() as f64
    }

    /// `N_f = N * fine_steps_per_window`.
    pub fn num_fine_steps(&self) -> usize {
        self.num_windows * self.fine_steps_per_window
    }

    /// Synchronization point `T_n`; `n` may exceed `N` for multi-period runs.
    pub fn sync_point(&self, n: usize) -> f64 {
        n as f64 * self.period / self.num_windows as f64
    }

    /// Fine grid point `t_i`; `i` may exceed `N_f` for multi-period runs.
    pub fn fine_point(&self, i: usize) -> f64 {
        i as f64 * self.period / self.num_fine_steps() as f64
    }

    /// The same period seen as an all-at-once fine grid: every fine step is
    /// its own window.
    pub fn as_fine_windows(&self) -> Self {
        Self {
            num_windows: self.num_fine_steps(),
            fine_steps_per_window: 1,
            period: self.period,
        }
    }
}
