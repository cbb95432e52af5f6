use crate::algorithms::SolverSettings;
use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::metrics::SolveCounter;
use crate::parallel::Schedule;
use crate::problem::PeriodicProblem;
use crate::propagators::{propagate_coarse, propagate_fine};

/// Fine and coarse propagations of one iterate over every window.
///
/// Block `n - 1` of each field belongs to window `n = 1..N`, i.e. it holds
/// the value at `T_n` started from `U_{n-1}` at `T_{n-1}`.
#[derive(Debug, Clone)]
pub struct Defects {
    pub fine: BlockVector<f64>,
    pub coarse: BlockVector<f64>,
    /// `b_n = F_n - G_n`.
    pub b: BlockVector<f64>,
}

impl Defects {
    /// Defects of the all-zero iterate before any propagation has run.
    pub(crate) fn zero(num_blocks: usize, dim: usize) -> Self {
        Self {
            fine: BlockVector::zeros(num_blocks, dim),
            coarse: BlockVector::zeros(num_blocks, dim),
            b: BlockVector::zeros(num_blocks, dim),
        }
    }

    /// `b` reordered to pair with the unknowns: block 0 holds `b_N`, block
    /// `n >= 1` holds `b_n`.
    pub fn paired_b(&self) -> BlockVector<f64> {
        self.b.rotate_blocks(self.b.num_blocks() - 1)
    }
}

/// Run the N fine propagations as one parallel task set.
pub(crate) fn fine_sweep(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    u: &BlockVector<f64>,
    settings: &SolverSettings,
    counter: &mut SolveCounter,
) -> Result<BlockVector<f64>> {
    sweep(problem, grid, u, settings, counter, true)
}

/// Run the N coarse propagations as one parallel task set.
pub(crate) fn coarse_sweep(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    u: &BlockVector<f64>,
    settings: &SolverSettings,
    counter: &mut SolveCounter,
) -> Result<BlockVector<f64>> {
    sweep(problem, grid, u, settings, counter, false)
}

fn sweep(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    u: &BlockVector<f64>,
    settings: &SolverSettings,
    counter: &mut SolveCounter,
    fine: bool,
) -> Result<BlockVector<f64>> {
    let n = grid.num_windows();
    u.check_shape(n, problem.dim())?;
    let prop = &settings.propagator;
    let values = settings.pool.map(n, Schedule::RoundRobin, counter, |w, tally| {
        let start = u.block_vector(w);
        let (t0, t1) = (grid.sync_point(w), grid.sync_point(w + 1));
        if fine {
            propagate_fine(problem, t0, &start, t1, grid, prop, tally)
        } else {
            propagate_coarse(problem, t0, &start, t1, prop, tally)
        }
    })?;
    let blocks = values.into_iter().map(|v| v.as_slice().to_vec()).collect();
    Ok(BlockVector::from_blocks(blocks))
}

/// `b_n = F(T_n, T_{n-1}, U_{n-1}) - G(T_n, T_{n-1}, U_{n-1})` for `n = 1..N`.
pub fn assemble_defects(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    u: &BlockVector<f64>,
    settings: &SolverSettings,
    counter: &mut SolveCounter,
) -> Result<Defects> {
    if u.block_dim() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: u.block_dim(),
        });
    }
    let fine = fine_sweep(problem, grid, u, settings, counter)?;
    let coarse = coarse_sweep(problem, grid, u, settings, counter)?;
    let b = fine.sub(&coarse);
    Ok(Defects { fine, coarse, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testing::scalar_linear;
    use crate::models::rl_circuit_1d;

    #[test]
    fn equal_propagators_give_zero_defects() {
        let p = rl_circuit_1d();
        let grid = TimeGrid::new(5, 1, p.period()).unwrap();
        let s = SolverSettings::default();
        let mut c = s.pool.counter();
        let u = BlockVector::from_flat(vec![0.0, 0.1, -0.05, 0.2, 0.01], 1).unwrap();
        let d = assemble_defects(&p, &grid, &u, &s, &mut c).unwrap();
        assert!(d.b.as_slice().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn zero_problem_has_zero_defects() {
        let p = scalar_linear(1.0, 2.0, |_| 0.0, 1.0);
        let grid = TimeGrid::new(3, 4, 1.0).unwrap();
        let s = SolverSettings::default();
        let mut c = s.pool.counter();
        let d = assemble_defects(&p, &grid, &BlockVector::zeros(3, 1), &s, &mut c).unwrap();
        assert!(d.b.as_slice().iter().all(|&x| x == 0.0));
        assert_eq!(c.total(), 3 * 4 + 3);
    }

    #[test]
    fn two_window_hand_computation() {
        // m = 1, k = 1, j = 0, T = 1, N = 2, two fine steps per window.
        let p = scalar_linear(1.0, 1.0, |_| 0.0, 1.0);
        let grid = TimeGrid::new(2, 2, 1.0).unwrap();
        let s = SolverSettings::default();
        let mut c = s.pool.counter();
        let u = BlockVector::from_flat(vec![1.0, 2.0], 1).unwrap();
        let d = assemble_defects(&p, &grid, &u, &s, &mut c).unwrap();
        // fine: factor (1/0.25 / (1/0.25 + 1))^2 = 0.64; coarse: 2/3
        let f = 0.8_f64 * 0.8;
        let g = 2.0 / 3.0;
        let expected = [f - g, 2.0 * (f - g)];
        for (got, want) in d.b.as_slice().iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
        // paired ordering: block 0 holds b_N
        assert_eq!(d.paired_b().as_slice(), &[d.b.block(1)[0], d.b.block(0)[0]]);
    }
}
