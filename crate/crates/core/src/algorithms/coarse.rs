//! The periodic coarse system of one Parareal iteration.
//!
//! With paired defects `b'_0 = b_N`, `b'_m = b_m` the coarse unknowns solve
//! `R(U) = 0` where
//!
//! ```text
//! R_m(U) = Q(U_m - b'_m) (U_m - b'_m) - C U_{m-1} - l_m,   Q(X) = C + K(X)
//! ```
//!
//! cyclically in `m`. For implicit Euler `C = M/dT` and `l_m = j(T_m)` with
//! `T_0` read as `T_N`; the trapezoidal variant (linear problems only) uses
//! `C = M/dT - K/2` and `l_m = (j(T_m) + j(T_{m-1}))/2`. With all `b = 0`
//! and one window per fine step this is the all-at-once time-periodic system.

use nalgebra::{DMatrix, DVector};

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::BlockCyclicSystem;
use crate::problem::PeriodicProblem;
use crate::propagators::CoarseScheme;

pub(crate) struct CoarseSystem<'a> {
    problem: &'a PeriodicProblem,
    c: DMatrix<f64>,
    shift: BlockVector<f64>,
    loads: Vec<DVector<f64>>,
}

impl<'a> CoarseSystem<'a> {
    /// `b` is in window order: block `n - 1` holds `b_n`.
    pub fn new(
        problem: &'a PeriodicProblem,
        grid: &TimeGrid,
        b: &BlockVector<f64>,
        scheme: CoarseScheme,
    ) -> Result<Self> {
        let n = grid.num_windows();
        b.check_shape(n, problem.dim())?;
        let dt = grid.coarse_step();
        let t = |m: usize| grid.sync_point(if m == 0 { n } else { m });
        let (c, loads) = match scheme {
            CoarseScheme::ImplicitEuler => (
                problem.mass() / dt,
                (0..n).map(|m| problem.rhs(t(m))).collect(),
            ),
            CoarseScheme::Trapezoidal => {
                let k = problem.linear_stiffness()?;
                let loads = (0..n)
                    .map(|m| {
                        let prev = grid.sync_point(if m == 0 { n - 1 } else { m - 1 });
                        (problem.rhs(t(m)) + problem.rhs(prev)) * 0.5
                    })
                    .collect();
                (problem.mass() / dt - k * 0.5, loads)
            }
        };
        Ok(Self {
            problem,
            c,
            shift: b.rotate_blocks(n - 1),
            loads,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.loads.len()
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    pub fn problem(&self) -> &PeriodicProblem {
        self.problem
    }

    /// `R(U)`; matrix-vector products only.
    pub fn residual(&self, u: &BlockVector<f64>) -> Result<BlockVector<f64>> {
        let n = self.num_blocks();
        u.check_shape(n, self.dim())?;
        let mut out = BlockVector::zeros(n, self.dim());
        for m in 0..n {
            let x = u.block_vector(m) - self.shift.block_vector(m);
            let q = &self.c + self.problem.stiffness(&x);
            let prev = u.block_vector((m + n - 1) % n);
            let r = q * x - &self.c * prev - &self.loads[m];
            out.set_block(m, &r);
        }
        Ok(out)
    }

    /// Block-cyclic Newton matrix with diagonal `Q_d(Z) = C + K_d(Z)`.
    pub fn newton_matrix(&self, z: &DVector<f64>) -> Result<BlockCyclicSystem> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: z.len(),
            });
        }
        let diag = &self.c + self.problem.stiffness_jacobian(z);
        BlockCyclicSystem::new(diag, self.c.clone(), self.num_blocks())
    }

    /// `G` and `r` of a linear problem: `R(U) = G U - r`.
    pub fn linear_system(&self) -> Result<(BlockCyclicSystem, BlockVector<f64>)> {
        let k = self.problem.linear_stiffness()?;
        let q = &self.c + k;
        let n = self.num_blocks();
        let mut r = BlockVector::zeros(n, self.dim());
        for m in 0..n {
            r.set_block(m, &(&q * self.shift.block_vector(m) + &self.loads[m]));
        }
        Ok((BlockCyclicSystem::new(q, self.c.clone(), n)?, r))
    }

    /// `U^(0)`: block `m` is `Z + b'_m`.
    pub fn initial_iterate(&self, z: &[f64]) -> BlockVector<f64> {
        let mut u = self.shift.clone();
        for m in 0..u.num_blocks() {
            for (x, zi) in u.block_mut(m).iter_mut().zip(z) {
                *x += zi;
            }
        }
        u
    }
}

/// Evaluate the coarse residual `R(U)` for defects `b` given in window
/// order (block `n - 1` holds `b_n`).
pub fn residual_r(
    problem: &PeriodicProblem,
    grid: &TimeGrid,
    u: &BlockVector<f64>,
    b: &BlockVector<f64>,
    scheme: CoarseScheme,
) -> Result<BlockVector<f64>> {
    CoarseSystem::new(problem, grid, b, scheme)?.residual(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::testing::{lcg, random_linear, scalar_linear};
    use crate::models::rl_circuit_1d;
    use crate::propagators::{propagate_coarse, PropagatorConfig};
    use crate::Tally;

    #[test]
    fn scalar_two_block_hand_values() {
        // m = 2, k = 3, T = 1, N = 2 -> C = 4, Q = 7
        let p = scalar_linear(2.0, 3.0, |t| 1.0 + (2.0 * std::f64::consts::PI * t).cos(), 1.0);
        let grid = TimeGrid::new(2, 1, 1.0).unwrap();
        let b = BlockVector::from_flat(vec![0.1, 0.2], 1).unwrap();
        let u = BlockVector::from_flat(vec![1.0, -1.0], 1).unwrap();
        let r = residual_r(&p, &grid, &u, &b, CoarseScheme::ImplicitEuler).unwrap();
        let j = |t: f64| 1.0 + (2.0 * std::f64::consts::PI * t).cos();
        let r0 = 7.0 * (1.0 - 0.2) + 4.0 - j(1.0);
        let r1 = 7.0 * (-1.0 - 0.1) - 4.0 * 1.0 - j(0.5);
        assert!((r.block(0)[0] - r0).abs() < 1e-14);
        assert!((r.block(1)[0] - r1).abs() < 1e-14);
    }

    #[test]
    fn linear_residual_is_affine() {
        let p = random_linear(3, 11);
        let grid = TimeGrid::new(4, 3, 1.0).unwrap();
        let b = BlockVector::from_flat(lcg(5, 12), 3).unwrap();
        let u = BlockVector::from_flat(lcg(6, 12), 3).unwrap();
        for scheme in [CoarseScheme::ImplicitEuler, CoarseScheme::Trapezoidal] {
            let sys = CoarseSystem::new(&p, &grid, &b, scheme).unwrap();
            let (g, r) = sys.linear_system().unwrap();
            let direct = g.apply(&u).unwrap().sub(&r);
            let err = sys.residual(&u).unwrap().sub(&direct).norm();
            assert!(err < 1e-12 * direct.norm(), "{scheme:?}: {err}");
        }
    }

    #[test]
    fn shifted_coarse_trajectory_is_a_root() {
        // Pick U, then choose b_n = U_{n mod N} - G(T_n, T_{n-1}, U_{n-1}) so
        // that every block equation holds exactly.
        let p = rl_circuit_1d();
        let grid = TimeGrid::new(4, 1, p.period()).unwrap();
        let cfg = PropagatorConfig::default();
        let u = BlockVector::from_flat(vec![0.01, -0.02, 0.15, 0.05], 1).unwrap();
        let mut b = BlockVector::zeros(4, 1);
        let mut t = Tally::default();
        for n in 1..=4 {
            let g = propagate_coarse(&p, grid.sync_point(n - 1), &u.block_vector(n - 1), grid.sync_point(n), &cfg, &mut t)
                .unwrap();
            b.block_mut(n - 1)[0] = u.block(n % 4)[0] - g[0];
        }
        let r = residual_r(&p, &grid, &u, &b, CoarseScheme::ImplicitEuler).unwrap();
        assert!(r.norm() < 1e-12, "{}", r.norm());
    }

    #[test]
    fn trapezoid_rejects_nonlinear_problems() {
        let p = rl_circuit_1d();
        let grid = TimeGrid::new(2, 1, p.period()).unwrap();
        let b = BlockVector::zeros(2, 1);
        assert!(matches!(
            CoarseSystem::new(&p, &grid, &b, CoarseScheme::Trapezoidal),
            Err(Error::NotLinear)
        ));
    }

    #[test]
    fn initial_iterate_pairs_block_zero_with_last_defect() {
        let p = scalar_linear(1.0, 1.0, |_| 0.0, 1.0);
        let grid = TimeGrid::new(3, 1, 1.0).unwrap();
        let b = BlockVector::from_flat(vec![1.0, 2.0, 3.0], 1).unwrap();
        let sys = CoarseSystem::new(&p, &grid, &b, CoarseScheme::ImplicitEuler).unwrap();
        assert_eq!(sys.initial_iterate(&[10.0]).as_slice(), &[13.0, 11.0, 12.0]);
    }
}
