//! Fine and coarse time propagators built on implicit Euler steps.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::linalg::solve_dense;
use crate::metrics::{mixed_norm, Tally, Tolerances};
use crate::problem::PeriodicProblem;

/// Nonlinear solver used inside every implicit step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerStepSolver {
    /// Newton with the Jacobian `M/h + K_d(u)`.
    FullNewton,
    /// Fixed point `(M/h + K(u_i)) u_{i+1} = M/h u_prev + j`.
    SuccessiveSubstitution,
}

/// Time discretization of the coarse propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoarseScheme {
    ImplicitEuler,
    /// Implicit trapezoidal rule; linear problems only.
    Trapezoidal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagatorConfig {
    /// Stop when the update is below this value in the mixed norm.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub per_step_solver: PerStepSolver,
    pub coarse_scheme: CoarseScheme,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-10,
            newton_max_iter: 50,
            per_step_solver: PerStepSolver::FullNewton,
            coarse_scheme: CoarseScheme::ImplicitEuler,
        }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.newton_tol > 0.0) {
            return Err(Error::InvalidArgument("newton_tol must be positive".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidArgument("newton_max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

/// One implicit Euler step of size `h` from `(t_prev, u_prev)`:
/// `(M/h + K(u)) u = M/h u_prev + j(t_prev + h)`.
pub fn implicit_euler_step(
    problem: &PeriodicProblem,
    t_prev: f64,
    u_prev: &DVector<f64>,
    h: f64,
    cfg: &PropagatorConfig,
    tally: &mut Tally,
) -> Result<DVector<f64>> {
    euler_step_to(problem, t_prev + h, u_prev, h, cfg, tally)
}

/// Implicit Euler step ending at `t_next`.
fn euler_step_to(
    problem: &PeriodicProblem,
    t_next: f64,
    u_prev: &DVector<f64>,
    h: f64,
    cfg: &PropagatorConfig,
    tally: &mut Tally,
) -> Result<DVector<f64>> {
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    if u_prev.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: u_prev.len(),
        });
    }
    let c = problem.mass() / h;
    let load = &c * u_prev + problem.rhs(t_next);

    if problem.is_linear() {
        let a = &c + problem.stiffness(u_prev);
        return solve_dense(&a, &load, tally);
    }

    let tol = Tolerances::default();
    let mut u = u_prev.clone();
    let mut last = f64::INFINITY;
    for _ in 0..cfg.newton_max_iter {
        let next = match cfg.per_step_solver {
            PerStepSolver::FullNewton => {
                let residual = &c * &u + problem.apply_stiffness(&u) - &load;
                let jac = &c + problem.stiffness_jacobian(&u);
                let du = solve_dense(&jac, &residual, tally)?;
                &u - du
            }
            PerStepSolver::SuccessiveSubstitution => {
                let a = &c + problem.stiffness(&u);
                solve_dense(&a, &load, tally)?
            }
        };
        last = mixed_norm(next.as_slice(), u.as_slice(), tol);
        u = next;
        if last <= cfg.newton_tol {
            return Ok(u);
        }
    }
    Err(Error::StepNotConverged {
        time: t_next,
        iterations: cfg.newton_max_iter,
        residual: last,
    })
}

/// Implicit trapezoidal step for linear problems:
/// `(M/h + K/2) u = (M/h - K/2) u_prev + (j(t_prev) + j(t_prev + h)) / 2`.
pub fn trapezoidal_step(
    problem: &PeriodicProblem,
    t_prev: f64,
    t_next: f64,
    u_prev: &DVector<f64>,
    tally: &mut Tally,
) -> Result<DVector<f64>> {
    let k = problem.linear_stiffness()?;
    let h = t_next - t_prev;
    if !(h > 0.0) {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {h}")));
    }
    let c = problem.mass() / h - &k * 0.5;
    let q = &c + &k;
    let load = &c * u_prev + (problem.rhs(t_prev) + problem.rhs(t_next)) * 0.5;
    solve_dense(&q, &load, tally)
}

/// Fine propagator `F(t_end, t_start, u_start)`: implicit Euler over every
/// fine step of `grid` between the two times.
pub fn propagate_fine(
    problem: &PeriodicProblem,
    t_start: f64,
    u_start: &DVector<f64>,
    t_end: f64,
    grid: &TimeGrid,
    cfg: &PropagatorConfig,
    tally: &mut Tally,
) -> Result<DVector<f64>> {
    let h = grid.fine_step();
    let span = t_end - t_start;
    let steps = (span / h).round();
    if steps < 0.0 || (steps * h - span).abs() > 1e-12 * grid.period() {
        return Err(Error::InvalidArgument(format!(
            "interval [{t_start}, {t_end}] is not a whole number of fine steps of {h}"
        )));
    }
    let first = (t_start / h).round() as usize;
    let mut u = u_start.clone();
    for i in 0..steps as usize {
        u = euler_step_to(problem, grid.fine_point(first + i + 1), &u, h, cfg, tally)?;
    }
    Ok(u)
}

/// Coarse propagator `G(t_end, t_start, u_start)`: a single step over the
/// whole window.
pub fn propagate_coarse(
    problem: &PeriodicProblem,
    t_start: f64,
    u_start: &DVector<f64>,
    t_end: f64,
    cfg: &PropagatorConfig,
    tally: &mut Tally,
) -> Result<DVector<f64>> {
    match cfg.coarse_scheme {
        CoarseScheme::ImplicitEuler => {
            euler_step_to(problem, t_end, u_start, t_end - t_start, cfg, tally)
        }
        CoarseScheme::Trapezoidal => trapezoidal_step(problem, t_start, t_end, u_start, tally),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::rl_circuit_1d;
    use crate::problem::make_problem_linear;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn scalar_linear(m: f64, k: f64, j: f64) -> PeriodicProblem {
        make_problem_linear(
            DMatrix::from_element(1, 1, m),
            DMatrix::from_element(1, 1, k),
            Arc::new(move |_| DVector::from_element(1, j)),
            1.0,
        )
        .unwrap()
    }

    fn v(x: f64) -> DVector<f64> {
        DVector::from_element(1, x)
    }

    #[test]
    fn analytic_single_step() {
        let p = scalar_linear(1.0, 1.0, 0.0);
        let mut t = Tally::default();
        let u = implicit_euler_step(&p, 0.0, &v(1.0), 1.0, &PropagatorConfig::default(), &mut t).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
        assert_eq!(t.factor_solves, 1);
    }

    #[test]
    fn steady_state_is_preserved() {
        let (k, c) = (2.0, 3.0);
        let p = scalar_linear(0.7, k, c);
        let mut t = Tally::default();
        let u = implicit_euler_step(&p, 0.0, &v(c / k), 0.1, &PropagatorConfig::default(), &mut t).unwrap();
        assert!((u[0] - c / k).abs() < 1e-14);
    }

    #[test]
    fn linear_step_residual() {
        let p = scalar_linear(0.3, 5.0, 1.2);
        let mut t = Tally::default();
        let h = 0.01;
        let u0 = v(0.4);
        let u = implicit_euler_step(&p, 0.0, &u0, h, &PropagatorConfig::default(), &mut t).unwrap();
        let r = (0.3 / h + 5.0) * u[0] - 0.3 / h * u0[0] - 1.2;
        assert!(r.abs() <= 1e-12 * (0.4 + 1.2));
    }

    #[test]
    fn newton_and_substitution_agree_on_rl_model() {
        let p = rl_circuit_1d();
        let newton = PropagatorConfig::default();
        let subst = PropagatorConfig {
            per_step_solver: PerStepSolver::SuccessiveSubstitution,
            ..newton
        };
        let mut t = Tally::default();
        for u0 in [0.01, 0.15, -0.3] {
            let a = implicit_euler_step(&p, 0.0, &v(u0), 1e-5, &newton, &mut t).unwrap();
            let b = implicit_euler_step(&p, 0.0, &v(u0), 1e-5, &subst, &mut t).unwrap();
            assert!((a[0] - b[0]).abs() <= 1e-9, "{} vs {}", a[0], b[0]);
        }
    }

    #[test]
    fn zero_length_fine_propagation_is_identity() {
        let p = scalar_linear(1.0, 1.0, 0.0);
        let g = TimeGrid::new(4, 5, 1.0).unwrap();
        let mut t = Tally::default();
        let u = propagate_fine(&p, 0.25, &v(0.3), 0.25, &g, &PropagatorConfig::default(), &mut t).unwrap();
        assert_eq!(u[0], 0.3);
        assert_eq!(t.factor_solves, 0);
    }

    #[test]
    fn two_fine_steps_compose() {
        let (m, k) = (1.0, 2.0);
        let p = scalar_linear(m, k, 0.0);
        let g = TimeGrid::new(1, 2, 1.0).unwrap();
        let mut t = Tally::default();
        let u = propagate_fine(&p, 0.0, &v(1.0), 1.0, &g, &PropagatorConfig::default(), &mut t).unwrap();
        let c = m / 0.5;
        assert!((u[0] - (c / (c + k)).powi(2)).abs() < 1e-15);
        assert_eq!(t.factor_solves, 2);
    }

    #[test]
    fn fine_propagation_rejects_partial_steps() {
        let p = scalar_linear(1.0, 1.0, 0.0);
        let g = TimeGrid::new(2, 2, 1.0).unwrap();
        let mut t = Tally::default();
        assert!(propagate_fine(&p, 0.0, &v(1.0), 0.3, &g, &PropagatorConfig::default(), &mut t).is_err());
    }

    #[test]
    fn coarse_equals_single_fine_step() {
        let p = rl_circuit_1d();
        let cfg = PropagatorConfig::default();
        let g = TimeGrid::new(10, 1, p.period()).unwrap();
        let mut t = Tally::default();
        let a = propagate_coarse(&p, g.sync_point(3), &v(0.05), g.sync_point(4), &cfg, &mut t).unwrap();
        let b = propagate_fine(&p, g.sync_point(3), &v(0.05), g.sync_point(4), &g, &cfg, &mut t).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn coarse_step_matches_independent_scalar_newton() {
        let p = rl_circuit_1d();
        let dt = 0.002;
        let mut t = Tally::default();
        let u = propagate_coarse(&p, 0.0, &v(0.0), dt, &PropagatorConfig::default(), &mut t).unwrap();
        // bisection on g(x) = (m/dt + kappa(|x|)) x - j(dt), monotone in x
        let m = 0.1;
        let j = 1e-3 * (2.0 * std::f64::consts::PI * dt / 0.02).sin();
        let kappa = |s: f64| -5.0 * s.powi(3) + 1.5 * s * s + 1.0;
        let g = |x: f64| (m / dt + kappa(x.abs())) * x - j;
        let (mut lo, mut hi) = (-1.0, 1.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!(u[0].is_finite());
        assert!((u[0] - 0.5 * (lo + hi)).abs() < 1e-15);
    }

    #[test]
    fn first_order_convergence() {
        // u' + u = cos t, u(0) = 0.5 has u(t) = (cos t + sin t) / 2. The end
        // point avoids a full period, where the leading error term cancels.
        let p = make_problem_linear(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            Arc::new(|t: f64| DVector::from_element(1, t.cos())),
            2.0 * std::f64::consts::PI,
        )
        .unwrap();
        let exact = |t: f64| 0.5 * (t.cos() + t.sin());
        let t_end = 1.5;
        let err = |steps: usize| {
            let g = TimeGrid::new(1, steps, t_end).unwrap();
            let mut t = Tally::default();
            let u = propagate_fine(&p, 0.0, &v(0.5), t_end, &g, &PropagatorConfig::default(), &mut t).unwrap();
            (u[0] - exact(t_end)).abs()
        };
        let e1 = err(200);
        let e2 = err(400);
        let ratio = e1 / e2;
        assert!((ratio - 2.0).abs() <= 0.4, "ratio {ratio}");
    }

    #[test]
    fn trapezoidal_is_second_order() {
        let p = make_problem_linear(
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            Arc::new(|t: f64| DVector::from_element(1, t.cos())),
            2.0 * std::f64::consts::PI,
        )
        .unwrap();
        let exact = |t: f64| 0.5 * (t.cos() + t.sin());
        let err = |steps: usize| {
            let h = 1.0 / steps as f64;
            let mut u = v(0.5);
            let mut t = Tally::default();
            for i in 0..steps {
                u = trapezoidal_step(&p, i as f64 * h, (i + 1) as f64 * h, &u, &mut t).unwrap();
            }
            (u[0] - exact(1.0)).abs()
        };
        let ratio = err(50) / err(100);
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }
}
