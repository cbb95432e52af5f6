use std::f64::consts::PI;
use std::sync::Arc;

use crate::models::kappa::{Kappa, KappaPiecewise};
use crate::problem::{make_problem_scalar_nonlinear, PeriodicProblem};

pub const RL_MASS: f64 = 0.1;
pub const RL_PERIOD: f64 = 0.02;
pub const RL_AMPLITUDE: f64 = 1e-3;

/// Nonlinear RL circuit `m u' + kappa(|u|) u = j(t)` with `m = 0.1`,
/// `j(t) = 1e-3 sin(2 pi t / T)`, `T = 0.02` and the piecewise cubic
/// [`KappaPiecewise`].
pub fn rl_circuit_1d() -> PeriodicProblem {
    let kappa = Arc::new(KappaPiecewise::rl_circuit());
    let k = Arc::clone(&kappa);
    make_problem_scalar_nonlinear(
        RL_MASS,
        Arc::new(move |s| k.value(s)),
        Arc::new(move |s| kappa.derivative(s)),
        Arc::new(|t| RL_AMPLITUDE * (2.0 * PI * t / RL_PERIOD).sin()),
        RL_PERIOD,
    )
    .expect("built-in model parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn parameters() {
        let p = rl_circuit_1d();
        assert_eq!(p.dim(), 1);
        assert_eq!(p.period(), 0.02);
        assert_eq!(p.mass()[(0, 0)], 0.1);
        assert_eq!(p.stiffness(&DVector::from_element(1, 0.0))[(0, 0)], 1.0);
        assert_eq!(p.stiffness(&DVector::from_element(1, -0.25))[(0, 0)], 1.02);
        assert_eq!(p.stiffness_jacobian(&DVector::from_element(1, 0.0))[(0, 0)], 1.0);
        assert!((p.rhs(0.005)[0] - 1e-3).abs() < 1e-18);
    }
}
