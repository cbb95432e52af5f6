//! Model problems and the convergence-constant estimator.

pub mod constants;
pub mod diffusion;
pub mod kappa;
pub mod linear_file;
pub mod rl_circuit;

pub use constants::{estimate_constants, newton_radius, ConvergenceConstants};
pub use diffusion::{diffusion_with_kappa, nonlinear_diffusion_1d};
pub use kappa::{ConstantKappa, CubicBranch, Kappa, KappaPiecewise};
pub use linear_file::{load_linear_problem, LinearProblemFile};
pub use rl_circuit::rl_circuit_1d;

use crate::error::{Error, Result};
use crate::problem::PeriodicProblem;

/// Resolve `"rl1d"`, `"diffusion1d:<d>"` or `"linear:<path>"`.
pub fn problem_by_name(name: &str) -> Result<PeriodicProblem> {
    match name.split_once(':') {
        None if name == "rl1d" => Ok(rl_circuit_1d()),
        Some(("diffusion1d", d)) => {
            let d = d
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad dimension in problem name `{name}`")))?;
            nonlinear_diffusion_1d(d)
        }
        Some(("linear", path)) if !path.is_empty() => load_linear_problem(path),
        _ => Err(Error::InvalidArgument(format!(
            "unknown problem `{name}` (expected rl1d, diffusion1d:<d> or linear:<file>)"
        ))),
    }
}
