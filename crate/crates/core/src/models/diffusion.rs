//! 1D nonlinear diffusion on `(0, 1)` with homogeneous Dirichlet ends.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::models::kappa::{Kappa, KappaPiecewise};
use crate::problem::{MatrixFn, PeriodicProblem};

pub const DIFFUSION_PERIOD: f64 = 0.5;
/// Source amplitude; drives edge gradients up to about 0.25, across both
/// bends of the default nonlinearity.
pub const DIFFUSION_AMPLITUDE: f64 = 1.25;

/// Edge gradients `g_e = (u_{e+1} - u_e) / h` for `e = 0..=d`, with the
/// boundary values `u_0 = u_{d+1} = 0`.
fn gradients(u: &DVector<f64>, h: f64) -> Vec<f64> {
    let d = u.len();
    let at = |i: usize| if i == 0 || i == d + 1 { 0.0 } else { u[i - 1] };
    (0..=d).map(|e| (at(e + 1) - at(e)) / h).collect()
}

/// Assemble `sum_e w_e a_e a_e^T / h` where `a_e` couples the two nodes of
/// edge `e`.
fn assemble(weights: &[f64], h: f64) -> DMatrix<f64> {
    let d = weights.len() - 1;
    let mut k = DMatrix::zeros(d, d);
    for (e, &w) in weights.iter().enumerate() {
        let w = w / h;
        // edge e joins unknowns e - 1 and e (when interior)
        let left = e.checked_sub(1);
        let right = (e < d).then_some(e);
        if let Some(l) = left {
            k[(l, l)] += w;
        }
        if let Some(r) = right {
            k[(r, r)] += w;
        }
        if let (Some(l), Some(r)) = (left, right) {
            k[(l, r)] -= w;
            k[(r, l)] -= w;
        }
    }
    k
}

/// Finite-volume discretization of `u_t - (kappa(|u_x|) u_x)_x = f` on `d`
/// interior nodes: `M = h I`, `K(u)` uses the edge coefficient
/// `kappa(|g_e|)` and `K_d(u)` the edge derivative `kappa_d(g_e)`. The source
/// is `j_i(t) = h A sin(2 pi t / T) sin(pi x_i)`.
pub fn nonlinear_diffusion_1d(d: usize) -> Result<PeriodicProblem> {
    diffusion_with_kappa(d, KappaPiecewise::rl_circuit(), DIFFUSION_AMPLITUDE, DIFFUSION_PERIOD)
}

pub fn diffusion_with_kappa(
    d: usize,
    kappa: impl Kappa + 'static,
    amplitude: f64,
    period: f64,
) -> Result<PeriodicProblem> {
    if d < 3 {
        return Err(Error::InvalidArgument(format!("diffusion model needs d >= 3, got {d}")));
    }
    let h = 1.0 / (d + 1) as f64;
    let kappa = Arc::new(kappa);
    let k1 = Arc::clone(&kappa);
    let stiffness: MatrixFn = Arc::new(move |u| {
        let w: Vec<f64> = gradients(u, h).iter().map(|g| k1.value(g.abs())).collect();
        assemble(&w, h)
    });
    let jacobian: MatrixFn = Arc::new(move |u| {
        let w: Vec<f64> = gradients(u, h).iter().map(|&g| kappa.kappa_d(g)).collect();
        assemble(&w, h)
    });
    let profile = DVector::from_fn(d, |i, _| h * amplitude * (PI * (i + 1) as f64 * h).sin());
    PeriodicProblem::new(
        period,
        DMatrix::identity(d, d) * h,
        stiffness,
        jacobian,
        Arc::new(move |t| &profile * (2.0 * PI * t / period).sin()),
    )
}
