//! Constants of the simplified Newton convergence bound for scalar
//! nonlinearities `x -> kappa(|x|) x`.
//!
//! With `c1 = min kappa_d`, `L2` the Lipschitz constant of `kappa_d` and
//! `delta0 = L2 / c1`, the iteration started at `U^(0)` converges when
//! `h0 = delta0 ||U^(1) - U^(0)||_2 <= 1/2`, and the iterates stay in the
//! ball of radius `rho = (1 - sqrt(1 - 2 h0)) / delta0` around `U^(0)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::kappa::Kappa;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceConstants {
    pub c1: f64,
    pub l2: f64,
    pub delta0: f64,
    pub rho1: f64,
    pub h0: f64,
    /// `None` when `h0 > 0.5`.
    pub rho: Option<f64>,
}

impl ConvergenceConstants {
    pub fn from_bounds(c1: f64, l2: f64, rho1: f64) -> Self {
        let delta0 = l2 / c1;
        let h0 = delta0 * rho1;
        Self {
            c1,
            l2,
            delta0,
            rho1,
            h0,
            rho: newton_radius(delta0, rho1),
        }
    }

    pub fn hypothesis_holds(&self) -> bool {
        self.h0 <= 0.5
    }

    pub fn verdict(&self) -> &'static str {
        if self.hypothesis_holds() {
            "convergence condition h0 <= 0.5 holds"
        } else {
            "convergence condition h0 <= 0.5 fails"
        }
    }
}

/// `rho = (1 - sqrt(1 - 2 delta0 rho1)) / delta0`, or `rho1` in the limit
/// `delta0 -> 0`. `None` when `delta0 rho1 > 0.5`.
pub fn newton_radius(delta0: f64, rho1: f64) -> Option<f64> {
    let h0 = delta0 * rho1;
    if !(h0 <= 0.5) {
        return None;
    }
    if delta0 == 0.0 {
        return Some(rho1);
    }
    Some((1.0 - (1.0 - 2.0 * h0).sqrt()) / delta0)
}

/// Sample `kappa_d` on `grid_points` equidistant points of `domain`, plus
/// zero and every breakpoint that falls inside, and derive the constants.
///
/// `c1` is the sampled minimum of `kappa_d`. `L2` is the sampled maximum of
/// the symbolic `|kappa_d'|`, taking both one-sided values at breakpoints so
/// that jumps of `kappa''` are not missed.
pub fn estimate_constants(
    kappa: &dyn Kappa,
    domain: (f64, f64),
    grid_points: usize,
    rho1: f64,
) -> Result<ConvergenceConstants> {
    let (a, b) = domain;
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty domain ({a}, {b})")));
    }
    if grid_points < 100 {
        return Err(Error::InvalidArgument(format!(
            "at least 100 sample points are required, got {grid_points}"
        )));
    }
    let mut points: Vec<f64> = (0..grid_points)
        .map(|i| a + (b - a) * i as f64 / (grid_points - 1) as f64)
        .collect();
    for bp in kappa.breakpoints().into_iter().chain([0.0]) {
        for x in [bp, -bp] {
            if a <= x && x <= b {
                points.push(x);
            }
        }
    }
    let mut c1 = f64::INFINITY;
    let mut l2 = 0.0_f64;
    for &x in &points {
        c1 = c1.min(kappa.kappa_d(x));
        l2 = l2.max(kappa.kappa_d_slope(x, false)).max(kappa.kappa_d_slope(x, true));
    }
    Ok(ConvergenceConstants::from_bounds(c1, l2, rho1))
}
