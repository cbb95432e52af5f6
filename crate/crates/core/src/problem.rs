//! The time-periodic problem `M u' + K(u) u = j(t)`, `u(0) = u(T)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type MatrixFn = Arc<dyn Fn(&DVector<f64>) -> DMatrix<f64> + Send + Sync>;
pub type RhsFn = Arc<dyn Fn(f64) -> DVector<f64> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Condition estimate above which a probe shift of the pencil counts as singular.
const PENCIL_CONDITION_LIMIT: f64 = 1e14;
const PENCIL_PROBES: usize = 3;
const PENCIL_SEED: u64 = 0x5eed_0f9e_4c11;

/// Immutable description of a time-periodic system.
///
/// `stiffness(u)` returns `K(u)`, `stiffness_jacobian(x)` returns
/// `K_d(x) = d/dx [K(x) x]`. Both closures must be pure; the problem is
/// shared read-only between workers.
#[derive(Clone)]
pub struct PeriodicProblem {
    dim: usize,
    period: f64,
    mass: DMatrix<f64>,
    stiffness: MatrixFn,
    stiffness_jacobian: MatrixFn,
    rhs: RhsFn,
    linear: bool,
}

impl fmt::Debug for PeriodicProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicProblem")
            .field("dim", &self.dim)
            .field("period", &self.period)
            .field("linear", &self.linear)
            .finish_non_exhaustive()
    }
}

impl PeriodicProblem {
    /// General (nonlinear) problem.
    pub fn new(
        period: f64,
        mass: DMatrix<f64>,
        stiffness: MatrixFn,
        stiffness_jacobian: MatrixFn,
        rhs: RhsFn,
    ) -> Result<Self> {
        let problem = Self {
            dim: mass.nrows(),
            period,
            mass,
            stiffness,
            stiffness_jacobian,
            rhs,
            linear: false,
        };
        problem.validate()?;
        Ok(problem)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 || self.mass.ncols() != d {
            return Err(Error::InvalidArgument(format!(
                "mass matrix must be square and non-empty, got {}x{}",
                self.mass.nrows(),
                self.mass.ncols()
            )));
        }
        if !(self.period > 0.0 && self.period.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "period must be positive, got {}",
                self.period
            )));
        }
        let zero = DVector::zeros(d);
        for (name, m) in [
            ("stiffness", (self.stiffness)(&zero)),
            ("stiffness jacobian", (self.stiffness_jacobian)(&zero)),
        ] {
            if m.nrows() != d || m.ncols() != d {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be {d}x{d}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        let j0 = (self.rhs)(0.0);
        if j0.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: j0.len(),
            });
        }
        let jt = (self.rhs)(self.period);
        if (&j0 - &jt).norm() > 1e-14 * (1.0 + j0.norm()) {
            return Err(Error::InvalidArgument(
                "right-hand side is not T-periodic: j(0) != j(T)".into(),
            ));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn mass(&self) -> &DMatrix<f64> {
        &self.mass
    }

    /// `K(u)`.
    pub fn stiffness(&self, u: &DVector<f64>) -> DMatrix<f64> {
        (self.stiffness)(u)
    }

    /// `K_d(x) = d/dx [K(x) x]`.
    pub fn stiffness_jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        (self.stiffness_jacobian)(x)
    }

    /// `K(u) u`.
    pub fn apply_stiffness(&self, u: &DVector<f64>) -> DVector<f64> {
        (self.stiffness)(u) * u
    }

    /// `j(t)`.
    pub fn rhs(&self, t: f64) -> DVector<f64> {
        (self.rhs)(t)
    }

    /// `K` does not depend on `u`.
    pub fn is_linear(&self) -> bool {
        self.linear
    }

    /// Constant stiffness of a linear problem.
    pub fn linear_stiffness(&self) -> Result<DMatrix<f64>> {
        if !self.linear {
            return Err(Error::NotLinear);
        }
        Ok(self.stiffness(&DVector::zeros(self.dim)))
    }
}

/// Linear problem `M u' + K u = j(t)`.
///
/// The pencil `(M, K)` is probed at three pseudo-random shifts `lambda > 0`;
/// the problem is rejected only if `K + lambda M` is numerically singular at
/// every probe.
pub fn make_problem_linear(
    mass: DMatrix<f64>,
    stiffness: DMatrix<f64>,
    rhs: RhsFn,
    period: f64,
) -> Result<PeriodicProblem> {
    if stiffness.shape() != mass.shape() {
        return Err(Error::InvalidArgument(format!(
            "mass is {:?} but stiffness is {:?}",
            mass.shape(),
            stiffness.shape()
        )));
    }
    check_pencil(&mass, &stiffness)?;
    let k = Arc::new(stiffness);
    let k1 = Arc::clone(&k);
    let k2 = Arc::clone(&k);
    let mut problem = PeriodicProblem::new(
        period,
        mass,
        Arc::new(move |_| (*k1).clone()),
        Arc::new(move |_| (*k2).clone()),
        rhs,
    )?;
    problem.linear = true;
    Ok(problem)
}

fn condition_estimate(a: &DMatrix<f64>) -> f64 {
    let sv = a.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

fn check_pencil(mass: &DMatrix<f64>, stiffness: &DMatrix<f64>) -> Result<()> {
    let m_norm = mass.norm();
    let k_norm = stiffness.norm();
    let scale = if m_norm > 0.0 && k_norm > 0.0 {
        k_norm / m_norm
    } else {
        1.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(PENCIL_SEED);
    for _ in 0..PENCIL_PROBES {
        let lambda = scale * rng.random_range(0.1..10.0);
        let shifted = stiffness + mass * lambda;
        if condition_estimate(&shifted) <= PENCIL_CONDITION_LIMIT {
            return Ok(());
        }
    }
    Err(Error::SingularPencil)
}

/// `kappa_d(x) = kappa'(|x|) |x| + kappa(|x|)`, the derivative of
/// `x -> kappa(|x|) x`.
pub fn kappa_d(kappa: impl Fn(f64) -> f64, kappa_prime: impl Fn(f64) -> f64, x: f64) -> f64 {
    let s = x.abs();
    kappa_prime(s) * s + kappa(s)
}

/// Scalar problem `m u' + kappa(|u|) u = j(t)`.
pub fn make_problem_scalar_nonlinear(
    m: f64,
    kappa: ScalarFn,
    kappa_prime: ScalarFn,
    rhs: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    period: f64,
) -> Result<PeriodicProblem> {
    if m < 0.0 {
        return Err(Error::InvalidArgument(format!("m must be non-negative, got {m}")));
    }
    if kappa(0.0) <= 0.0 {
        return Err(Error::InvalidArgument("kappa must be positive".into()));
    }
    let k = Arc::clone(&kappa);
    let stiffness: MatrixFn = Arc::new(move |u| DMatrix::from_element(1, 1, k(u[0].abs())));
    let jac: MatrixFn = Arc::new(move |x| {
        DMatrix::from_element(1, 1, kappa_d(&*kappa, &*kappa_prime, x[0]))
    });
    PeriodicProblem::new(
        period,
        DMatrix::from_element(1, 1, m),
        stiffness,
        jac,
        Arc::new(move |t| DVector::from_element(1, rhs(t))),
    )
}
