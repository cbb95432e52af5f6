use nalgebra::{ComplexField, DMatrix, DVector, Dyn, LU};

use crate::error::{Error, Result};
use crate::metrics::Tally;

/// Relative pivot threshold: a pivot below `SINGULAR_PIVOT * ||A||_F` is
/// treated as zero.
pub const SINGULAR_PIVOT: f64 = 1e-14;

/// LU factorization with partial pivoting, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct DenseLu<T: ComplexField<RealField = f64>> {
    lu: LU<T, Dyn, Dyn>,
}

impl<T: ComplexField<RealField = f64>> DenseLu<T> {
    pub fn factor(a: DMatrix<T>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let scale = a.norm();
        let threshold = SINGULAR_PIVOT * scale;
        let lu = a.lu();
        let u = lu.u();
        let pivot = u
            .diagonal()
            .iter()
            .map(|v| v.clone().modulus())
            .fold(f64::INFINITY, f64::min);
        if !(pivot > threshold) || scale == 0.0 {
            return Err(Error::SingularMatrix { pivot, threshold });
        }
        Ok(Self { lu })
    }

    pub fn dim(&self) -> usize {
        self.lu.l().nrows()
    }

    pub fn solve(&self, b: &DVector<T>) -> Result<DVector<T>> {
        if b.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: b.len(),
            });
        }
        let x = self.lu.solve(b).ok_or(Error::SingularMatrix {
            pivot: 0.0,
            threshold: 0.0,
        })?;
        Ok(x)
    }

    /// Packed `L\U` factors, for cache identity checks.
    pub fn packed_factors(&self) -> DMatrix<T> {
        let l = self.lu.l();
        let u = self.lu.u();
        let n = l.nrows();
        DMatrix::from_fn(n, n, |i, j| if i > j { l[(i, j)].clone() } else { u[(i, j)].clone() })
    }
}

/// Factor and solve `A x = b`; counts one factor-solve.
pub fn solve_dense<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    b: &DVector<T>,
    tally: &mut Tally,
) -> Result<DVector<T>> {
    let x = DenseLu::factor(a.clone())?.solve(b)?;
    tally.record_factor_solve();
    Ok(x)
}
