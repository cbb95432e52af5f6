//! Block-cyclic systems with constant diagonal blocks and their
//! multi-harmonic (frequency-by-frequency) solution.
//!
//! ```text
//!     [  Q              -C ]
//! G = [ -C   Q             ]
//!     [      ..   ..       ]
//!     [           -C    Q  ]
//! ```
//!
//! `G` is block-circulant, so `F~ G F~^H = blockdiag(Q - C exp(-i dT omega_j))`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::block::BlockVector;
use crate::error::{Error, Result};
use crate::linalg::dense::DenseLu;
use crate::linalg::dft::{dft_forward, dft_inverse};
use crate::linalg::spectrum::Spectrum;
use crate::metrics::SolveCounter;
use crate::parallel::{Schedule, WorkerPool};

#[derive(Debug, Clone, PartialEq)]
pub struct BlockCyclicSystem {
    diag_block: DMatrix<f64>,
    offdiag_block: DMatrix<f64>,
    num_blocks: usize,
}

impl BlockCyclicSystem {
    pub fn new(diag_block: DMatrix<f64>, offdiag_block: DMatrix<f64>, num_blocks: usize) -> Result<Self> {
        let d = diag_block.nrows();
        if diag_block.ncols() != d || offdiag_block.shape() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "blocks must be square and equal in size, got {:?} and {:?}",
                diag_block.shape(),
                offdiag_block.shape()
            )));
        }
        if num_blocks == 0 {
            return Err(Error::InvalidArgument("block-cyclic system needs at least one block".into()));
        }
        Ok(Self {
            diag_block,
            offdiag_block,
            num_blocks,
        })
    }

    pub fn diag_block(&self) -> &DMatrix<f64> {
        &self.diag_block
    }

    pub fn offdiag_block(&self) -> &DMatrix<f64> {
        &self.offdiag_block
    }

    pub fn num_blocks(&self) -> usize {
        self.num_blocks
    }

    pub fn block_dim(&self) -> usize {
        self.diag_block.nrows()
    }

    /// `(G x)_n = Q x_n - C x_{n-1}` with `x_{-1} = x_{N-1}`.
    pub fn apply(&self, x: &BlockVector<f64>) -> Result<BlockVector<f64>> {
        x.check_shape(self.num_blocks, self.block_dim())?;
        let n = self.num_blocks;
        let mut out = BlockVector::zeros(n, self.block_dim());
        for i in 0..n {
            let prev = (i + n - 1) % n;
            let v = &self.diag_block * x.block_vector(i) - &self.offdiag_block * x.block_vector(prev);
            out.set_block(i, &v);
        }
        Ok(out)
    }
}

/// `G^_jj = Q - C exp(-i dT omega_j)` for every harmonic of `spectrum`.
pub fn diagonal_blocks(sys: &BlockCyclicSystem, spectrum: &Spectrum, dt: f64) -> Vec<DMatrix<Complex64>> {
    assert_eq!(spectrum.len(), sys.num_blocks, "spectrum length must equal the block count");
    spectrum
        .frequencies()
        .iter()
        .map(|&w| frequency_block(sys, w * dt))
        .collect()
}

fn frequency_block(sys: &BlockCyclicSystem, angle: f64) -> DMatrix<Complex64> {
    let phase = Complex64::from_polar(1.0, -angle);
    DMatrix::from_fn(sys.block_dim(), sys.block_dim(), |r, c| {
        Complex64::new(sys.diag_block[(r, c)], 0.0) - phase * sys.offdiag_block[(r, c)]
    })
}

/// Multi-harmonic solver with per-frequency LU factors kept across calls.
///
/// The first solve of each frequency factors its block and counts as a
/// factor-solve on the owning worker; later solves reuse the factors and
/// count as cached re-solves. Frequencies are distributed over workers in
/// contiguous chunks.
#[derive(Debug, Clone)]
pub struct MhSolver {
    sys: BlockCyclicSystem,
    spectrum: Spectrum,
    factors: Vec<Option<DenseLu<Complex64>>>,
}

impl MhSolver {
    pub fn new(sys: BlockCyclicSystem, spectrum: Spectrum) -> Result<Self> {
        if spectrum.len() != sys.num_blocks {
            return Err(Error::DimensionMismatch {
                expected: sys.num_blocks,
                found: spectrum.len(),
            });
        }
        let factors = vec![None; sys.num_blocks];
        Ok(Self {
            sys,
            spectrum,
            factors,
        })
    }

    pub fn system(&self) -> &BlockCyclicSystem {
        &self.sys
    }

    /// Number of frequency blocks factored so far.
    pub fn factorizations(&self) -> usize {
        self.factors.iter().filter(|f| f.is_some()).count()
    }

    /// Hash over the bit patterns of all stored factors.
    pub fn factor_checksum(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for f in self.factors.iter().flatten() {
            for v in f.packed_factors().iter() {
                v.re.to_bits().hash(&mut h);
                v.im.to_bits().hash(&mut h);
            }
        }
        h.finish()
    }

    /// Solve `G U = r` through `G^_jj U^_j = r^_j` and `U = F~^H U^`.
    pub fn solve(
        &mut self,
        rhs: &BlockVector<f64>,
        pool: &WorkerPool,
        counter: &mut SolveCounter,
    ) -> Result<BlockVector<f64>> {
        let n = self.sys.num_blocks;
        let d = self.sys.block_dim();
        rhs.check_shape(n, d)?;
        let rhs_hat = dft_forward(rhs, &self.spectrum)?;
        // exp(-i dT omega_j) = exp(-2 pi i p_j / N); dT = T / N
        let dt = self.spectrum.period() / n as f64;
        let this = &*self;
        let solved = pool.map(n, Schedule::Chunked, counter, |j, tally| {
            let b = DVector::from_column_slice(rhs_hat.block(j));
            let singular = |e: Error| match e {
                Error::SingularMatrix { .. } => Error::SingularFrequencyBlock {
                    index: j,
                    harmonic: this.spectrum.indices()[j],
                },
                other => other,
            };
            match &this.factors[j] {
                Some(lu) => {
                    let x = lu.solve(&b)?;
                    tally.record_cached_resolve();
                    Ok((x, None))
                }
                None => {
                    let block = frequency_block(&this.sys, this.spectrum.frequencies()[j] * dt);
                    let lu = DenseLu::factor(block).map_err(singular)?;
                    let x = lu.solve(&b)?;
                    tally.record_factor_solve();
                    Ok((x, Some(lu)))
                }
            }
        })?;
        let mut u_hat = BlockVector::<Complex64>::zeros(n, d);
        for (j, (x, lu)) in solved.into_iter().enumerate() {
            u_hat.block_mut(j).copy_from_slice(x.as_slice());
            if let Some(lu) = lu {
                self.factors[j] = Some(lu);
            }
        }
        dft_inverse(&u_hat, &self.spectrum)
    }
}

/// One-shot multi-harmonic solve of `G U = r`.
pub fn solve_block_cyclic_mh(
    sys: &BlockCyclicSystem,
    rhs: &BlockVector<f64>,
    spectrum: &Spectrum,
    pool: &WorkerPool,
    counter: &mut SolveCounter,
) -> Result<BlockVector<f64>> {
    MhSolver::new(sys.clone(), spectrum.clone())?.solve(rhs, pool, counter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::spectrum::build_spectrum;

    fn scalar(v: f64) -> DMatrix<f64> {
        DMatrix::from_element(1, 1, v)
    }

    #[test]
    fn two_block_scalar_eigenvalues() {
        // G = [[2, -1], [-1, 2]], T = 2, dT = 1, p = [0, 1], omega = [0, pi]
        let sys = BlockCyclicSystem::new(scalar(2.0), scalar(1.0), 2).unwrap();
        let s = build_spectrum(2, 2.0);
        let blocks = diagonal_blocks(&sys, &s, 1.0);
        assert!((blocks[0][(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((blocks[1][(0, 0)] - Complex64::new(3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn decoupled_blocks_equal_q() {
        let q = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, -1.0, 2.0]);
        let sys = BlockCyclicSystem::new(q.clone(), DMatrix::zeros(2, 2), 5).unwrap();
        let s = build_spectrum(5, 1.0);
        for b in diagonal_blocks(&sys, &s, 0.2) {
            assert_eq!(b.map(|v| v.re), q);
            assert!(b.iter().all(|v| v.im == 0.0));
        }
    }

    #[test]
    fn two_block_solve() {
        let sys = BlockCyclicSystem::new(scalar(2.0), scalar(1.0), 2).unwrap();
        let s = build_spectrum(2, 2.0);
        let pool = WorkerPool::default();
        let mut c = pool.counter();
        let rhs = BlockVector::from_blocks(vec![vec![1.0], vec![1.0]]);
        let x = solve_block_cyclic_mh(&sys, &rhs, &s, &pool, &mut c).unwrap();
        assert!((x.block(0)[0] - 1.0).abs() < 1e-14);
        assert!((x.block(1)[0] - 1.0).abs() < 1e-14);
        assert_eq!(c.factor_solves(), 2);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = BlockCyclicSystem::new(scalar(3.0), scalar(1.0), 4).unwrap();
        let s = build_spectrum(4, 1.0);
        let pool = WorkerPool::default();
        let mut c = pool.counter();
        let x = solve_block_cyclic_mh(&sys, &BlockVector::zeros(4, 1), &s, &pool, &mut c).unwrap();
        assert!(x.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn apply_inverts_solve() {
        let q = DMatrix::from_row_slice(2, 2, &[5.0, 1.0, 0.5, 4.0]);
        let cm = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, -0.3, 0.8]);
        let sys = BlockCyclicSystem::new(q, cm, 6).unwrap();
        let s = build_spectrum(6, 3.0);
        let pool = WorkerPool::new(2).unwrap();
        let mut c = pool.counter();
        let rhs = BlockVector::from_flat((0..12).map(|i| (i as f64 * 0.7).cos()).collect(), 2).unwrap();
        let x = solve_block_cyclic_mh(&sys, &rhs, &s, &pool, &mut c).unwrap();
        let back = sys.apply(&x).unwrap();
        assert!(back.sub(&rhs).norm() < 1e-12 * rhs.norm());
    }

    #[test]
    fn singular_frequency_is_reported() {
        // Q = C makes the DC block zero
        let sys = BlockCyclicSystem::new(scalar(1.0), scalar(1.0), 4).unwrap();
        let s = build_spectrum(4, 1.0);
        let pool = WorkerPool::default();
        let mut c = pool.counter();
        let r = solve_block_cyclic_mh(&sys, &BlockVector::repeat(&[1.0], 4), &s, &pool, &mut c);
        match r {
            Err(Error::SingularFrequencyBlock { index, harmonic }) => {
                assert_eq!(index, s.dc_index());
                assert_eq!(harmonic, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn cached_factors_are_reused() {
        let sys = BlockCyclicSystem::new(scalar(3.0), scalar(1.0), 8).unwrap();
        let s = build_spectrum(8, 1.0);
        let pool = WorkerPool::new(3).unwrap();
        let mut c = pool.counter();
        let mut mh = MhSolver::new(sys, s).unwrap();
        let rhs = BlockVector::repeat(&[1.0], 8);
        mh.solve(&rhs, &pool, &mut c).unwrap();
        let checksum = mh.factor_checksum();
        assert_eq!(mh.factorizations(), 8);
        for _ in 0..3 {
            mh.solve(&rhs, &pool, &mut c).unwrap();
        }
        assert_eq!(mh.factor_checksum(), checksum);
        assert_eq!(c.factor_solves(), 8);
        assert_eq!(c.cached_resolves(), 24);
    }
}
