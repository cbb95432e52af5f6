use nalgebra::DVector;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// `num_blocks` vectors of dimension `block_dim`, stored contiguously.
///
/// Holds the coarse unknowns `U_0..U_{N-1}`, fine-grid values, defects, or
/// their Fourier coefficients (`T = Complex64`).
#[derive(Debug, Clone, PartialEq)]
pub struct BlockVector<T> {
    data: Vec<T>,
    block_dim: usize,
}

impl<T: Clone + Default> BlockVector<T> {
    pub fn zeros(num_blocks: usize, block_dim: usize) -> Self {
        assert!(block_dim > 0, "block dimension must be positive");
        Self {
            data: vec![T::default(); num_blocks * block_dim],
            block_dim,
        }
    }

    /// Panics if the blocks have different lengths.
    pub fn from_blocks(blocks: Vec<Vec<T>>) -> Self {
        assert!(!blocks.is_empty(), "at least one block is required");
        let block_dim = blocks[0].len();
        assert!(block_dim > 0, "block dimension must be positive");
        let mut data = Vec::with_capacity(blocks.len() * block_dim);
        for b in blocks {
            assert_eq!(b.len(), block_dim, "all blocks must share one dimension");
            data.extend(b);
        }
        Self { data, block_dim }
    }

    pub fn from_flat(data: Vec<T>, block_dim: usize) -> Result<Self> {
        if block_dim == 0 || !data.len().is_multiple_of(block_dim) {
            return Err(Error::DimensionMismatch {
                expected: block_dim,
                found: data.len(),
            });
        }
        Ok(Self { data, block_dim })
    }

    /// Every block equal to `value`.
    pub fn repeat(value: &[T], num_blocks: usize) -> Self {
        let mut data = Vec::with_capacity(value.len() * num_blocks);
        for _ in 0..num_blocks {
            data.extend_from_slice(value);
        }
        Self {
            data,
            block_dim: value.len(),
        }
    }
}

impl<T> BlockVector<T> {
    pub fn num_blocks(&self) -> usize {
        self.data.len() / self.block_dim
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn block(&self, n: usize) -> &[T] {
        &self.data[n * self.block_dim..(n + 1) * self.block_dim]
    }

    pub fn block_mut(&mut self, n: usize) -> &mut [T] {
        let d = self.block_dim;
        &mut self.data[n * d..(n + 1) * d]
    }

    pub fn blocks(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks(self.block_dim)
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_flat(self) -> Vec<T> {
        self.data
    }

    pub(crate) fn check_shape(&self, num_blocks: usize, block_dim: usize) -> Result<()> {
        if self.block_dim != block_dim {
            return Err(Error::DimensionMismatch {
                expected: block_dim,
                found: self.block_dim,
            });
        }
        if self.num_blocks() != num_blocks {
            return Err(Error::DimensionMismatch {
                expected: num_blocks,
                found: self.num_blocks(),
            });
        }
        Ok(())
    }
}

impl BlockVector<f64> {
    pub fn block_vector(&self, n: usize) -> DVector<f64> {
        DVector::from_column_slice(self.block(n))
    }

    pub fn set_block(&mut self, n: usize, v: &DVector<f64>) {
        self.block_mut(n).copy_from_slice(v.as_slice());
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Blockwise mean.
    pub fn mean_block(&self) -> Vec<f64> {
        let n = self.num_blocks() as f64;
        let mut mean = vec![0.0; self.block_dim];
        for b in self.blocks() {
            for (m, x) in mean.iter_mut().zip(b) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        mean
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.data.len(), other.data.len());
        Self {
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
            block_dim: self.block_dim,
        }
    }

    pub fn to_complex(&self) -> BlockVector<Complex64> {
        BlockVector {
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            block_dim: self.block_dim,
        }
    }

    /// Cyclic shift of the block order: block `n` of the result is block
    /// `(n + shift) mod N` of `self`.
    pub fn rotate_blocks(&self, shift: usize) -> Self {
        let n = self.num_blocks();
        let mut out = Self::zeros(n, self.block_dim);
        for i in 0..n {
            out.block_mut(i).copy_from_slice(self.block((i + shift) % n));
        }
        out
    }
}

impl BlockVector<Complex64> {
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Serialize for BlockVector<f64> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let blocks: Vec<&[f64]> = self.blocks().collect();
        let mut s = serializer.serialize_struct("BlockVector", 2)?;
        s.serialize_field("block_dim", &self.block_dim)?;
        s.serialize_field("blocks", &blocks)?;
        s.end()
    }
}
