//! Spectrum, unitary DFT along the block (time) axis, dense LU, and the
//! multi-harmonic solver for block-cyclic systems.

pub mod block_cyclic;
pub mod dense;
pub mod dft;
pub mod spectrum;

pub use block_cyclic::{diagonal_blocks, solve_block_cyclic_mh, BlockCyclicSystem, MhSolver};
pub use dense::{solve_dense, DenseLu};
pub use dft::{dft_forward, dft_forward_complex, dft_inverse, dft_inverse_complex};
pub use spectrum::{build_spectrum, Spectrum};
