//! Parallel-in-time solvers for time-periodic systems
//!
//! ```text
//! M u'(t) + K(u(t)) u(t) = j(t),   t in (0, T),   u(0) = u(T)
//! ```
//!
//! The crate provides the periodic Parareal family built on implicit Euler
//! propagators:
//!
//! - sequential time stepping until the periodicity error drops below 1,
//! - PP-IC (initial-value coarse problem),
//! - PP-PC with a Jacobi fixed point on the periodic coarse system,
//! - PP-PC with a multi-harmonic (MH) coarse correction, linear and nonlinear
//!   (simplified Newton with a frozen, block-circulant Jacobian),
//! - the all-at-once time-periodic MH solver on the fine grid,
//! - a generic additive-splitting iteration with a user supplied block-cyclic
//!   preconditioner.
//!
//! Block-cyclic systems with constant diagonal blocks are diagonalized by a
//! unitary DFT along the time axis, so every frequency is an independent
//! `d x d` complex solve. All drivers keep per-worker linear-solve tallies so
//! runs can be compared by effective (critical path) and total solve counts.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod block;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod parallel;
pub mod problem;
pub mod propagators;
pub mod report;

pub use block::BlockVector;
pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use metrics::{SolveCounter, Tally};
pub use parallel::WorkerPool;
pub use problem::PeriodicProblem;
pub use report::SolverReport;
