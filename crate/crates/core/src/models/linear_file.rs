//! Linear problems read from a TOML file.
//!
//! ```toml
//! period = 1.0
//! mass = [[1.0, 0.0], [0.0, 2.0]]
//! stiffness = [[3.0, -1.0], [-1.0, 3.0]]
//!
//! # j(t) = sum over entries of amplitude * f(2 pi harmonic t / period + phase)
//! [[rhs]]
//! kind = "sin"          # "sin" or "cos"
//! harmonic = 1
//! amplitude = [1.0, 0.0]
//! phase = 0.0           # optional
//! ```
//!
//! A `[[rhs]]` entry with `harmonic = 0` and `kind = "cos"` is a constant load.

use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::problem::{make_problem_linear, PeriodicProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsKind {
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhsTerm {
    pub kind: RhsKind,
    pub harmonic: u32,
    pub amplitude: Vec<f64>,
    #[serde(default)]
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearProblemFile {
    pub period: f64,
    pub mass: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
    #[serde(default)]
    pub rhs: Vec<RhsTerm>,
}

fn to_matrix(name: &str, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("`{name}` must be a non-empty square matrix")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

impl LinearProblemFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn into_problem(self) -> Result<PeriodicProblem> {
        let mass = to_matrix("mass", &self.mass)?;
        let stiffness = to_matrix("stiffness", &self.stiffness)?;
        let d = mass.nrows();
        for (i, term) in self.rhs.iter().enumerate() {
            if term.amplitude.len() != d {
                return Err(Error::Parse(format!(
                    "rhs[{i}].amplitude has length {}, expected {d}",
                    term.amplitude.len()
                )));
            }
        }
        let period = self.period;
        let terms: Vec<(RhsKind, f64, DVector<f64>, f64)> = self
            .rhs
            .into_iter()
            .map(|t| (t.kind, t.harmonic as f64, DVector::from_vec(t.amplitude), t.phase))
            .collect();
        let rhs = Arc::new(move |t: f64| {
            let mut j = DVector::zeros(d);
            for (kind, p, amp, phase) in &terms {
                let arg = 2.0 * PI * p * t / period + phase;
                let f = match kind {
                    RhsKind::Sin => arg.sin(),
                    RhsKind::Cos => arg.cos(),
                };
                j.axpy(f, amp, 1.0);
            }
            j
        });
        make_problem_linear(mass, stiffness, rhs, period)
    }
}

pub fn load_linear_problem(path: impl AsRef<Path>) -> Result<PeriodicProblem> {
    let text = std::fs::read_to_string(path)?;
    LinearProblemFile::parse(&text)?.into_problem()
}
