//! CSV and JSON artifacts.

use std::fs::File;
use std::path::Path;

use anyhow::{Context, Result};
use periodic_parareal::algorithms::SweepRow;
use periodic_parareal::SolverReport;
use serde::Serialize;

/// Scientific notation with 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

/// `iteration,error,inner_iterations`. Drivers that record the error of the
/// initial iterate start at iteration 0.
pub fn write_errors(path: &Path, report: &SolverReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["iteration", "error", "inner_iterations"])?;
    let first = if report.error_history.len() > report.outer_iterations { 0 } else { 1 };
    for (i, e) in report.error_history.iter().enumerate() {
        let k = first + i;
        let inner = k
            .checked_sub(1)
            .and_then(|j| report.inner_iterations.get(j))
            .map(ToString::to_string)
            .unwrap_or_default();
        w.write_record([k.to_string(), num(*e), inner])?;
    }
    w.flush()?;
    Ok(())
}

/// `t,u0,u1,...`, one row per reported time point.
pub fn write_solution(path: &Path, report: &SolverReport) -> Result<()> {
    let mut w = writer(path)?;
    let d = report.solution.block_dim();
    let mut header = vec!["t".to_string()];
    header.extend((0..d).map(|c| format!("u{c}")));
    w.write_record(&header)?;
    for (n, &t) in report.times.iter().enumerate() {
        let mut row = vec![num(t)];
        row.extend(report.solution.block(n).iter().map(|&v| num(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `z,newton_iterations,rho1,h0,rho,converged`; unknown values stay empty.
pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["z", "newton_iterations", "rho1", "h0", "rho", "converged"])?;
    for r in rows {
        let rho1 = if r.rho1.is_finite() { num(r.rho1) } else { String::new() };
        w.write_record([num(r.z), r.newton_iterations.to_string(), rho1, opt(r.h0), opt(r.rho), r.converged.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
