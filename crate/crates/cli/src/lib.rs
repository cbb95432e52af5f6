//! Config-driven experiment runner.
//!
//! `ppmh run --config exp.toml` solves one problem with one method and writes
//! `report.json`, `errors.csv` and `solution.csv`. `ppmh z-sweep` runs TP MH
//! from constant initial guesses and writes `zsweep.csv` and `sweep.json`.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod output;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use periodic_parareal::algorithms::*;
use periodic_parareal::models::{estimate_constants, problem_by_name, ConstantKappa, ConvergenceConstants, Kappa, KappaPiecewise};
use periodic_parareal::{PeriodicProblem, SolverReport, TimeGrid, WorkerPool};
use serde::Serialize;

use crate::config::{ExperimentConfig, Method};

/// Fallback worker count when neither the flag nor the config sets one.
pub const WORKERS_ENV: &str = "PPMH_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "ppmh", version, about = "Periodic Parareal experiment runner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve with the configured method.
    Run(CommonArgs),
    /// Sweep constant initial guesses of TP MH.
    ZSweep(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides `workers` from the config.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Overrides `out` from the config.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a successful invocation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Converged,
    IterationCap,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Converged => 0,
            Status::IterationCap => 2,
        }
    }
}

/// Flag, then config, then the environment, then one worker.
fn resolve_workers(flag: Option<usize>, config: Option<usize>) -> Result<usize> {
    if let Some(w) = flag.or(config) {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse().with_context(|| format!("{WORKERS_ENV}={v} is not a worker count")),
        Err(_) => Ok(1),
    }
}

struct Prepared {
    cfg: ExperimentConfig,
    problem: PeriodicProblem,
    grid: TimeGrid,
    settings: SolverSettings,
    out: PathBuf,
}

fn prepare(args: &CommonArgs) -> Result<Prepared> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let problem = problem_by_name(&cfg.problem).with_context(|| format!("problem `{}`", cfg.problem))?;
    let period = problem.period();
    let grid = match (cfg.grid.fine_steps_per_window, cfg.grid.fine_step) {
        (Some(m), _) => TimeGrid::new(cfg.grid.windows, m, period)?,
        (None, Some(h)) => TimeGrid::with_fine_step(cfg.grid.windows, h, period)?,
        (None, None) => unreachable!("validated config"),
    };
    let workers = resolve_workers(args.workers, cfg.workers)?;
    let settings = SolverSettings {
        outer: cfg.outer.clone(),
        propagator: cfg.propagator,
        pool: WorkerPool::new(workers)?,
    };
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).with_context(|| format!("cannot create {}", out.display()))?;
    Ok(Prepared {
        cfg,
        problem,
        grid,
        settings,
        out,
    })
}

fn solve(p: &Prepared) -> Result<SolverReport> {
    let (problem, grid, s) = (&p.problem, &p.grid, &p.settings);
    let report = match p.cfg.method {
        Method::Sequential => sequential_steady_state(problem, grid, s)?,
        Method::PpIc => pp_ic(problem, grid, s)?,
        Method::PpPcJacobi => pp_pc_jacobi(problem, grid, s)?,
        Method::PpPcMh => pppc_mh_newton(problem, grid, s)?,
        Method::LinearPpPcMh => linear_pppc_mh(problem, grid, s)?,
        Method::TpMh => tp_mh(problem, grid, s)?,
        Method::Splitting => {
            let sp = &p.cfg.splitting;
            let d = problem.dim();
            let x_bar = match sp.linearization.len() {
                0 => vec![0.0; d],
                1 => vec![sp.linearization[0]; d],
                _ => sp.linearization.clone(),
            };
            let h = linearized_splitting_matrix(problem, grid, sp.mode, &x_bar)?;
            splitting_iteration(problem, grid, &h, sp.mode, s)?
        }
    };
    Ok(report)
}

#[derive(Serialize)]
struct RunRecord<'a> {
    problem: &'a str,
    method: Method,
    workers: usize,
    grid: TimeGrid,
    verdict: &'static str,
    effective_solves: u64,
    total_solves: u64,
    factor_solves: u64,
    cached_resolves: u64,
    report: &'a SolverReport,
}

pub fn run(args: &CommonArgs) -> Result<Status> {
    let p = prepare(args)?;
    let start = std::time::Instant::now();
    let report = solve(&p)?;
    info!("{} finished in {:.3?}", report.method, start.elapsed());
    let status = if report.converged { Status::Converged } else { Status::IterationCap };
    let c = &report.counters;
    let record = RunRecord {
        problem: &p.cfg.problem,
        method: p.cfg.method,
        workers: p.settings.pool.workers(),
        grid: p.grid,
        verdict: match status {
            Status::Converged => "converged",
            Status::IterationCap => "iteration_cap",
        },
        effective_solves: c.effective(),
        total_solves: c.total(),
        factor_solves: c.factor_solves(),
        cached_resolves: c.cached_resolves(),
        report: &report,
    };
    output::write_json(&p.out.join("report.json"), &record)?;
    output::write_errors(&p.out.join("errors.csv"), &report)?;
    output::write_solution(&p.out.join("solution.csv"), &report)?;
    Ok(status)
}

/// Nonlinearity behind a named problem, for the convergence constants.
fn problem_kappa(name: &str) -> Box<dyn Kappa> {
    if name.starts_with("linear:") {
        Box::new(ConstantKappa(1.0))
    } else {
        Box::new(KappaPiecewise::rl_circuit())
    }
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    problem: &'a str,
    grid: TimeGrid,
    constants: ConvergenceConstants,
    rows: &'a [SweepRow],
}

pub fn z_sweep_command(args: &CommonArgs) -> Result<Status> {
    let p = prepare(args)?;
    let sweep = &p.cfg.z_sweep;
    let kappa = problem_kappa(&p.cfg.problem);
    let constants = estimate_constants(kappa.as_ref(), sweep.domain, sweep.constant_samples, 0.0)?;
    let rows = periodic_parareal::algorithms::z_sweep(&p.problem, &p.grid, &sweep.values(), Some(constants.delta0), &p.settings)?;
    output::write_sweep(&p.out.join("zsweep.csv"), &rows)?;
    output::write_json(
        &p.out.join("sweep.json"),
        &SweepRecord {
            problem: &p.cfg.problem,
            grid: p.grid,
            constants,
            rows: &rows,
        },
    )?;
    Ok(if rows.iter().all(|r| r.converged) { Status::Converged } else { Status::IterationCap })
}

pub fn execute(cli: &Cli) -> Result<Status> {
    match &cli.command {
        Command::Run(a) => run(a),
        Command::ZSweep(a) => z_sweep_command(a),
    }
}
