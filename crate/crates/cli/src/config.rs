//! Experiment configuration read from TOML.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use periodic_parareal::algorithms::{OuterConfig, SplittingMode};
use periodic_parareal::propagators::PropagatorConfig;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sequential,
    PpIc,
    PpPcJacobi,
    PpPcMh,
    LinearPpPcMh,
    TpMh,
    Splitting,
}

/// Time grid. Give exactly one of `fine_steps_per_window` and `fine_step`;
/// the period comes from the problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub windows: usize,
    pub fine_steps_per_window: Option<usize>,
    pub fine_step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplittingConfig {
    pub mode: SplittingMode,
    /// State `x_bar` of the linearized matrix; one value is broadcast.
    pub linearization: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    /// Admissible range of initial guesses.
    pub domain: (f64, f64),
    /// Sample points of the convergence-constant estimator.
    pub constant_samples: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            start: -0.25,
            stop: 0.25,
            step: 0.01,
            domain: (-0.25, 0.25),
            constant_samples: 1001,
        }
    }
}

impl SweepConfig {
    /// `start, start + step, ...` up to `stop` inclusive.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=count).map(|i| self.start + i as f64 * self.step).collect()
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.domain;
        if !(self.step > 0.0) || self.start > self.stop {
            bail!("z_sweep: need start <= stop and step > 0");
        }
        if self.start < lo || self.stop > hi {
            bail!("z_sweep: range [{}, {}] leaves the domain [{lo}, {hi}]", self.start, self.stop);
        }
        if self.constant_samples < 100 {
            bail!("z_sweep.constant_samples must be at least 100");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// `rl1d`, `diffusion1d:<d>` or `linear:<file>`; relative files resolve
    /// against the config file's directory.
    pub problem: String,
    pub method: Method,
    pub grid: GridConfig,
    pub workers: Option<usize>,
    /// Output directory, relative to the working directory.
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub outer: OuterConfig,
    #[serde(default)]
    pub propagator: PropagatorConfig,
    #[serde(default)]
    pub splitting: SplittingConfig,
    #[serde(default)]
    pub z_sweep: SweepConfig,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("invalid config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        if let Some(file) = cfg.problem.strip_prefix("linear:") {
            let file = Path::new(file);
            if file.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.problem = format!("linear:{}", base.join(file).display());
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.windows == 0 {
            bail!("grid.windows must be positive");
        }
        match (self.grid.fine_steps_per_window, self.grid.fine_step) {
            (Some(0), _) => bail!("grid.fine_steps_per_window must be positive"),
            (Some(_), None) => {}
            (None, Some(h)) if h > 0.0 => {}
            (None, Some(_)) => bail!("grid.fine_step must be positive"),
            _ => bail!("grid: give exactly one of fine_steps_per_window and fine_step"),
        }
        if self.workers == Some(0) {
            bail!("workers must be at least 1");
        }
        self.outer.validate()?;
        self.propagator.validate()?;
        self.z_sweep.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "problem = \"rl1d\"\nmethod = \"pp_pc_mh\"\n[grid]\nwindows = 10\nfine_steps_per_window = 200\n";

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(cfg.method, Method::PpPcMh);
        assert_eq!(cfg.outer, OuterConfig::default());
        assert_eq!(cfg.z_sweep.values().len(), 51);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = ExperimentConfig::parse(&format!("{MINIMAL}colour = 3\n")).unwrap_err();
        assert!(format!("{err:#}").contains("colour"), "{err:#}");
        let err = ExperimentConfig::parse(&format!("{MINIMAL}[outer]\nmax_outr = 3\n")).unwrap_err();
        assert!(format!("{err:#}").contains("max_outr"), "{err:#}");
    }

    #[test]
    fn bad_method_is_rejected() {
        let err = ExperimentConfig::parse(&MINIMAL.replace("pp_pc_mh", "magic")).unwrap_err();
        assert!(format!("{err:#}").contains("magic"), "{err:#}");
    }

    #[test]
    fn grid_needs_one_step_size() {
        let both = MINIMAL.replace("fine_steps_per_window = 200", "fine_steps_per_window = 200\nfine_step = 1e-5");
        assert!(ExperimentConfig::parse(&both).is_err());
        let neither = MINIMAL.replace("fine_steps_per_window = 200", "");
        assert!(ExperimentConfig::parse(&neither).is_err());
    }

    #[test]
    fn sweep_range_must_stay_in_domain() {
        let cfg = format!("{MINIMAL}[z_sweep]\nstart = -0.3\n");
        assert!(ExperimentConfig::parse(&cfg).is_err());
    }

    #[test]
    fn z_choice_forms() {
        let cfg = ExperimentConfig::parse(&format!("{MINIMAL}[outer]\nz_choice = {{ user = [0.1] }}\n")).unwrap();
        assert_eq!(cfg.outer.z_choice, periodic_parareal::algorithms::ZChoice::User(vec![0.1]));
        let cfg = ExperimentConfig::parse(&format!("{MINIMAL}[outer]\nz_choice = \"mean_of_previous_iterate\"\n")).unwrap();
        assert_eq!(cfg.outer.z_choice, periodic_parareal::algorithms::ZChoice::MeanOfPreviousIterate);
    }
}
