//! Run configuration: one JSON document, optionally overridden by flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use viewcount_game::{Belief, Game, GridSpec, ModelParams, Scenario, SimConfig};

use crate::error::{CliError, Result};

pub const DEFAULT_N_GRID: usize = 201;
pub const DEFAULT_DRAWS: usize = 100;

/// Uniform sweep of the pull rate, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub n: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.from];
        }
        (0..self.n).map(|i| self.from + (self.to - self.from) * i as f64 / (self.n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: Option<Scenario>,
    pub params: Option<ModelParams>,
    pub belief: Option<Belief>,
    /// Population threshold, in units of the scenario's metric.
    pub alpha: Option<f64>,
    #[serde(default)]
    pub grid: GridSpec,
    pub sim: Option<SimConfig>,
    pub out: Option<PathBuf>,
    /// Uniform thresholds in a utility surface.
    pub n_grid: Option<usize>,
    /// Random draws checked by `verify`.
    pub draws: Option<usize>,
    pub seed: Option<u64>,
    /// Pull-rate sweep for the side-information phase table.
    pub sweep: Option<Sweep>,
    /// Cross-check `classify` against the grid oracle.
    #[serde(default)]
    pub oracle: bool,
}

/// Flag values; each one replaces the config key of the same name.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub scenario: Option<Scenario>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    pub pi_g: Option<f64>,
    pub n_grid: Option<usize>,
    pub draws: Option<usize>,
    pub oracle: bool,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: Overrides) -> Result<()> {
        if let Some(s) = o.scenario {
            self.scenario = Some(s);
        }
        if let Some(out) = o.out {
            self.out = Some(out);
        }
        if let Some(seed) = o.seed {
            self.seed = Some(seed);
        }
        if let Some(a) = o.alpha {
            self.alpha = Some(a);
        }
        if let Some(pi_g) = o.pi_g {
            self.belief = Some(Belief::new(pi_g)?);
        }
        if let Some(n) = o.n_grid {
            self.n_grid = Some(n);
        }
        if let Some(d) = o.draws {
            self.draws = Some(d);
        }
        self.oracle |= o.oracle;
        Ok(())
    }

    /// Checks everything present; commands check what they require.
    pub fn validate(&self) -> Result<()> {
        if let Some(b) = &self.belief {
            b.validate()?;
        }
        if let (Some(p), Some(s)) = (&self.params, self.scenario) {
            p.validate(s.push())?;
        }
        self.grid.validate()?;
        if let Some(sim) = &self.sim {
            sim.validate()?;
        }
        if let Some(a) = self.alpha {
            if a.is_nan() || a < 0.0 {
                return Err(CliError::Config(format!("alpha must be non-negative, got {a}")));
            }
        }
        if matches!(self.n_grid, Some(n) if n < 2) {
            return Err(CliError::Config("n_grid must be at least 2".into()));
        }
        if self.draws == Some(0) {
            return Err(CliError::Config("draws must be at least 1".into()));
        }
        if let Some(sw) = &self.sweep {
            let ok = sw.n >= 1 && sw.from.is_finite() && sw.to.is_finite() && 0.0 <= sw.from && sw.from <= sw.to;
            if !ok {
                return Err(CliError::Config(format!("bad sweep: {sw:?}")));
            }
        }
        Ok(())
    }

    pub fn scenario(&self) -> Result<Scenario> {
        self.scenario.ok_or_else(|| missing("scenario"))
    }

    pub fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| missing("alpha"))
    }

    pub fn game(&self) -> Result<Game> {
        let scenario = self.scenario()?;
        let params = self.params.ok_or_else(|| missing("params"))?;
        let belief = self.belief.ok_or_else(|| missing("belief"))?;
        Ok(Game::new(belief, params, scenario)?)
    }

    pub fn sim_config(&self) -> SimConfig {
        let mut c = self.sim.clone().unwrap_or_default();
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        c
    }
}

fn missing(key: &str) -> CliError {
    CliError::Config(format!("missing `{key}`"))
}
