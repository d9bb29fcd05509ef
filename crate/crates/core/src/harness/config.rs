//! Experiment configuration documents.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::beyond::DensityFamily;
use crate::error::{check_delta, Error, Result};
use crate::model::{k_minimizer_space, permuted_label_task, random_loss_table, Instance, PermutedLabelSpec};
use crate::seed::derive_seed;

/// Seed index reserved for building the space when the space config omits `seed`.
const SPACE_SEED_INDEX: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Kl,
    HighTemp,
    Stratify,
    BeyondGibbs,
}

fn default_sigma() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Violation rate of one bound over seeded trials, per inverse temperature.
    Violation {
        bound: BoundKind,
        /// Density family for `beyond_gibbs`; its rate is replaced by each grid value.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        density: Option<DensityFamily>,
        /// Sub-Gaussian parameter for `stratify`.
        #[serde(default = "default_sigma")]
        sigma: f64,
    },
    ZeroTemp,
    Phase,
    Concentration {
        /// Sample sizes to test; defaults to the config's `n`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_grid: Option<Vec<usize>>,
    },
    RandomLabel {
        n_grid: Vec<usize>,
        r0: f64,
    },
}

fn default_gap() -> f64 {
    0.25
}

/// Space generator and its parameters. `seed` defaults to one derived from the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "snake_case")]
pub enum SpaceSpec {
    RandomLossTable {
        hypotheses: usize,
        atoms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    KMinimizer {
        hypotheses: usize,
        minimizers: usize,
        atoms: usize,
        #[serde(default = "default_gap")]
        gap: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    PermutedLabel {
        #[serde(default = "default_inputs")]
        inputs: usize,
        #[serde(default = "default_angular")]
        angular_steps: usize,
        #[serde(default = "default_bias_steps")]
        bias_steps: usize,
        #[serde(default = "default_bias_range")]
        bias_range: f64,
        #[serde(default = "default_true")]
        random_labels: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// An explicit loss table over data atoms.
    Table {
        probs: Vec<f64>,
        prior: Vec<f64>,
        loss_table: Vec<Vec<f64>>,
    },
}

fn default_inputs() -> usize {
    PermutedLabelSpec::default().inputs
}
fn default_angular() -> usize {
    PermutedLabelSpec::default().angular_steps
}
fn default_bias_steps() -> usize {
    PermutedLabelSpec::default().bias_steps
}
fn default_bias_range() -> f64 {
    PermutedLabelSpec::default().bias_range
}
fn default_true() -> bool {
    true
}

impl SpaceSpec {
    pub fn build(&self, master_seed: u64) -> Result<Instance> {
        let fallback = derive_seed(master_seed, SPACE_SEED_INDEX);
        match self {
            Self::RandomLossTable {
                hypotheses,
                atoms,
                seed,
            } => random_loss_table(*hypotheses, *atoms, seed.unwrap_or(fallback)),
            Self::KMinimizer {
                hypotheses,
                minimizers,
                atoms,
                gap,
                seed,
            } => k_minimizer_space(*hypotheses, *minimizers, *atoms, *gap, seed.unwrap_or(fallback)),
            Self::PermutedLabel {
                inputs,
                angular_steps,
                bias_steps,
                bias_range,
                random_labels,
                seed,
            } => Ok(permuted_label_task(&PermutedLabelSpec {
                inputs: *inputs,
                angular_steps: *angular_steps,
                bias_steps: *bias_steps,
                bias_range: *bias_range,
                random_labels: *random_labels,
                seed: seed.unwrap_or(fallback),
            })?
            .into_abstract()),
            Self::Table {
                probs,
                prior,
                loss_table,
            } => Instance::from_document(crate::model::InstanceDocument {
                points: (0..probs.len()).collect(),
                probs: probs.clone(),
                hypotheses: loss_table.len(),
                prior: prior.clone(),
                loss_table: loss_table.clone(),
            }),
        }
    }
}

fn default_p() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub space: SpaceSpec,
    pub n: usize,
    pub beta_grid: Vec<f64>,
    pub delta: f64,
    pub trials: usize,
    #[serde(default = "default_p")]
    pub p: u32,
    pub master_seed: u64,
    /// Output prefix; reports go to `<output_path>.csv` and `<output_path>.json`.
    pub output_path: String,
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.p == 0 {
            return Err(Error::Config("p must be at least 1".into()));
        }
        check_delta(self.delta).map_err(|e| Error::Config(e.to_string()))?;
        let needs_beta = !matches!(
            self.experiment,
            ExperimentKind::Concentration { .. } | ExperimentKind::RandomLabel { .. }
        );
        if needs_beta && self.beta_grid.is_empty() {
            return Err(Error::Config("beta_grid must not be empty".into()));
        }
        if let Some(b) = self.beta_grid.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(Error::Config(format!("beta {b} must be finite and non-negative")));
        }
        match &self.experiment {
            ExperimentKind::Violation { bound, density, sigma } => {
                if *bound == BoundKind::BeyondGibbs && density.is_none() {
                    return Err(Error::Config("beyond_gibbs needs a density".into()));
                }
                if !(*sigma > 0.0) {
                    return Err(Error::Config(format!("sigma = {sigma} must be positive")));
                }
            }
            ExperimentKind::Concentration { n_grid: Some(grid) } | ExperimentKind::RandomLabel { n_grid: grid, .. }
                if (grid.is_empty() || grid.contains(&0)) =>
            {
                return Err(Error::Config("n_grid must be non-empty with positive entries".into()));
            }
            _ => {}
        }
        Ok(())
    }
}
