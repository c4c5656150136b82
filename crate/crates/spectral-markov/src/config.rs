//! Run configuration shared by the CLI subcommands.
//!
//! Precedence: command-line flags > config file (JSON) > defaults.

use crate::diffusion::ModelLabel;
use crate::error::{Error, Result};
use crate::qbd::ChainModel;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Model selector shared by chains and diffusions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Bd,
    Qbd2,
    L1Killed,
    L1Switch2,
    L2Switch3,
    L2Killswitch2,
}

impl ModelKind {
    pub fn as_chain(&self) -> Option<ChainModel> {
        match self {
            ModelKind::Bd => Some(ChainModel::Bd),
            ModelKind::Qbd2 => Some(ChainModel::Qbd2),
            _ => None,
        }
    }

    pub fn as_diffusion(&self) -> Option<ModelLabel> {
        match self {
            ModelKind::L1Killed => Some(ModelLabel::L1Killed),
            ModelKind::L1Switch2 => Some(ModelLabel::L1Switch2),
            ModelKind::L2Switch3 => Some(ModelLabel::L2Switch3),
            ModelKind::L2Killswitch2 => Some(ModelLabel::L2KillSwitch2),
            _ => None,
        }
    }
}

/// Fully resolved run parameters.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub nu: f64,
    pub seed: u64,
    pub t_max: f64,
    pub dt: f64,
    pub levels: usize,
    pub n_paths: usize,
    pub tol: f64,
    pub truncation: usize,
}

/// Partial configuration as read from a file or flags; `None` means "not
/// set here".
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub model: Option<ModelKind>,
    pub nu: Option<f64>,
    pub seed: Option<u64>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub levels: Option<usize>,
    pub n_paths: Option<usize>,
    pub tol: Option<f64>,
    pub truncation: Option<usize>,
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Entries of `self` win over `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            model: self.model.or(base.model),
            nu: self.nu.or(base.nu),
            seed: self.seed.or(base.seed),
            t_max: self.t_max.or(base.t_max),
            dt: self.dt.or(base.dt),
            levels: self.levels.or(base.levels),
            n_paths: self.n_paths.or(base.n_paths),
            tol: self.tol.or(base.tol),
            truncation: self.truncation.or(base.truncation),
        }
    }

    /// Fill remaining holes with defaults; `model` has no default.
    pub fn resolve(self) -> Result<RunConfig> {
        let model = self.model.ok_or_else(|| {
            Error::InvalidArgument("no model selected (use --model or a config file)".into())
        })?;
        let cfg = RunConfig {
            model,
            nu: self.nu.unwrap_or(1.0),
            seed: self.seed.unwrap_or(0),
            t_max: self.t_max.unwrap_or(10.0),
            dt: self.dt.unwrap_or(1e-3),
            levels: self.levels.unwrap_or(200),
            n_paths: self.n_paths.unwrap_or(1),
            tol: self.tol.unwrap_or(1e-10),
            truncation: self.truncation.unwrap_or(200),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    /// Model/parameter compatibility, checked before any execution.
    pub fn validate(&self) -> Result<()> {
        match self.model {
            ModelKind::Bd => {
                if self.nu <= -1.5 {
                    return Err(Error::NuRange {
                        nu: self.nu,
                        requirement: "the queue requires nu > -3/2",
                    });
                }
            }
            ModelKind::Qbd2 => {
                if self.nu < 0.0 {
                    return Err(Error::NuRange {
                        nu: self.nu,
                        requirement: "the two-phase chain requires nu >= 0",
                    });
                }
            }
            _ => {
                if self.nu < 0.0 {
                    return Err(Error::NuRange {
                        nu: self.nu,
                        requirement: "diffusion models require nu >= 0",
                    });
                }
            }
        }
        if self.levels < 2 {
            return Err(Error::TooFewLevels(self.levels));
        }
        if self.dt <= 0.0 || self.t_max <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "dt and t-max must be positive (dt = {}, t-max = {})",
                self.dt, self.t_max
            )));
        }
        Ok(())
    }
}
