//! Experiment configuration: one JSON document per run.
//!
//! The document carries a `schema` version, a `mode` tag selecting the
//! experiment, the mode's own fields at the top level, and an optional
//! `output_path`. All numbers are exact: scalars are complex rationals
//! written as `{re_num, re_den, im_num, im_den}` objects (bare integers are
//! accepted as shorthand), matrices as row-major nested arrays. Floating
//! point is rejected everywhere.

use crate::dynamics::{build_initial, InitialData, InitialState, ModelParams, DEFAULT_WINDOW};
use crate::error::{Error, Result};
use crate::matrix::{BlockPartition, Mat};
use crate::sample::SampleSpec;
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Version of the config and report documents this build reads and writes.
pub const SCHEMA_VERSION: u32 = 1;

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn default_window() -> i64 {
    DEFAULT_WINDOW
}

/// Scalar demonstration: the one-dimensional passage through a degeneracy,
/// printed coefficient by coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarDemoConfig {
    pub m: i64,
    /// Previous state's value.
    pub beta_prev0: Scalar,
    /// Linear coefficient of the entering state; must be nonzero.
    pub beta_m1: Scalar,
    pub alpha: Scalar,
    #[serde(default = "default_window")]
    pub window: i64,
}

/// Full verification of one matrix instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub n: usize,
    pub r: usize,
    pub m: i64,
    pub alpha: Mat,
    /// Coefficient matrices of the previous state, from order 0 upward.
    pub beta_prev: Vec<Mat>,
    /// Coefficient matrices of the degenerate state, from order 0 upward.
    pub beta_cur: Vec<Mat>,
    #[serde(default = "default_window")]
    pub window: i64,
}

impl VerifyConfig {
    /// Validates and normalizes the configured opening.
    pub fn to_state(&self) -> Result<InitialState> {
        let params = ModelParams::new(self.alpha.clone(), self.m)?;
        let partition = BlockPartition::new(self.n, self.r)?;
        build_initial(
            &InitialData {
                beta_prev: self.beta_prev.clone(),
                beta_cur: self.beta_cur.clone(),
            },
            &partition,
            &params,
            self.window,
        )
    }
}

/// The experiment selected by the `mode` tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ModeConfig {
    ScalarDemo(ScalarDemoConfig),
    Verify(VerifyConfig),
    Sample(SampleSpec),
}

impl ModeConfig {
    pub fn name(&self) -> &'static str {
        match self {
            ModeConfig::ScalarDemo(_) => "scalar-demo",
            ModeConfig::Verify(_) => "verify",
            ModeConfig::Sample(_) => "sample",
        }
    }

    fn window(&self) -> i64 {
        match self {
            ModeConfig::ScalarDemo(c) => c.window,
            ModeConfig::Verify(c) => c.window,
            ModeConfig::Sample(c) => c.window,
        }
    }

    pub fn set_window(&mut self, window: i64) {
        match self {
            ModeConfig::ScalarDemo(c) => c.window = window,
            ModeConfig::Verify(c) => c.window = window,
            ModeConfig::Sample(c) => c.window = window,
        }
    }
}

/// The whole configuration document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema: u32,
    #[serde(flatten)]
    pub mode: ModeConfig,
    /// Where reports go; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| config_err(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(text.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(config_err(format!(
                "unsupported schema {} (this build reads schema {SCHEMA_VERSION})",
                self.schema
            )));
        }
        if self.mode.window() < 4 {
            return Err(config_err(
                "window must be at least 4 to observe all four sites",
            ));
        }
        match &self.mode {
            ModeConfig::ScalarDemo(c) => {
                if c.m < 2 {
                    return Err(config_err("scalar demo needs m >= 2"));
                }
                if c.beta_m1.is_zero() {
                    return Err(config_err(
                        "scalar demo needs a nonzero entering linear coefficient beta_m1",
                    ));
                }
            }
            ModeConfig::Verify(c) => {
                if c.n == 0 || c.r == 0 || c.r > c.n {
                    return Err(config_err("verify needs 1 <= r <= n"));
                }
                if c.m < 2 {
                    return Err(config_err("verify needs m >= 2"));
                }
                if c.beta_cur.is_empty() {
                    return Err(config_err(
                        "verify needs at least one degenerate-state coefficient",
                    ));
                }
            }
            ModeConfig::Sample(c) => c.validate()?,
        }
        Ok(())
    }
}
