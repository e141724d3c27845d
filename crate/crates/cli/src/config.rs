use std::path::Path;

use serde::{Deserialize, Serialize};

use clicklabel_core::data::Sparsity;
use clicklabel_core::labelgen::LabelGenConfig;
use clicklabel_core::refinement::RefineConfig;
use clicklabel_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClicksConfig {
    /// Click perturbation as a fraction of the box half-extents.
    pub delta: f64,
    pub sparsity: Sparsity,
}

impl Default for ClicksConfig {
    fn default() -> Self {
        Self {
            delta: 0.5,
            sparsity: Sparsity::OnePerFrame,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// BEV IoU thresholds for recall and precision.
    pub thresholds: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            thresholds: vec![0.5, 0.7],
        }
    }
}

/// Everything a run can be configured with. Command-line flags win.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub clicks: ClicksConfig,
    pub labelgen: LabelGenConfig,
    pub refine: RefineConfig,
    pub eval: EvalConfig,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?;
        let cfg: Self = toml::from_str(&text).map_err(|e| {
            let position = e
                .span()
                .map(|s| format!("line {}", text[..s.start].matches('\n').count() + 1))
                .unwrap_or_else(|| "document".into());
            Error::Parse {
                path: path.into(),
                position,
                reason: e.message().to_string(),
            }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |field: &str, reason: &str| Error::Invalid {
            field: field.into(),
            reason: reason.into(),
        };
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be >= 1"));
        }
        if !(self.clicks.delta >= 0.0 && self.clicks.delta.is_finite()) {
            return Err(invalid("clicks.delta", "must be >= 0"));
        }
        if self
            .eval
            .thresholds
            .iter()
            .any(|t| !(0.0..=1.0).contains(t))
        {
            return Err(invalid("eval.thresholds", "must lie in [0, 1]"));
        }
        self.labelgen.validate()?;
        self.refine.validate()
    }
}
