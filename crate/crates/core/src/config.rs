//! JSON experiment records and run manifests.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::attack::GradientAttackConfig;
use crate::codec::StcaParams;
use crate::error::{Result, StcaError};
use crate::nn::{mnist_net, synthetic_net, Architecture, TrainConfig};
use crate::rd::{Method, SourceSpec, SweepConfig};

/// Named decoder stacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArchName {
    SyntheticNet,
    MnistNet,
}

impl ArchName {
    pub fn build(self, m: usize) -> Architecture {
        match self {
            ArchName::SyntheticNet => synthetic_net(m),
            ArchName::MnistNet => mnist_net(m),
        }
    }
}

/// Everything a run needs. Omitted fields take the defaults below and the
/// resolved record (with every field explicit) goes into `manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: String,
    pub seed: u64,
    pub source: SourceSpec,
    /// Code length; defaults to the source dimension.
    pub m: Option<usize>,
    pub s_x: Vec<usize>,
    pub s_ns: Vec<usize>,
    pub sigma2_z_ratio: f64,
    pub method: Method,
    pub lambda: f64,
    pub trials: usize,
    pub redraw_projection: bool,
    pub gradient: GradientAttackConfig,
    pub surrogate_beta: f64,
    /// Trained model used when `method` is `decoder`.
    pub decoder_model: Option<String>,
    /// Defaults to `synthetic_net` for Gaussian sources and `mnist_net` for MNIST.
    pub architecture: Option<ArchName>,
    pub train: TrainConfig,
    /// Gaussian training pairs; dataset sources use their whole training split.
    pub train_pairs: usize,
    pub output_dir: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: "sweep".into(),
            seed: 0,
            source: SourceSpec::default(),
            m: None,
            s_x: vec![50],
            s_ns: vec![0],
            sigma2_z_ratio: 0.25,
            method: Method::Pinv,
            lambda: 0.0,
            trials: 100,
            redraw_projection: false,
            gradient: GradientAttackConfig::default(),
            surrogate_beta: 10.0,
            decoder_model: None,
            architecture: None,
            train: TrainConfig::default(),
            train_pairs: 50_000,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| StcaError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| StcaError::io(path, e))?;
        Self::from_json(&text).map_err(|e| StcaError::config(format!("{}: {e}", path.display())))
    }

    pub fn source_dim(&self) -> usize {
        match self.source {
            SourceSpec::Gaussian { n, .. } => n,
            SourceSpec::Mnist { .. } => 784,
        }
    }

    /// Fills in source-dependent defaults and checks every constraint.
    pub fn resolve(mut self) -> Result<Self> {
        let n = self.source_dim();
        self.m.get_or_insert(n);
        self.architecture.get_or_insert(match self.source {
            SourceSpec::Gaussian { .. } => ArchName::SyntheticNet,
            SourceSpec::Mnist { .. } => ArchName::MnistNet,
        });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match &self.source {
            SourceSpec::Gaussian { n, sigma2_x } => {
                if *n == 0 {
                    return Err(StcaError::config("gaussian source needs n >= 1"));
                }
                if !(*sigma2_x > 0.0 && sigma2_x.is_finite()) {
                    return Err(StcaError::config(format!("sigma2_x must be > 0, got {sigma2_x}")));
                }
            }
            SourceSpec::Mnist { dir } => {
                if dir.is_empty() {
                    return Err(StcaError::config("mnist source needs a directory"));
                }
            }
        }
        self.sweep_config().validate(self.source_dim())?;
        self.train.validate()?;
        if self.method == Method::Decoder && self.decoder_model.is_none() {
            return Err(StcaError::config("method \"decoder\" needs decoder_model"));
        }
        if self.train_pairs == 0 {
            return Err(StcaError::config("train_pairs must be at least 1"));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m.unwrap_or_else(|| self.source_dim())
    }

    pub fn architecture(&self) -> ArchName {
        self.architecture.unwrap_or(match self.source {
            SourceSpec::Gaussian { .. } => ArchName::SyntheticNet,
            SourceSpec::Mnist { .. } => ArchName::MnistNet,
        })
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            scenario: self.scenario.clone(),
            m: self.m(),
            s_x: self.s_x.clone(),
            s_ns: self.s_ns.clone(),
            sigma2_z_ratio: self.sigma2_z_ratio,
            method: self.method,
            lambda: self.lambda,
            gradient: self.gradient.clone(),
            surrogate_beta: self.surrogate_beta,
            trials: self.trials,
            seed: self.seed,
            redraw_projection: self.redraw_projection,
        }
    }

    /// Parameters for single-operating-point commands.
    pub fn single_params(&self) -> Result<StcaParams> {
        match (self.s_x.as_slice(), self.s_ns.as_slice()) {
            ([s_x], [s_ns]) => StcaParams::new(self.m(), self.source_dim(), *s_x, *s_ns),
            _ => Err(StcaError::config("this command needs exactly one s_x and one s_ns value")),
        }
    }
}

/// `{"command": ..., "config": ...}` written next to every output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub command: String,
    pub config: serde_json::Value,
    /// Input and output paths of single-shot commands.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub files: serde_json::Value,
}

impl Manifest {
    pub fn new(command: &str, config: &impl Serialize) -> Result<Self> {
        let config = serde_json::to_value(config).map_err(|e| StcaError::config(e.to_string()))?;
        Ok(Manifest {
            command: command.into(),
            config,
            files: serde_json::Value::Null,
        })
    }

    pub fn with_files(mut self, files: serde_json::Value) -> Self {
        self.files = files;
        self
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(self).map_err(|e| StcaError::config(e.to_string()))?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| StcaError::io(&path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| StcaError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| StcaError::config(format!("{}: {e}", path.display())))
    }

    /// The embedded experiment record, provided the manifest came from `command`.
    pub fn experiment(&self, command: &str) -> Result<ExperimentConfig> {
        if self.command != command {
            return Err(StcaError::config(format!(
                "manifest was written by {:?}, not {command:?}",
                self.command
            )));
        }
        let cfg: ExperimentConfig =
            serde_json::from_value(self.config.clone()).map_err(|e| StcaError::config(e.to_string()))?;
        cfg.resolve()
    }
}
