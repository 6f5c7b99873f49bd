use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::prompt::{NegativeMode, StrategyKind, StrategySpec};
use crate::segmenter::RemoteConfig;

use super::RunError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    /// Resolves prompts against ground-truth instances.
    #[default]
    Oracle,
    /// Oracle followed by a disc dilation of `dilate_radius`.
    DilatingMock,
    /// Resolves prompts against the predicted instances, i.e. returns the
    /// CNN mask unchanged.
    PassThrough,
    /// HTTP model server at `endpoint`.
    Remote,
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "oracle" => Ok(BackendKind::Oracle),
            "dilating_mock" | "dilating" => Ok(BackendKind::DilatingMock),
            "pass_through" | "passthrough" => Ok(BackendKind::PassThrough),
            "remote" => Ok(BackendKind::Remote),
            other => Err(format!("unknown backend {other:?}")),
        }
    }
}

/// A strategy in a config file: either a bare name or a full spec whose
/// seed falls back to the experiment seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StrategyEntry {
    Name(String),
    Spec {
        kind: StrategyKind,
        #[serde(default)]
        k_points: Option<usize>,
        #[serde(default)]
        n_negative: Option<usize>,
        #[serde(default)]
        negative_mode: Option<NegativeMode>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

impl StrategyEntry {
    pub fn resolve(&self, default_seed: u64) -> Result<StrategySpec, RunError> {
        let spec = match self {
            StrategyEntry::Name(name) => {
                StrategySpec::new(name.parse().map_err(|e| RunError::Config(format!("{e}")))?)
                    .with_seed(default_seed)
            }
            StrategyEntry::Spec {
                kind,
                k_points,
                n_negative,
                negative_mode,
                seed,
            } => {
                let base = StrategySpec::new(*kind);
                StrategySpec {
                    kind: *kind,
                    k_points: k_points.unwrap_or(base.k_points),
                    n_negative: n_negative.unwrap_or(base.n_negative),
                    negative_mode: *negative_mode,
                    seed: seed.unwrap_or(default_seed),
                }
            }
        };
        spec.validate().map_err(RunError::Config)?;
        Ok(spec)
    }
}

fn all_strategies() -> Vec<StrategyEntry> {
    StrategyKind::ALL
        .iter()
        .map(|k| StrategyEntry::Name(k.slug().to_string()))
        .collect()
}

fn default_threshold() -> f64 {
    crate::metrics::DEFAULT_MATCH_THRESHOLD
}

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_parallelism() -> usize {
    4
}

fn default_radius() -> u32 {
    1
}

fn default_timeout() -> f64 {
    60.0
}

fn default_retries() -> u32 {
    3
}

fn default_baseline_label() -> String {
    "baseline U-Net-based CNN".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data_root: PathBuf,
    #[serde(default = "all_strategies")]
    pub strategies: Vec<StrategyEntry>,
    #[serde(default, alias = "backend")]
    pub segmenter_backend: BackendKind,
    #[serde(default)]
    pub endpoint: Option<String>,
    #[serde(default = "default_threshold")]
    pub match_threshold: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default = "default_parallelism")]
    pub parallelism: usize,
    #[serde(default)]
    pub emit_overlays: bool,
    #[serde(default = "default_radius")]
    pub dilate_radius: u32,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_parallelism")]
    pub max_in_flight: usize,
    /// Row label for scoring the CNN masks directly.
    #[serde(default = "default_baseline_label")]
    pub baseline_label: String,
}

impl ExperimentConfig {
    pub fn new(data_root: impl Into<PathBuf>) -> Self {
        ExperimentConfig {
            data_root: data_root.into(),
            strategies: all_strategies(),
            segmenter_backend: BackendKind::default(),
            endpoint: None,
            match_threshold: default_threshold(),
            seed: 0,
            out_dir: default_out_dir(),
            parallelism: default_parallelism(),
            emit_overlays: false,
            dilate_radius: default_radius(),
            timeout_secs: default_timeout(),
            retries: default_retries(),
            max_in_flight: default_parallelism(),
            baseline_label: default_baseline_label(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| RunError::Config(format!("{}: {e}", path.display())))
    }

    /// Replaces the strategy list from a comma-separated list of names.
    pub fn set_strategies_from_list(&mut self, list: &str) -> Result<(), RunError> {
        let entries: Vec<StrategyEntry> = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| StrategyEntry::Name(s.to_string()))
            .collect();
        for e in &entries {
            e.resolve(self.seed)?;
        }
        self.strategies = entries;
        Ok(())
    }

    pub fn strategy_specs(&self) -> Result<Vec<StrategySpec>, RunError> {
        self.strategies
            .iter()
            .map(|s| s.resolve(self.seed))
            .collect()
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.strategies.is_empty() {
            return Err(RunError::Config("no strategies configured".into()));
        }
        self.strategy_specs()?;
        if !(self.match_threshold > 0.0 && self.match_threshold <= 1.0) {
            return Err(RunError::Config(format!(
                "match_threshold {} outside (0, 1]",
                self.match_threshold
            )));
        }
        if self.parallelism == 0 {
            return Err(RunError::Config("parallelism must be at least 1".into()));
        }
        if self.segmenter_backend == BackendKind::Remote
            && self.endpoint.as_deref().is_none_or(str::is_empty)
        {
            return Err(RunError::Config("remote backend needs an endpoint".into()));
        }
        if !(self.timeout_secs.is_finite() && self.timeout_secs > 0.0) {
            return Err(RunError::Config("timeout_secs must be positive".into()));
        }
        Ok(())
    }

    pub fn remote_config(&self) -> Option<RemoteConfig> {
        let endpoint = self.endpoint.clone()?;
        Some(RemoteConfig {
            timeout: Duration::from_secs_f64(self.timeout_secs),
            retries: self.retries,
            max_in_flight: self.max_in_flight,
            ..RemoteConfig::new(endpoint)
        })
    }
}
