use std::fs;
use std::path::{Path, PathBuf};

use archsynth::dataset::{DatasetConfig, SplitCounts};
use archsynth::evalmetrics::EvalConfig;
use archsynth::{RenderSettings, RoomRanges};
use serde::Deserialize;

/// Contents of a `--config` TOML file. Every key is optional; unknown keys
/// are rejected.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed_start: u64,
    pub seed_count: u64,
    /// 0 uses every available core.
    pub workers: usize,
    pub out: PathBuf,
    pub split_seed: u64,
    /// Explicit split sizes; when absent the default proportions apply.
    pub split_counts: Option<SplitCounts>,
    pub ranges: RoomRanges,
    pub render: RenderSettings,
    pub eval: EvalConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed_start: 0,
            seed_count: 10,
            workers: 0,
            out: PathBuf::from("."),
            split_seed: 0,
            split_counts: None,
            ranges: RoomRanges::default(),
            render: RenderSettings::default(),
            eval: EvalConfig::default(),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), archsynth::Error> {
        self.dataset().validate()
    }

    pub fn dataset(&self) -> DatasetConfig {
        DatasetConfig {
            seed_start: self.seed_start,
            seed_count: self.seed_count,
            counts: self.split_counts,
            split_seed: self.split_seed,
            ranges: self.ranges.clone(),
            settings: self.render.clone(),
        }
    }

    /// `path` itself when absolute, otherwise under the output root.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.out.join(path)
        }
    }
}
