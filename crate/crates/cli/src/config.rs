//! Optional TOML config file and flag/config/default layering.
//!
//! Precedence, highest first: command-line flag (or its environment
//! fallback such as `NM_SEED`), config file, built-in default.

use std::path::{Path, PathBuf};

use sceneminer_core::miner::MiningParams;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config {path}: {source}")]
    Malformed { path: PathBuf, source: toml::de::Error },
}

/// Values a config file may provide. Every field is optional; anything
/// absent falls through to the built-in default.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub min_support: Option<f64>,
    pub min_confidence: Option<f64>,
    pub max_len: Option<usize>,
    pub max_rhs: Option<usize>,
    pub score_threshold: Option<f64>,
    pub iou: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        toml::from_str(&text)
            .map_err(|source| ConfigError::Malformed { path: path.to_path_buf(), source })
    }
}

pub fn layer<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Fully resolved run configuration shared by the mining-flavoured
/// subcommands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub mining: MiningParams,
    pub score_threshold: f64,
    pub iou_threshold: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

pub struct MiningFlags {
    pub min_support: Option<f64>,
    pub min_confidence: Option<f64>,
    pub max_len: Option<usize>,
    pub max_rhs: Option<usize>,
}

impl RunConfig {
    pub fn resolve(
        file: &FileConfig,
        mining: MiningFlags,
        score_threshold: Option<f64>,
        iou_threshold: Option<f64>,
        seed: Option<u64>,
        out_dir: Option<PathBuf>,
    ) -> Self {
        let defaults = MiningParams::default();
        RunConfig {
            mining: MiningParams {
                min_support: layer(mining.min_support, file.min_support, defaults.min_support),
                min_confidence: layer(
                    mining.min_confidence,
                    file.min_confidence,
                    defaults.min_confidence,
                ),
                max_itemset_len: layer(mining.max_len, file.max_len, defaults.max_itemset_len),
                max_rhs_len: layer(mining.max_rhs, file.max_rhs, defaults.max_rhs_len),
            },
            score_threshold: layer(score_threshold, file.score_threshold, 0.5),
            iou_threshold: layer(iou_threshold, file.iou, 0.5),
            seed: layer(seed, file.seed, 0),
            out_dir: layer(out_dir, file.out_dir.clone(), PathBuf::from(".")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_config_beat_defaults() {
        let file: FileConfig = toml::from_str("min_support = 0.05\nseed = 9").unwrap();
        let cfg = RunConfig::resolve(
            &file,
            MiningFlags { min_support: Some(0.2), min_confidence: None, max_len: None, max_rhs: None },
            None,
            None,
            None,
            None,
        );
        assert_eq!(cfg.mining.min_support, 0.2); // flag wins
        assert_eq!(cfg.seed, 9); // config wins over default
        assert_eq!(cfg.mining.min_confidence, 0.9); // default
        assert_eq!(cfg.mining.max_rhs_len, 1);
    }

    #[test]
    fn unknown_config_key_is_an_error() {
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
    }
}
