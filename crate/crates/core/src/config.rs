// SPDX-License-Identifier: Apache-2.0

//! Pipeline configuration, stored as a flat `key = value` TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bipartite::{DEFAULT_OUTLIER_USERS, DEFAULT_SCORE_THRESHOLD};
use crate::consensus::{DEFAULT_MAX_DEPTH, DEFAULT_MAX_ROUNDS, DEFAULT_MAX_SIZE, DEFAULT_RUNS};
use crate::error::{Error, Result};
use crate::ingest::ReviewFormat;
use crate::textfeat::DEFAULT_TOP_N;

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub version: u32,
    pub reviews: PathBuf,
    #[serde(default = "default_format")]
    pub reviews_format: ReviewFormat,
    pub albums: PathBuf,
    /// CoNLL-U parses of the reviews; needed by the text stage.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parses: Option<PathBuf>,
    /// Optional `cluster,adjective,noun,correct` judgments of top features.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub judgments: Option<PathBuf>,
    #[serde(default = "default_threshold")]
    pub score_threshold: u8,
    #[serde(default = "default_outliers")]
    pub outlier_user_count: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_max_rounds")]
    pub max_rounds: usize,
    /// Clusters larger than this are split candidates; 0 disables splitting.
    #[serde(default = "default_max_size")]
    pub split_max_size: usize,
    #[serde(default = "default_max_depth")]
    pub split_max_depth: usize,
    #[serde(default = "default_top_n")]
    pub top_n_features: usize,
    #[serde(default = "default_true")]
    pub text_stage: bool,
    #[serde(default = "default_true")]
    pub export_graphml: bool,
    #[serde(default = "default_true")]
    pub export_stats: bool,
}

fn default_format() -> ReviewFormat {
    ReviewFormat::Jsonl
}
fn default_threshold() -> u8 {
    DEFAULT_SCORE_THRESHOLD
}
fn default_outliers() -> usize {
    DEFAULT_OUTLIER_USERS
}
fn default_runs() -> usize {
    DEFAULT_RUNS
}
fn default_max_rounds() -> usize {
    DEFAULT_MAX_ROUNDS
}
fn default_max_size() -> usize {
    DEFAULT_MAX_SIZE
}
fn default_max_depth() -> usize {
    DEFAULT_MAX_DEPTH
}
fn default_top_n() -> usize {
    DEFAULT_TOP_N
}
fn default_true() -> bool {
    true
}

impl PipelineConfig {
    /// Defaults for everything but the input paths.
    pub fn new(reviews: impl Into<PathBuf>, albums: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            version: CONFIG_VERSION,
            reviews: reviews.into(),
            reviews_format: default_format(),
            albums: albums.into(),
            parses: None,
            judgments: None,
            score_threshold: DEFAULT_SCORE_THRESHOLD,
            outlier_user_count: DEFAULT_OUTLIER_USERS,
            runs: DEFAULT_RUNS,
            base_seed: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
            split_max_size: DEFAULT_MAX_SIZE,
            split_max_depth: DEFAULT_MAX_DEPTH,
            top_n_features: DEFAULT_TOP_N,
            text_stage: true,
            export_graphml: true,
            export_stats: true,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: PipelineConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Panics if `base_seed` exceeds `i64::MAX`, which TOML cannot hold;
    /// [`PipelineConfig::validate`] rejects such configs.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("validated config serializes")
    }

    /// Reads a config file; relative input paths are taken relative to the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = PipelineConfig::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            cfg.resolve_paths(dir);
        }
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.reviews);
        fix(&mut self.albums);
        if let Some(p) = self.parses.as_mut() {
            fix(p);
        }
        if let Some(p) = self.judgments.as_mut() {
            fix(p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.version != CONFIG_VERSION {
            return fail(format!("unsupported config version {}", self.version));
        }
        if self.score_threshold > 100 {
            return fail(format!("score_threshold {} outside [0, 100]", self.score_threshold));
        }
        if self.runs == 0 {
            return fail("runs must be at least 1".into());
        }
        if self.max_rounds == 0 {
            return fail("max_rounds must be at least 1".into());
        }
        if self.split_max_depth == 0 {
            return fail("split_max_depth must be at least 1".into());
        }
        if self.base_seed > i64::MAX as u64 {
            return fail("base_seed must fit in a signed 64-bit integer".into());
        }
        if self.top_n_features == 0 {
            return fail("top_n_features must be at least 1".into());
        }
        Ok(())
    }

    /// Effective split size threshold (0 means never split).
    pub fn split_max_size(&self) -> usize {
        if self.split_max_size == 0 {
            usize::MAX
        } else {
            self.split_max_size
        }
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
