// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

use crate::consensus::RoundStats;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("album {album_id} defined twice with conflicting fields (lines {first_line} and {second_line})")]
    ConflictingAlbum {
        album_id: String,
        first_line: u64,
        second_line: u64,
    },

    #[error("{orphans} of {total} reviews reference unknown albums; review and album files probably do not match")]
    TooManyOrphans { orphans: usize, total: usize },

    #[error("cannot remove {requested} outlier users from a graph with {available} users")]
    TooManyOutliers { requested: usize, available: usize },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("partition covers {partition} nodes but graph has {graph}")]
    PartitionMismatch { partition: usize, graph: usize },

    #[error("component size must be at least 1, got {0}")]
    InvalidComponentSize(usize),

    #[error("consensus did not converge within {max_rounds} rounds")]
    NotConverged {
        max_rounds: usize,
        trace: Vec<RoundStats>,
    },

    #[error("modified tf-idf needs at least 2 clusters, got {0}")]
    TooFewClusters(usize),

    #[error("judgments reference features that were not extracted: {}", .0.join(", "))]
    UnknownJudgments(Vec<String>),

    #[error("conll-u line {line}: {message}")]
    Conllu { line: usize, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
