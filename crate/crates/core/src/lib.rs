// SPDX-License-Identifier: Apache-2.0

//! Genre community detection from user review data.
//!
//! The pipeline builds a user-genre bipartite graph from positive reviews,
//! projects it onto a weighted genre network, prunes the network to its main
//! k-core, and clusters it with repeated ("averaged") Louvain runs until the
//! co-assignment weights polarize. Clusters are then characterized by
//! adjective-noun features pulled from dependency-parsed review text and
//! ranked with an adjective-only TF-IDF.

pub mod bipartite;
pub mod community;
pub mod config;
pub mod conllu;
pub mod consensus;
pub mod error;
pub mod exec;
pub mod export;
pub mod graph;
pub mod ingest;
pub mod kcore;
pub mod pipeline;
pub mod report;
pub mod synth;
pub mod textfeat;

pub use bipartite::{BipartiteGraph, OutlierRemoval};
pub use community::{louvain, modularity, Partition};
pub use config::PipelineConfig;
pub use consensus::{
    epsilon_max, hierarchical_pipeline, run_to_convergence, ClusterTree, ConsensusParams,
    ConsensusState, RoundStats, SplitPolicy,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{GenreGraph, WeightSemantics};
pub use ingest::{AlbumRecord, Corpus, ReviewRecord};
pub use kcore::{core_decompose, main_core, CoreDecomposition};
pub use pipeline::{run_pipeline, Stage, StageError};
pub use textfeat::{Feature, FeatureScore};
