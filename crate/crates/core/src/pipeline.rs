// SPDX-License-Identifier: Apache-2.0

//! End-to-end orchestration and the artifacts a run leaves behind.
//!
//! Stages run strictly in order: ingest, network construction, main-core
//! pruning, hierarchical consensus clustering, optional text features, then
//! exports. Everything except `manifest.json` is a deterministic function of
//! the config and its input files.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::bipartite::{self, BipartiteGraph, OutlierRemoval};
use crate::config::PipelineConfig;
use crate::conllu::read_conllu;
use crate::consensus::{
    hierarchical_pipeline, ClusterTree, ConsensusParams, Hierarchy, SplitPolicy, ROOT_LABEL,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::export::{self, ExportMode};
use crate::graph::GenreGraph;
use crate::ingest::{self, Corpus, CorpusSummary};
use crate::kcore::{main_core, RemovedNode};
use crate::report;
use crate::textfeat::{self, AccuracyEvaluation, FeatureScore};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Network,
    Kcore,
    Cluster,
    Features,
    Export,
    Stats,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Ingest => "ingest",
            Stage::Network => "network",
            Stage::Kcore => "kcore",
            Stage::Cluster => "cluster",
            Stage::Features => "features",
            Stage::Export => "export",
            Stage::Stats => "stats",
        };
        f.write_str(s)
    }
}

/// A pipeline error tagged with the stage that raised it.
#[derive(Debug)]
pub struct StageError {
    pub stage: Stage,
    pub source: Error,
}

impl fmt::Display for StageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage {} failed: {}", self.stage, self.source)
    }
}

impl std::error::Error for StageError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T> AtStage<T> for Result<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

/// Row-level problems found while loading.
#[derive(Clone, Debug, Default, Serialize)]
pub struct IngestReport {
    pub review_row_errors: usize,
    pub album_row_errors: usize,
    pub summary: Option<CorpusSummary>,
}

pub fn load_corpus(config: &PipelineConfig) -> Result<(Corpus, IngestReport)> {
    let reviews = ingest::load_reviews(&config.reviews, config.reviews_format)?;
    let albums = ingest::load_albums(&config.albums)?;
    for e in reviews.errors.iter().take(20) {
        log::warn!("{}:{}: {}", config.reviews.display(), e.line, e.message);
    }
    for e in albums.errors.iter().take(20) {
        log::warn!("{}:{}: {}", config.albums.display(), e.line, e.message);
    }
    let corpus = ingest::join_corpus(reviews.records, albums.records)?;
    let report = IngestReport {
        review_row_errors: reviews.errors.len(),
        album_row_errors: albums.errors.len(),
        summary: Some(corpus.summary()),
    };
    Ok((corpus, report))
}

/// Positive-review corpus, bipartite graph and projected genre network.
#[derive(Clone, Debug)]
pub struct Network {
    pub positive: Corpus,
    pub bipartite: BipartiteGraph,
    pub degree_distribution: Vec<OutlierRemoval>,
    pub removed_users: Vec<OutlierRemoval>,
    pub graph: GenreGraph,
}

pub fn build_network(config: &PipelineConfig, corpus: &Corpus) -> Result<Network> {
    let positive = bipartite::filter_positive(corpus, config.score_threshold);
    let full = bipartite::build_bipartite(&positive);
    let degree_distribution = full.degree_distribution();
    let (pruned, removed_users) = bipartite::remove_outlier_users(&full, config.outlier_user_count)?;
    let graph = bipartite::project(&pruned);
    Ok(Network {
        positive,
        bipartite: pruned,
        degree_distribution,
        removed_users,
        graph,
    })
}

pub fn consensus_params(config: &PipelineConfig) -> ConsensusParams {
    ConsensusParams {
        runs: config.runs,
        base_seed: config.base_seed,
        max_rounds: config.max_rounds,
        execution: Execution::default(),
    }
}

pub fn split_policy(config: &PipelineConfig) -> SplitPolicy {
    SplitPolicy {
        max_size: config.split_max_size(),
        max_depth: config.split_max_depth,
    }
}

/// Main core of the network and its cluster hierarchy.
#[derive(Clone, Debug)]
pub struct Clustering {
    pub core: GenreGraph,
    pub removed: Vec<RemovedNode>,
    pub hierarchy: Hierarchy,
}

pub fn prune(graph: &GenreGraph) -> Result<(GenreGraph, Vec<RemovedNode>)> {
    main_core(graph)
}

pub fn cluster(config: &PipelineConfig, core: &GenreGraph) -> Result<Hierarchy> {
    hierarchical_pipeline(core, &consensus_params(config), &split_policy(config))
}

/// Leaf label → genres.
pub fn leaf_clusters(tree: &ClusterTree) -> BTreeMap<String, Vec<String>> {
    tree.leaves()
        .into_iter()
        .map(|l| (l.label.clone(), l.genres.clone()))
        .collect()
}

/// Ranked top features per leaf cluster and the parser named in the parses.
#[derive(Clone, Debug)]
pub struct Features {
    pub top: BTreeMap<String, Vec<FeatureScore>>,
    pub parser_model: Option<String>,
    pub accuracy: Option<AccuracyEvaluation>,
}

pub fn extract_features(config: &PipelineConfig, corpus: &Corpus, tree: &ClusterTree) -> Result<Features> {
    let path = config
        .parses
        .as_ref()
        .ok_or_else(|| Error::Config("text stage needs a `parses` file".into()))?;
    let parses = read_conllu(path)?;
    let collected = textfeat::collect_cluster_features(
        &parses.documents,
        corpus,
        &leaf_clusters(tree),
        Execution::default(),
    );
    if collected.skipped_unmatched + collected.skipped_out_of_scope > 0 {
        log::info!(
            "features: {} unmatched and {} out-of-scope documents skipped",
            collected.skipped_unmatched,
            collected.skipped_out_of_scope
        );
    }
    let scored = textfeat::modified_tfidf(&collected.per_cluster)?;
    let top: BTreeMap<String, Vec<FeatureScore>> = scored
        .into_iter()
        .map(|(label, scores)| (label, textfeat::top_features(&scores, config.top_n_features)))
        .collect();
    let accuracy = match &config.judgments {
        Some(p) => Some(textfeat::evaluate_accuracy(&textfeat::load_judgments(p)?, &top)?),
        None => None,
    };
    Ok(Features {
        parser_model: parses
            .metadata
            .get("parser_model")
            .cloned(),
        top,
        accuracy,
    })
}

#[derive(Clone, Debug, Serialize)]
struct StageTiming {
    stage: Stage,
    millis: u128,
}

#[derive(Clone, Debug, Serialize)]
struct Manifest {
    status: &'static str,
    failed_stage: Option<Stage>,
    error: Option<String>,
    base_seed: u64,
    config_hash: String,
    config: PipelineConfig,
    parallel: bool,
    parser_model: Option<String>,
    ingest: IngestReport,
    removed_users: Vec<OutlierRemoval>,
    network_genres: usize,
    network_edges: usize,
    core_genres: usize,
    core_edges: usize,
    leaf_clusters: usize,
    notes: Vec<String>,
    accuracy_overall: Option<f64>,
    artifacts: Vec<String>,
    timings: Vec<StageTiming>,
}

/// What a successful run produced.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub tree: ClusterTree,
}

struct Recorder {
    out_dir: PathBuf,
    manifest: Manifest,
    clock: Instant,
}

impl Recorder {
    fn path(&mut self, name: &str) -> PathBuf {
        self.manifest.artifacts.push(name.to_string());
        self.out_dir.join(name)
    }

    fn lap(&mut self, stage: Stage) {
        self.manifest.timings.push(StageTiming {
            stage,
            millis: self.clock.elapsed().as_millis(),
        });
        self.clock = Instant::now();
    }

    fn write(&self) -> Result<()> {
        let path = self.out_dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        export::write_text(&path, &text)
    }
}

/// Runs every stage and writes artifacts into `out_dir`. On failure the
/// artifacts written so far are kept and `manifest.json` names the failing
/// stage.
pub fn run_pipeline(config: &PipelineConfig, out_dir: &Path) -> std::result::Result<RunSummary, StageError> {
    std::fs::create_dir_all(out_dir)
        .map_err(|e| Error::io(out_dir, e))
        .at(Stage::Export)?;
    let mut rec = Recorder {
        out_dir: out_dir.to_path_buf(),
        clock: Instant::now(),
        manifest: Manifest {
            status: "running",
            failed_stage: None,
            error: None,
            base_seed: config.base_seed,
            config_hash: config.hash(),
            config: config.clone(),
            parallel: Execution::parallel_available(),
            parser_model: None,
            ingest: IngestReport::default(),
            removed_users: Vec::new(),
            network_genres: 0,
            network_edges: 0,
            core_genres: 0,
            core_edges: 0,
            leaf_clusters: 0,
            notes: Vec::new(),
            accuracy_overall: None,
            artifacts: Vec::new(),
            timings: Vec::new(),
        },
    };
    let outcome = run_stages(config, &mut rec);
    match &outcome {
        Ok(_) => rec.manifest.status = "ok",
        Err(e) => {
            rec.manifest.status = "failed";
            rec.manifest.failed_stage = Some(e.stage);
            rec.manifest.error = Some(e.source.to_string());
        }
    }
    rec.write().at(Stage::Export)?;
    let tree = outcome?;
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        artifacts: rec.manifest.artifacts.clone(),
        tree,
    })
}

fn run_stages(config: &PipelineConfig, rec: &mut Recorder) -> std::result::Result<ClusterTree, StageError> {
    config.validate().at(Stage::Ingest)?;
    let (corpus, ingest_report) = load_corpus(config).at(Stage::Ingest)?;
    rec.manifest.ingest = ingest_report;
    rec.lap(Stage::Ingest);

    let network = build_network(config, &corpus).at(Stage::Network)?;
    rec.manifest.removed_users = network.removed_users.clone();
    rec.manifest.network_genres = network.graph.node_count();
    rec.manifest.network_edges = network.graph.edge_count();
    let p = rec.path("user_degrees.csv");
    export::write_user_degrees(&p, &network.degree_distribution).at(Stage::Network)?;
    let p = rec.path("network_edges.csv");
    export::write_edge_list(&p, &network.graph).at(Stage::Network)?;
    rec.lap(Stage::Network);

    let (core, removed) = prune(&network.graph).at(Stage::Kcore)?;
    rec.manifest.core_genres = core.node_count();
    rec.manifest.core_edges = core.edge_count();
    let p = rec.path("kcore_removed.csv");
    export::write_removed_nodes(&p, &removed).at(Stage::Kcore)?;
    rec.lap(Stage::Kcore);

    let hierarchy = cluster(config, &core).at(Stage::Cluster)?;
    rec.manifest.notes = hierarchy.notes.clone();
    let tree = hierarchy.tree.clone();
    let leaves = leaf_clusters(&tree);
    rec.manifest.leaf_clusters = leaves.len();
    let p = rec.path("clusters.json");
    export::write_cluster_tree(&p, &tree).at(Stage::Cluster)?;
    for (label, trace) in &hierarchy.traces {
        let p = rec.path(&trace_file_name(label));
        export::write_trace(&p, trace).at(Stage::Cluster)?;
    }
    let assignment = export::leaf_assignment(&tree);
    let p = rec.path("partition.csv");
    write_assignment(&p, &assignment).at(Stage::Cluster)?;
    rec.lap(Stage::Cluster);

    if config.text_stage {
        let features = extract_features(config, &corpus, &tree).at(Stage::Features)?;
        rec.manifest.parser_model = Some(features.parser_model.clone().unwrap_or_else(|| "unknown".into()));
        for (label, scores) in &features.top {
            let p = rec.path(&format!("features_{}.csv", export::file_label(label)));
            export::write_feature_scores(&p, scores).at(Stage::Features)?;
        }
        if let Some(acc) = &features.accuracy {
            rec.manifest.accuracy_overall = Some(acc.overall.accuracy);
            let p = rec.path("accuracy.json");
            let json = serde_json::to_string_pretty(acc).map_err(Error::from).at(Stage::Features)?;
            export::write_text(&p, &(json + "\n")).at(Stage::Features)?;
        }
        rec.lap(Stage::Features);
    }

    if config.export_graphml {
        let p = rec.path("network_full.graphml");
        export::write_graphml(&p, &core, &assignment, ExportMode::Full).at(Stage::Export)?;
        let p = rec.path("network_top3.graphml");
        export::write_graphml(&p, &core, &assignment, ExportMode::Top3OutEdges).at(Stage::Export)?;
        rec.lap(Stage::Export);
    }

    if config.export_stats {
        let p = rec.path("genre_stats.csv");
        report::write_genre_stats(&p, &report::genre_stats(&corpus, config.score_threshold)).at(Stage::Stats)?;
        for (label, genres) in &leaves {
            let rows = report::country_table(&corpus, genres, config.score_threshold);
            let p = rec.path(&format!("country_{}.csv", export::file_label(label)));
            report::write_country_table(&p, &rows).at(Stage::Stats)?;
        }
        rec.lap(Stage::Stats);
    }
    Ok(tree)
}

/// `trace.csv` for the root consensus, `trace_<label>.csv` for splits.
pub fn trace_file_name(label: &str) -> String {
    if label == ROOT_LABEL {
        "trace.csv".to_string()
    } else {
        format!("trace_{}.csv", export::file_label(label))
    }
}

/// `genre,community_id` for every clustered genre.
pub fn write_assignment(path: &Path, assignment: &BTreeMap<String, String>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genre", "community_id"])?;
    for (genre, label) in assignment {
        w.write_record([genre, label])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
