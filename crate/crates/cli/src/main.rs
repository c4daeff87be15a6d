// SPDX-License-Identifier: Apache-2.0

//! `genrenet`: genre community detection from review data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use genrenet::config::PipelineConfig;
use genrenet::consensus::ClusterTree;
use genrenet::export::{self, ExportMode};
use genrenet::ingest::Corpus;
use genrenet::{pipeline, report};

#[derive(Parser, Debug)]
#[command(name = "genrenet", version, about = "Genre communities from user reviews")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Pipeline config (TOML). Relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Reviews file (JSONL), used when no --config is given.
    #[arg(long, global = true)]
    reviews: Option<PathBuf>,
    /// Albums file (CSV), used when no --config is given.
    #[arg(long, global = true)]
    albums: Option<PathBuf>,
    /// CoNLL-U parses of the reviews, for the text stage.
    #[arg(long, global = true)]
    parses: Option<PathBuf>,
    /// Base seed for all Louvain runs [default: 0].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    /// Minimum score of a positive review, inclusive [default: 75].
    #[arg(long, global = true)]
    threshold: Option<u8>,
    /// Louvain runs per consensus round [default: 100].
    #[arg(long, global = true)]
    runs: Option<usize>,
    /// Maximum depth of the cluster hierarchy [default: 3].
    #[arg(long, global = true)]
    max_depth: Option<usize>,
    /// Features kept per cluster [default: 50].
    #[arg(long, global = true)]
    top_n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every stage and write all artifacts.
    Run {
        /// Skip the text-feature stage.
        #[arg(long)]
        no_text: bool,
    },
    /// Build the genre network: network_edges.csv, user_degrees.csv.
    Project,
    /// Cluster the main core: clusters.json, trace.csv, partition.csv.
    Cluster,
    /// Rank cluster features: features_<cluster>.csv.
    Features(ClusterSource),
    /// Write network_full.graphml and network_top3.graphml.
    Export(ClusterSource),
    /// Write genre_stats.csv and country_<cluster>.csv.
    Stats(ClusterSource),
}

#[derive(Args, Debug)]
struct ClusterSource {
    /// Reuse a clusters.json instead of clustering again.
    #[arg(long)]
    clusters: Option<PathBuf>,
}

impl Global {
    fn config(&self) -> Result<PipelineConfig> {
        let mut cfg = match (&self.config, &self.reviews, &self.albums) {
            (Some(path), _, _) => PipelineConfig::load(path)
                .with_context(|| format!("loading config {}", path.display()))?,
            (None, Some(r), Some(a)) => PipelineConfig::new(r, a),
            _ => bail!("either --config or both --reviews and --albums are required"),
        };
        if self.config.is_some() {
            if let Some(r) = &self.reviews {
                cfg.reviews = r.clone();
            }
            if let Some(a) = &self.albums {
                cfg.albums = a.clone();
            }
        }
        if let Some(p) = &self.parses {
            cfg.parses = Some(p.clone());
        }
        if let Some(s) = self.seed {
            cfg.base_seed = s;
        }
        if let Some(t) = self.threshold {
            cfg.score_threshold = t;
        }
        if let Some(r) = self.runs {
            cfg.runs = r;
        }
        if let Some(d) = self.max_depth {
            cfg.split_max_depth = d;
        }
        if let Some(n) = self.top_n {
            cfg.top_n_features = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let mut cfg = cli.global.config()?;
    let out = &cli.global.out_dir;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    match &cli.command {
        Command::Run { no_text } => {
            if *no_text {
                cfg.text_stage = false;
            }
            if cfg.text_stage && cfg.parses.is_none() {
                log::warn!("no parses configured; text stage disabled");
                cfg.text_stage = false;
            }
            let summary = pipeline::run_pipeline(&cfg, out)?;
            log::info!(
                "{} leaf clusters, {} artifacts in {}",
                summary.tree.leaves().len(),
                summary.artifacts.len(),
                out.display()
            );
        }
        Command::Project => {
            let (corpus, _) = pipeline::load_corpus(&cfg)?;
            let net = pipeline::build_network(&cfg, &corpus)?;
            export::write_edge_list(&out.join("network_edges.csv"), &net.graph)?;
            export::write_user_degrees(&out.join("user_degrees.csv"), &net.degree_distribution)?;
            log::info!(
                "{} genres, {} edges after removing {} users",
                net.graph.node_count(),
                net.graph.edge_count(),
                net.removed_users.len()
            );
        }
        Command::Cluster => {
            let corpus = load(&cfg)?;
            let (core, removed) = core_of(&cfg, &corpus)?;
            let h = pipeline::cluster(&cfg, &core)?;
            export::write_removed_nodes(&out.join("kcore_removed.csv"), &removed)?;
            export::write_cluster_tree(&out.join("clusters.json"), &h.tree)?;
            for (label, trace) in &h.traces {
                export::write_trace(&out.join(pipeline::trace_file_name(label)), trace)?;
            }
            pipeline::write_assignment(&out.join("partition.csv"), &export::leaf_assignment(&h.tree))?;
            for note in &h.notes {
                log::info!("{note}");
            }
            log::info!("{} leaf clusters", h.tree.leaves().len());
        }
        Command::Features(src) => {
            if cfg.parses.is_none() {
                bail!("features needs --parses or `parses` in the config");
            }
            let corpus = load(&cfg)?;
            let tree = clusters(&cfg, &corpus, src)?;
            let f = pipeline::extract_features(&cfg, &corpus, &tree)?;
            for (label, scores) in &f.top {
                export::write_feature_scores(&out.join(format!("features_{}.csv", export::file_label(label))), scores)?;
            }
            if let Some(acc) = &f.accuracy {
                println!(
                    "accuracy: {}/{} = {:.1}%",
                    acc.overall.n_correct, acc.overall.n_total, acc.overall.accuracy
                );
            }
        }
        Command::Export(src) => {
            let corpus = load(&cfg)?;
            let tree = clusters(&cfg, &corpus, src)?;
            let (core, _) = core_of(&cfg, &corpus)?;
            let assignment = export::leaf_assignment(&tree);
            export::write_graphml(&out.join("network_full.graphml"), &core, &assignment, ExportMode::Full)?;
            export::write_graphml(&out.join("network_top3.graphml"), &core, &assignment, ExportMode::Top3OutEdges)?;
        }
        Command::Stats(src) => {
            let corpus = load(&cfg)?;
            report::write_genre_stats(
                &out.join("genre_stats.csv"),
                &report::genre_stats(&corpus, cfg.score_threshold),
            )?;
            let tree = clusters(&cfg, &corpus, src)?;
            for (label, genres) in pipeline::leaf_clusters(&tree) {
                let rows = report::country_table(&corpus, &genres, cfg.score_threshold);
                report::write_country_table(&out.join(format!("country_{}.csv", export::file_label(&label))), &rows)?;
            }
        }
    }
    Ok(())
}

fn load(cfg: &PipelineConfig) -> Result<Corpus> {
    Ok(pipeline::load_corpus(cfg)?.0)
}

fn core_of(
    cfg: &PipelineConfig,
    corpus: &Corpus,
) -> Result<(genrenet::GenreGraph, Vec<genrenet::kcore::RemovedNode>)> {
    let net = pipeline::build_network(cfg, corpus)?;
    Ok(pipeline::prune(&net.graph)?)
}

fn clusters(cfg: &PipelineConfig, corpus: &Corpus, src: &ClusterSource) -> Result<ClusterTree> {
    match &src.clusters {
        Some(path) => read_tree(path),
        None => {
            let (core, _) = core_of(cfg, corpus)?;
            Ok(pipeline::cluster(cfg, &core)?.tree)
        }
    }
}

fn read_tree(path: &Path) -> Result<ClusterTree> {
    let tree = export::read_cluster_tree(path).with_context(|| format!("reading {}", path.display()))?;
    if tree.genres.is_empty() {
        bail!("{} has no clusters", path.display());
    }
    Ok(tree)
}
