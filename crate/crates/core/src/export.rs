// SPDX-License-Identifier: Apache-2.0

//! File exports: GraphML, edge lists and the CSV/JSON artifacts of a run.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bipartite::OutlierRemoval;
use crate::community::Partition;
use crate::consensus::{ClusterTree, RoundStats};
use crate::error::{Error, Result};
use crate::graph::GenreGraph;
use crate::kcore::RemovedNode;
use crate::textfeat::FeatureScore;

/// Inter-cluster edges kept per cluster in [`ExportMode::Top3OutEdges`].
pub const OUT_EDGES_PER_CLUSTER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportMode {
    Full,
    /// Intra-cluster edges plus each cluster's three heaviest inter-cluster
    /// edges.
    Top3OutEdges,
}

/// Genre → cluster label for the leaves of a tree.
pub fn leaf_assignment(tree: &ClusterTree) -> BTreeMap<String, String> {
    tree.leaves()
        .into_iter()
        .flat_map(|leaf| leaf.genres.iter().map(move |g| (g.clone(), leaf.label.clone())))
        .collect()
}

type WeightedEdge = ((usize, usize), f64);

/// Edges written for `mode`, in canonical order.
pub fn select_edges(
    g: &GenreGraph,
    clusters: &BTreeMap<String, String>,
    mode: ExportMode,
) -> Vec<((usize, usize), f64)> {
    match mode {
        ExportMode::Full => g.edges().collect(),
        ExportMode::Top3OutEdges => {
            let label = |v: usize| clusters.get(g.node_name(v)).map(String::as_str).unwrap_or("");
            let mut keep: BTreeSet<(usize, usize)> = BTreeSet::new();
            let mut outgoing: BTreeMap<&str, Vec<WeightedEdge>> = BTreeMap::new();
            for ((a, b), w) in g.edges() {
                let (la, lb) = (label(a), label(b));
                if la == lb {
                    keep.insert((a, b));
                } else {
                    outgoing.entry(la).or_default().push(((a, b), w));
                    outgoing.entry(lb).or_default().push(((a, b), w));
                }
            }
            for edges in outgoing.values_mut() {
                edges.sort_by(|(ea, wa), (eb, wb)| {
                    wb.total_cmp(wa).then_with(|| {
                        let name = |(x, y): (usize, usize)| (g.node_name(x), g.node_name(y));
                        name(*ea).cmp(&name(*eb))
                    })
                });
                keep.extend(edges.iter().take(OUT_EDGES_PER_CLUSTER).map(|(e, _)| *e));
            }
            keep.into_iter()
                .map(|(a, b)| ((a, b), g.weight(a, b).expect("kept edge exists")))
                .collect()
        }
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// GraphML document with a `label` and `cluster` attribute per node and a
/// `weight` per edge.
pub fn graphml(g: &GenreGraph, clusters: &BTreeMap<String, String>, mode: ExportMode) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"cluster\" for=\"node\" attr.name=\"cluster\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n");
    out.push_str("  <graph id=\"genres\" edgedefault=\"undirected\">\n");
    for (i, name) in g.nodes().iter().enumerate() {
        let cluster = clusters.get(name).map(String::as_str).unwrap_or("");
        let _ = writeln!(
            out,
            "    <node id=\"n{i}\"><data key=\"label\">{}</data><data key=\"cluster\">{}</data></node>",
            xml_escape(name),
            xml_escape(cluster)
        );
    }
    for (i, ((a, b), w)) in select_edges(g, clusters, mode).into_iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{a}\" target=\"n{b}\"><data key=\"weight\">{w}</data></edge>"
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn write_graphml(
    path: &Path,
    g: &GenreGraph,
    clusters: &BTreeMap<String, String>,
    mode: ExportMode,
) -> Result<()> {
    write_text(path, &graphml(g, clusters, mode))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// `genre_a,genre_b,weight`, canonical order.
pub fn write_edge_list(path: &Path, g: &GenreGraph) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genre_a", "genre_b", "weight"])?;
    for ((a, b), weight) in g.edges() {
        w.write_record([g.node_name(a), g.node_name(b), &weight.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `genre,community_id`.
pub fn write_partition(path: &Path, g: &GenreGraph, p: &Partition) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genre", "community_id"])?;
    for (v, name) in g.nodes().iter().enumerate() {
        w.write_record([name.as_str(), &p.community_of(v).to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `genre,core_number`.
pub fn write_removed_nodes(path: &Path, removed: &[RemovedNode]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in removed {
        w.serialize(r)?;
    }
    if removed.is_empty() {
        w.write_record(["genre", "core_number"])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `user_id,degree`.
pub fn write_user_degrees(path: &Path, degrees: &[OutlierRemoval]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in degrees {
        w.serialize(r)?;
    }
    if degrees.is_empty() {
        w.write_record(["user_id", "degree"])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `round,num_components,num_edges,epsilon_max`.
pub fn write_trace(path: &Path, trace: &[RoundStats]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in trace {
        w.serialize(r)?;
    }
    if trace.is_empty() {
        w.write_record(["round", "num_components", "num_edges", "epsilon_max"])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_trace(path: &Path) -> Result<Vec<RoundStats>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

pub fn cluster_tree_json(tree: &ClusterTree) -> Result<String> {
    let mut s = serde_json::to_string_pretty(tree)?;
    s.push('\n');
    Ok(s)
}

pub fn write_cluster_tree(path: &Path, tree: &ClusterTree) -> Result<()> {
    write_text(path, &cluster_tree_json(tree)?)
}

pub fn read_cluster_tree(path: &Path) -> Result<ClusterTree> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// `adjective,noun,tf,idf,tfidf` in rank order.
pub fn write_feature_scores(path: &Path, scores: &[FeatureScore]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["adjective", "noun", "tf", "idf", "tfidf"])?;
    for s in scores {
        w.write_record([
            s.feature.adjective.as_str(),
            s.feature.noun.as_str(),
            &s.tf.to_string(),
            &s.idf.to_string(),
            &s.tfidf.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Cluster label made safe for a file name.
pub fn file_label(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect()
}

/// Nodes of `g` grouped by cluster label; handy for callers holding only an
/// assignment map.
pub fn group_by_cluster(clusters: &BTreeMap<String, String>) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (genre, label) in clusters {
        out.entry(label.clone()).or_default().push(genre.clone());
    }
    out
}

/// Assignment map from a partition of `g`, labeling communities `1..`.
pub fn partition_assignment(g: &GenreGraph, p: &Partition) -> BTreeMap<String, String> {
    let names: HashMap<usize, String> = (0..p.num_communities()).map(|c| (c, (c + 1).to_string())).collect();
    g.nodes()
        .iter()
        .enumerate()
        .map(|(v, n)| (n.clone(), names[&p.community_of(v)].clone()))
        .collect()
}
