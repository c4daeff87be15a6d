// SPDX-License-Identifier: Apache-2.0

//! Averaged (consensus) partitioning and hierarchical splitting.
//!
//! A consensus round runs Louvain `R` times on the current graph and replaces
//! it with the co-assignment graph: same nodes, `w(A, B)` = number of runs in
//! which A and B shared a community, zero-count pairs dropped. Rounds repeat
//! until every connected component is a clique whose pairs were co-assigned
//! in all `R` runs; the components are then the communities.
//!
//! Progress is tracked against `ε_max = Σ_i N_i (N_i − 1) / 2` over the
//! connected components, the largest edge count the current component
//! structure allows.

use serde::{Deserialize, Serialize};

use crate::community::{louvain, Partition};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{GenreGraph, WeightSemantics};

pub const DEFAULT_RUNS: usize = 100;
pub const DEFAULT_MAX_ROUNDS: usize = 50;
pub const DEFAULT_MAX_SIZE: usize = 16;
pub const DEFAULT_MAX_DEPTH: usize = 3;

/// Maximum number of edges given connected component sizes.
pub fn epsilon_max(component_sizes: &[usize]) -> Result<u64> {
    component_sizes.iter().try_fold(0u64, |acc, &n| {
        if n < 1 {
            return Err(Error::InvalidComponentSize(n));
        }
        let n = n as u64;
        Ok(acc + n * (n - 1) / 2)
    })
}

/// [`epsilon_max`] of a graph's own connected components.
pub fn graph_epsilon_max(g: &GenreGraph) -> u64 {
    let sizes: Vec<usize> = g.connected_components().iter().map(Vec::len).collect();
    epsilon_max(&sizes).expect("components are non-empty")
}

/// One row of the per-round statistics table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundStats {
    pub round: usize,
    pub num_components: usize,
    pub num_edges: usize,
    pub epsilon_max: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConsensusState {
    pub round: usize,
    /// Input graph at round 0, co-assignment counts afterwards.
    pub graph: GenreGraph,
    pub num_runs: usize,
    pub epsilon_max: u64,
    pub num_edges: usize,
    pub num_components: usize,
    /// Set once a round (not the input) leaves every component a clique of
    /// weight exactly `num_runs`.
    pub converged: bool,
}

impl ConsensusState {
    pub fn initial(graph: GenreGraph, num_runs: usize) -> Self {
        ConsensusState::from_graph(0, graph, num_runs)
    }

    fn from_graph(round: usize, graph: GenreGraph, num_runs: usize) -> Self {
        let components = graph.connected_components();
        let sizes: Vec<usize> = components.iter().map(Vec::len).collect();
        let eps = epsilon_max(&sizes).expect("components are non-empty");
        let num_edges = graph.edge_count();
        let saturated = graph.edges().all(|(_, w)| w == num_runs as f64);
        ConsensusState {
            round,
            num_runs,
            epsilon_max: eps,
            num_edges,
            num_components: components.len(),
            converged: round > 0 && num_edges as u64 == eps && saturated,
            graph,
        }
    }

    pub fn stats(&self) -> RoundStats {
        RoundStats {
            round: self.round,
            num_components: self.num_components,
            num_edges: self.num_edges,
            epsilon_max: self.epsilon_max,
        }
    }

    /// Connected components of the current graph as a partition.
    pub fn component_partition(&self) -> Partition {
        Partition::from_groups(self.graph.node_count(), &self.graph.connected_components())
    }
}

/// Knobs shared by every consensus computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsensusParams {
    /// Louvain runs per round.
    pub runs: usize,
    pub base_seed: u64,
    pub max_rounds: usize,
    pub execution: Execution,
}

impl Default for ConsensusParams {
    fn default() -> Self {
        ConsensusParams {
            runs: DEFAULT_RUNS,
            base_seed: 0,
            max_rounds: DEFAULT_MAX_ROUNDS,
            execution: Execution::default(),
        }
    }
}

/// One round with Louvain seeds `base_seed .. base_seed + R`.
pub fn consensus_round(state: &ConsensusState, base_seed: u64) -> ConsensusState {
    consensus_round_with(state, base_seed, Execution::default())
}

pub fn consensus_round_with(
    state: &ConsensusState,
    base_seed: u64,
    execution: Execution,
) -> ConsensusState {
    let runs = state.num_runs;
    let g = &state.graph;
    let n = g.node_count();
    let seeds: Vec<u64> = (0..runs as u64).map(|i| base_seed.wrapping_add(i)).collect();
    let partitions = execution.map(&seeds, |&seed| louvain(g, seed));

    // Upper-triangular pair counts; integer sums do not depend on the order
    // partitions arrive in.
    let mut counts = vec![0u32; n * n.saturating_sub(1) / 2];
    let pair = |a: usize, b: usize| a * (2 * n - a - 1) / 2 + (b - a - 1);
    for p in &partitions {
        for members in p.communities() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    counts[pair(a, b)] += 1;
                }
            }
        }
    }

    let mut next = GenreGraph::new(g.nodes().iter().cloned(), WeightSemantics::CoassignmentCount);
    for a in 0..n {
        for b in a + 1..n {
            let c = counts[pair(a, b)];
            if c > 0 {
                next.set_weight(a, b, c as f64);
            }
        }
    }
    ConsensusState::from_graph(state.round + 1, next, runs)
}

/// Outcome of [`run_to_convergence`].
#[derive(Clone, Debug)]
pub struct Consensus {
    /// One community per connected component of the converged graph.
    pub partition: Partition,
    /// Round 0 (the input) followed by every consensus round.
    pub states: Vec<ConsensusState>,
}

impl Consensus {
    pub fn trace(&self) -> Vec<RoundStats> {
        self.states.iter().map(ConsensusState::stats).collect()
    }
}

/// Iterates consensus rounds until convergence. Round `r` (from 1) uses seeds
/// starting at `base_seed + (r − 1)·R`, so no seed is reused across rounds.
pub fn run_to_convergence(g: &GenreGraph, params: &ConsensusParams) -> Result<Consensus> {
    assert!(params.runs >= 1, "at least one run per round");
    assert!(params.max_rounds >= 1, "at least one round");
    let mut states = vec![ConsensusState::initial(g.clone(), params.runs)];
    for round in 1..=params.max_rounds {
        let seed = params
            .base_seed
            .wrapping_add(((round - 1) * params.runs) as u64);
        let next = consensus_round_with(states.last().expect("non-empty"), seed, params.execution);
        log::debug!(
            "consensus round {round}: {} components, {} edges, epsilon_max {}",
            next.num_components,
            next.num_edges,
            next.epsilon_max
        );
        let done = next.converged;
        states.push(next);
        if done {
            let partition = states.last().expect("non-empty").component_partition();
            return Ok(Consensus { partition, states });
        }
    }
    Err(Error::NotConverged {
        max_rounds: params.max_rounds,
        trace: states.iter().map(ConsensusState::stats).collect(),
    })
}

/// When a cluster is re-clustered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitPolicy {
    /// Clusters with more members than this are split candidates.
    pub max_size: usize,
    /// Maximum number of community detection layers, the root layer included.
    pub max_depth: usize,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy {
            max_size: DEFAULT_MAX_SIZE,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

/// Cluster hierarchy. Labels are dotted paths (`"3"`, `"3.2"`), the root is
/// labeled `"root"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClusterTree {
    pub label: String,
    /// Member genres, sorted.
    pub genres: Vec<String>,
    /// Mean weight of the original edges inside the cluster.
    pub avg_intra_weight: f64,
    pub children: Vec<ClusterTree>,
}

impl ClusterTree {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Leaves in depth-first order.
    pub fn leaves(&self) -> Vec<&ClusterTree> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a ClusterTree>) {
        if self.is_leaf() {
            out.push(self);
        } else {
            for c in &self.children {
                c.collect_leaves(out);
            }
        }
    }

    /// Number of layers below this node.
    pub fn depth(&self) -> usize {
        self.children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn find(&self, label: &str) -> Option<&ClusterTree> {
        if self.label == label {
            return Some(self);
        }
        self.children.iter().find_map(|c| c.find(label))
    }
}

/// Children produced by splitting one cluster, with the consensus trace of
/// the attempt. `children` is empty when the cluster did not split.
#[derive(Clone, Debug)]
pub struct SplitOutcome {
    pub children: Vec<ClusterTree>,
    pub trace: Vec<RoundStats>,
}

/// Re-clusters `members` on the subgraph of `original` they induce, using
/// the original weights. Children are labeled `"{label}.{i}"` from 1.
pub fn split_cluster(
    original: &GenreGraph,
    label: &str,
    members: &[String],
    params: &ConsensusParams,
) -> Result<SplitOutcome> {
    let sub = original.induced_by_names(members);
    if sub.edge_count() == 0 {
        return Ok(SplitOutcome {
            children: Vec::new(),
            trace: Vec::new(),
        });
    }
    let consensus = run_to_convergence(&sub, params)?;
    let trace = consensus.trace();
    let groups = consensus.partition.communities();
    if groups.len() < 2 {
        return Ok(SplitOutcome {
            children: Vec::new(),
            trace,
        });
    }
    let children = groups
        .iter()
        .enumerate()
        .map(|(i, group)| {
            let names: Vec<String> = group.iter().map(|&v| sub.node_name(v).to_string()).collect();
            cluster_node(original, format!("{}{}", child_prefix(label), i + 1), names)
        })
        .collect();
    Ok(SplitOutcome { children, trace })
}

fn child_prefix(label: &str) -> String {
    if label == ROOT_LABEL {
        String::new()
    } else {
        format!("{label}.")
    }
}

/// Label of the unsplit top-level cluster.
pub const ROOT_LABEL: &str = "root";

fn cluster_node(original: &GenreGraph, label: String, mut genres: Vec<String>) -> ClusterTree {
    genres.sort();
    let members: Vec<usize> = genres.iter().filter_map(|g| original.node_index(g)).collect();
    ClusterTree {
        label,
        avg_intra_weight: original.mean_intra_weight(&members),
        genres,
        children: Vec::new(),
    }
}

/// Whether children improve on their parent: the pooled mean weight of the
/// edges kept inside the children must exceed the parent's mean.
pub fn split_improves(original: &GenreGraph, parent: &ClusterTree, children: &[ClusterTree]) -> bool {
    let (sum, count) = children.iter().fold((0.0, 0usize), |(s, c), child| {
        let members: Vec<usize> = child.genres.iter().filter_map(|g| original.node_index(g)).collect();
        let (cs, cc) = original.intra_weight(&members);
        (s + cs, c + cc)
    });
    count > 0 && sum / count as f64 > parent.avg_intra_weight
}

/// Hierarchy plus the record of how it was built.
#[derive(Clone, Debug)]
pub struct Hierarchy {
    pub tree: ClusterTree,
    /// Consensus trace per clustered node (`"root"` first), including
    /// rejected split attempts.
    pub traces: Vec<(String, Vec<RoundStats>)>,
    pub notes: Vec<String>,
}

/// Consensus clustering at the root, then recursive splitting of clusters
/// larger than `policy.max_size` while the split raises the mean intra-cluster
/// weight, down to `policy.max_depth` layers.
pub fn hierarchical_pipeline(
    g: &GenreGraph,
    params: &ConsensusParams,
    policy: &SplitPolicy,
) -> Result<Hierarchy> {
    let mut traces = Vec::new();
    let mut notes = Vec::new();
    let mut root = cluster_node(g, ROOT_LABEL.to_string(), g.nodes().to_vec());
    if g.node_count() == 0 {
        return Ok(Hierarchy {
            tree: root,
            traces,
            notes,
        });
    }

    let consensus = run_to_convergence(g, params)?;
    traces.push((ROOT_LABEL.to_string(), consensus.trace()));
    root.children = consensus
        .partition
        .communities()
        .iter()
        .enumerate()
        .map(|(i, group)| {
            let names = group.iter().map(|&v| g.node_name(v).to_string()).collect();
            cluster_node(g, (i + 1).to_string(), names)
        })
        .collect();
    if root.children.len() == 1 && g.node_count() > 1 {
        let note = "root consensus produced a single community; split policy applied to it".to_string();
        log::warn!("{note}");
        notes.push(note);
    }

    for child in &mut root.children {
        refine(g, child, 1, params, policy, &mut traces, &mut notes)?;
    }
    Ok(Hierarchy {
        tree: root,
        traces,
        notes,
    })
}

fn refine(
    original: &GenreGraph,
    node: &mut ClusterTree,
    depth: usize,
    params: &ConsensusParams,
    policy: &SplitPolicy,
    traces: &mut Vec<(String, Vec<RoundStats>)>,
    notes: &mut Vec<String>,
) -> Result<()> {
    if node.genres.len() <= policy.max_size || depth >= policy.max_depth {
        return Ok(());
    }
    let split_params = ConsensusParams {
        base_seed: params.base_seed ^ label_hash(&node.label),
        ..*params
    };
    let outcome = split_cluster(original, &node.label, &node.genres, &split_params)?;
    if !outcome.trace.is_empty() {
        traces.push((node.label.clone(), outcome.trace));
    }
    if outcome.children.is_empty() {
        notes.push(format!("cluster {} did not split", node.label));
        return Ok(());
    }
    if !split_improves(original, node, &outcome.children) {
        notes.push(format!(
            "split of cluster {} rolled back: mean intra weight did not improve",
            node.label
        ));
        return Ok(());
    }
    node.children = outcome.children;
    for child in &mut node.children {
        refine(original, child, depth + 1, params, policy, traces, notes)?;
    }
    Ok(())
}

/// FNV-1a; stable across platforms and releases, unlike `DefaultHasher`.
fn label_hash(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}
