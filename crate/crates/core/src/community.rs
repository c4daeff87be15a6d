// SPDX-License-Identifier: Apache-2.0

//! Weighted modularity and seeded Louvain maximization.
//!
//! Louvain alternates local moving (each node joins the neighboring community
//! with the largest modularity gain) with aggregation (communities collapse
//! into super-nodes whose self-loops carry the internal weight) until a level
//! produces no move. Node visit order is reshuffled from the seed on every
//! sweep, so different seeds explore different local optima while a given
//! seed is fully reproducible.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::GenreGraph;

/// Minimum normalized modularity gain for a move to count as an improvement.
const MIN_GAIN: f64 = 1e-12;
/// Hard cap on sweeps per level; never reached in practice since every
/// accepted move raises modularity by at least `MIN_GAIN`.
const MAX_SWEEPS: usize = 10_000;

/// Assignment of every node (by graph index) to a community in
/// `0..num_communities`. Ids are numbered by first appearance in node order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    num_communities: usize,
}

impl Partition {
    /// Relabels arbitrary labels to contiguous ids by first appearance.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut map = std::collections::HashMap::new();
        let assignment: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = map.len();
                *map.entry(*l).or_insert(next)
            })
            .collect();
        Partition {
            num_communities: map.len(),
            assignment,
        }
    }

    /// Partition of `n` nodes given as disjoint groups covering `0..n`.
    ///
    /// Panics if the groups do not cover every node exactly once.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Self {
        let mut labels = vec![usize::MAX; n];
        for (c, group) in groups.iter().enumerate() {
            for &v in group {
                assert_eq!(labels[v], usize::MAX, "node {v} assigned twice");
                labels[v] = c;
            }
        }
        assert!(labels.iter().all(|&l| l != usize::MAX), "groups do not cover all nodes");
        Partition::from_labels(&labels)
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            num_communities: n,
        }
    }

    pub fn whole(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            num_communities: usize::from(n > 0),
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    /// Members of every community, each list ascending.
    pub fn communities(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_communities];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Newman–Girvan modularity with resolution 1:
/// `Q = Σ_c [ Σ_in(c) / 2m − (Σ_tot(c) / 2m)² ]`.
pub fn modularity(g: &GenreGraph, p: &Partition) -> Result<f64> {
    if p.len() != g.node_count() {
        return Err(Error::PartitionMismatch {
            partition: p.len(),
            graph: g.node_count(),
        });
    }
    let m = g.total_weight();
    if g.edge_count() == 0 || m <= 0.0 {
        return Err(Error::NoEdges);
    }
    let k = p.num_communities();
    let mut internal = vec![0.0; k];
    let mut total = vec![0.0; k];
    for ((a, b), w) in g.edges() {
        let (ca, cb) = (p.community_of(a), p.community_of(b));
        if ca == cb {
            internal[ca] += 2.0 * w;
        }
        total[ca] += w;
        total[cb] += w;
    }
    let two_m = 2.0 * m;
    Ok(internal
        .iter()
        .zip(&total)
        .map(|(i, t)| i / two_m - (t / two_m).powi(2))
        .sum())
}

/// Result of a Louvain run with its modularity trace.
#[derive(Clone, Debug)]
pub struct LouvainRun {
    pub partition: Partition,
    /// Modularity before the first sweep and after every sweep, across all
    /// aggregation levels. Empty for graphs without edges.
    pub trace: Vec<f64>,
}

pub fn louvain(g: &GenreGraph, seed: u64) -> Partition {
    louvain_traced(g, seed).partition
}

pub fn louvain_traced(g: &GenreGraph, seed: u64) -> LouvainRun {
    let n = g.node_count();
    if g.edge_count() == 0 {
        return LouvainRun {
            partition: Partition::singletons(n),
            trace: Vec::new(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = Level::from_graph(g);
    // Community of each original node, as an index into the current level.
    let mut membership: Vec<usize> = (0..n).collect();
    let mut trace = vec![level.modularity(&(0..level.len()).collect::<Vec<_>>())];

    loop {
        let (labels, moved) = level.local_moving(&mut rng, &mut trace);
        if !moved {
            break;
        }
        let compact = Partition::from_labels(&labels);
        for m in membership.iter_mut() {
            *m = compact.community_of(*m);
        }
        if compact.num_communities() == level.len() {
            break;
        }
        level = level.aggregate(&compact);
    }
    LouvainRun {
        partition: Partition::from_labels(&membership),
        trace,
    }
}

/// One aggregation level: a weighted graph whose nodes may carry self-loops.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
    strength: Vec<f64>,
    total_weight: f64,
}

impl Level {
    fn from_graph(g: &GenreGraph) -> Self {
        let adj = g.adjacency();
        let n = adj.len();
        Level::new(adj, vec![0.0; n])
    }

    fn new(adj: Vec<Vec<(usize, f64)>>, self_loop: Vec<f64>) -> Self {
        let strength: Vec<f64> = adj
            .iter()
            .zip(&self_loop)
            .map(|(nbrs, l)| nbrs.iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * l)
            .collect();
        let total_weight = strength.iter().sum::<f64>() / 2.0;
        Level {
            adj,
            self_loop,
            strength,
            total_weight,
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, labels: &[usize]) -> f64 {
        let n = self.len();
        let mut internal = vec![0.0; n];
        let mut total = vec![0.0; n];
        for v in 0..n {
            let c = labels[v];
            total[c] += self.strength[v];
            internal[c] += 2.0 * self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                if labels[u] == c {
                    internal[c] += w;
                }
            }
        }
        let two_m = 2.0 * self.total_weight;
        internal
            .iter()
            .zip(&total)
            .map(|(i, t)| i / two_m - (t / two_m).powi(2))
            .sum()
    }

    /// Repeated sweeps of single-node moves. Returns the final labels (ids
    /// are node indices of this level) and whether any node moved.
    fn local_moving(&self, rng: &mut ChaCha8Rng, trace: &mut Vec<f64>) -> (Vec<usize>, bool) {
        let n = self.len();
        let m = self.total_weight;
        let two_m = 2.0 * m;
        let mut labels: Vec<usize> = (0..n).collect();
        let mut tot = self.strength.clone();
        let mut order: Vec<usize> = (0..n).collect();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut is_touched = vec![false; n];
        let mut any_move = false;

        for _ in 0..MAX_SWEEPS {
            order.shuffle(rng);
            let mut moved = false;
            for &v in &order {
                let k_v = self.strength[v];
                let old = labels[v];
                for &(u, w) in &self.adj[v] {
                    let c = labels[u];
                    if !is_touched[c] {
                        is_touched[c] = true;
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[old] -= k_v;
                let gain = |c: usize, link_c: f64| (link_c - tot[c] * k_v / two_m) / m;

                let stay = gain(old, link[old]);
                let mut best = old;
                let mut best_gain = stay;
                touched.sort_unstable();
                for &c in &touched {
                    if c == old {
                        continue;
                    }
                    let g = gain(c, link[c]);
                    let better = if best == old {
                        g > stay + MIN_GAIN
                    } else {
                        g > best_gain + MIN_GAIN || (g > best_gain - MIN_GAIN && c < best)
                    };
                    if better {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += k_v;
                labels[v] = best;
                if best != old {
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                    is_touched[c] = false;
                }
                touched.clear();
            }
            if !moved {
                break;
            }
            any_move = true;
            trace.push(self.modularity(&labels));
        }
        (labels, any_move)
    }

    fn aggregate(&self, p: &Partition) -> Level {
        let k = p.num_communities();
        let mut self_loop = vec![0.0; k];
        let mut links: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        for v in 0..self.len() {
            let cv = p.community_of(v);
            self_loop[cv] += self.self_loop[v];
            for &(u, w) in &self.adj[v] {
                let cu = p.community_of(u);
                if cu == cv {
                    // Each internal edge is seen from both ends.
                    self_loop[cv] += w / 2.0;
                } else {
                    *links[cv].entry(cu).or_default() += w;
                }
            }
        }
        let adj = links.into_iter().map(|l| l.into_iter().collect()).collect();
        Level::new(adj, self_loop)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightSemantics;

    fn graph(edges: &[(&str, &str, f64)]) -> GenreGraph {
        GenreGraph::from_edges(edges.iter().copied(), WeightSemantics::UserCount)
    }

    /// Two 4-cliques a* and b* joined by one edge of weight `bridge`.
    fn two_cliques(bridge: f64) -> GenreGraph {
        let mut edges = Vec::new();
        for side in ["a", "b"] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((format!("{side}{i}"), format!("{side}{j}"), 1.0));
                }
            }
        }
        edges.push(("a0".into(), "b0".into(), bridge));
        GenreGraph::from_edges(
            edges.iter().map(|(a, b, w)| (a.as_str(), b.as_str(), *w)),
            WeightSemantics::UserCount,
        )
    }

    #[test]
    fn relabeling_is_by_first_appearance() {
        let p = Partition::from_labels(&[7, 3, 7, 9]);
        assert_eq!(p.assignment(), &[0, 1, 0, 2]);
        assert_eq!(p.num_communities(), 3);
        assert_eq!(p.communities(), vec![vec![0, 2], vec![1], vec![3]]);
    }

    #[test]
    fn whole_graph_community_has_zero_modularity() {
        let g = two_cliques(1.0);
        let q = modularity(&g, &Partition::whole(g.node_count())).unwrap();
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn single_edge_singletons() {
        let g = graph(&[("x", "y", 1.0)]);
        assert_eq!(modularity(&g, &Partition::singletons(2)).unwrap(), -0.5);
    }

    #[test]
    fn modularity_errors() {
        let g = GenreGraph::new(["x", "y"], WeightSemantics::UserCount);
        assert!(matches!(modularity(&g, &Partition::singletons(2)), Err(Error::NoEdges)));
        let g = graph(&[("x", "y", 1.0)]);
        assert!(matches!(
            modularity(&g, &Partition::singletons(3)),
            Err(Error::PartitionMismatch { .. })
        ));
    }

    #[test]
    fn two_triangles() {
        let g = graph(&[
            ("a", "b", 1.0),
            ("b", "c", 1.0),
            ("a", "c", 1.0),
            ("x", "y", 1.0),
            ("y", "z", 1.0),
            ("x", "z", 1.0),
        ]);
        for seed in 0..20 {
            let p = louvain(&g, seed);
            assert_eq!(p.num_communities(), 2);
            assert!((modularity(&g, &p).unwrap() - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn weak_bridge_splits_cliques() {
        let g = two_cliques(0.1);
        let expected = Partition::from_labels(&[0, 0, 0, 0, 1, 1, 1, 1]);
        for seed in 0..50 {
            assert_eq!(louvain(&g, seed), expected, "seed {seed}");
        }
    }

    #[test]
    fn degenerate_graphs() {
        let single = GenreGraph::new(["only"], WeightSemantics::UserCount);
        assert_eq!(louvain(&single, 3), Partition::whole(1));
        let edgeless = GenreGraph::new(["a", "b", "c"], WeightSemantics::UserCount);
        assert_eq!(louvain(&edgeless, 3), Partition::singletons(3));
    }

    #[test]
    fn deterministic_per_seed_and_trace_monotone() {
        let g = two_cliques(1.0);
        for seed in 0..10 {
            let a = louvain_traced(&g, seed);
            let b = louvain_traced(&g, seed);
            assert_eq!(a.partition, b.partition);
            assert_eq!(a.trace, b.trace);
            assert!(a.trace.windows(2).all(|w| w[1] >= w[0]));
            let final_q = modularity(&g, &a.partition).unwrap();
            assert!((a.trace.last().unwrap() - final_q).abs() < 1e-12);
        }
    }

    #[test]
    fn aggregation_preserves_modularity() {
        let g = two_cliques(0.5);
        let level = Level::from_graph(&g);
        let labels = [0, 0, 0, 0, 4, 4, 4, 4];
        let q = level.modularity(&labels);
        let agg = level.aggregate(&Partition::from_labels(&labels));
        assert!((agg.modularity(&[0, 1]) - q).abs() < 1e-12);
        assert!((agg.total_weight - level.total_weight).abs() < 1e-12);
    }
}
