// SPDX-License-Identifier: Apache-2.0

//! Weighted undirected genre network.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

/// What an edge weight counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightSemantics {
    /// Number of distinct users who positively reviewed both genres.
    UserCount,
    /// Number of ensemble runs that put both genres in the same community.
    CoassignmentCount,
}

/// Undirected weighted graph over genre names.
///
/// Nodes are kept sorted by name and addressed by their index in that order.
/// Edges are stored once under the canonical pair `(low, high)`; self-loops
/// and non-positive weights are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct GenreGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
    semantics: WeightSemantics,
}

impl GenreGraph {
    pub fn new<I, S>(nodes: I, semantics: WeightSemantics) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        nodes.sort();
        nodes.dedup();
        let index = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        GenreGraph {
            nodes,
            index,
            edges: BTreeMap::new(),
            semantics,
        }
    }

    /// Builds a graph from named weighted edges; endpoints become nodes.
    pub fn from_edges<'a, I>(edges: I, semantics: WeightSemantics) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)> + Clone,
    {
        let names = edges
            .clone()
            .into_iter()
            .flat_map(|(a, b, _)| [a.to_string(), b.to_string()]);
        let mut g = GenreGraph::new(names, semantics);
        for (a, b, w) in edges {
            g.add_weight_by_name(a, b, w);
        }
        g
    }

    pub fn semantics(&self) -> WeightSemantics {
        self.semantics
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edges as `((low, high), weight)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.edges.iter().map(|(&k, &w)| (k, w))
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<f64> {
        self.edges.get(&canonical(a, b)).copied()
    }

    pub fn weight_by_name(&self, a: &str, b: &str) -> Option<f64> {
        self.weight(self.node_index(a)?, self.node_index(b)?)
    }

    /// Sets the weight of `{a, b}`. Self-loops and non-positive weights are
    /// ignored and remove any existing edge.
    pub fn set_weight(&mut self, a: usize, b: usize, weight: f64) {
        assert!(a < self.nodes.len() && b < self.nodes.len(), "node out of range");
        if a == b {
            return;
        }
        if weight > 0.0 {
            self.edges.insert(canonical(a, b), weight);
        } else {
            self.edges.remove(&canonical(a, b));
        }
    }

    /// Adds `delta` to the weight of `{a, b}`.
    pub fn add_weight(&mut self, a: usize, b: usize, delta: f64) {
        let current = self.weight(a, b).unwrap_or(0.0);
        self.set_weight(a, b, current + delta);
    }

    /// Adds `delta` to `{a, b}` by node name. Unknown names panic.
    pub fn add_weight_by_name(&mut self, a: &str, b: &str, delta: f64) {
        let ia = self.node_index(a).unwrap_or_else(|| panic!("unknown node {a}"));
        let ib = self.node_index(b).unwrap_or_else(|| panic!("unknown node {b}"));
        self.add_weight(ia, ib, delta);
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.values().sum()
    }

    /// Unweighted degree of every node.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.nodes.len()];
        for &(a, b) in self.edges.keys() {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Adjacency lists `(neighbor, weight)`, each sorted by neighbor.
    pub fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for (&(a, b), &w) in &self.edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        adj
    }

    /// Connected components as sorted node-index lists, ordered by their
    /// smallest member. Isolated nodes are singleton components.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.nodes.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(a, b) in self.edges.keys() {
            let ra = find(&mut parent, a);
            let rb = find(&mut parent, b);
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            by_root.entry(r).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    /// Subgraph induced by `members` (node indices of `self`), keeping
    /// original weights and semantics.
    pub fn induced(&self, members: &[usize]) -> GenreGraph {
        let mut sub = GenreGraph::new(
            members.iter().map(|&i| self.nodes[i].clone()),
            self.semantics,
        );
        let remap: HashMap<usize, usize> = members
            .iter()
            .map(|&i| (i, sub.index[&self.nodes[i]]))
            .collect();
        for (&(a, b), &w) in &self.edges {
            if let (Some(&na), Some(&nb)) = (remap.get(&a), remap.get(&b)) {
                sub.edges.insert(canonical(na, nb), w);
            }
        }
        sub
    }

    /// Subgraph induced by node names; unknown names are ignored.
    pub fn induced_by_names<S: AsRef<str>>(&self, names: &[S]) -> GenreGraph {
        let members: Vec<usize> = names
            .iter()
            .filter_map(|n| self.node_index(n.as_ref()))
            .collect();
        self.induced(&members)
    }

    /// Mean weight over the edges present between `members`; `0.0` when
    /// there are none.
    pub fn mean_intra_weight(&self, members: &[usize]) -> f64 {
        let (sum, count) = self.intra_weight(members);
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    }

    /// Total weight and number of edges with both endpoints in `members`.
    pub fn intra_weight(&self, members: &[usize]) -> (f64, usize) {
        let mut inside = vec![false; self.nodes.len()];
        for &m in members {
            inside[m] = true;
        }
        self.edges
            .iter()
            .filter(|(&(a, b), _)| inside[a] && inside[b])
            .fold((0.0, 0), |(s, c), (_, &w)| (s + w, c + 1))
    }

    pub fn with_semantics(mut self, semantics: WeightSemantics) -> Self {
        self.semantics = semantics;
        self
    }
}

fn canonical(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}
