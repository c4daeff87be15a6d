// SPDX-License-Identifier: Apache-2.0

//! K-core decomposition by degree peeling.
//!
//! Degrees count edges and ignore weights. Core numbers are computed with
//! the bucket-queue peeling of Batagelj and Zaversnik in `O(n + m)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::GenreGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreDecomposition {
    /// Core number per node, indexed like the graph's nodes.
    pub core_number: Vec<usize>,
    pub max_k: usize,
    /// Node indices whose core number equals `max_k`, ascending.
    pub main_core_nodes: Vec<usize>,
}

/// A node pruned by [`main_core`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RemovedNode {
    pub genre: String,
    pub core_number: usize,
}

pub fn core_decompose(g: &GenreGraph) -> Result<CoreDecomposition> {
    if g.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let n = g.node_count();
    let adj = g.adjacency();
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_deg = degree.iter().copied().max().unwrap_or(0);

    // Nodes sorted by degree with bucket start offsets.
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &degree {
        bin[d] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    for v in 0..n {
        pos[v] = bin[degree[v]];
        order[pos[v]] = v;
        bin[degree[v]] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = order[i];
        for &(u, _) in &adj[v] {
            if degree[u] > degree[v] {
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }

    let max_k = degree.iter().copied().max().unwrap_or(0);
    let main_core_nodes = (0..n).filter(|&v| degree[v] == max_k).collect();
    Ok(CoreDecomposition {
        core_number: degree,
        max_k,
        main_core_nodes,
    })
}

/// Subgraph induced by the main core, with original weights, plus the pruned
/// nodes and their core numbers (sorted by genre name). A disconnected main
/// core keeps all of its components.
pub fn main_core(g: &GenreGraph) -> Result<(GenreGraph, Vec<RemovedNode>)> {
    let dec = core_decompose(g)?;
    let core = g.induced(&dec.main_core_nodes);
    let removed = (0..g.node_count())
        .filter(|&v| dec.core_number[v] != dec.max_k)
        .map(|v| RemovedNode {
            genre: g.node_name(v).to_string(),
            core_number: dec.core_number[v],
        })
        .collect();
    Ok((core, removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightSemantics;

    fn graph(edges: &[(&str, &str)]) -> GenreGraph {
        GenreGraph::from_edges(
            edges.iter().map(|&(a, b)| (a, b, 1.0)),
            WeightSemantics::UserCount,
        )
    }

    #[test]
    fn path_is_a_one_core() {
        let g = graph(&[("a", "b"), ("b", "c"), ("c", "d"), ("d", "e")]);
        let d = core_decompose(&g).unwrap();
        assert_eq!(d.core_number, vec![1; 5]);
        assert_eq!(d.max_k, 1);
        assert_eq!(d.main_core_nodes.len(), 5);
    }

    #[test]
    fn k4_is_a_three_core() {
        let g = graph(&[("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d"), ("c", "d")]);
        let d = core_decompose(&g).unwrap();
        assert_eq!(d.core_number, vec![3; 4]);
        let (core, removed) = main_core(&g).unwrap();
        assert_eq!(core, g);
        assert!(removed.is_empty());
    }

    #[test]
    fn triangle_with_pendant() {
        let mut g = graph(&[("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")]);
        g.set_weight(0, 1, 7.0);
        let d = core_decompose(&g).unwrap();
        assert_eq!(d.core_number, vec![2, 2, 2, 1]);
        let (core, removed) = main_core(&g).unwrap();
        assert_eq!(core.nodes(), ["a", "b", "c"]);
        assert_eq!(core.weight_by_name("a", "b"), Some(7.0));
        assert_eq!(
            removed,
            vec![RemovedNode {
                genre: "d".into(),
                core_number: 1
            }]
        );
    }

    #[test]
    fn isolated_nodes_have_core_zero() {
        let mut g = GenreGraph::new(["a", "b", "c"], WeightSemantics::UserCount);
        g.set_weight(0, 1, 1.0);
        let d = core_decompose(&g).unwrap();
        assert_eq!(d.core_number, vec![1, 1, 0]);
        let edgeless = GenreGraph::new(["x"], WeightSemantics::UserCount);
        assert_eq!(core_decompose(&edgeless).unwrap().max_k, 0);
    }

    #[test]
    fn empty_graph_is_an_error() {
        let g = GenreGraph::new(Vec::<String>::new(), WeightSemantics::UserCount);
        assert!(matches!(core_decompose(&g), Err(Error::EmptyGraph)));
    }

    #[test]
    fn disconnected_main_core_keeps_all_components() {
        let g = graph(&[("a", "b"), ("b", "c"), ("a", "c"), ("x", "y"), ("y", "z"), ("x", "z")]);
        let (core, _) = main_core(&g).unwrap();
        assert_eq!(core.node_count(), 6);
        assert_eq!(core.connected_components().len(), 2);
    }
}
