// SPDX-License-Identifier: Apache-2.0

//! Seeded random graphs for tests and benchmarks.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bipartite::BipartiteGraph;
use crate::graph::{GenreGraph, WeightSemantics};

/// Node name with a fixed width so lexicographic and numeric order agree.
pub fn node_name(i: usize) -> String {
    format!("g{i:04}")
}

/// Stochastic block model with equal-sized blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Planted {
    pub groups: usize,
    pub size: usize,
    /// Edge probability inside a block.
    pub p_in: f64,
    /// Edge probability between blocks.
    pub p_out: f64,
    /// Inclusive integer weight range of intra-block edges.
    pub intra_weight: (u32, u32),
    /// Inclusive integer weight range of inter-block edges.
    pub inter_weight: (u32, u32),
}

impl Planted {
    pub fn generate(&self, seed: u64) -> GenreGraph {
        let n = self.groups * self.size;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = GenreGraph::new((0..n).map(node_name), WeightSemantics::UserCount);
        for a in 0..n {
            for b in a + 1..n {
                let same = a / self.size == b / self.size;
                let (p, (lo, hi)) = if same {
                    (self.p_in, self.intra_weight)
                } else {
                    (self.p_out, self.inter_weight)
                };
                if rng.random_bool(p) {
                    let w = rng.random_range(lo.max(1)..=hi.max(lo).max(1));
                    g.set_weight(a, b, f64::from(w));
                }
            }
        }
        g
    }
}

/// [`Planted`] with the same weight range `1..=max_weight` everywhere.
pub fn planted_partition(
    groups: usize,
    size: usize,
    p_in: f64,
    p_out: f64,
    max_weight: u32,
    seed: u64,
) -> GenreGraph {
    Planted {
        groups,
        size,
        p_in,
        p_out,
        intra_weight: (1, max_weight),
        inter_weight: (1, max_weight),
    }
    .generate(seed)
}

/// Ground-truth blocks of [`planted_partition`], as node indices.
pub fn planted_groups(groups: usize, size: usize) -> Vec<Vec<usize>> {
    (0..groups)
        .map(|k| (k * size..(k + 1) * size).collect())
        .collect()
}

/// Erdős–Rényi graph on `n` nodes with integer weights in `1..=max_weight`.
pub fn random_graph(n: usize, p: f64, max_weight: u32, seed: u64) -> GenreGraph {
    planted_partition(1, n, p, 0.0, max_weight, seed)
}

/// Random bipartite graph: each of `users` users links to each of `genres`
/// genres with probability `p`.
pub fn random_bipartite(users: usize, genres: usize, p: f64, seed: u64) -> BipartiteGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = BipartiteGraph::default();
    for u in 0..users {
        for k in 0..genres {
            if rng.random_bool(p) {
                g.insert(&format!("u{u:04}"), &node_name(k));
            }
        }
    }
    g
}
