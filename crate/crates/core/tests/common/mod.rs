// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference implementations shared by the integration tests.
//! None of them call into the library's algorithms.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use genrenet::{GenreGraph, WeightSemantics};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn toy_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

pub fn name(i: usize) -> String {
    format!("n{i:03}")
}

/// Symmetric dense weight matrix.
pub fn dense(g: &GenreGraph) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let mut a = vec![vec![0.0; n]; n];
    for ((i, j), w) in g.edges() {
        a[i][j] = w;
        a[j][i] = w;
    }
    a
}

/// Q = 1/(2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j), summed over ordered pairs.
pub fn modularity_oracle(a: &[Vec<f64>], labels: &[usize]) -> f64 {
    let n = a.len();
    let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Best modularity over every set partition, enumerated as restricted
/// growth strings. Feasible up to about ten nodes.
pub fn optimum_modularity(g: &GenreGraph) -> (f64, Vec<usize>) {
    let a = dense(g);
    let n = a.len();
    let mut labels = vec![0usize; n];
    let mut best = (f64::NEG_INFINITY, labels.clone());
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, a: &[Vec<f64>], best: &mut (f64, Vec<usize>)) {
        if i == labels.len() {
            let q = modularity_oracle(a, labels);
            if q > best.0 {
                *best = (q, labels.clone());
            }
            return;
        }
        for c in 0..=max + 1 {
            labels[i] = c;
            rec(i + 1, max.max(c), labels, a, best);
        }
    }
    if n == 0 {
        return (0.0, labels);
    }
    labels[0] = 0;
    rec(1, 0, &mut labels, &a, &mut best);
    best
}

/// Core number by repeated peeling at every k.
pub fn core_numbers_oracle(g: &GenreGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut adj = vec![BTreeSet::new(); n];
    for ((i, j), _) in g.edges() {
        adj[i].insert(j);
        adj[j].insert(i);
    }
    let mut core = vec![0; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let drop: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && adj[v].iter().filter(|&&u| alive[u]).count() < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive[v] = false;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

/// Genre pair (ordered names) → number of users linked to both.
pub fn projection_oracle(incidences: &[(String, String)]) -> BTreeMap<(String, String), u64> {
    let mut by_user: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for (u, g) in incidences {
        by_user.entry(u).or_default().insert(g);
    }
    let mut out = BTreeMap::new();
    for genres in by_user.values() {
        let gs: Vec<&str> = genres.iter().copied().collect();
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                *out.entry((gs[i].to_string(), gs[j].to_string())).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Reference ranking: cluster → [(adjective, noun, tfidf)], descending score
/// then (adjective, noun).
pub fn tfidf_oracle(
    clusters: &BTreeMap<String, Vec<(String, String, u64)>>,
) -> BTreeMap<String, Vec<(String, String, f64)>> {
    let n = clusters.len() as f64;
    let mut out = BTreeMap::new();
    for (label, feats) in clusters {
        let mut rows = Vec::new();
        for (adj, noun, tf) in feats {
            if *tf == 0 {
                continue;
            }
            let df = clusters
                .values()
                .filter(|fs| fs.iter().any(|(a, _, c)| a == adj && *c > 0))
                .count() as f64;
            rows.push((adj.clone(), noun.clone(), *tf as f64 * (n / df).ln()));
        }
        rows.sort_by(|x, y| {
            y.2.partial_cmp(&x.2)
                .unwrap()
                .then_with(|| (&x.0, &x.1).cmp(&(&y.0, &y.1)))
        });
        out.insert(label.clone(), rows);
    }
    out
}

/// Random graph on `n` nodes with integer weights; connected when
/// `connected` is set (a random spanning tree is laid down first).
pub fn random_graph(n: usize, p: f64, connected: bool, seed: u64) -> GenreGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = GenreGraph::new((0..n).map(name), WeightSemantics::UserCount);
    if connected {
        for v in 1..n {
            let u = rng.random_range(0..v);
            g.set_weight(u, v, f64::from(rng.random_range(1..=5u32)));
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                g.set_weight(a, b, f64::from(rng.random_range(1..=5u32)));
            }
        }
    }
    g
}

/// Cliques on `0..a` and `a..a+b` with unit weights, joined by one edge of
/// weight `bridge`.
pub fn two_cliques(a: usize, b: usize, bridge: f64) -> GenreGraph {
    let mut g = GenreGraph::new((0..a + b).map(name), WeightSemantics::UserCount);
    for (lo, hi) in [(0, a), (a, a + b)] {
        for i in lo..hi {
            for j in i + 1..hi {
                g.set_weight(i, j, 1.0);
            }
        }
    }
    g.set_weight(a - 1, a, bridge);
    g
}

/// Same grouping, ignoring label values.
pub fn same_grouping(x: &[usize], y: &[usize]) -> bool {
    x.len() == y.len()
        && (0..x.len()).all(|i| (0..x.len()).all(|j| (x[i] == x[j]) == (y[i] == y[j])))
}
