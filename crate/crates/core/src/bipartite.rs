// SPDX-License-Identifier: Apache-2.0

//! User-genre bipartite graph and its one-mode projection onto genres.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{GenreGraph, WeightSemantics};
use crate::ingest::Corpus;

/// Default minimum score for a review to count as positive.
pub const DEFAULT_SCORE_THRESHOLD: u8 = 75;
/// Default number of highest-degree users dropped before projection.
pub const DEFAULT_OUTLIER_USERS: usize = 2;

/// Distinct (user, genre) incidences.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BipartiteGraph {
    users: BTreeSet<String>,
    genres: BTreeSet<String>,
    /// user → genres; the edge set without multiplicity.
    edges: BTreeMap<String, BTreeSet<String>>,
}

/// One user dropped by [`remove_outlier_users`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OutlierRemoval {
    pub user_id: String,
    pub degree: usize,
}

impl BipartiteGraph {
    /// Adds the edge `(user, genre)`; repeated inserts are no-ops.
    pub fn insert(&mut self, user: &str, genre: &str) {
        self.users.insert(user.to_string());
        self.genres.insert(genre.to_string());
        self.edges
            .entry(user.to_string())
            .or_default()
            .insert(genre.to_string());
    }

    pub fn users(&self) -> &BTreeSet<String> {
        &self.users
    }

    pub fn genres(&self) -> &BTreeSet<String> {
        &self.genres
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeSet::len).sum()
    }

    pub fn contains(&self, user: &str, genre: &str) -> bool {
        self.edges.get(user).is_some_and(|g| g.contains(genre))
    }

    /// Genres connected to `user`.
    pub fn genres_of(&self, user: &str) -> impl Iterator<Item = &str> {
        self.edges
            .get(user)
            .into_iter()
            .flat_map(|g| g.iter().map(String::as_str))
    }

    /// Number of distinct genres of every user, highest first, ties by
    /// user id.
    pub fn degree_distribution(&self) -> Vec<OutlierRemoval> {
        let mut out: Vec<OutlierRemoval> = self
            .users
            .iter()
            .map(|u| OutlierRemoval {
                user_id: u.clone(),
                degree: self.edges.get(u).map_or(0, BTreeSet::len),
            })
            .collect();
        out.sort_by(|a, b| b.degree.cmp(&a.degree).then_with(|| a.user_id.cmp(&b.user_id)));
        out
    }

    /// Number of users connected to each genre.
    pub fn genre_degrees(&self) -> BTreeMap<&str, usize> {
        let mut deg: BTreeMap<&str, usize> = self.genres.iter().map(|g| (g.as_str(), 0)).collect();
        for gs in self.edges.values() {
            for g in gs {
                *deg.get_mut(g.as_str()).expect("edge endpoint is a node") += 1;
            }
        }
        deg
    }

    fn without_users(&self, removed: &BTreeSet<&str>) -> BipartiteGraph {
        BipartiteGraph {
            users: self
                .users
                .iter()
                .filter(|u| !removed.contains(u.as_str()))
                .cloned()
                .collect(),
            genres: self.genres.clone(),
            edges: self
                .edges
                .iter()
                .filter(|(u, _)| !removed.contains(u.as_str()))
                .map(|(u, g)| (u.clone(), g.clone()))
                .collect(),
        }
    }
}

/// Keeps only reviews scoring at least `threshold`.
pub fn filter_positive(corpus: &Corpus, threshold: u8) -> Corpus {
    corpus.with_reviews(
        corpus
            .reviews
            .iter()
            .filter(|r| r.score >= threshold)
            .cloned()
            .collect(),
    )
}

/// One edge per (user, genre) for every genre tagged on an album the user
/// reviewed. Expects a corpus that is already positive-filtered.
pub fn build_bipartite(corpus: &Corpus) -> BipartiteGraph {
    let mut g = BipartiteGraph::default();
    for review in &corpus.reviews {
        for genre in corpus.genres_of(review) {
            g.insert(&review.user_id, genre);
        }
    }
    g
}

/// Drops the `count` users connected to the most genres, ties broken by
/// lexicographic user id. Genre nodes are kept even if they lose all edges.
pub fn remove_outlier_users(
    g: &BipartiteGraph,
    count: usize,
) -> Result<(BipartiteGraph, Vec<OutlierRemoval>)> {
    if count == 0 {
        return Ok((g.clone(), Vec::new()));
    }
    if count >= g.users.len() {
        return Err(Error::TooManyOutliers {
            requested: count,
            available: g.users.len(),
        });
    }
    let removed: Vec<OutlierRemoval> = g.degree_distribution().into_iter().take(count).collect();
    for r in &removed {
        log::info!("removing outlier user {} ({} genres)", r.user_id, r.degree);
    }
    let ids: BTreeSet<&str> = removed.iter().map(|r| r.user_id.as_str()).collect();
    Ok((g.without_users(&ids), removed))
}

/// One-mode projection onto genres: `w(A, B)` is the number of distinct
/// users connected to both A and B.
///
/// Because every genre of a reviewed album is attached to the reviewer in
/// the bipartite graph, all genre pairs of a multi-genre album are connected
/// by this count as well.
pub fn project(g: &BipartiteGraph) -> GenreGraph {
    let mut out = GenreGraph::new(g.genres.iter().cloned(), WeightSemantics::UserCount);
    // Integer accumulation first so the final weights are exact counts.
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for genres in g.edges.values() {
        let idx: Vec<usize> = genres
            .iter()
            .map(|name| out.node_index(name).expect("genre is a node"))
            .collect();
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                *counts.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
    }
    for ((a, b), c) in counts {
        out.set_weight(a, b, c as f64);
    }
    out
}
