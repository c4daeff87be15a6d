// SPDX-License-Identifier: Apache-2.0

//! Tabular summaries of the review corpus.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::{genre_key, Corpus};

/// Country label for albums without one.
pub const UNKNOWN_COUNTRY: &str = "unknown";

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenreStat {
    pub genre: String,
    pub reviews: usize,
    pub positive_reviews: usize,
    /// Distinct reviewers of the genre.
    pub users: usize,
    /// Distinct reviewers with at least one positive review in the genre.
    pub positive_users: usize,
}

/// Review and reviewer counts per genre, most-reviewed first (ties by name).
pub fn genre_stats(corpus: &Corpus, threshold: u8) -> Vec<GenreStat> {
    #[derive(Default)]
    struct Acc<'a> {
        reviews: usize,
        positive: usize,
        users: HashSet<&'a str>,
        positive_users: HashSet<&'a str>,
    }
    let mut acc: BTreeMap<&str, Acc> = BTreeMap::new();
    for r in &corpus.reviews {
        for g in corpus.genres_of(r) {
            let a = acc.entry(g).or_default();
            a.reviews += 1;
            a.users.insert(&r.user_id);
            if r.score >= threshold {
                a.positive += 1;
                a.positive_users.insert(&r.user_id);
            }
        }
    }
    let mut out: Vec<GenreStat> = acc
        .into_iter()
        .map(|(g, a)| GenreStat {
            genre: g.to_string(),
            reviews: a.reviews,
            positive_reviews: a.positive,
            users: a.users.len(),
            positive_users: a.positive_users.len(),
        })
        .collect();
    out.sort_by(|a, b| b.reviews.cmp(&a.reviews).then_with(|| a.genre.cmp(&b.genre)));
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountryRow {
    pub country: String,
    pub reviews: usize,
    /// Share of the cluster's positive reviews, in percent.
    pub percentage: f64,
}

/// Positive reviews of albums tagged with any genre of the cluster, grouped
/// by country. Each review counts once however many cluster genres its
/// album carries.
pub fn country_table<S: AsRef<str>>(corpus: &Corpus, cluster: &[S], threshold: u8) -> Vec<CountryRow> {
    let keys: BTreeSet<String> = cluster.iter().map(|g| genre_key(g.as_ref())).collect();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut total = 0usize;
    for r in corpus.reviews.iter().filter(|r| r.score >= threshold) {
        let Some(album) = corpus.album(&r.album_id) else {
            continue;
        };
        if !album.genres.iter().any(|g| keys.contains(&genre_key(g))) {
            continue;
        }
        total += 1;
        *counts
            .entry(album.country.as_deref().unwrap_or(UNKNOWN_COUNTRY))
            .or_default() += 1;
    }
    let mut rows: Vec<CountryRow> = counts
        .into_iter()
        .map(|(c, n)| CountryRow {
            country: c.to_string(),
            reviews: n,
            percentage: n as f64 / total as f64 * 100.0,
        })
        .collect();
    rows.sort_by(|a, b| b.reviews.cmp(&a.reviews).then_with(|| a.country.cmp(&b.country)));
    rows
}

pub fn write_genre_stats(path: &Path, stats: &[GenreStat]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["genre", "reviews", "positive_reviews", "users", "positive_users"])?;
    for s in stats {
        w.write_record([
            s.genre.clone(),
            s.reviews.to_string(),
            s.positive_reviews.to_string(),
            s.users.to_string(),
            s.positive_users.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// `country,reviews,percentage` with percentages to one decimal.
pub fn write_country_table(path: &Path, rows: &[CountryRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["country", "reviews", "percentage"])?;
    for r in rows {
        w.write_record([r.country.clone(), r.reviews.to_string(), format!("{:.1}", r.percentage)])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
