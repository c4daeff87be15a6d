// SPDX-License-Identifier: Apache-2.0

//! Loading and joining review and album tables.
//!
//! Reviews come as JSON lines (or CSV with the same columns), albums as a CSV
//! whose `genres` column is `;`-separated. Malformed rows are collected as
//! [`RowError`]s with their line number instead of aborting the load.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewRecord {
    pub user_id: String,
    pub album_id: String,
    /// Review score out of 100.
    pub score: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    /// ISO-8601 date (`YYYY-MM-DD`, optionally followed by a time).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlbumRecord {
    pub album_id: String,
    pub band_id: String,
    pub title: Option<String>,
    /// Whitespace-normalized genre names, unique under case-folding.
    pub genres: Vec<String>,
    pub country: Option<String>,
    pub year: Option<i32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReviewFormat {
    Jsonl,
    Csv,
}

/// A rejected input row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

/// Records parsed from a file plus the rows that were rejected.
#[derive(Clone, Debug)]
pub struct Loaded<T> {
    pub records: T,
    pub errors: Vec<RowError>,
}

/// Collapses internal whitespace and trims.
pub fn normalize_genre_name(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Identity used to decide whether two genre names are the same genre.
pub fn genre_key(name: &str) -> String {
    normalize_genre_name(name).to_lowercase()
}

#[derive(Deserialize)]
struct RawReview {
    #[serde(alias = "user")]
    user_id: String,
    #[serde(alias = "album")]
    album_id: String,
    score: i64,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    date: Option<String>,
}

impl RawReview {
    fn validate(self) -> std::result::Result<ReviewRecord, String> {
        if self.user_id.trim().is_empty() {
            return Err("empty user_id".into());
        }
        if self.album_id.trim().is_empty() {
            return Err("empty album_id".into());
        }
        if !(0..=100).contains(&self.score) {
            return Err(format!("score {} outside [0, 100]", self.score));
        }
        let date = self.date.filter(|d| !d.is_empty());
        if let Some(d) = &date {
            if !looks_like_iso_date(d) {
                return Err(format!("date {d:?} is not ISO-8601"));
            }
        }
        Ok(ReviewRecord {
            user_id: self.user_id,
            album_id: self.album_id,
            score: self.score as u8,
            text: self.text.filter(|t| !t.is_empty()),
            date,
        })
    }
}

fn looks_like_iso_date(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() >= 10
        && b[..4].iter().all(u8::is_ascii_digit)
        && b[4] == b'-'
        && b[5..7].iter().all(u8::is_ascii_digit)
        && b[7] == b'-'
        && b[8..10].iter().all(u8::is_ascii_digit)
        && (b.len() == 10 || b[10] == b'T' || b[10] == b' ')
}

pub fn load_reviews(path: &Path, format: ReviewFormat) -> Result<Loaded<Vec<ReviewRecord>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    match format {
        ReviewFormat::Jsonl => read_reviews_jsonl(BufReader::new(file), path),
        ReviewFormat::Csv => read_reviews_csv(file),
    }
}

fn read_reviews_jsonl<R: BufRead>(reader: R, path: &Path) -> Result<Loaded<Vec<ReviewRecord>>> {
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<RawReview>(&line)
            .map_err(|e| e.to_string())
            .and_then(RawReview::validate);
        match parsed {
            Ok(r) => records.push(r),
            Err(message) => errors.push(RowError {
                line: line_no,
                message,
            }),
        }
    }
    Ok(Loaded { records, errors })
}

fn read_reviews_csv<R: std::io::Read>(reader: R) -> Result<Loaded<Vec<ReviewRecord>>> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                errors.push(RowError {
                    line: e.position().map(|p| p.line()).unwrap_or(0),
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parsed = record
            .deserialize::<RawReview>(Some(&headers))
            .map_err(|e| e.to_string())
            .and_then(RawReview::validate);
        match parsed {
            Ok(r) => records.push(r),
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    Ok(Loaded { records, errors })
}

#[derive(Deserialize)]
struct RawAlbum {
    album_id: String,
    band_id: String,
    #[serde(default)]
    title: String,
    #[serde(default)]
    year: String,
    #[serde(default)]
    country: String,
    #[serde(default)]
    genres: String,
}

impl RawAlbum {
    fn validate(self) -> std::result::Result<AlbumRecord, String> {
        if self.album_id.trim().is_empty() {
            return Err("empty album_id".into());
        }
        let mut seen = BTreeSet::new();
        let mut genres = Vec::new();
        for g in self.genres.split(';') {
            let name = normalize_genre_name(g);
            if name.is_empty() {
                continue;
            }
            if seen.insert(name.to_lowercase()) {
                genres.push(name);
            }
        }
        if genres.is_empty() {
            return Err(format!("album {} has no genres", self.album_id));
        }
        let year = match self.year.trim() {
            "" => None,
            y => Some(y.parse::<i32>().map_err(|_| format!("bad year {y:?}"))?),
        };
        let opt = |s: String| {
            let t = s.trim().to_string();
            (!t.is_empty()).then_some(t)
        };
        Ok(AlbumRecord {
            album_id: self.album_id,
            band_id: self.band_id,
            title: opt(self.title),
            genres,
            country: opt(self.country),
            year,
        })
    }
}

pub fn load_albums(path: &Path) -> Result<Loaded<BTreeMap<String, AlbumRecord>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_albums(file)
}

fn read_albums<R: std::io::Read>(reader: R) -> Result<Loaded<BTreeMap<String, AlbumRecord>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut albums: BTreeMap<String, (AlbumRecord, u64)> = BTreeMap::new();
    let mut errors = Vec::new();
    let mut record = csv::StringRecord::new();
    let headers = rdr.headers()?.clone();
    loop {
        match rdr.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                if let csv::ErrorKind::Io(_) = e.kind() {
                    return Err(e.into());
                }
                errors.push(RowError {
                    line: e.position().map(|p| p.line()).unwrap_or(0),
                    message: e.to_string(),
                });
                continue;
            }
        }
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let parsed = record
            .deserialize::<RawAlbum>(Some(&headers))
            .map_err(|e| e.to_string())
            .and_then(RawAlbum::validate);
        let album = match parsed {
            Ok(a) => a,
            Err(message) => {
                errors.push(RowError { line, message });
                continue;
            }
        };
        match albums.get(&album.album_id) {
            Some((existing, _)) if existing == &album => {}
            Some((_, first_line)) => {
                return Err(Error::ConflictingAlbum {
                    album_id: album.album_id,
                    first_line: *first_line,
                    second_line: line,
                })
            }
            None => {
                albums.insert(album.album_id.clone(), (album, line));
            }
        }
    }
    Ok(Loaded {
        records: albums.into_iter().map(|(k, (a, _))| (k, a)).collect(),
        errors,
    })
}

/// Reviews joined against the album catalogue.
#[derive(Clone, Debug, PartialEq)]
pub struct Corpus {
    pub reviews: Vec<ReviewRecord>,
    pub albums: BTreeMap<String, AlbumRecord>,
    /// Reviews dropped at join time because their album was unknown.
    pub orphans: usize,
}

/// Distinct-entity counts over the joined reviews.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusSummary {
    pub reviews: usize,
    pub users: usize,
    pub albums: usize,
    pub genres: usize,
    pub orphans: usize,
}

/// Joins reviews with albums. Orphan reviews are dropped and counted; more
/// than half orphans is treated as a mismatched pair of files.
///
/// Genre names are unified across albums: every spelling that shares a
/// [`genre_key`] is replaced by the spelling of the first album (in
/// album-id order) that uses it.
pub fn join_corpus(
    reviews: Vec<ReviewRecord>,
    mut albums: BTreeMap<String, AlbumRecord>,
) -> Result<Corpus> {
    let mut display: HashMap<String, String> = HashMap::new();
    for album in albums.values_mut() {
        for g in &mut album.genres {
            let canonical = display.entry(genre_key(g)).or_insert_with(|| g.clone());
            g.clone_from(canonical);
        }
    }
    let total = reviews.len();
    let (kept, orphaned): (Vec<_>, Vec<_>) = reviews
        .into_iter()
        .partition(|r| albums.contains_key(&r.album_id));
    let orphans = orphaned.len();
    if orphans * 2 > total {
        return Err(Error::TooManyOrphans { orphans, total });
    }
    if orphans > 0 {
        log::warn!("{orphans} of {total} reviews reference unknown albums and were dropped");
    }
    Ok(Corpus {
        reviews: kept,
        albums,
        orphans,
    })
}

impl Corpus {
    pub fn empty() -> Self {
        Corpus {
            reviews: Vec::new(),
            albums: BTreeMap::new(),
            orphans: 0,
        }
    }

    pub fn album(&self, album_id: &str) -> Option<&AlbumRecord> {
        self.albums.get(album_id)
    }

    /// Genres of the album a review refers to (empty for unknown albums).
    pub fn genres_of(&self, review: &ReviewRecord) -> &[String] {
        self.albums
            .get(&review.album_id)
            .map(|a| a.genres.as_slice())
            .unwrap_or(&[])
    }

    /// Same catalogue, different review list.
    pub fn with_reviews(&self, reviews: Vec<ReviewRecord>) -> Corpus {
        Corpus {
            reviews,
            albums: self.albums.clone(),
            orphans: self.orphans,
        }
    }

    pub fn summary(&self) -> CorpusSummary {
        let users: BTreeSet<&str> = self.reviews.iter().map(|r| r.user_id.as_str()).collect();
        let albums: BTreeSet<&str> = self.reviews.iter().map(|r| r.album_id.as_str()).collect();
        let genres: BTreeSet<&str> = albums
            .iter()
            .filter_map(|a| self.albums.get(*a))
            .flat_map(|a| a.genres.iter().map(String::as_str))
            .collect();
        CorpusSummary {
            reviews: self.reviews.len(),
            users: users.len(),
            albums: albums.len(),
            genres: genres.len(),
            orphans: self.orphans,
        }
    }
}

pub fn write_reviews_jsonl(path: &Path, reviews: &[ReviewRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in reviews {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_albums_csv<'a, I>(path: &Path, albums: I) -> Result<()>
where
    I: IntoIterator<Item = &'a AlbumRecord>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["album_id", "band_id", "title", "year", "country", "genres"])?;
    for a in albums {
        let year = a.year.map(|y| y.to_string()).unwrap_or_default();
        w.write_record([
            a.album_id.as_str(),
            a.band_id.as_str(),
            a.title.as_deref().unwrap_or(""),
            year.as_str(),
            a.country.as_deref().unwrap_or(""),
            a.genres.join(";").as_str(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
