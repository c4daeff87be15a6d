// SPDX-License-Identifier: Apache-2.0

//! Adjective-noun features from dependency parses, scored per cluster.
//!
//! Two dependency patterns produce a feature:
//!
//! * an `ADJ` attached by `amod` to a `NOUN`/`PROPN` head ("lyrical theme");
//! * a verb with an `nsubj` child that is a `NOUN`/`PROPN` and an `acomp`
//!   child that is an `ADJ` ("this album sounds awesome").
//!
//! Clusters play the role of documents. The IDF is computed from the
//! adjective alone, `idf(adj) = ln(N / df(adj))` with `df` the number of
//! clusters using the adjective in any feature, so generic praise that shows
//! up everywhere scores zero.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conllu::{ParsedDocument, Sentence};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::{genre_key, Corpus};

pub const DEFAULT_TOP_N: usize = 50;

/// Lower-cased (adjective lemma, noun lemma). Orders by adjective, then noun.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Feature {
    pub adjective: String,
    pub noun: String,
}

impl Feature {
    pub fn new(adjective: &str, noun: &str) -> Self {
        Feature {
            adjective: adjective.to_lowercase(),
            noun: noun.to_lowercase(),
        }
    }
}

impl std::fmt::Display for Feature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {}", self.adjective, self.noun)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureScore {
    pub feature: Feature,
    pub tf: f64,
    pub idf: f64,
    pub tfidf: f64,
}

fn is_noun(upos: &str) -> bool {
    upos == "NOUN" || upos == "PROPN"
}

fn is_verb(upos: &str) -> bool {
    upos == "VERB" || upos == "AUX"
}

/// Features of one sentence, in token order.
pub fn match_patterns(sentence: &Sentence) -> Vec<Feature> {
    let mut out = Vec::new();
    let mut subjects: HashMap<usize, Vec<usize>> = HashMap::new();
    let mut complements: HashMap<usize, Vec<usize>> = HashMap::new();

    for t in &sentence.tokens {
        let Some(head) = sentence.token(t.head) else {
            continue;
        };
        match t.base_deprel() {
            "amod" if t.upos == "ADJ" && is_noun(&head.upos) => {
                out.push(Feature::new(t.lemma_or_form(), head.lemma_or_form()));
            }
            "nsubj" if is_noun(&t.upos) && is_verb(&head.upos) => {
                subjects.entry(head.id).or_default().push(t.id);
            }
            "acomp" if t.upos == "ADJ" && is_verb(&head.upos) => {
                complements.entry(head.id).or_default().push(t.id);
            }
            _ => {}
        }
    }

    let mut verbs: Vec<usize> = subjects.keys().copied().collect();
    verbs.sort_unstable();
    for verb in verbs {
        let Some(adjs) = complements.get(&verb) else {
            continue;
        };
        for &noun in &subjects[&verb] {
            for &adj in adjs {
                let (a, n) = (&sentence.tokens[adj - 1], &sentence.tokens[noun - 1]);
                out.push(Feature::new(a.lemma_or_form(), n.lemma_or_form()));
            }
        }
    }
    out
}

/// All features of a document; repeated mentions are kept.
pub fn document_features(doc: &ParsedDocument) -> Vec<Feature> {
    doc.sentences.iter().flat_map(match_patterns).collect()
}

/// Feature multiset of one cluster.
pub type FeatureCounts = BTreeMap<Feature, u64>;

/// Per-cluster feature counts plus bookkeeping on skipped documents.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusterFeatures {
    pub per_cluster: BTreeMap<String, FeatureCounts>,
    pub documents: usize,
    /// Documents without a review key or whose album is unknown.
    pub skipped_unmatched: usize,
    /// Documents whose album has no genre in any cluster.
    pub skipped_out_of_scope: usize,
}

/// Attributes each review's features to every cluster that contains at
/// least one genre of the reviewed album, once per cluster.
///
/// `clusters` maps a cluster label to its genre names.
pub fn collect_cluster_features(
    documents: &[ParsedDocument],
    corpus: &Corpus,
    clusters: &BTreeMap<String, Vec<String>>,
    execution: Execution,
) -> ClusterFeatures {
    let mut genre_clusters: HashMap<String, Vec<&str>> = HashMap::new();
    for (label, genres) in clusters {
        for g in genres {
            genre_clusters.entry(genre_key(g)).or_default().push(label);
        }
    }

    let extracted = execution.map(documents, document_features);

    let mut result = ClusterFeatures {
        per_cluster: clusters.keys().map(|l| (l.clone(), FeatureCounts::new())).collect(),
        documents: documents.len(),
        ..Default::default()
    };
    for (doc, features) in documents.iter().zip(extracted) {
        let Some(album) = doc.review.as_ref().and_then(|k| corpus.album(&k.album_id)) else {
            result.skipped_unmatched += 1;
            continue;
        };
        let targets: BTreeSet<&str> = album
            .genres
            .iter()
            .filter_map(|g| genre_clusters.get(&genre_key(g)))
            .flatten()
            .copied()
            .collect();
        if targets.is_empty() {
            result.skipped_out_of_scope += 1;
            continue;
        }
        for label in targets {
            let counts = result.per_cluster.get_mut(label).expect("label is a cluster");
            for f in &features {
                *counts.entry(f.clone()).or_default() += 1;
            }
        }
    }
    result
}

/// Adjective-only TF-IDF per cluster, each list sorted by descending tfidf
/// with ties in feature order.
pub fn modified_tfidf(
    per_cluster: &BTreeMap<String, FeatureCounts>,
) -> Result<BTreeMap<String, Vec<FeatureScore>>> {
    let n = per_cluster.len();
    if n < 2 {
        return Err(Error::TooFewClusters(n));
    }
    let mut df: HashMap<&str, usize> = HashMap::new();
    for counts in per_cluster.values() {
        let adjectives: BTreeSet<&str> = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(f, _)| f.adjective.as_str())
            .collect();
        for a in adjectives {
            *df.entry(a).or_default() += 1;
        }
    }
    let mut out = BTreeMap::new();
    for (label, counts) in per_cluster {
        let mut scores: Vec<FeatureScore> = counts
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(f, &c)| {
                let tf = c as f64;
                let idf = (n as f64 / df[f.adjective.as_str()] as f64).ln();
                FeatureScore {
                    feature: f.clone(),
                    tf,
                    idf,
                    tfidf: tf * idf,
                }
            })
            .collect();
        sort_scores(&mut scores);
        out.insert(label.clone(), scores);
    }
    Ok(out)
}

pub fn sort_scores(scores: &mut [FeatureScore]) {
    scores.sort_by(|a, b| {
        b.tfidf
            .total_cmp(&a.tfidf)
            .then_with(|| a.feature.cmp(&b.feature))
    });
}

/// First `n` of an already sorted score list.
pub fn top_features(scores: &[FeatureScore], n: usize) -> Vec<FeatureScore> {
    scores.iter().take(n).cloned().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AccuracyReport {
    pub n_correct: usize,
    pub n_total: usize,
    /// Percentage of correct features.
    pub accuracy: f64,
}

/// `n_correct / n_total × 100`; zero when nothing was judged.
pub fn accuracy(n_correct: usize, n_total: usize) -> AccuracyReport {
    assert!(n_correct <= n_total, "more correct than judged");
    let accuracy = if n_total == 0 {
        0.0
    } else {
        n_correct as f64 / n_total as f64 * 100.0
    };
    AccuracyReport {
        n_correct,
        n_total,
        accuracy,
    }
}

/// A manual verdict on one extracted feature.
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct Judgment {
    pub cluster: String,
    pub adjective: String,
    pub noun: String,
    #[serde(deserialize_with = "zero_one")]
    pub correct: bool,
}

fn zero_one<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
    match u8::deserialize(d)? {
        0 => Ok(false),
        1 => Ok(true),
        other => Err(serde::de::Error::custom(format!("correct must be 0 or 1, got {other}"))),
    }
}

pub fn load_judgments(path: &Path) -> Result<Vec<Judgment>> {
    let mut rdr = csv::Reader::from_path(path)?;
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AccuracyEvaluation {
    pub per_cluster: BTreeMap<String, AccuracyReport>,
    pub overall: AccuracyReport,
}

/// Scores judgments against the extracted top features. Judgments naming a
/// cluster or feature that was not extracted are rejected together.
pub fn evaluate_accuracy(
    judgments: &[Judgment],
    extracted: &BTreeMap<String, Vec<FeatureScore>>,
) -> Result<AccuracyEvaluation> {
    let known: BTreeSet<(&str, Feature)> = extracted
        .iter()
        .flat_map(|(label, scores)| scores.iter().map(move |s| (label.as_str(), s.feature.clone())))
        .collect();
    let unknown: Vec<String> = judgments
        .iter()
        .filter(|j| !known.contains(&(j.cluster.as_str(), Feature::new(&j.adjective, &j.noun))))
        .map(|j| format!("{}:{} {}", j.cluster, j.adjective, j.noun))
        .collect();
    if !unknown.is_empty() {
        return Err(Error::UnknownJudgments(unknown));
    }
    let mut tallies: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for j in judgments {
        let t = tallies.entry(j.cluster.clone()).or_default();
        t.0 += usize::from(j.correct);
        t.1 += 1;
    }
    let (correct, total) = tallies
        .values()
        .fold((0, 0), |(c, t), &(jc, jt)| (c + jc, t + jt));
    Ok(AccuracyEvaluation {
        per_cluster: tallies
            .into_iter()
            .map(|(k, (c, t))| (k, accuracy(c, t)))
            .collect(),
        overall: accuracy(correct, total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::{parse_conllu, ReviewKey};
    use crate::ingest::{AlbumRecord, ReviewRecord};

    fn sentence(rows: &[(&str, &str, &str, usize, &str)]) -> Sentence {
        let text: String = rows
            .iter()
            .enumerate()
            .map(|(i, (form, lemma, upos, head, rel))| {
                format!("{}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_\n", i + 1)
            })
            .collect();
        parse_conllu(&text).unwrap().documents.remove(0).sentences.remove(0)
    }

    #[test]
    fn amod_pattern() {
        let s = sentence(&[
            ("This", "this", "DET", 3, "det"),
            ("album", "album", "NOUN", 3, "nsubj"),
            ("has", "have", "VERB", 0, "ROOT"),
            ("a", "a", "DET", 6, "det"),
            ("lyrical", "lyrical", "ADJ", 6, "amod"),
            ("theme", "theme", "NOUN", 3, "dobj"),
        ]);
        assert_eq!(match_patterns(&s), vec![Feature::new("lyrical", "theme")]);
    }

    #[test]
    fn nsubj_acomp_pattern() {
        let s = sentence(&[
            ("This", "this", "DET", 2, "det"),
            ("album", "album", "NOUN", 3, "nsubj"),
            ("sounds", "sound", "VERB", 0, "ROOT"),
            ("awesome", "awesome", "ADJ", 3, "acomp"),
            (".", ".", "PUNCT", 3, "punct"),
        ]);
        assert_eq!(match_patterns(&s), vec![Feature::new("awesome", "album")]);
    }

    #[test]
    fn lemmas_are_used_and_lowercased() {
        let s = sentence(&[
            ("Catchy", "Catchy", "ADJ", 2, "amod"),
            ("choruses", "chorus", "NOUN", 0, "root"),
        ]);
        assert_eq!(match_patterns(&s), vec![Feature::new("catchy", "chorus")]);
        assert_eq!(match_patterns(&s)[0].adjective, "catchy");
    }

    #[test]
    fn no_adjectives_no_features() {
        let s = sentence(&[
            ("Drums", "drum", "NOUN", 2, "nsubj"),
            ("pound", "pound", "VERB", 0, "root"),
        ]);
        assert!(match_patterns(&s).is_empty());
    }

    #[test]
    fn amod_on_non_noun_is_ignored() {
        let s = sentence(&[
            ("very", "very", "ADJ", 2, "amod"),
            ("fast", "fast", "ADV", 0, "root"),
        ]);
        assert!(match_patterns(&s).is_empty());
    }

    fn corpus() -> Corpus {
        let album = |id: &str, genres: &[&str]| AlbumRecord {
            album_id: id.into(),
            band_id: "b".into(),
            title: None,
            genres: genres.iter().map(|g| g.to_string()).collect(),
            country: None,
            year: None,
        };
        let albums = [album("a1", &["A", "B"]), album("a2", &["A", "C"]), album("a3", &["Z"])]
            .into_iter()
            .map(|a| (a.album_id.clone(), a))
            .collect();
        let reviews = ["a1", "a2", "a3"]
            .iter()
            .map(|a| ReviewRecord {
                user_id: "u".into(),
                album_id: a.to_string(),
                score: 90,
                text: None,
                date: None,
            })
            .collect();
        crate::ingest::join_corpus(reviews, albums).unwrap()
    }

    fn doc(album: &str, features: &[(&str, &str)]) -> ParsedDocument {
        let sentences = features
            .iter()
            .map(|(a, n)| sentence(&[(a, a, "ADJ", 2, "amod"), (n, n, "NOUN", 0, "root")]))
            .collect();
        ParsedDocument {
            review: Some(ReviewKey {
                user_id: "u".into(),
                album_id: album.into(),
            }),
            sentences,
        }
    }

    fn clusters(groups: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
        groups.iter()
            .map(|(l, g)| (l.to_string(), g.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    #[test]
    fn features_go_to_every_touched_cluster() {
        let cl = clusters(&[("C1", &["A"]), ("C2", &["B"])]);
        let docs = [doc("a1", &[("heavy", "riff"), ("raw", "vocal")])];
        let r = collect_cluster_features(&docs, &corpus(), &cl, Execution::Sequential);
        for label in ["C1", "C2"] {
            assert_eq!(r.per_cluster[label].len(), 2);
            assert_eq!(r.per_cluster[label][&Feature::new("heavy", "riff")], 1);
        }
    }

    #[test]
    fn same_cluster_counted_once_per_review() {
        let cl = clusters(&[("C1", &["A", "B"]), ("C2", &["C"])]);
        let docs = [doc("a1", &[("heavy", "riff")])];
        let r = collect_cluster_features(&docs, &corpus(), &cl, Execution::Sequential);
        assert_eq!(r.per_cluster["C1"][&Feature::new("heavy", "riff")], 1);
        assert!(r.per_cluster["C2"].is_empty());
    }

    #[test]
    fn skipped_documents_are_counted() {
        let cl = clusters(&[("C1", &["A"]), ("C2", &["B"])]);
        let mut orphan = doc("nope", &[("x", "y")]);
        let keyless = ParsedDocument {
            review: None,
            ..orphan.clone()
        };
        orphan.review.as_mut().unwrap().album_id = "missing".into();
        let docs = [doc("a3", &[("x", "y")]), orphan, keyless];
        let r = collect_cluster_features(&docs, &corpus(), &cl, Execution::Parallel);
        assert_eq!(r.skipped_out_of_scope, 1);
        assert_eq!(r.skipped_unmatched, 2);
        assert!(r.per_cluster.values().all(BTreeMap::is_empty));

        let none = collect_cluster_features(&[], &corpus(), &cl, Execution::Sequential);
        assert!(none.per_cluster.values().all(BTreeMap::is_empty));
        assert_eq!(none.per_cluster.len(), 2);
    }

    fn counts(items: &[(&str, &str, u64)]) -> FeatureCounts {
        items
            .iter()
            .map(|(a, n, c)| (Feature::new(a, n), *c))
            .collect()
    }

    #[test]
    fn ubiquitous_adjective_scores_zero() {
        let per: BTreeMap<String, FeatureCounts> = (0..4)
            .map(|i| (format!("c{i}"), counts(&[("great", &format!("n{i}"), 10)])))
            .collect();
        let s = modified_tfidf(&per).unwrap();
        assert!(s.values().flatten().all(|f| f.idf == 0.0 && f.tfidf == 0.0));
    }

    #[test]
    fn unique_adjective_in_four_clusters() {
        let mut per: BTreeMap<String, FeatureCounts> = (0..4)
            .map(|i| (format!("c{i}"), counts(&[("great", "album", 3)])))
            .collect();
        per.get_mut("c0").unwrap().insert(Feature::new("folky", "melody"), 5);
        let s = modified_tfidf(&per).unwrap();
        let top = &s["c0"][0];
        assert_eq!(top.feature, Feature::new("folky", "melody"));
        assert!((top.tfidf - 5.0 * 4f64.ln()).abs() < 1e-9);
        assert!((top.tfidf - 6.931).abs() < 1e-3);
    }

    #[test]
    fn single_cluster_is_an_error() {
        let per: BTreeMap<String, FeatureCounts> = [("c".to_string(), counts(&[("a", "b", 1)]))].into();
        assert!(matches!(modified_tfidf(&per), Err(Error::TooFewClusters(1))));
    }

    #[test]
    fn ties_break_lexicographically() {
        let per: BTreeMap<String, FeatureCounts> = [
            ("c0".to_string(), counts(&[("zesty", "b", 2), ("apt", "z", 2), ("apt", "c", 2)])),
            ("c1".to_string(), counts(&[("other", "x", 1)])),
        ]
        .into();
        let s = modified_tfidf(&per).unwrap();
        let order: Vec<String> = s["c0"].iter().map(|f| f.feature.to_string()).collect();
        assert_eq!(order, ["apt c", "apt z", "zesty b"]);
    }

    #[test]
    fn top_n_truncates() {
        let per: BTreeMap<String, FeatureCounts> = [
            (
                "c0".to_string(),
                (0..60).map(|i| (Feature::new(&format!("adj{i:02}"), "n"), 1 + i as u64)).collect(),
            ),
            ("c1".to_string(), counts(&[("x", "y", 1)])),
        ]
        .into();
        let s = modified_tfidf(&per).unwrap();
        assert_eq!(top_features(&s["c0"], 50).len(), 50);
        assert_eq!(top_features(&s["c0"], 50)[0].tf, 60.0);
        assert_eq!(top_features(&s["c1"], 50).len(), 1);
    }

    #[test]
    fn accuracy_ratio() {
        assert_eq!(accuracy(35, 50).accuracy, 70.0);
        assert_eq!(accuracy(50, 50).accuracy, 100.0);
        assert_eq!(accuracy(0, 0).accuracy, 0.0);
    }

    #[test]
    fn evaluation_rejects_unknown_features() {
        let per: BTreeMap<String, FeatureCounts> = [
            ("c0".to_string(), counts(&[("raw", "vocal", 2), ("thin", "production", 1)])),
            ("c1".to_string(), counts(&[("epic", "chorus", 1)])),
        ]
        .into();
        let s = modified_tfidf(&per).unwrap();
        let j = |c: &str, a: &str, n: &str, ok: bool| Judgment {
            cluster: c.into(),
            adjective: a.into(),
            noun: n.into(),
            correct: ok,
        };
        let eval = evaluate_accuracy(
            &[j("c0", "raw", "vocal", true), j("c0", "thin", "production", false), j("c1", "epic", "chorus", true)],
            &s,
        )
        .unwrap();
        assert_eq!(eval.per_cluster["c0"].accuracy, 50.0);
        assert_eq!(eval.overall.n_correct, 2);
        assert_eq!(eval.overall.n_total, 3);

        let err = evaluate_accuracy(&[j("c1", "raw", "vocal", true), j("c9", "x", "y", false)], &s).unwrap_err();
        match err {
            Error::UnknownJudgments(list) => assert_eq!(list, ["c1:raw vocal", "c9:x y"]),
            other => panic!("unexpected {other}"),
        }
    }
}
