// SPDX-License-Identifier: Apache-2.0

mod common;

use std::collections::BTreeMap;

use genrenet::conllu::{parse_conllu, read_conllu, Sentence, Token};
use genrenet::textfeat::{match_patterns, modified_tfidf, Feature, FeatureCounts};
use proptest::prelude::*;

fn only_sentence(name: &str) -> Sentence {
    let f = read_conllu(&common::fixture(name)).unwrap();
    assert_eq!(f.sentence_count(), 1);
    f.documents[0].sentences[0].clone()
}

#[test]
fn fixture_sentences_yield_their_features() {
    assert_eq!(
        match_patterns(&only_sentence("sounds_awesome.conllu")),
        vec![Feature::new("awesome", "album")]
    );
    assert_eq!(
        match_patterns(&only_sentence("lyrical_theme.conllu")),
        vec![Feature::new("lyrical", "theme")]
    );
}

#[test]
fn pronoun_subjects_and_non_adjective_complements_are_ignored() {
    let text = "\
1\tIt\tit\tPRON\t_\t_\t2\tnsubj\t_\t_
2\tsounds\tsound\tVERB\t_\t_\t0\troot\t_\t_
3\tloud\tloud\tADJ\t_\t_\t2\tacomp\t_\t_

1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tband\tband\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\trocks\trock\tVERB\t_\t_\t0\troot\t_\t_
4\thard\thard\tADV\t_\t_\t3\tadvmod\t_\t_
";
    let f = parse_conllu(text).unwrap();
    for s in &f.documents[0].sentences {
        assert!(match_patterns(s).is_empty());
    }
}

const UPOS: [&str; 6] = ["ADJ", "NOUN", "PROPN", "VERB", "AUX", "DET"];
const DEPREL: [&str; 6] = ["amod", "nsubj", "acomp", "det", "obj", "amod:poss"];

/// Random tree: token i (1-based) attaches to a random earlier token, the
/// first token is the root.
fn random_sentence() -> impl Strategy<Value = Sentence> {
    (2usize..10).prop_flat_map(|n| {
        (
            proptest::collection::vec((0usize..6, 0usize..6, 0usize..4), n),
            proptest::collection::vec(any::<prop::sample::Index>(), n),
        )
            .prop_map(move |(attrs, heads)| {
                let tokens = attrs
                    .iter()
                    .enumerate()
                    .map(|(i, &(u, d, w))| Token {
                        id: i + 1,
                        form: format!("W{w}"),
                        lemma: format!("w{w}"),
                        upos: UPOS[u].to_string(),
                        xpos: "_".into(),
                        feats: "_".into(),
                        head: if i == 0 { 0 } else { heads[i].index(i) + 1 },
                        deprel: if i == 0 { "root".into() } else { DEPREL[d].to_string() },
                        deps: "_".into(),
                        misc: "_".into(),
                    })
                    .collect();
                Sentence {
                    comments: Vec::new(),
                    tokens,
                }
            })
    })
}

/// Renumbers tokens by `order` (new position → old index).
fn permute(s: &Sentence, order: &[usize]) -> Sentence {
    let mut new_id = vec![0; order.len() + 1];
    for (pos, &old) in order.iter().enumerate() {
        new_id[old + 1] = pos + 1;
    }
    let tokens = order
        .iter()
        .enumerate()
        .map(|(pos, &old)| {
            let t = &s.tokens[old];
            Token {
                id: pos + 1,
                head: new_id[t.head],
                ..t.clone()
            }
        })
        .collect();
    Sentence {
        comments: Vec::new(),
        tokens,
    }
}

fn sorted(mut v: Vec<Feature>) -> Vec<Feature> {
    v.sort();
    v
}

proptest! {
    #[test]
    fn features_do_not_depend_on_token_order(
        (s, order) in random_sentence().prop_flat_map(|s| {
            let n = s.tokens.len();
            (Just(s), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    ) {
        let p = permute(&s, &order);
        prop_assert!(p.validate().is_ok());
        prop_assert_eq!(sorted(match_patterns(&s)), sorted(match_patterns(&p)));
    }

    #[test]
    fn every_feature_pairs_an_adjective_with_a_noun(s in random_sentence()) {
        let adjs: Vec<&str> = s.tokens.iter().filter(|t| t.upos == "ADJ").map(|t| t.lemma.as_str()).collect();
        let nouns: Vec<&str> = s.tokens.iter().filter(|t| t.upos == "NOUN" || t.upos == "PROPN").map(|t| t.lemma.as_str()).collect();
        for f in match_patterns(&s) {
            prop_assert!(adjs.contains(&f.adjective.as_str()));
            prop_assert!(nouns.contains(&f.noun.as_str()));
        }
    }

    #[test]
    fn tfidf_matches_oracle(
        clusters in proptest::collection::btree_map(
            "[a-d]",
            proptest::collection::vec(("[p-t]", "[x-z]", 0u64..8), 0..8),
            2..5,
        )
    ) {
        let mut counts: BTreeMap<String, FeatureCounts> = BTreeMap::new();
        let mut raw: BTreeMap<String, Vec<(String, String, u64)>> = BTreeMap::new();
        for (label, feats) in &clusters {
            let c = counts.entry(label.clone()).or_default();
            let mut merged: BTreeMap<(String, String), u64> = BTreeMap::new();
            for (a, n, k) in feats {
                *c.entry(Feature::new(a, n)).or_default() += k;
                *merged.entry((a.clone(), n.clone())).or_default() += k;
            }
            raw.insert(label.clone(), merged.into_iter().map(|((a, n), k)| (a, n, k)).collect());
        }
        let got = modified_tfidf(&counts).unwrap();
        let want = common::tfidf_oracle(&raw);
        prop_assert_eq!(got.len(), want.len());
        for (label, rows) in &want {
            let scores = &got[label];
            prop_assert_eq!(scores.len(), rows.len());
            for (s, (a, n, t)) in scores.iter().zip(rows) {
                prop_assert_eq!(&s.feature, &Feature::new(a, n));
                prop_assert!((s.tfidf - t).abs() < 1e-9);
                prop_assert!(s.tfidf >= 0.0);
            }
        }
    }
}
