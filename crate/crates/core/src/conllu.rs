// SPDX-License-Identifier: Apache-2.0

//! Reader for CoNLL-U dependency parses.
//!
//! Documents are delimited by `# review_id = <user_id>|<album_id>` comments;
//! a sentence without that comment belongs to the preceding document.
//! Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    /// 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
}

impl Token {
    /// Universal relation without its subtype (`acl:relcl` → `acl`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    /// Lemma, or the surface form when the lemma column is empty.
    pub fn lemma_or_form(&self) -> &str {
        if self.lemma.is_empty() || self.lemma == "_" {
            &self.form
        } else {
            &self.lemma
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Sentence {
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
}

impl Sentence {
    /// Token with the given 1-based id.
    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    /// Checks 1-based contiguous ids, heads in range and a single root.
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.tokens.is_empty() {
            return Err("sentence has no tokens".into());
        }
        for (i, t) in self.tokens.iter().enumerate() {
            if t.id != i + 1 {
                return Err(format!("token id {} where {} expected", t.id, i + 1));
            }
            if t.head > self.tokens.len() {
                return Err(format!("token {} has head {} out of range", t.id, t.head));
            }
            if t.head == t.id {
                return Err(format!("token {} is its own head", t.id));
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(format!("{roots} roots, expected exactly one"));
        }
        Ok(())
    }

    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        for t in &self.tokens {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                t.id, t.form, t.lemma, t.upos, t.xpos, t.feats, t.head, t.deprel, t.deps, t.misc
            );
        }
        out.push('\n');
        out
    }
}

/// Identity of a parsed review.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ReviewKey {
    pub user_id: String,
    pub album_id: String,
}

impl ReviewKey {
    fn parse(value: &str) -> Option<Self> {
        let (user, album) = value.split_once('|')?;
        Some(ReviewKey {
            user_id: user.trim().to_string(),
            album_id: album.trim().to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParsedDocument {
    pub review: Option<ReviewKey>,
    pub sentences: Vec<Sentence>,
}

/// A whole CoNLL-U stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConlluFile {
    pub documents: Vec<ParsedDocument>,
    /// `# key = value` comments other than `review_id`, first occurrence
    /// wins (e.g. `parser_model`).
    pub metadata: BTreeMap<String, String>,
}

impl ConlluFile {
    pub fn sentence_count(&self) -> usize {
        self.documents.iter().map(|d| d.sentences.len()).sum()
    }
}

pub fn read_conllu(path: &Path) -> Result<ConlluFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_conllu(&text)
}

pub fn parse_conllu(text: &str) -> Result<ConlluFile> {
    let mut file = ConlluFile::default();
    let mut current = Sentence::default();
    let mut pending_key: Option<ReviewKey> = None;
    let mut sentence_start = 1;

    let finish = |file: &mut ConlluFile,
                      sentence: &mut Sentence,
                      key: &mut Option<ReviewKey>,
                      start: usize|
     -> Result<()> {
        if sentence.tokens.is_empty() {
            // Comment-only block: keep the document boundary it announces.
            if let Some(k) = key.take() {
                file.documents.push(ParsedDocument {
                    review: Some(k),
                    sentences: Vec::new(),
                });
            }
            sentence.comments.clear();
            return Ok(());
        }
        sentence.validate().map_err(|message| Error::Conllu { line: start, message })?;
        let s = std::mem::take(sentence);
        match key.take() {
            Some(k) if file.documents.last().and_then(|d| d.review.as_ref()) != Some(&k) => {
                file.documents.push(ParsedDocument {
                    review: Some(k),
                    sentences: vec![s],
                });
            }
            _ => match file.documents.last_mut() {
                Some(doc) => doc.sentences.push(s),
                None => file.documents.push(ParsedDocument {
                    review: None,
                    sentences: vec![s],
                }),
            },
        }
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut file, &mut current, &mut pending_key, sentence_start)?;
            sentence_start = line_no + 1;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((k, v)) = comment.split_once('=') {
                let (k, v) = (k.trim(), v.trim());
                if k == "review_id" {
                    let key = ReviewKey::parse(v).ok_or_else(|| Error::Conllu {
                        line: line_no,
                        message: format!("review_id {v:?} is not <user_id>|<album_id>"),
                    })?;
                    pending_key = Some(key);
                } else {
                    file.metadata
                        .entry(k.to_string())
                        .or_insert_with(|| v.to_string());
                }
            }
            current.comments.push(comment.to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(Error::Conllu {
                line: line_no,
                message: format!("{} columns, expected 10", cols.len()),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let num = |s: &str, what: &str| {
            s.parse::<usize>().map_err(|_| Error::Conllu {
                line: line_no,
                message: format!("bad {what} {s:?}"),
            })
        };
        current.tokens.push(Token {
            id: num(cols[0], "id")?,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos: cols[3].to_string(),
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head: num(cols[6], "head")?,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc: cols[9].to_string(),
        });
    }
    finish(&mut file, &mut current, &mut pending_key, sentence_start)?;
    Ok(file)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOUNDS: &str = "\
# parser_model = fixture 1.0
# review_id = u1|a1
# text = This album sounds awesome.
1\tThis\tthis\tDET\tDT\t_\t2\tdet\t_\t_
2\talbum\talbum\tNOUN\tNN\t_\t3\tnsubj\t_\t_
3\tsounds\tsound\tVERB\tVBZ\t_\t0\tROOT\t_\t_
4\tawesome\tawesome\tADJ\tJJ\t_\t3\tacomp\t_\t_
5\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_

1\tGreat\tgreat\tADJ\tJJ\t_\t2\tamod\t_\t_
2\triffs\triff\tNOUN\tNNS\t_\t0\tROOT\t_\t_

# review_id = u2|a1
1-2\tdon't\t_\t_\t_\t_\t_\t_\t_\t_
1\tdo\tdo\tAUX\t_\t_\t0\troot\t_\t_
2\tn't\tnot\tPART\t_\t_\t1\tadvmod\t_\t_
";

    #[test]
    fn groups_sentences_by_review() {
        let f = parse_conllu(SOUNDS).unwrap();
        assert_eq!(f.documents.len(), 2);
        assert_eq!(f.documents[0].sentences.len(), 2);
        assert_eq!(
            f.documents[0].review,
            Some(ReviewKey {
                user_id: "u1".into(),
                album_id: "a1".into()
            })
        );
        assert_eq!(f.documents[1].sentences[0].tokens.len(), 2);
        assert_eq!(f.metadata["parser_model"], "fixture 1.0");
        assert_eq!(f.sentence_count(), 3);
    }

    #[test]
    fn rejects_bad_column_count() {
        let err = parse_conllu("1\tx\tx\tNOUN\n").unwrap_err();
        assert!(matches!(err, Error::Conllu { line: 1, .. }));
    }

    #[test]
    fn rejects_two_roots_and_gaps() {
        let two_roots = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t0\troot\t_\t_\n";
        assert!(parse_conllu(two_roots).is_err());
        let gap = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n3\tb\tb\tX\t_\t_\t1\tdep\t_\t_\n";
        assert!(parse_conllu(gap).is_err());
        let bad_head = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\n2\tb\tb\tX\t_\t_\t9\tdep\t_\t_\n";
        assert!(parse_conllu(bad_head).is_err());
    }

    #[test]
    fn round_trips_through_text() {
        let f = parse_conllu(SOUNDS).unwrap();
        let s = &f.documents[0].sentences[0];
        let again = parse_conllu(&s.to_conllu()).unwrap();
        assert_eq!(&again.documents[0].sentences[0].tokens, &s.tokens);
    }

    #[test]
    fn empty_document_keeps_its_key() {
        let f = parse_conllu("# review_id = u|a\n\n").unwrap();
        assert_eq!(f.documents.len(), 1);
        assert!(f.documents[0].sentences.is_empty());
    }
}
