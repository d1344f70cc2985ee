use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::matrix::AlignmentMatrix;
use crate::corpus::{Token, Vocabulary};
use crate::embeddings::{random_embeddings, EmbeddingTable};
use crate::error::{Error, Result};

/// Target keywords paired with the English words whose vectors they borrow.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordMap {
    pub entries: BTreeMap<String, String>,
}

impl Default for KeywordMap {
    fn default() -> Self {
        let pairs = [
            ("SELECT", "select"),
            ("FILTER", "filter"),
            ("ORDER", "order"),
            ("BY", "by"),
            ("LIMIT", "limit"),
            ("DESC", "descending"),
            ("ASC", "ascending"),
            ("COUNT", "count"),
            ("AS", "as"),
            ("WHERE", "where"),
        ];
        KeywordMap { entries: pairs.iter().map(|(t, e)| (t.to_string(), e.to_string())).collect() }
    }
}

impl KeywordMap {
    /// `TARGET<TAB>english` per line; blank lines and `#` comments skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(e), None) if !t.is_empty() && !e.is_empty() => {
                    entries.insert(t.to_string(), e.to_string());
                }
                _ => return Err(Error::Parse { line: i + 1, message: "expected `TARGET<TAB>english`".into() }),
            }
        }
        Ok(KeywordMap { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(t, e)| format!("{t}\t{e}\n")).collect()
    }

    pub fn english_words(&self) -> Vec<&str> {
        self.entries.values().map(String::as_str).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum MatchStatus {
    Matched {
        source: Token,
        correlation: f64,
    },
    /// The column has no mass on any candidate source token.
    Unmatched,
    /// Punctuation and variables take no part in matching.
    Excluded,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchEntry {
    pub target: Token,
    pub status: MatchStatus,
}

/// One entry per non-special target token, in target id order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingDictionary {
    pub entries: Vec<MatchEntry>,
}

impl MatchingDictionary {
    pub fn get(&self, target: &str) -> Option<&MatchStatus> {
        self.entries.iter().find(|e| e.target.as_str() == target).map(|e| &e.status)
    }

    pub fn matched_source(&self, target: &str) -> Option<&Token> {
        match self.get(target)? {
            MatchStatus::Matched { source, .. } => Some(source),
            _ => None,
        }
    }

    /// `target<TAB>source<TAB>correlation`, with `-` for unmatched and excluded tokens.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let line = match &e.status {
                MatchStatus::Matched { source, correlation } => format!("{}\t{source}\t{correlation}\n", e.target),
                MatchStatus::Unmatched => format!("{}\t-\tunmatched\n", e.target),
                MatchStatus::Excluded => format!("{}\t-\texcluded\n", e.target),
            };
            out.push_str(&line);
        }
        out
    }
}

fn is_punctuation(t: &Token) -> bool {
    t.is_delimiter() || matches!(t.as_str(), "?" | ";" | "!")
}

fn excluded_target(t: &Token) -> bool {
    is_punctuation(t) || t.is_variable()
}

/// Greatest-correlation source token for every target column.
///
/// Special and punctuation source rows are never candidates; ties go to the
/// lowest source id.
pub fn match_vocabulary(lambda: &AlignmentMatrix) -> MatchingDictionary {
    let candidates: Vec<usize> = lambda
        .source_vocab
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_special() && !is_punctuation(t))
        .map(|(i, _)| i)
        .collect();
    let entries = lambda
        .target_vocab
        .tokens()
        .iter()
        .enumerate()
        .filter(|(_, t)| !t.is_special())
        .map(|(j, target)| {
            let status = if excluded_target(target) {
                MatchStatus::Excluded
            } else {
                let mut best: Option<(usize, f64)> = None;
                for &s in &candidates {
                    let v = lambda.values.get(s, j);
                    if v > 0.0 && best.is_none_or(|(_, b)| v > b) {
                        best = Some((s, v));
                    }
                }
                match best {
                    Some((s, correlation)) => MatchStatus::Matched {
                        source: lambda.source_vocab.token(s).expect("row id").clone(),
                        correlation,
                    },
                    None => MatchStatus::Unmatched,
                }
            };
            MatchEntry { target: target.clone(), status }
        })
        .collect();
    MatchingDictionary { entries }
}

/// Target lexicon assembled from source vectors.
///
/// Keyword-mapped tokens take their English word's vector, matched tokens
/// their source token's vector; everything else keeps a seeded random vector.
pub fn bootstrap_lexicon(
    dict: &MatchingDictionary,
    source_table: &EmbeddingTable,
    keywords: &KeywordMap,
    target_vocab: &Vocabulary,
    seed: u64,
) -> Result<EmbeddingTable> {
    let mut table = random_embeddings(target_vocab, source_table.dim(), seed);
    for (t, english) in &keywords.entries {
        let Some(id) = target_vocab.id(t) else {
            continue;
        };
        let v = source_table
            .vector_of(english)
            .ok_or_else(|| Error::Keyword { target: t.clone(), english: english.clone() })?;
        table.vectors.row_mut(id).copy_from_slice(v);
    }
    for entry in &dict.entries {
        if keywords.entries.contains_key(entry.target.as_str()) {
            continue;
        }
        let (Some(id), MatchStatus::Matched { source, .. }) = (target_vocab.id_of(&entry.target), &entry.status) else {
            continue;
        };
        if let Some(v) = source_table.vector_of(source.as_str()) {
            table.vectors.row_mut(id).copy_from_slice(v);
        }
    }
    table.zero_padding();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Role, TokenSequence};
    use crate::nn::Matrix;

    fn vocab(tokens: &[&str], role: Role) -> Vocabulary {
        Vocabulary::build(&[TokenSequence::from_strs(tokens, role)])
    }

    /// Rows and columns beyond the four specials, filled from `core`.
    fn lambda(src: &[&str], tgt: &[&str], core: &[&[f64]]) -> AlignmentMatrix {
        let sv = Vocabulary::from_tokens(
            ["<pad>", "<s>", "</s>", "<unk>"].iter().chain(src).map(|t| Token::new(*t).unwrap()).collect(),
        )
        .unwrap();
        let tv = Vocabulary::from_tokens(
            ["<pad>", "<s>", "</s>", "<unk>"].iter().chain(tgt).map(|t| Token::new(*t).unwrap()).collect(),
        )
        .unwrap();
        let mut m = Matrix::zeros(sv.len(), tv.len());
        for (i, row) in core.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(4 + i, 4 + j, *v);
            }
        }
        AlignmentMatrix::new(sv, tv, m).unwrap()
    }

    #[test]
    fn explicit_argmax() {
        let l = lambda(&["cities", "rivers"], &["p:has_city", "p:river"], &[&[0.9, 0.1], &[0.2, 0.8]]);
        let d = match_vocabulary(&l);
        assert_eq!(d.matched_source("p:has_city").unwrap().as_str(), "cities");
        assert_eq!(d.matched_source("p:river").unwrap().as_str(), "rivers");
        assert_eq!(d.entries.len(), 2);
    }

    #[test]
    fn column_scaling_keeps_matches() {
        let mut l = lambda(&["a", "b", "c"], &["X", "Y"], &[&[0.3, 0.5], &[0.6, 0.1], &[0.2, 0.49]]);
        let before = match_vocabulary(&l);
        for s in 0..l.values.rows() {
            let v = l.values.get(s, 4);
            l.values.set(s, 4, v * 17.5);
        }
        let after = match_vocabulary(&l);
        for t in ["X", "Y"] {
            assert_eq!(before.matched_source(t), after.matched_source(t));
        }
    }

    #[test]
    fn ties_unmatched_and_excluded() {
        let l = lambda(
            &["?", "a", "b"],
            &["X", "Y", "{", "?v"],
            &[&[9.0, 9.0, 9.0, 9.0], &[0.4, 0.0, 1.0, 1.0], &[0.4, 0.0, 1.0, 1.0]],
        );
        let d = match_vocabulary(&l);
        assert_eq!(d.matched_source("X").unwrap().as_str(), "a");
        assert_eq!(d.get("Y"), Some(&MatchStatus::Unmatched));
        assert_eq!(d.get("{"), Some(&MatchStatus::Excluded));
        assert_eq!(d.get("?v"), Some(&MatchStatus::Excluded));
    }

    #[test]
    fn lexicon_copies_vectors_exactly() {
        let l =
            lambda(&["cities", "select"], &["SELECT", "p:has_city", "p:lake"], &[&[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let d = match_vocabulary(&l);
        let source = random_embeddings(&l.source_vocab, 5, 3);
        let table = bootstrap_lexicon(&d, &source, &KeywordMap::default(), &l.target_vocab, 4).unwrap();
        assert_eq!(table.vector_of("SELECT").unwrap(), source.vector_of("select").unwrap());
        assert_eq!(table.vector_of("p:has_city").unwrap(), source.vector_of("cities").unwrap());
        let lake = table.vector_of("p:lake").unwrap();
        assert!(lake.iter().all(|v| v.is_finite() && (-1.0..=1.0).contains(v)));
        assert_eq!(table.len(), l.target_vocab.len());
    }

    #[test]
    fn keyword_without_source_vector() {
        let l = lambda(&["cities"], &["SELECT"], &[&[1.0]]);
        let source = random_embeddings(&l.source_vocab, 3, 3);
        let err = bootstrap_lexicon(&match_vocabulary(&l), &source, &KeywordMap::default(), &l.target_vocab, 0);
        assert!(matches!(err, Err(Error::Keyword { .. })));
    }

    #[test]
    fn keyword_file_round_trip() {
        let map = KeywordMap::default();
        assert_eq!(KeywordMap::parse(&map.to_text()).unwrap(), map);
        assert!(matches!(KeywordMap::parse("SELECT select\n"), Err(Error::Parse { line: 1, .. })));
        let custom = KeywordMap::parse("# comment\n\nSELECT\tpick\n").unwrap();
        assert_eq!(custom.entries["SELECT"], "pick");
        assert_eq!(vocab(&["x"], Role::Source).len(), 5);
    }
}
