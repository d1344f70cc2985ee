use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::token::{tokenize_source, tokenize_target, Token, TokenSequence, UNK};
use super::vocab::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelExample {
    pub source: TokenSequence,
    pub target: TokenSequence,
}

impl ParallelExample {
    pub fn from_text(question: &str, sparql: &str) -> Result<Self> {
        let source = tokenize_source(question)?;
        let target = tokenize_target(sparql)?;
        if target.len() < 2 {
            return Err(Error::EmptyInput);
        }
        Ok(ParallelExample { source, target })
    }
}

#[derive(Clone, Debug)]
pub struct Dataset {
    pub examples: Vec<ParallelExample>,
    pub source_vocab: Vocabulary,
    pub target_vocab: Vocabulary,
}

impl Dataset {
    /// Builds both vocabularies from the examples themselves.
    pub fn new(examples: Vec<ParallelExample>) -> Self {
        let sources: Vec<TokenSequence> = examples.iter().map(|e| e.source.clone()).collect();
        let targets: Vec<TokenSequence> = examples.iter().map(|e| e.target.clone()).collect();
        Dataset { source_vocab: Vocabulary::build(&sources), target_vocab: Vocabulary::build(&targets), examples }
    }

    /// Uses frozen vocabularies, replacing unknown tokens by UNK.
    pub fn with_vocabularies(
        examples: Vec<ParallelExample>,
        source_vocab: Vocabulary,
        target_vocab: Vocabulary,
    ) -> Self {
        let unk = Token::new(UNK).expect("non-empty");
        let substitute = |seq: &TokenSequence, vocab: &Vocabulary| {
            let tokens = seq.tokens.iter().map(|t| if vocab.contains(t) { t.clone() } else { unk.clone() }).collect();
            TokenSequence::new(tokens, seq.role)
        };
        let examples = examples
            .iter()
            .map(|e| ParallelExample {
                source: substitute(&e.source, &source_vocab),
                target: substitute(&e.target, &target_vocab),
            })
            .collect();
        Dataset { examples, source_vocab, target_vocab }
    }

    /// Adds tokens to the source vocabulary without touching the examples.
    pub fn with_extra_source_tokens<S: AsRef<str>>(mut self, extra: &[S]) -> Result<Self> {
        self.source_vocab = self.source_vocab.extended(extra)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn sources(&self) -> Vec<TokenSequence> {
        self.examples.iter().map(|e| e.source.clone()).collect()
    }

    pub fn targets(&self) -> Vec<TokenSequence> {
        self.examples.iter().map(|e| e.target.clone()).collect()
    }

    /// Examples at `indices`, sharing this dataset's vocabularies.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            examples: indices.iter().map(|&i| self.examples[i].clone()).collect(),
            source_vocab: self.source_vocab.clone(),
            target_vocab: self.target_vocab.clone(),
        }
    }

    /// A seeded random subset of `n` examples (in original order) with
    /// vocabularies rebuilt from the subset.
    pub fn subsample(&self, n: usize, seed: u64) -> Result<Dataset> {
        if n == 0 || n > self.len() {
            return Err(Error::Input(format!("cannot draw {n} examples from a dataset of {}", self.len())));
        }
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut chosen = order[..n].to_vec();
        chosen.sort_unstable();
        Ok(Dataset::new(chosen.iter().map(|&i| self.examples[i].clone()).collect()))
    }

    /// Encoded (source ids, target ids) pairs; targets keep their EOS.
    pub fn encoded(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        self.examples
            .iter()
            .map(|e| (self.source_vocab.encode(&e.source), self.target_vocab.encode(&e.target)))
            .collect()
    }
}

/// Parses the two-column pair format: question TAB query, one per line.
pub fn parse_pairs(text: &str) -> Result<Vec<ParallelExample>> {
    let mut examples = Vec::new();
    for (i, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let line_no = i + 1;
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 2 tab-separated fields, found {}", fields.len()),
            });
        }
        let example = ParallelExample::from_text(fields[0], fields[1])
            .map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
        examples.push(example);
    }
    Ok(examples)
}

pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(Dataset::new(parse_pairs(&text)?))
}
