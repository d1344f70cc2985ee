use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::token::{Token, TokenSequence, SPECIALS, UNK_ID};
use crate::error::{Error, Result};

/// Dense bijection between tokens and ids. Ids 0..4 are the special symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "Vec<Token>", try_from = "Vec<Token>")]
pub struct Vocabulary {
    tokens: Vec<Token>,
    index: HashMap<Token, usize>,
}

impl Vocabulary {
    /// Specials first, then tokens by descending frequency, ties lexicographic.
    pub fn build(sequences: &[TokenSequence]) -> Self {
        let mut counts: HashMap<&Token, usize> = HashMap::new();
        for tok in sequences.iter().flat_map(|s| s.tokens.iter()) {
            if !tok.is_special() {
                *counts.entry(tok).or_default() += 1;
            }
        }
        let mut ranked: Vec<(&Token, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));

        let mut tokens = specials();
        tokens.extend(ranked.into_iter().map(|(t, _)| t.clone()));
        Self::from_ordered(tokens)
    }

    /// Rebuilds a vocabulary from its id-ordered token list.
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self> {
        if tokens.len() < SPECIALS.len() || tokens.iter().zip(SPECIALS).any(|(t, s)| t.as_str() != s) {
            return Err(Error::Format("vocabulary must start with the four special symbols".into()));
        }
        let vocab = Self::from_ordered(tokens);
        if vocab.index.len() != vocab.tokens.len() {
            return Err(Error::Format("vocabulary contains duplicate tokens".into()));
        }
        Ok(vocab)
    }

    /// A copy with any missing `extra` tokens appended after the existing ids.
    pub fn extended<S: AsRef<str>>(&self, extra: &[S]) -> Result<Self> {
        let mut tokens = self.tokens.clone();
        for t in extra {
            let tok = Token::new(t.as_ref())?;
            if !self.index.contains_key(&tok) && !tokens[self.tokens.len()..].contains(&tok) {
                tokens.push(tok);
            }
        }
        Ok(Self::from_ordered(tokens))
    }

    fn from_ordered(tokens: Vec<Token>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, index }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        // HashMap<Token, _> can't be queried by &str without an owned key.
        self.index.get(&Token::new(token).ok()?).copied()
    }

    pub fn id_of(&self, token: &Token) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn id_or_unk(&self, token: &Token) -> usize {
        self.id_of(token).unwrap_or(UNK_ID)
    }

    pub fn token(&self, id: usize) -> Option<&Token> {
        self.tokens.get(id)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn contains(&self, token: &Token) -> bool {
        self.index.contains_key(token)
    }

    /// Ids for a sequence, with unknown tokens mapped to UNK.
    pub fn encode(&self, seq: &TokenSequence) -> Vec<usize> {
        seq.tokens.iter().map(|t| self.id_or_unk(t)).collect()
    }

    pub fn decode(&self, ids: &[usize]) -> Vec<Token> {
        ids.iter().map(|&id| self.tokens.get(id).unwrap_or(&self.tokens[UNK_ID]).clone()).collect()
    }

    /// One token per line; line number minus one is the id.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for tok in &self.tokens {
            out.push_str(tok.as_str());
            out.push('\n');
        }
        out
    }

    pub fn from_dump(text: &str) -> Result<Self> {
        let tokens = text
            .lines()
            .enumerate()
            .map(|(i, line)| Token::new(line).map_err(|_| Error::Parse { line: i + 1, message: "empty token".into() }))
            .collect::<Result<Vec<_>>>()?;
        Self::from_tokens(tokens)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_dump()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_dump(&text)
    }
}

fn specials() -> Vec<Token> {
    SPECIALS.iter().map(|s| Token::new(*s).expect("specials are non-empty")).collect()
}

impl From<Vocabulary> for Vec<Token> {
    fn from(v: Vocabulary) -> Self {
        v.tokens
    }
}

impl TryFrom<Vec<Token>> for Vocabulary {
    type Error = Error;

    fn try_from(tokens: Vec<Token>) -> Result<Self> {
        Vocabulary::from_tokens(tokens)
    }
}
