use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const PAD: &str = "<pad>";
pub const SOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// Reserved symbols, in id order.
pub const SPECIALS: [&str; 4] = [PAD, SOS, EOS, UNK];

pub const PAD_ID: usize = 0;
pub const SOS_ID: usize = 1;
pub const EOS_ID: usize = 2;
pub const UNK_ID: usize = 3;

/// Characters split off English words.
const SOURCE_PUNCTUATION: [char; 3] = ['?', '.', ','];

/// Characters split off SPARQL tokens.
const TARGET_DELIMITERS: [char; 5] = ['(', ')', '{', '}', ','];

/// A single non-empty token.
///
/// Quoted target literals are the only tokens that may carry internal
/// whitespace; everything else is split on it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_special(&self) -> bool {
        SPECIALS.contains(&self.0.as_str())
    }

    pub fn is_variable(&self) -> bool {
        self.0.len() > 1 && (self.0.starts_with('?') || self.0.starts_with('$'))
    }

    pub fn is_literal(&self) -> bool {
        self.0.len() >= 2 && self.0.starts_with('"') && self.0.ends_with('"')
    }

    /// True for the structural punctuation `( ) { } , .` of a query.
    pub fn is_delimiter(&self) -> bool {
        matches!(self.0.as_str(), "(" | ")" | "{" | "}" | "," | ".")
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSequence {
    pub tokens: Vec<Token>,
    pub role: Role,
}

impl TokenSequence {
    pub fn new(tokens: Vec<Token>, role: Role) -> Self {
        TokenSequence { tokens, role }
    }

    /// Builds a sequence from raw strings, skipping empty ones.
    pub fn from_strs<S: AsRef<str>>(tokens: &[S], role: Role) -> Self {
        let tokens = tokens.iter().filter_map(|t| Token::new(t.as_ref()).ok()).collect();
        TokenSequence { tokens, role }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Token> {
        self.tokens.iter()
    }

    pub fn ends_with_eos(&self) -> bool {
        self.tokens.last().is_some_and(|t| t.as_str() == EOS)
    }

    /// The sequence with any trailing end-of-sequence symbol removed.
    pub fn without_eos(&self) -> TokenSequence {
        let mut tokens = self.tokens.clone();
        if tokens.last().is_some_and(|t| t.as_str() == EOS) {
            tokens.pop();
        }
        TokenSequence::new(tokens, self.role)
    }

    /// Space-joined text, without the end-of-sequence symbol.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for tok in self.tokens.iter().filter(|t| t.as_str() != EOS) {
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(tok.as_str());
        }
        out
    }
}

pub fn tokenize_source(text: &str) -> Result<TokenSequence> {
    let lowered = text.to_lowercase();
    let mut tokens = Vec::new();
    for chunk in lowered.split_whitespace() {
        let mut current = String::new();
        for ch in chunk.chars() {
            if SOURCE_PUNCTUATION.contains(&ch) {
                if !current.is_empty() {
                    tokens.push(Token(std::mem::take(&mut current)));
                }
                tokens.push(Token(ch.to_string()));
            } else {
                current.push(ch);
            }
        }
        if !current.is_empty() {
            tokens.push(Token(current));
        }
    }
    if tokens.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(TokenSequence::new(tokens, Role::Source))
}

/// Splits a SPARQL query into tokens and appends the end-of-sequence symbol.
///
/// Quoted string literals are kept whole; `( ) { } ,` are always split off.
pub fn tokenize_target(sparql: &str) -> Result<TokenSequence> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut chars = sparql.char_indices().peekable();

    fn flush(current: &mut String, tokens: &mut Vec<Token>) {
        if !current.is_empty() {
            tokens.push(Token(std::mem::take(current)));
        }
    }

    while let Some((offset, ch)) = chars.next() {
        if ch.is_whitespace() {
            flush(&mut current, &mut tokens);
        } else if TARGET_DELIMITERS.contains(&ch) {
            flush(&mut current, &mut tokens);
            tokens.push(Token(ch.to_string()));
        } else if ch == '"' {
            flush(&mut current, &mut tokens);
            let mut literal = String::from('"');
            let mut closed = false;
            while let Some((_, c)) = chars.next() {
                literal.push(c);
                if c == '\\' {
                    if let Some((_, escaped)) = chars.next() {
                        literal.push(escaped);
                    }
                } else if c == '"' {
                    closed = true;
                    break;
                }
            }
            if !closed {
                return Err(Error::Tokenize { offset, message: "unterminated string literal".into() });
            }
            tokens.push(Token(literal));
        } else {
            current.push(ch);
        }
    }
    flush(&mut current, &mut tokens);
    tokens.push(Token(EOS.to_string()));
    Ok(TokenSequence::new(tokens, Role::Target))
}
