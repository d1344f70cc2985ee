use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::{Vocabulary, PAD_ID};
use crate::error::{Error, Result};
use crate::nn::Matrix;

/// One vector per vocabulary id, all of the same dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    pub vocab: Vocabulary,
    pub vectors: Matrix,
}

/// Standard normal scaled by 0.5, redrawn until it lands in `[-1, 1]`.
pub fn truncated_normal<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let z: f64 = rng.sample::<f64, _>(StandardNormal) * 0.5;
        if (-1.0..=1.0).contains(&z) {
            return z;
        }
    }
}

pub fn random_embeddings(vocab: &Vocabulary, dim: usize, seed: u64) -> EmbeddingTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..vocab.len() * dim).map(|_| truncated_normal(&mut rng)).collect();
    let mut table = EmbeddingTable {
        vocab: vocab.clone(),
        vectors: Matrix::from_vec(vocab.len(), dim, data).expect("sized to fit"),
    };
    table.zero_padding();
    table
}

impl EmbeddingTable {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.rows() == 0
    }

    pub fn vector(&self, id: usize) -> &[f64] {
        self.vectors.row(id)
    }

    pub fn vector_of(&self, token: &str) -> Option<&[f64]> {
        self.vocab.id(token).map(|id| self.vectors.row(id))
    }

    pub fn zero_padding(&mut self) {
        if self.vectors.rows() > PAD_ID {
            self.vectors.row_mut(PAD_ID).fill(0.0);
        }
    }

    /// Checks coverage, uniform dimension and finiteness.
    pub fn validate(&self) -> Result<()> {
        if self.vectors.rows() != self.vocab.len() {
            return Err(Error::Shape(format!(
                "{} vectors for a vocabulary of {}",
                self.vectors.rows(),
                self.vocab.len()
            )));
        }
        if self.dim() == 0 {
            return Err(Error::Dimension("embedding dimension must be positive".into()));
        }
        if !self.vectors.is_finite() {
            return Err(Error::Numerics("embedding table has non-finite entries".into()));
        }
        Ok(())
    }

    /// `token v1 v2 ...` per line, in id order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, tok) in self.vocab.tokens().iter().enumerate() {
            out.push_str(tok.as_str());
            for v in self.vectors.row(id) {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Reads a vector file back into a table over exactly its tokens.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let entries = parse_vector_file(&text)?;
        let dim = entries.first().map_or(0, |(_, v)| v.len());
        let tokens = entries.iter().map(|(t, _)| crate::corpus::Token::new(t.clone())).collect::<Result<Vec<_>>>()?;
        let vocab = Vocabulary::from_tokens(tokens)?;
        let data = entries.into_iter().flat_map(|(_, v)| v).collect();
        Ok(EmbeddingTable { vectors: Matrix::from_vec(vocab.len(), dim, data)?, vocab })
    }
}

/// Parses `token f1 ... fd` lines; every line must have the first line's
/// dimension. A token starting with `"` runs to its closing quote, so quoted
/// literals containing spaces survive a round trip.
pub fn parse_vector_file(text: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let mut entries = Vec::new();
    let mut dim = None;
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let line_no = i + 1;
        let split = match line.strip_prefix('"') {
            Some(rest) => rest.find('"').map(|q| q + 2),
            None => line.find(' '),
        }
        .ok_or_else(|| Error::Format(format!("line {line_no}: no vector values")))?;
        let (token, rest) = line.split_at(split);
        let values = rest
            .split_whitespace()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Format(format!("line {line_no}: bad number `{f}`"))))
            .collect::<Result<Vec<_>>>()?;
        let d = *dim.get_or_insert(values.len());
        if d == 0 || values.len() != d {
            return Err(Error::Format(format!("line {line_no}: expected {d} values, found {}", values.len())));
        }
        entries.push((token.to_string(), values));
    }
    Ok(entries)
}

/// Pretrained vectors for the tokens a file covers, seeded truncated-normal
/// vectors for the rest (specials included).
pub fn load_pretrained(path: &Path, vocab: &Vocabulary, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    pretrained_from_text(&text, vocab, dim, seed)
}

pub fn pretrained_from_text(text: &str, vocab: &Vocabulary, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let entries = parse_vector_file(text)?;
    if let Some((_, first)) = entries.first() {
        if first.len() != dim {
            return Err(Error::Format(format!("vector file has dimension {}, expected {dim}", first.len())));
        }
    }
    let mut table = random_embeddings(vocab, dim, seed);
    for (token, values) in entries {
        if let Some(id) = vocab.id(&token) {
            table.vectors.row_mut(id).copy_from_slice(&values);
        }
    }
    table.zero_padding();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Role, TokenSequence};

    fn vocab(tokens: &[&str]) -> Vocabulary {
        Vocabulary::build(&[TokenSequence::from_strs(tokens, Role::Source)])
    }

    #[test]
    fn random_table_shape_and_range() {
        let v = vocab(&["a", "b", "c", "d", "e"]);
        let t = random_embeddings(&v, 300, 1);
        assert_eq!(t.len(), 9);
        assert_eq!(t.dim(), 300);
        assert!(t.vectors.as_slice().iter().all(|c| (-1.0..=1.0).contains(c)));
        assert!(t.vector(PAD_ID).iter().all(|&c| c == 0.0));
        t.validate().unwrap();
    }

    #[test]
    fn random_table_is_seeded() {
        let v = vocab(&["a", "b"]);
        assert_eq!(random_embeddings(&v, 7, 5), random_embeddings(&v, 7, 5));
        assert_ne!(random_embeddings(&v, 7, 5), random_embeddings(&v, 7, 6));
    }

    #[test]
    fn pretrained_lookup_and_fallback() {
        let v = vocab(&["cities", "rivers"]);
        let t = pretrained_from_text("cities 0.1 0.2\nunused 1 1\n", &v, 2, 0).unwrap();
        assert_eq!(t.vector_of("cities").unwrap(), &[0.1, 0.2]);
        let rivers = t.vector_of("rivers").unwrap();
        assert!(rivers.iter().all(|c| c.is_finite() && (-1.0..=1.0).contains(c)));
    }

    #[test]
    fn pretrained_dimension_mismatch() {
        let v = vocab(&["cities"]);
        assert!(matches!(pretrained_from_text("cities 0.1\n", &v, 2, 0), Err(Error::Format(_))));
        assert!(matches!(pretrained_from_text("cities 0.1 0.2\nrivers 0.5\n", &v, 2, 0), Err(Error::Format(_))));
    }

    #[test]
    fn text_round_trip() {
        let v = Vocabulary::build(&[TokenSequence::from_strs(&["SELECT", "\"new york\"", "?A"], Role::Target)]);
        let t = random_embeddings(&v, 4, 2);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.vec");
        t.save(&path).unwrap();
        let back = EmbeddingTable::load(&path).unwrap();
        assert_eq!(back, t);
    }
}
