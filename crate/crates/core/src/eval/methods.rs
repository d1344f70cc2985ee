use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Dataset;
use crate::embeddings::{random_embeddings, skipgram_embeddings, tfidf_pca_embeddings, EmbeddingTable, SkipGramConfig};
use crate::error::{Error, Result};

/// How the target lexicon is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "RANDOM")]
    Random,
    #[serde(rename = "TF-IDF/PCA")]
    TfidfPca,
    #[serde(rename = "W2V10")]
    W2v10,
    #[serde(rename = "OUR-APP")]
    OurApp,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Random, Method::TfidfPca, Method::W2v10, Method::OurApp];

    pub fn label(self) -> &'static str {
        match self {
            Method::Random => "RANDOM",
            Method::TfidfPca => "TF-IDF/PCA",
            Method::W2v10 => "W2V10",
            Method::OurApp => "OUR-APP",
        }
    }

    /// Command-line spelling.
    pub fn flag(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::TfidfPca => "tfidf-pca",
            Method::W2v10 => "w2v",
            Method::OurApp => "ourapp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.flag() == s || m.label() == s)
            .ok_or_else(|| Error::Input(format!("unknown method `{s}`")))
    }
}

/// Skip-gram settings for the W2V10 lexicon: a window of ten tokens.
pub fn w2v10_config(dim: usize, seed: u64) -> SkipGramConfig {
    SkipGramConfig { dim, window: 10, seed, ..SkipGramConfig::default() }
}

/// Target lexicon for the corpus-level methods, built from every target
/// query in `dataset`. OUR-APP depends on a trained model and is handled by
/// the alignment pipeline.
pub fn corpus_lexicon(method: Method, dataset: &Dataset, dim: usize, seed: u64) -> Result<EmbeddingTable> {
    let vocab = &dataset.target_vocab;
    match method {
        Method::Random => Ok(random_embeddings(vocab, dim, seed)),
        Method::TfidfPca => tfidf_pca_embeddings(&dataset.targets(), vocab, dim, seed),
        Method::W2v10 => Ok(skipgram_embeddings(&dataset.targets(), vocab, &w2v10_config(dim, seed))),
        Method::OurApp => Err(Error::Input("OUR-APP lexicons need a trained alignment model".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{geo, ParallelExample};

    #[test]
    fn names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.flag().parse::<Method>().unwrap(), m);
            assert_eq!(m.label().parse::<Method>().unwrap(), m);
            let json = serde_json::to_string(&m).unwrap();
            assert_eq!(json, format!("\"{}\"", m.label()));
        }
        assert!("glove".parse::<Method>().is_err());
    }

    #[test]
    fn corpus_lexicons_cover_the_vocabulary() {
        let data = Dataset::new(
            geo::generate_pairs(60, 1).iter().map(|(q, s)| ParallelExample::from_text(q, s).unwrap()).collect(),
        );
        for m in [Method::Random, Method::TfidfPca, Method::W2v10] {
            let t = corpus_lexicon(m, &data, 12, 3).unwrap();
            t.validate().unwrap();
            assert_eq!((t.len(), t.dim()), (data.target_vocab.len(), 12));
        }
        assert!(corpus_lexicon(Method::OurApp, &data, 12, 3).is_err());
    }
}
