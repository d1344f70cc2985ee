use super::lexicon::{bootstrap_lexicon, match_vocabulary, KeywordMap, MatchingDictionary};
use super::matrix::{accumulate_alignment, AlignmentMatrix};
use crate::corpus::Dataset;
use crate::embeddings::{random_embeddings, EmbeddingTable};
use crate::error::{Error, Result};
use crate::seq2seq::{train, EpochStats, ModelConfig, ModelParams, Variant};

/// Everything produced on the way to a matched target lexicon.
#[derive(Clone, Debug)]
pub struct Bootstrap {
    pub alignment: AlignmentMatrix,
    pub dictionary: MatchingDictionary,
    pub lexicon: EmbeddingTable,
}

/// Lexicon derived from an already trained attention model.
pub fn bootstrap_from_model(
    params: &ModelParams,
    dataset: &Dataset,
    source_table: &EmbeddingTable,
    keywords: &KeywordMap,
    seed: u64,
) -> Result<Bootstrap> {
    let alignment = accumulate_alignment(params, dataset)?;
    let dictionary = match_vocabulary(&alignment);
    let lexicon = bootstrap_lexicon(&dictionary, source_table, keywords, &dataset.target_vocab, seed)?;
    Ok(Bootstrap { alignment, dictionary, lexicon })
}

/// Trains an attention model over a random target lexicon, then matches.
///
/// `config.variant` must be attention; `config.seed` seeds both the random
/// lexicon and the model.
pub fn bootstrap_from_scratch(
    dataset: &Dataset,
    source_table: &EmbeddingTable,
    keywords: &KeywordMap,
    config: &ModelConfig,
) -> Result<(Bootstrap, Vec<EpochStats>)> {
    if config.variant != Variant::Attention {
        return Err(Error::Variant { expected: "attention" });
    }
    let random = random_embeddings(&dataset.target_vocab, config.input_dim, config.seed);
    let mut params = ModelParams::init(Variant::Attention, source_table, &random, config.hidden_dim, config.seed)?;
    let curve = train(&mut params, dataset, config)?;
    let bootstrap = bootstrap_from_model(&params, dataset, source_table, keywords, config.seed)?;
    Ok((bootstrap, curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ParallelExample;

    /// Each question holds one unique word between two shared fillers; its
    /// query holds one unique predicate. Pairs are repeated for more updates.
    #[test]
    fn planted_pairs_are_recovered() {
        let n = 4;
        let examples = (0..3 * n)
            .map(|k| k % n)
            .map(|k| {
                ParallelExample::from_text(&format!("show q{k} please"), &format!("SELECT ?x {{ ?x p:a{k} ?y . }}"))
                    .unwrap()
            })
            .collect();
        let keywords = KeywordMap::default();
        let data = Dataset::new(examples).with_extra_source_tokens(&keywords.english_words()).unwrap();
        let source = random_embeddings(&data.source_vocab, 50, 1);
        let mut config = ModelConfig::new(Variant::Attention, 50, 50);
        config.epochs = 60;
        let (b, curve) = bootstrap_from_scratch(&data, &source, &keywords, &config).unwrap();
        assert!(curve.last().unwrap().mean_loss < 0.5);
        for k in 0..n {
            let m = b.dictionary.matched_source(&format!("p:a{k}")).map(|t| t.to_string());
            assert_eq!(m.as_deref(), Some(format!("q{k}").as_str()));
        }
        assert_eq!(b.lexicon.vector_of("SELECT"), source.vector_of("select"));
        assert!(matches!(
            bootstrap_from_scratch(&data, &source, &KeywordMap::default(), &ModelConfig::new(Variant::Plain, 16, 4)),
            Err(Error::Variant { .. })
        ));
    }
}
