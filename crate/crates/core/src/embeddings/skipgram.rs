use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::table::{random_embeddings, EmbeddingTable};
use crate::corpus::{TokenSequence, Vocabulary};
use crate::nn::linalg::{axpy, dot, sigmoid};

#[derive(Clone, Debug, PartialEq)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub negatives: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig { dim: 300, window: 10, epochs: 5, negatives: 5, learning_rate: 0.025, seed: 0 }
    }
}

/// Skip-gram with negative sampling over `corpus`, laid out over `vocab`.
///
/// Input vectors start from the seeded truncated-normal table, context
/// vectors from zero. Negatives are drawn from the unigram distribution
/// raised to 0.75 and the learning rate decays linearly to 1e-4 of its start.
/// Special symbols are dropped from the training stream.
pub fn skipgram_embeddings(corpus: &[TokenSequence], vocab: &Vocabulary, config: &SkipGramConfig) -> EmbeddingTable {
    let mut table = random_embeddings(vocab, config.dim, config.seed);
    if config.epochs == 0 {
        return table;
    }
    let sentences: Vec<Vec<usize>> =
        corpus.iter().map(|s| s.iter().filter(|t| !t.is_special()).filter_map(|t| vocab.id_of(t)).collect()).collect();

    let mut counts = vec![0.0f64; vocab.len()];
    for &id in sentences.iter().flatten() {
        counts[id] += 1.0;
    }
    let noise = UnigramTable::new(&counts);
    let Some(noise) = noise else {
        return table;
    };

    let dim = config.dim;
    let mut context = vec![0.0; vocab.len() * dim];
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5eed_5eed);
    let total_steps = (config.epochs * sentences.iter().map(Vec::len).sum::<usize>()).max(1) as f64;
    let mut step = 0usize;
    let mut grad = vec![0.0; dim];

    for _ in 0..config.epochs {
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = config.learning_rate * (1.0 - step as f64 / total_steps).max(1e-4);
                step += 1;
                let lo = pos.saturating_sub(config.window);
                let hi = (pos + config.window + 1).min(sentence.len());
                for ctx_pos in lo..hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let target = sentence[ctx_pos];
                    grad.fill(0.0);
                    let input = table.vectors.row_mut(center);
                    for k in 0..=config.negatives {
                        let (word, label) = if k == 0 {
                            (target, 1.0)
                        } else {
                            let w = noise.sample(&mut rng);
                            if w == target {
                                continue;
                            }
                            (w, 0.0)
                        };
                        let out = &mut context[word * dim..(word + 1) * dim];
                        let g = lr * (label - sigmoid(dot(input, out)));
                        axpy(g, out, &mut grad);
                        axpy(g, input, out);
                    }
                    axpy(1.0, &grad, input);
                }
            }
        }
    }
    table.zero_padding();
    table
}

/// Cumulative distribution over ids proportional to `count^0.75`.
struct UnigramTable {
    cumulative: Vec<f64>,
}

impl UnigramTable {
    fn new(counts: &[f64]) -> Option<Self> {
        let mut acc = 0.0;
        let cumulative: Vec<f64> = counts
            .iter()
            .map(|c| {
                acc += c.powf(0.75);
                acc
            })
            .collect();
        (acc > 0.0).then_some(UnigramTable { cumulative })
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty");
        let x = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= x).min(self.cumulative.len() - 1)
    }
}
