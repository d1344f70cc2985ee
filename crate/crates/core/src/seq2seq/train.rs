use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::model::{loss_and_gradient, Frozen};
use super::params::{ModelParams, Variant};
use crate::corpus::Dataset;
use crate::error::{Error, Result};
use crate::nn::{lr_schedule, sgd_update};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub variant: Variant,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub seed: u64,
    pub freeze_source: bool,
    pub freeze_target: bool,
}

impl ModelConfig {
    /// 100 epochs from a learning rate of 0.9; source lexicon frozen,
    /// target lexicon trained.
    pub fn new(variant: Variant, input_dim: usize, hidden_dim: usize) -> Self {
        ModelConfig {
            variant,
            input_dim,
            hidden_dim,
            epochs: 100,
            initial_lr: 0.9,
            seed: 0,
            freeze_source: true,
            freeze_target: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden_dim == 0 {
            return Err(Error::Dimension("input and hidden dimensions must be positive".into()));
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return Err(Error::Input(format!("learning rate {} is not positive", self.initial_lr)));
        }
        Ok(())
    }

    pub fn frozen(&self) -> Frozen {
        Frozen { source: self.freeze_source, target: self.freeze_target }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub lr: f64,
    /// Cross-entropy per target token, EOS included.
    pub mean_loss: f64,
}

/// `epoch,lr,mean_loss` lines with a header.
pub fn loss_curve_csv(curve: &[EpochStats]) -> String {
    let mut out = String::from("epoch,lr,mean_loss\n");
    for s in curve {
        out.push_str(&format!("{},{},{}\n", s.epoch, s.lr, s.mean_loss));
    }
    out
}

pub fn train(params: &mut ModelParams, dataset: &Dataset, config: &ModelConfig) -> Result<Vec<EpochStats>> {
    train_examples(params, &dataset.encoded(), config, |_| {})
}

/// Teacher-forced SGD, one example at a time, over pre-encoded pairs.
/// `on_epoch` sees each epoch's statistics as soon as it finishes.
pub fn train_examples<F: FnMut(&EpochStats)>(
    params: &mut ModelParams,
    examples: &[(Vec<usize>, Vec<usize>)],
    config: &ModelConfig,
    mut on_epoch: F,
) -> Result<Vec<EpochStats>> {
    config.validate()?;
    if examples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if params.variant != config.variant
        || params.hidden_dim() != config.hidden_dim
        || params.input_dim() != config.input_dim
    {
        return Err(Error::Shape(format!(
            "parameters are {} ({}, {}) but the config asks for {} ({}, {})",
            params.variant.name(),
            params.input_dim(),
            params.hidden_dim(),
            config.variant.name(),
            config.input_dim,
            config.hidden_dim
        )));
    }
    let frozen = config.frozen();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut curve = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let lr = lr_schedule(config.initial_lr, epoch);
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut tokens = 0usize;
        for &i in &order {
            let (source, target) = &examples[i];
            let (loss, grads) = loss_and_gradient(params, source, target, frozen)?;
            if !loss.is_finite() {
                return Err(Error::Numerics(format!("loss is {loss} at epoch {epoch}")));
            }
            sgd_update(params, &grads, lr)?;
            total += loss;
            tokens += target.len();
        }
        let stats = EpochStats { epoch, lr, mean_loss: total / tokens as f64 };
        on_epoch(&stats);
        curve.push(stats);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{ParallelExample, EOS_ID};
    use crate::embeddings::random_embeddings;
    use crate::nn::ParamSet;
    use crate::seq2seq::model::{score, translate};

    fn toy(pairs: &[(&str, &str)]) -> Dataset {
        Dataset::new(pairs.iter().map(|(q, s)| ParallelExample::from_text(q, s).unwrap()).collect())
    }

    fn setup(data: &Dataset, variant: Variant, hidden: usize, dim: usize) -> (ModelParams, ModelConfig) {
        let s = random_embeddings(&data.source_vocab, dim, 1);
        let t = random_embeddings(&data.target_vocab, dim, 2);
        let params = ModelParams::init(variant, &s, &t, hidden, 3).unwrap();
        (params, ModelConfig::new(variant, dim, hidden))
    }

    #[test]
    fn zero_epochs_leave_parameters_alone() {
        let data = toy(&[("how big is texas ?", "SELECT ?a { ?a p:area ?b }")]);
        let (mut params, mut config) = setup(&data, Variant::Attention, 4, 3);
        config.epochs = 0;
        let before = params.clone();
        let curve = train(&mut params, &data, &config).unwrap();
        assert!(curve.is_empty());
        assert_eq!(params, before);
    }

    #[test]
    fn fresh_model_loss_is_near_uniform() {
        let data = toy(&[
            ("how big is texas ?", "SELECT ?a { ?a p:area ?b }"),
            ("what rivers are in ohio ?", "SELECT ?r { ?r a p:river }"),
            ("name the capital of utah", "SELECT ?c { ?c p:capital ?s . ?s p:name \"utah\" }"),
        ]);
        for variant in [Variant::Plain, Variant::Attention] {
            let (params, _) = setup(&data, variant, 16, 8);
            let (mut total, mut tokens) = (0.0, 0);
            for (s, t) in data.encoded() {
                total -= score(&params, &s, &t).unwrap();
                tokens += t.len();
            }
            let baseline = (data.target_vocab.len() as f64).ln();
            let mean = total / tokens as f64;
            assert!((mean - baseline).abs() < 0.2 * baseline, "{mean} vs {baseline}");
        }
    }

    #[test]
    fn config_mismatch_is_rejected() {
        let data = toy(&[("a b", "SELECT ?x")]);
        let (mut params, mut config) = setup(&data, Variant::Plain, 4, 3);
        config.hidden_dim = 5;
        assert!(matches!(train(&mut params, &data, &config), Err(Error::Shape(_))));
        config.hidden_dim = 4;
        config.initial_lr = 0.0;
        assert!(matches!(train(&mut params, &data, &config), Err(Error::Input(_))));
    }

    #[test]
    fn training_is_reproducible() {
        let data = toy(&[
            ("how big is texas ?", "SELECT ?a { ?a p:area ?b }"),
            ("what rivers are in ohio ?", "SELECT ?r { ?r a p:river }"),
        ]);
        let (params, mut config) = setup(&data, Variant::Attention, 6, 4);
        config.epochs = 3;
        let (mut a, mut b) = (params.clone(), params);
        let ca = train(&mut a, &data, &config).unwrap();
        let cb = train(&mut b, &data, &config).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(a, b);
        assert_eq!(ca.len(), 3);
        assert_eq!(ca[1].lr, 0.9 * 0.9);
    }

    #[test]
    fn frozen_source_lexicon_is_untouched() {
        let data = toy(&[("how big is texas ?", "SELECT ?a { ?a p:area ?b }")]);
        let (mut params, mut config) = setup(&data, Variant::Attention, 4, 3);
        config.epochs = 2;
        let before = params.source_embedding.clone();
        train(&mut params, &data, &config).unwrap();
        assert_eq!(params.source_embedding, before);
        assert!(params.is_finite());
    }

    #[test]
    fn overfits_a_single_pair() {
        let pair = ("which states border texas ?", "SELECT ?s { ?s p:borders ?t . ?t p:name \"texas\" }");
        let data = toy(&[pair; 10]);
        for variant in [Variant::Plain, Variant::Attention] {
            let (mut params, mut config) = setup(&data, variant, 12, 6);
            config.epochs = 30;
            let curve = train(&mut params, &data, &config).unwrap();
            assert!(curve.last().unwrap().mean_loss < curve[0].mean_loss);
            let (src, tgt) = &data.encoded()[0];
            let out = translate(&params, src, 64).unwrap();
            assert_eq!(&out.ids[..], &tgt[..tgt.len() - 1], "{variant:?}");
            assert_eq!(*tgt.last().unwrap(), EOS_ID);
            let gold = score(&params, src, tgt).unwrap();
            assert!(gold >= 0.9f64.ln() * tgt.len() as f64, "{variant:?} {gold}");
            let mut permuted = tgt.clone();
            permuted.swap(0, 1);
            assert!(score(&params, src, &permuted).unwrap() < gold);
        }
    }

    #[test]
    fn csv_log_layout() {
        let csv = loss_curve_csv(&[EpochStats { epoch: 0, lr: 0.9, mean_loss: 1.5 }]);
        assert_eq!(csv, "epoch,lr,mean_loss\n0,0.9,1.5\n");
    }
}
