use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::methods::{corpus_lexicon, Method};
use super::metrics::{evaluate, Metrics};
use crate::alignment::{bootstrap_from_model, KeywordMap};
use crate::corpus::{split_folds, Dataset, Role, TokenSequence};
use crate::embeddings::{random_embeddings, EmbeddingTable};
use crate::error::{Error, Result};
use crate::seq2seq::{train, translate, ModelConfig, ModelParams, Variant, DEFAULT_MAX_LEN};

/// One row of the result tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GridCell {
    pub variant: Variant,
    pub hidden_dim: usize,
    pub method: Method,
}

impl GridCell {
    pub fn new(variant: Variant, hidden_dim: usize, method: Method) -> Self {
        GridCell { variant, hidden_dim, method }
    }

    /// Both variants, every method, for each hidden size.
    pub fn full_grid(hidden_dims: &[usize]) -> Vec<GridCell> {
        let mut cells = Vec::new();
        for variant in [Variant::Plain, Variant::Attention] {
            for &h in hidden_dims {
                for method in Method::ALL {
                    cells.push(GridCell::new(variant, h, method));
                }
            }
        }
        cells
    }
}

/// Hidden sizes of the published grid.
pub const GRID_HIDDEN_DIMS: [usize; 3] = [100, 200, 400];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub accuracy: f64,
    pub syntax_error_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub variant: Variant,
    pub hidden_dim: usize,
    pub method: Method,
    pub mean_accuracy: f64,
    pub mean_syntax_error_rate: f64,
    pub folds: Vec<FoldMetrics>,
}

impl CellResult {
    pub fn cell(&self) -> GridCell {
        GridCell::new(self.variant, self.hidden_dim, self.method)
    }

    fn from_folds(cell: GridCell, folds: Vec<FoldMetrics>) -> Self {
        let n = folds.len() as f64;
        CellResult {
            variant: cell.variant,
            hidden_dim: cell.hidden_dim,
            method: cell.method,
            mean_accuracy: folds.iter().map(|f| f.accuracy).sum::<f64>() / n,
            mean_syntax_error_rate: folds.iter().map(|f| f.syntax_error_rate).sum::<f64>() / n,
            folds,
        }
    }
}

/// Shared settings for every cell of a cross-validated run.
///
/// `base` supplies the input dimension, epochs, learning rate, seed and
/// freezing flags; its variant and hidden size are replaced per cell.
#[derive(Clone, Debug)]
pub struct Experiment {
    pub dataset: Dataset,
    pub source_table: EmbeddingTable,
    pub keywords: KeywordMap,
    pub base: ModelConfig,
    pub folds: usize,
    pub max_len: usize,
    pub jobs: usize,
}

impl Experiment {
    pub fn new(dataset: Dataset, source_table: EmbeddingTable, keywords: KeywordMap, base: ModelConfig) -> Self {
        Experiment { dataset, source_table, keywords, base, folds: 10, max_len: DEFAULT_MAX_LEN, jobs: 1 }
    }

    fn config(&self, variant: Variant, hidden_dim: usize, fold: usize) -> ModelConfig {
        ModelConfig { variant, hidden_dim, seed: fold_seed(self.base.seed, fold), ..self.base.clone() }
    }

    fn check(&self) -> Result<()> {
        self.base.validate()?;
        if self.source_table.len() != self.dataset.source_vocab.len() || self.source_table.dim() != self.base.input_dim
        {
            return Err(Error::Shape(format!(
                "source table is {}x{}, expected {}x{}",
                self.source_table.len(),
                self.source_table.dim(),
                self.dataset.source_vocab.len(),
                self.base.input_dim
            )));
        }
        if self.max_len == 0 || self.jobs == 0 {
            return Err(Error::Input("max_len and jobs must be positive".into()));
        }
        Ok(())
    }
}

/// Seed used for everything random inside one fold.
pub fn fold_seed(seed: u64, fold: usize) -> u64 {
    seed.wrapping_add((fold as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

struct FoldData {
    train: Dataset,
    test: Dataset,
}

fn fold_data(exp: &Experiment) -> Result<Vec<FoldData>> {
    let split = split_folds(exp.dataset.len(), exp.folds, exp.base.seed)?;
    Ok((0..exp.folds)
        .map(|f| FoldData {
            train: exp.dataset.select(&split.train_indices(f)),
            test: exp.dataset.select(&split.test_indices(f)),
        })
        .collect())
}

fn train_and_score(
    exp: &Experiment,
    data: &FoldData,
    config: &ModelConfig,
    lexicon: &EmbeddingTable,
) -> Result<(Metrics, ModelParams)> {
    let mut params = ModelParams::init(config.variant, &exp.source_table, lexicon, config.hidden_dim, config.seed)?;
    train(&mut params, &data.train, config)?;
    let vocab = &data.test.target_vocab;
    let mut predictions = Vec::with_capacity(data.test.len());
    let mut golds = Vec::with_capacity(data.test.len());
    for (example, (source, _)) in data.test.examples.iter().zip(data.test.encoded()) {
        let out = translate(&params, &source, exp.max_len)?;
        predictions.push(TokenSequence::new(vocab.decode(&out.ids), Role::Target));
        golds.push(example.target.clone());
    }
    Ok((evaluate(&predictions, &golds)?, params))
}

fn fold_metrics(fold: usize, m: Metrics) -> FoldMetrics {
    FoldMetrics { fold, accuracy: m.accuracy(), syntax_error_rate: m.syntax_error_rate() }
}

/// Output of the attention model over a random target lexicon for one
/// fold, together with the lexicon bootstrapped from its alignments.
struct Anchor {
    metrics: Metrics,
    lexicon: EmbeddingTable,
}

fn run_anchor(exp: &Experiment, data: &FoldData, hidden_dim: usize, fold: usize) -> Result<Anchor> {
    let config = exp.config(Variant::Attention, hidden_dim, fold);
    let random = random_embeddings(&exp.dataset.target_vocab, config.input_dim, config.seed);
    let (metrics, params) = train_and_score(exp, data, &config, &random)?;
    let boot = bootstrap_from_model(&params, &data.train, &exp.source_table, &exp.keywords, config.seed)?;
    Ok(Anchor { metrics, lexicon: boot.lexicon })
}

fn run_fold(
    exp: &Experiment,
    data: &FoldData,
    cell: GridCell,
    fold: usize,
    anchor: Option<&Anchor>,
) -> Result<Metrics> {
    let config = exp.config(cell.variant, cell.hidden_dim, fold);
    let lexicon = match (cell.method, anchor) {
        (Method::OurApp, Some(a)) => a.lexicon.clone(),
        (Method::OurApp, None) => return Err(Error::Input("OUR-APP fold without an alignment run".into())),
        (Method::Random, _) => random_embeddings(&exp.dataset.target_vocab, config.input_dim, config.seed),
        (m, _) => corpus_lexicon(m, &data.train, config.input_dim, config.seed)?,
    };
    Ok(train_and_score(exp, data, &config, &lexicon)?.0)
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Input(format!("thread pool: {e}")))
}

/// k-fold cross-validation of a single cell.
pub fn run_cross_validation(exp: &Experiment, cell: GridCell) -> Result<CellResult> {
    Ok(run_grid(exp, &[cell])?.remove(0))
}

/// Cross-validates every cell, up to `exp.jobs` folds at a time.
///
/// The attention model trained over random target vectors in a fold serves
/// both as the RANDOM attention result and as the alignment source for that
/// fold's OUR-APP lexicon, so it is trained once per hidden size.
pub fn run_grid(exp: &Experiment, cells: &[GridCell]) -> Result<Vec<CellResult>> {
    exp.check()?;
    if cells.is_empty() {
        return Err(Error::Input("no grid cells to run".into()));
    }
    let folds = fold_data(exp)?;
    let needs_anchor =
        |c: &GridCell| c.method == Method::OurApp || (c.method == Method::Random && c.variant == Variant::Attention);
    let mut anchor_dims: Vec<usize> = cells.iter().filter(|c| needs_anchor(c)).map(|c| c.hidden_dim).collect();
    anchor_dims.sort_unstable();
    anchor_dims.dedup();

    let pool = pool(exp.jobs)?;
    let anchor_tasks: Vec<(usize, usize)> =
        anchor_dims.iter().flat_map(|&h| (0..exp.folds).map(move |f| (h, f))).collect();
    let anchors: BTreeMap<(usize, usize), Anchor> = pool.install(|| {
        anchor_tasks
            .par_iter()
            .map(|&(h, f)| run_anchor(exp, &folds[f], h, f).map(|a| ((h, f), a)))
            .collect::<Result<_>>()
    })?;

    let mut unique: Vec<GridCell> = cells.to_vec();
    unique.sort_unstable();
    unique.dedup();
    let fold_tasks: Vec<(GridCell, usize)> = unique
        .iter()
        .filter(|c| !(c.method == Method::Random && c.variant == Variant::Attention))
        .flat_map(|&c| (0..exp.folds).map(move |f| (c, f)))
        .collect();
    let mut done: BTreeMap<(GridCell, usize), Metrics> = pool.install(|| {
        fold_tasks
            .par_iter()
            .map(|&(c, f)| run_fold(exp, &folds[f], c, f, anchors.get(&(c.hidden_dim, f))).map(|m| ((c, f), m)))
            .collect::<Result<_>>()
    })?;
    for (&(h, f), a) in &anchors {
        done.insert((GridCell::new(Variant::Attention, h, Method::Random), f), a.metrics);
    }

    Ok(cells
        .iter()
        .map(|&c| {
            let per_fold = (0..exp.folds).map(|f| fold_metrics(f, done[&(c, f)])).collect();
            CellResult::from_folds(c, per_fold)
        })
        .collect())
}
