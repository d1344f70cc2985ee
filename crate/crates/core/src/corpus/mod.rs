//! Paired English/SPARQL data: tokenization, vocabularies, loading and
//! cross-validation folds.

mod dataset;
mod folds;
pub mod geo;
mod token;
mod vocab;

pub use dataset::{load_dataset, parse_pairs, Dataset, ParallelExample};
pub use folds::{split_folds, FoldSplit};
pub use token::{
    tokenize_source, tokenize_target, Role, Token, TokenSequence, EOS, EOS_ID, PAD, PAD_ID, SOS, SOS_ID, SPECIALS, UNK,
    UNK_ID,
};
pub use vocab::Vocabulary;
