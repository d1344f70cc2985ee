//! Corpus-level attention alignment, greatest-correlation vocabulary
//! matching, and the target lexicon built from it.

mod lexicon;
mod matrix;
mod pipeline;

pub use lexicon::{bootstrap_lexicon, match_vocabulary, KeywordMap, MatchEntry, MatchStatus, MatchingDictionary};
pub use matrix::{accumulate_alignment, AlignmentMatrix};
pub use pipeline::{bootstrap_from_model, bootstrap_from_scratch, Bootstrap};
