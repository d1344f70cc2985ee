//! Neural semantic parsing of English questions into SPARQL.
//!
//! The crate covers the whole pipeline: corpus handling, target-lexicon
//! construction, an LSTM encoder-decoder (with or without soft attention)
//! trained by backpropagation through time, attention-based vocabulary
//! matching, a SPARQL subset validator and cross-validated evaluation.

pub mod alignment;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod nn;
pub mod seq2seq;
pub mod sparql;

pub use error::{Error, Result};
