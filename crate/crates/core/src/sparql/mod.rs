//! Grammar check and canonical form for generated queries.

mod normalize;
mod validate;

pub use normalize::{canonical_text, normalize};
pub use validate::{validate, validate_tokens, ErrorKind, ValidationResult};
