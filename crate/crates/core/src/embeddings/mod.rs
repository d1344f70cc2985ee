//! Vector tables for the source and target lexicons: seeded random,
//! TF-IDF reduced by PCA, skip-gram, and pretrained vector files.

mod skipgram;
mod table;
mod tfidf;

pub use skipgram::{skipgram_embeddings, SkipGramConfig};
pub use table::{
    load_pretrained, parse_vector_file, pretrained_from_text, random_embeddings, truncated_normal, EmbeddingTable,
};
pub use tfidf::{
    apply_tfidf, build_term_document_matrix, pca_reduce, principal_axes, project, tfidf_pca_embeddings, PrincipalAxes,
    TermDocumentMatrix,
};
