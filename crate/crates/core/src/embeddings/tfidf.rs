use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};

use super::table::{random_embeddings, EmbeddingTable};
use crate::corpus::{Token, TokenSequence, Vocabulary};
use crate::error::{Error, Result};
use crate::nn::Matrix;

/// Raw term counts; one column per document.
#[derive(Clone, Debug, PartialEq)]
pub struct TermDocumentMatrix {
    /// Every distinct token of the corpus, in vocabulary order.
    pub terms: Vec<Token>,
    pub doc_count: usize,
    /// `terms x doc_count`
    pub counts: Matrix,
}

impl TermDocumentMatrix {
    pub fn row_of(&self, token: &Token) -> Option<usize> {
        self.terms.iter().position(|t| t == token)
    }

    pub fn count(&self, term: usize, doc: usize) -> f64 {
        self.counts.get(term, doc)
    }
}

pub fn build_term_document_matrix(corpus: &[TokenSequence]) -> TermDocumentMatrix {
    let vocab = Vocabulary::build(corpus);
    let mut present: Vec<bool> = vec![false; vocab.len()];
    for tok in corpus.iter().flat_map(|s| s.iter()) {
        present[vocab.id_of(tok).expect("built from this corpus")] = true;
    }
    let terms: Vec<Token> = vocab.tokens().iter().zip(&present).filter(|(_, &p)| p).map(|(t, _)| t.clone()).collect();
    let row: HashMap<&Token, usize> = terms.iter().enumerate().map(|(i, t)| (t, i)).collect();

    let mut counts = Matrix::zeros(terms.len(), corpus.len());
    for (doc, seq) in corpus.iter().enumerate() {
        for tok in seq.iter() {
            let r = row[tok];
            counts.set(r, doc, counts.get(r, doc) + 1.0);
        }
    }
    TermDocumentMatrix { terms, doc_count: corpus.len(), counts }
}

/// `tf(t, d) * ln(N / df(t))` with raw counts as tf.
pub fn apply_tfidf(m: &TermDocumentMatrix) -> Matrix {
    let n = m.doc_count as f64;
    let mut out = m.counts.clone();
    for t in 0..out.rows() {
        let df = m.counts.row(t).iter().filter(|&&c| c > 0.0).count();
        let idf = if df == 0 { 0.0 } else { (n / df as f64).ln() };
        out.row_mut(t).iter_mut().for_each(|v| *v *= idf);
    }
    out
}

/// Principal axes of a `rows x cols` matrix whose rows are observations.
#[derive(Clone, Debug)]
pub struct PrincipalAxes {
    /// `cols x dim`, one unit axis per column, by descending eigenvalue.
    pub axes: Matrix,
    pub eigenvalues: Vec<f64>,
}

/// Eigendecomposition of the covariance of the mean-centred columns.
///
/// Each axis is oriented so that its largest-magnitude component is positive.
pub fn principal_axes(m: &Matrix, dim: usize) -> Result<PrincipalAxes> {
    let (rows, cols) = m.shape();
    if dim == 0 || dim > rows.min(cols) {
        return Err(Error::Dimension(format!("cannot take {dim} components from a {rows}x{cols} matrix")));
    }
    let mut centred = DMatrix::from_row_slice(rows, cols, m.as_slice());
    for mut column in centred.column_iter_mut() {
        let mean = column.mean();
        column.add_scalar_mut(-mean);
    }
    let denom = (rows.max(2) - 1) as f64;
    let covariance = (centred.transpose() * &centred) / denom;
    let eigen = SymmetricEigen::new(covariance);

    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| {
        eigen.eigenvalues[b].partial_cmp(&eigen.eigenvalues[a]).expect("finite eigenvalues").then(a.cmp(&b))
    });

    let mut axes = Matrix::zeros(cols, dim);
    let mut eigenvalues = Vec::with_capacity(dim);
    for (k, &src) in order.iter().take(dim).enumerate() {
        let v = eigen.eigenvectors.column(src);
        let pivot = v.iter().copied().fold(0.0f64, |best, x| if x.abs() > best.abs() { x } else { best });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for r in 0..cols {
            axes.set(r, k, sign * v[r]);
        }
        eigenvalues.push(eigen.eigenvalues[src]);
    }
    Ok(PrincipalAxes { axes, eigenvalues })
}

/// Projects each row onto the top `dim` principal axes.
///
/// The axes come from the centred data; the rows themselves are projected
/// as given, so `project(m) * axes^T` reconstructs `m` exactly once the axes
/// span the row space.
pub fn pca_reduce(m: &Matrix, dim: usize) -> Result<Matrix> {
    let pa = principal_axes(m, dim)?;
    Ok(project(m, &pa.axes))
}

pub fn project(m: &Matrix, axes: &Matrix) -> Matrix {
    let dim = axes.cols();
    let mut out = Matrix::zeros(m.rows(), dim);
    for r in 0..m.rows() {
        let row = m.row(r);
        for k in 0..dim {
            let mut acc = 0.0;
            for (c, x) in row.iter().enumerate() {
                acc += x * axes.get(c, k);
            }
            out.set(r, k, acc);
        }
    }
    out
}

/// TF-IDF rows reduced by PCA, one per corpus token, laid out over `vocab`.
///
/// When the corpus supports fewer than `dim` components, the trailing
/// columns are zero. Vocabulary tokens missing from the corpus get seeded
/// truncated-normal vectors.
pub fn tfidf_pca_embeddings(
    corpus: &[TokenSequence],
    vocab: &Vocabulary,
    dim: usize,
    seed: u64,
) -> Result<EmbeddingTable> {
    if corpus.is_empty() {
        return Err(Error::Input("TF-IDF needs at least one document".into()));
    }
    let tdm = build_term_document_matrix(corpus);
    let weighted = apply_tfidf(&tdm);
    let k = dim.min(weighted.rows()).min(weighted.cols());
    let reduced = pca_reduce(&weighted, k)?;

    let mut table = random_embeddings(vocab, dim, seed);
    for (r, term) in tdm.terms.iter().enumerate() {
        if let Some(id) = vocab.id_of(term) {
            let row = table.vectors.row_mut(id);
            row.fill(0.0);
            row[..k].copy_from_slice(reduced.row(r));
        }
    }
    table.zero_padding();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Role;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn docs(raw: &[&[&str]]) -> Vec<TokenSequence> {
        raw.iter().map(|d| TokenSequence::from_strs(d, Role::Target)).collect()
    }

    #[test]
    fn counts_terms_per_document() {
        let m = build_term_document_matrix(&docs(&[&["a", "b", "a"], &["a"]]));
        assert_eq!(m.doc_count, 2);
        let a = m.row_of(&Token::new("a").unwrap()).unwrap();
        let b = m.row_of(&Token::new("b").unwrap()).unwrap();
        assert_eq!(m.counts.row(a), &[2.0, 1.0]);
        assert_eq!(m.counts.row(b), &[1.0, 0.0]);

        let single = build_term_document_matrix(&docs(&[&["x"]]));
        assert_eq!(single.counts.shape(), (1, 1));
        assert_eq!(single.count(0, 0), 1.0);
    }

    #[test]
    fn tfidf_weights() {
        let m = build_term_document_matrix(&docs(&[&["a", "b", "a"], &["a"]]));
        let w = apply_tfidf(&m);
        let a = m.row_of(&Token::new("a").unwrap()).unwrap();
        let b = m.row_of(&Token::new("b").unwrap()).unwrap();
        assert_eq!(w.row(a), &[0.0, 0.0]);
        assert_abs_diff_eq!(w.get(b, 0), 0.6931, epsilon = 1e-4);
        assert_eq!(w.get(b, 1), 0.0);
    }

    #[test]
    fn empty_document_gives_zero_column() {
        let mut corpus = docs(&[&["a", "b"], &["b", "c"]]);
        corpus.push(TokenSequence::new(vec![], Role::Target));
        let m = build_term_document_matrix(&corpus);
        let w = apply_tfidf(&m);
        assert!((0..w.rows()).all(|t| w.get(t, 2) == 0.0));
    }

    #[test]
    fn collinear_rows_project_onto_diagonal() {
        let m = Matrix::from_vec(3, 2, vec![1.0, 1.0, -1.0, -1.0, 2.0, 2.0]).unwrap();
        let p = pca_reduce(&m, 1).unwrap();
        let s = std::f64::consts::SQRT_2;
        for (got, want) in p.as_slice().iter().zip([s, -s, 2.0 * s]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn dimension_too_large() {
        let m = Matrix::zeros(3, 2);
        assert!(matches!(pca_reduce(&m, 3), Err(Error::Dimension(_))));
        assert!(matches!(pca_reduce(&m, 0), Err(Error::Dimension(_))));
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_vec(rows, cols, (0..rows * cols).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    fn reconstruct(projected: &Matrix, axes: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(projected.rows(), axes.rows());
        for r in 0..projected.rows() {
            for c in 0..axes.rows() {
                let v = (0..axes.cols()).map(|k| projected.get(r, k) * axes.get(c, k)).sum();
                out.set(r, c, v);
            }
        }
        out
    }

    #[test]
    fn full_rank_reconstruction() {
        let m = random_matrix(20, 20, 4);
        let pa = principal_axes(&m, 20).unwrap();
        let back = reconstruct(&project(&m, &pa.axes), &pa.axes);
        let err: f64 = m.as_slice().iter().zip(back.as_slice()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err / m.squared_norm().sqrt() <= 1e-8);
    }

    #[test]
    fn sign_convention() {
        let pa = principal_axes(&random_matrix(15, 6, 8), 4).unwrap();
        for k in 0..4 {
            let col: Vec<f64> = (0..6).map(|r| pa.axes.get(r, k)).collect();
            let pivot = col.iter().copied().fold(0.0f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(pivot > 0.0);
        }
        assert!(pa.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn table_covers_vocabulary() {
        let corpus = docs(&[&["a", "b", "c"], &["a", "d"], &["b", "b", "e"]]);
        let vocab = Vocabulary::build(&corpus);
        let table = tfidf_pca_embeddings(&corpus, &vocab, 5, 1).unwrap();
        assert_eq!(table.len(), vocab.len());
        assert_eq!(table.dim(), 5);
        table.validate().unwrap();
        // only three documents: columns beyond the third are empty for corpus terms
        let a = table.vector_of("a").unwrap();
        assert!(a[3..].iter().all(|&v| v == 0.0));
    }

    proptest! {
        #[test]
        fn axes_are_orthonormal(rows in 4usize..15, cols in 2usize..8, seed: u64) {
            let m = random_matrix(rows, cols, seed);
            let dim = rows.min(cols);
            let pa = principal_axes(&m, dim).unwrap();
            for i in 0..dim {
                for j in 0..dim {
                    let d: f64 = (0..cols).map(|r| pa.axes.get(r, i) * pa.axes.get(r, j)).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((d - want).abs() <= 1e-8);
                }
            }
        }

        #[test]
        fn tfidf_keeps_zero_pattern(seed: u64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let words = ["p", "q", "r", "s"];
            let corpus: Vec<TokenSequence> = (0..5)
                .map(|_| {
                    let n = rng.gen_range(0..6);
                    let toks: Vec<&str> = (0..n).map(|_| words[rng.gen_range(0..4)]).collect();
                    TokenSequence::from_strs(&toks, Role::Target)
                })
                .collect();
            let m = build_term_document_matrix(&corpus);
            let w = apply_tfidf(&m);
            for t in 0..w.rows() {
                for d in 0..w.cols() {
                    if m.count(t, d) == 0.0 {
                        prop_assert_eq!(w.get(t, d), 0.0);
                    }
                }
            }
        }
    }
}
