use std::path::Path;

use crate::corpus::{Dataset, Vocabulary};
use crate::error::{Error, Result};
use crate::nn::Matrix;
use crate::seq2seq::{teacher_forced_attention, ModelParams, Variant};

/// Attention mass accumulated between source rows and target columns.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentMatrix {
    pub source_vocab: Vocabulary,
    pub target_vocab: Vocabulary,
    /// `|S| x |T|`
    pub values: Matrix,
}

impl AlignmentMatrix {
    pub fn new(source_vocab: Vocabulary, target_vocab: Vocabulary, values: Matrix) -> Result<Self> {
        if values.shape() != (source_vocab.len(), target_vocab.len()) {
            return Err(Error::Shape(format!(
                "alignment values {:?} for vocabularies of {} and {}",
                values.shape(),
                source_vocab.len(),
                target_vocab.len()
            )));
        }
        if values.as_slice().iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Numerics("alignment values must be finite and non-negative".into()));
        }
        Ok(AlignmentMatrix { source_vocab, target_vocab, values })
    }

    pub fn column_total(&self, target_id: usize) -> f64 {
        (0..self.values.rows()).map(|s| self.values.get(s, target_id)).sum()
    }

    /// Header row of target tokens, then one row per source token.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.target_vocab.tokens().iter().map(|t| t.to_string()));
        w.write_record(&header).map_err(csv_error)?;
        for (s, tok) in self.source_vocab.tokens().iter().enumerate() {
            let mut row = vec![tok.to_string()];
            row.extend(self.values.row(s).iter().map(|v| v.to_string()));
            w.write_record(&row).map_err(csv_error)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8 records"))
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?).map_err(|e| Error::io(path, e))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Sums teacher-forced attention over `dataset`: every step that emits gold
/// token `t` adds its weight on each source position's token `s` to `[s][t]`.
pub fn accumulate_alignment(params: &ModelParams, dataset: &Dataset) -> Result<AlignmentMatrix> {
    if params.variant != Variant::Attention {
        return Err(Error::Variant { expected: "attention" });
    }
    let (ns, nt) = (dataset.source_vocab.len(), dataset.target_vocab.len());
    if params.source_vocab_size() != ns || params.target_vocab_size() != nt {
        return Err(Error::Shape(format!(
            "model vocabularies ({}, {}) differ from the dataset's ({ns}, {nt})",
            params.source_vocab_size(),
            params.target_vocab_size()
        )));
    }
    let mut values = Matrix::zeros(ns, nt);
    for (source, target) in dataset.encoded() {
        let record = teacher_forced_attention(params, &source, &target)?;
        for (i, &t) in target.iter().enumerate() {
            for (&s, &a) in source.iter().zip(record.row(i)) {
                values.set(s, t, values.get(s, t) + a);
            }
        }
    }
    AlignmentMatrix::new(dataset.source_vocab.clone(), dataset.target_vocab.clone(), values)
}
