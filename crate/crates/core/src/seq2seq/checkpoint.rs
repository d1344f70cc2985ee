//! Binary parameter container.
//!
//! Layout: the 8-byte magic `N2SPCKPT`, a little-endian `u32` format version,
//! a little-endian `u64` header length, a JSON header, then every tensor's
//! values as little-endian `f64` in header order.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::{ModelParams, Variant};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::nn::{LstmCell, Matrix, ParamSet};
use crate::seq2seq::params::AttentionParams;

const MAGIC: &[u8; 8] = b"N2SPCKPT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct TensorEntry {
    name: String,
    rows: usize,
    cols: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct Header {
    variant: Variant,
    input_dim: usize,
    hidden_dim: usize,
    source_vocab_size: usize,
    target_vocab_size: usize,
    source_vocab: Vocabulary,
    target_vocab: Vocabulary,
    manifest: serde_json::Value,
    tensors: Vec<TensorEntry>,
}

/// A trained model together with the vocabularies its ids refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub params: ModelParams,
    pub source_vocab: Vocabulary,
    pub target_vocab: Vocabulary,
    /// Free-form run description stored alongside the weights.
    pub manifest: serde_json::Value,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let p = &self.params;
        if self.source_vocab.len() != p.source_vocab_size() || self.target_vocab.len() != p.target_vocab_size() {
            return Err(Error::Shape("vocabulary sizes disagree with the embedding tables".into()));
        }
        let tensors = p.tensors();
        let header = Header {
            variant: p.variant,
            input_dim: p.input_dim(),
            hidden_dim: p.hidden_dim(),
            source_vocab_size: p.source_vocab_size(),
            target_vocab_size: p.target_vocab_size(),
            source_vocab: self.source_vocab.clone(),
            target_vocab: self.target_vocab.clone(),
            manifest: self.manifest.clone(),
            tensors: tensors
                .iter()
                .map(|(name, m)| TensorEntry { name: name.to_string(), rows: m.rows(), cols: m.cols() })
                .collect(),
        };
        let json = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
        let mut out = Vec::with_capacity(20 + json.len() + 8 * p.num_params());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(json.len() as u64).to_le_bytes());
        out.extend_from_slice(&json);
        for (_, m) in tensors {
            for v in m.as_slice() {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut reader = Reader { bytes, pos: 0 };
        if reader.take(8)? != MAGIC {
            return Err(Error::Format("not a checkpoint file".into()));
        }
        let version = u32::from_le_bytes(reader.take(4)?.try_into().expect("4 bytes"));
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported checkpoint version {version}")));
        }
        let len = u64::from_le_bytes(reader.take(8)?.try_into().expect("8 bytes")) as usize;
        let header: Header =
            serde_json::from_slice(reader.take(len)?).map_err(|e| Error::Format(format!("checkpoint header: {e}")))?;

        let mut params = skeleton(&header);
        {
            let mut slots = params.tensors_mut();
            if slots.len() != header.tensors.len() {
                return Err(Error::Format(format!(
                    "{} tensors listed, {} expected for the {} variant",
                    header.tensors.len(),
                    slots.len(),
                    header.variant.name()
                )));
            }
            for ((name, slot), entry) in slots.iter_mut().zip(&header.tensors) {
                if *name != entry.name || slot.shape() != (entry.rows, entry.cols) {
                    return Err(Error::Format(format!(
                        "tensor `{}` {}x{} does not fit slot `{name}` {:?}",
                        entry.name,
                        entry.rows,
                        entry.cols,
                        slot.shape()
                    )));
                }
                for v in slot.as_mut_slice() {
                    *v = f64::from_le_bytes(reader.take(8)?.try_into().expect("8 bytes"));
                }
            }
        }
        if reader.pos != bytes.len() {
            return Err(Error::Format("trailing bytes after the last tensor".into()));
        }
        if header.source_vocab.len() != header.source_vocab_size
            || header.target_vocab.len() != header.target_vocab_size
        {
            return Err(Error::Format("vocabulary sizes disagree with the header".into()));
        }
        Ok(Checkpoint {
            params,
            source_vocab: header.source_vocab,
            target_vocab: header.target_vocab,
            manifest: header.manifest,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

/// Zero parameters with the shapes the header describes.
fn skeleton(h: &Header) -> ModelParams {
    let (d, n) = (h.input_dim, h.hidden_dim);
    let attention = h.variant == Variant::Attention;
    let context = if attention { 2 * n } else { n };
    ModelParams {
        variant: h.variant,
        source_embedding: Matrix::zeros(h.source_vocab_size, d),
        target_embedding: Matrix::zeros(h.target_vocab_size, d),
        forward_encoder: LstmCell::zeros(d, n),
        backward_encoder: attention.then(|| LstmCell::zeros(d, n)),
        decoder: LstmCell::zeros(d + context, n),
        init_weight: Matrix::zeros(n, n),
        init_bias: Matrix::zeros(n, 1),
        attention: attention.then(|| AttentionParams {
            w_state: Matrix::zeros(n, n),
            w_annotation: Matrix::zeros(n, 2 * n),
            v: Matrix::zeros(n, 1),
        }),
        output_weight: Matrix::zeros(h.target_vocab_size, n),
        output_bias: Matrix::zeros(h.target_vocab_size, 1),
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| Error::Format("checkpoint is truncated".into()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Role, TokenSequence};
    use crate::embeddings::random_embeddings;

    fn checkpoint(variant: Variant) -> Checkpoint {
        let sv = Vocabulary::build(&[TokenSequence::from_strs(&["how", "big", "?"], Role::Source)]);
        let tv = Vocabulary::build(&[TokenSequence::from_strs(&["SELECT", "?x", "\"new york\""], Role::Target)]);
        let s = random_embeddings(&sv, 3, 1);
        let t = random_embeddings(&tv, 3, 2);
        let mut params = ModelParams::init(variant, &s, &t, 4, 5).unwrap();
        params.output_bias.set(1, 0, f64::MIN_POSITIVE);
        params.init_bias.set(0, 0, -0.1 + 1e-17);
        Checkpoint { params, source_vocab: sv, target_vocab: tv, manifest: serde_json::json!({ "seed": 5 }) }
    }

    #[test]
    fn bit_exact_round_trip() {
        for variant in [Variant::Plain, Variant::Attention] {
            let ck = checkpoint(variant);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.ckpt");
            ck.save(&path).unwrap();
            let back = Checkpoint::load(&path).unwrap();
            assert_eq!(back, ck);
            assert_eq!(back.to_bytes().unwrap(), ck.to_bytes().unwrap());
        }
    }

    #[test]
    fn corrupt_files_are_format_errors() {
        let bytes = checkpoint(Variant::Attention).to_bytes().unwrap();
        assert!(matches!(Checkpoint::from_bytes(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        assert!(matches!(Checkpoint::from_bytes(b"nonsense"), Err(Error::Format(_))));
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(matches!(Checkpoint::from_bytes(&extra), Err(Error::Format(_))));
        let mut wrong_version = bytes;
        wrong_version[8] = 9;
        assert!(matches!(Checkpoint::from_bytes(&wrong_version), Err(Error::Format(_))));
    }
}
