use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embeddings::EmbeddingTable;
use crate::error::{Error, Result};
use crate::nn::{LstmCell, Matrix, ParamSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Unidirectional encoder whose final state conditions every decoder step.
    Plain,
    /// Bidirectional encoder with soft attention over its annotations.
    Attention,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Attention => "attention",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Variant::Plain),
            "attention" => Ok(Variant::Attention),
            other => Err(Error::Input(format!("unknown variant `{other}`"))),
        }
    }
}

/// Feedforward alignment scorer `v . tanh(W_s s + W_h h_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionParams {
    /// `a x hidden`
    pub w_state: Matrix,
    /// `a x 2 hidden`
    pub w_annotation: Matrix,
    /// `a x 1`
    pub v: Matrix,
}

/// All trainable weights of either model variant.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub variant: Variant,
    /// `|S| x input_dim`
    pub source_embedding: Matrix,
    /// `|T| x input_dim`
    pub target_embedding: Matrix,
    pub forward_encoder: LstmCell,
    /// Present only for the attention variant.
    pub backward_encoder: Option<LstmCell>,
    /// Input is `[embed(y_prev); context]`.
    pub decoder: LstmCell,
    /// Maps the encoder summary to the initial decoder state: `hidden x hidden`.
    pub init_weight: Matrix,
    pub init_bias: Matrix,
    /// Present only for the attention variant.
    pub attention: Option<AttentionParams>,
    /// `|T| x hidden`
    pub output_weight: Matrix,
    pub output_bias: Matrix,
}

impl ModelParams {
    /// Fresh parameters around the given lexicons.
    ///
    /// Recurrent and projection weights are Glorot-uniform, biases zero.
    pub fn init(
        variant: Variant,
        source: &EmbeddingTable,
        target: &EmbeddingTable,
        hidden_dim: usize,
        seed: u64,
    ) -> Result<Self> {
        let input_dim = source.dim();
        if target.dim() != input_dim {
            return Err(Error::Shape(format!("source lexicon has dimension {input_dim}, target {}", target.dim())));
        }
        if hidden_dim == 0 || input_dim == 0 {
            return Err(Error::Dimension("dimensions must be positive".into()));
        }
        let h = hidden_dim;
        let vocab_t = target.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let context_dim = match variant {
            Variant::Plain => h,
            Variant::Attention => 2 * h,
        };
        let forward_encoder = LstmCell::init(input_dim, h, &mut rng);
        let backward_encoder = (variant == Variant::Attention).then(|| LstmCell::init(input_dim, h, &mut rng));
        let decoder = LstmCell::init(input_dim + context_dim, h, &mut rng);
        let init_weight = Matrix::glorot(h, h, h, h, &mut rng);
        let attention = (variant == Variant::Attention).then(|| AttentionParams {
            w_state: Matrix::glorot(h, h, h, h, &mut rng),
            w_annotation: Matrix::glorot(h, 2 * h, 2 * h, h, &mut rng),
            v: Matrix::glorot(h, 1, h, 1, &mut rng),
        });
        let output_weight = Matrix::glorot(vocab_t, h, h, vocab_t, &mut rng);
        Ok(ModelParams {
            variant,
            source_embedding: source.vectors.clone(),
            target_embedding: target.vectors.clone(),
            forward_encoder,
            backward_encoder,
            decoder,
            init_weight,
            init_bias: Matrix::zeros(h, 1),
            attention,
            output_weight,
            output_bias: Matrix::zeros(vocab_t, 1),
        })
    }

    pub fn input_dim(&self) -> usize {
        self.source_embedding.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.forward_encoder.hidden_dim
    }

    pub fn source_vocab_size(&self) -> usize {
        self.source_embedding.rows()
    }

    pub fn target_vocab_size(&self) -> usize {
        self.target_embedding.rows()
    }

    /// Width of the context vector fed to the decoder.
    pub fn context_dim(&self) -> usize {
        match self.variant {
            Variant::Plain => self.hidden_dim(),
            Variant::Attention => 2 * self.hidden_dim(),
        }
    }
}

impl ParamSet for ModelParams {
    fn tensors(&self) -> Vec<(&'static str, &Matrix)> {
        let mut out = vec![
            ("source_embedding", &self.source_embedding),
            ("target_embedding", &self.target_embedding),
            ("forward_encoder.w_input", &self.forward_encoder.w_input),
            ("forward_encoder.w_hidden", &self.forward_encoder.w_hidden),
            ("forward_encoder.bias", &self.forward_encoder.bias),
        ];
        if let Some(cell) = &self.backward_encoder {
            out.push(("backward_encoder.w_input", &cell.w_input));
            out.push(("backward_encoder.w_hidden", &cell.w_hidden));
            out.push(("backward_encoder.bias", &cell.bias));
        }
        out.push(("decoder.w_input", &self.decoder.w_input));
        out.push(("decoder.w_hidden", &self.decoder.w_hidden));
        out.push(("decoder.bias", &self.decoder.bias));
        out.push(("init_weight", &self.init_weight));
        out.push(("init_bias", &self.init_bias));
        if let Some(att) = &self.attention {
            out.push(("attention.w_state", &att.w_state));
            out.push(("attention.w_annotation", &att.w_annotation));
            out.push(("attention.v", &att.v));
        }
        out.push(("output_weight", &self.output_weight));
        out.push(("output_bias", &self.output_bias));
        out
    }

    fn tensors_mut(&mut self) -> Vec<(&'static str, &mut Matrix)> {
        let mut out = vec![
            ("source_embedding", &mut self.source_embedding),
            ("target_embedding", &mut self.target_embedding),
            ("forward_encoder.w_input", &mut self.forward_encoder.w_input),
            ("forward_encoder.w_hidden", &mut self.forward_encoder.w_hidden),
            ("forward_encoder.bias", &mut self.forward_encoder.bias),
        ];
        if let Some(cell) = &mut self.backward_encoder {
            out.push(("backward_encoder.w_input", &mut cell.w_input));
            out.push(("backward_encoder.w_hidden", &mut cell.w_hidden));
            out.push(("backward_encoder.bias", &mut cell.bias));
        }
        out.push(("decoder.w_input", &mut self.decoder.w_input));
        out.push(("decoder.w_hidden", &mut self.decoder.w_hidden));
        out.push(("decoder.bias", &mut self.decoder.bias));
        out.push(("init_weight", &mut self.init_weight));
        out.push(("init_bias", &mut self.init_bias));
        if let Some(att) = &mut self.attention {
            out.push(("attention.w_state", &mut att.w_state));
            out.push(("attention.w_annotation", &mut att.w_annotation));
            out.push(("attention.v", &mut att.v));
        }
        out.push(("output_weight", &mut self.output_weight));
        out.push(("output_bias", &mut self.output_bias));
        out
    }
}
