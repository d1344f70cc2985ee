//! LSTM encoder-decoder in two variants: a plain model conditioned on a
//! single source summary and an attention model over bidirectional
//! annotations. Gradients are derived by hand.

mod checkpoint;
mod model;
mod params;
mod train;

pub use checkpoint::{Checkpoint, FORMAT_VERSION};
pub use model::{
    attend, decode_step, encode, initial_state, loss_and_gradient, score, teacher_forced_attention, translate,
    Annotations, AttentionRecord, DecoderState, Frozen, Translation,
};
pub use params::{AttentionParams, ModelParams, Variant};
pub use train::{loss_curve_csv, train, train_examples, EpochStats, ModelConfig};

/// Greedy decoding length limit when none is given.
pub const DEFAULT_MAX_LEN: usize = 128;
