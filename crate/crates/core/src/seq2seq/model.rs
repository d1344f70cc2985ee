use crate::corpus::{EOS_ID, SOS_ID};
use crate::error::{Error, Result};
use crate::nn::linalg::{axpy, dot};
use crate::nn::{argmax, softmax, LstmCache, Matrix, ParamSet};

use super::params::{AttentionParams, ModelParams, Variant};

/// Smallest probability a log-likelihood is evaluated at.
const LOG_FLOOR: f64 = 1e-12;

/// Encoder output: one `[forward; backward]` vector per source position for
/// the attention variant, a single summary vector for the plain variant.
#[derive(Clone, Debug, PartialEq)]
pub struct Annotations {
    pub vectors: Vec<Vec<f64>>,
}

impl Annotations {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

/// Attention weights: rows are decoder steps, columns source positions.
#[derive(Clone, Debug, PartialEq)]
pub struct AttentionRecord {
    pub weights: Matrix,
}

impl AttentionRecord {
    fn from_rows(rows: &[Vec<f64>], source_len: usize) -> Self {
        let data = rows.iter().flatten().copied().collect();
        AttentionRecord { weights: Matrix::from_vec(rows.len(), source_len, data).expect("rows share a width") }
    }

    pub fn steps(&self) -> usize {
        self.weights.rows()
    }

    pub fn source_len(&self) -> usize {
        self.weights.cols()
    }

    pub fn row(&self, step: usize) -> &[f64] {
        self.weights.row(step)
    }
}

/// Greedy decoding result. `ids` excludes the closing EOS; `truncated` is set
/// when `max_len` tokens were produced without reaching it.
#[derive(Clone, Debug, PartialEq)]
pub struct Translation {
    pub ids: Vec<usize>,
    pub attention: Option<AttentionRecord>,
    pub truncated: bool,
}

fn check_ids(ids: &[usize], len: usize) -> Result<()> {
    match ids.iter().find(|&&id| id >= len) {
        Some(&index) => Err(Error::Index { index, len }),
        None => Ok(()),
    }
}

struct EncoderTrace {
    forward: Vec<LstmCache>,
    /// Indexed by source position, not by processing order.
    backward: Vec<LstmCache>,
    annotations: Annotations,
}

fn run_encoder(params: &ModelParams, source: &[usize]) -> Result<EncoderTrace> {
    if source.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_ids(source, params.source_vocab_size())?;
    let h = params.hidden_dim();
    let emb = &params.source_embedding;

    let mut forward = Vec::with_capacity(source.len());
    let (mut hs, mut cs) = (vec![0.0; h], vec![0.0; h]);
    for &id in source {
        let cache = params.forward_encoder.forward(emb.row(id), &hs, &cs)?;
        hs.clone_from(&cache.h);
        cs.clone_from(&cache.c);
        forward.push(cache);
    }

    let Some(cell) = &params.backward_encoder else {
        let summary = forward.last().expect("non-empty").h.clone();
        return Ok(EncoderTrace { forward, backward: Vec::new(), annotations: Annotations { vectors: vec![summary] } });
    };

    let mut backward = Vec::with_capacity(source.len());
    let (mut hs, mut cs) = (vec![0.0; h], vec![0.0; h]);
    for &id in source.iter().rev() {
        let cache = cell.forward(emb.row(id), &hs, &cs)?;
        hs.clone_from(&cache.h);
        cs.clone_from(&cache.c);
        backward.push(cache);
    }
    backward.reverse();

    let vectors = forward.iter().zip(&backward).map(|(f, b)| [f.h.as_slice(), b.h.as_slice()].concat()).collect();
    Ok(EncoderTrace { forward, backward, annotations: Annotations { vectors } })
}

/// Runs the encoder over `source`.
pub fn encode(params: &ModelParams, source: &[usize]) -> Result<Annotations> {
    Ok(run_encoder(params, source)?.annotations)
}

/// Vector the initial decoder state is computed from: the backward half of
/// the first annotation, or the plain summary.
fn init_input(params: &ModelParams, annotations: &Annotations) -> Vec<f64> {
    let h = params.hidden_dim();
    match params.variant {
        Variant::Attention => annotations.vectors[0][h..].to_vec(),
        Variant::Plain => annotations.vectors[0].clone(),
    }
}

/// `s_0 = tanh(W_init u + b_init)` with a zero cell.
pub fn initial_state(params: &ModelParams, annotations: &Annotations) -> Result<DecoderState> {
    let u = init_input(params, annotations);
    if u.len() != params.hidden_dim() {
        return Err(Error::Shape(format!(
            "encoder summary of length {} for hidden size {}",
            u.len(),
            params.hidden_dim()
        )));
    }
    Ok(DecoderState { h: start_hidden(params, &u), c: vec![0.0; params.hidden_dim()] })
}

fn start_hidden(params: &ModelParams, u: &[f64]) -> Vec<f64> {
    let mut pre = params.init_bias.as_slice().to_vec();
    params.init_weight.matvec_add(u, &mut pre);
    pre.iter().map(|v| v.tanh()).collect()
}

fn annotation_keys(att: &AttentionParams, annotations: &Annotations) -> Vec<Vec<f64>> {
    annotations.vectors.iter().map(|a| att.w_annotation.matvec(a)).collect()
}

/// Attention weights, context, and the per-position `tanh` activations.
struct Glimpse {
    alpha: Vec<f64>,
    context: Vec<f64>,
    hidden: Vec<Vec<f64>>,
}

fn glimpse(att: &AttentionParams, s_prev: &[f64], annotations: &Annotations, keys: &[Vec<f64>]) -> Glimpse {
    let query = att.w_state.matvec(s_prev);
    let v = att.v.as_slice();
    let hidden: Vec<Vec<f64>> =
        keys.iter().map(|k| k.iter().zip(&query).map(|(a, b)| (a + b).tanh()).collect()).collect();
    let scores: Vec<f64> = hidden.iter().map(|t| dot(v, t)).collect();
    let alpha = softmax(&scores);
    let mut context = vec![0.0; annotations.vectors[0].len()];
    for (a, h) in alpha.iter().zip(&annotations.vectors) {
        axpy(*a, h, &mut context);
    }
    Glimpse { alpha, context, hidden }
}

/// Soft alignment of the decoder state `s_prev` against every annotation.
pub fn attend(params: &ModelParams, s_prev: &[f64], annotations: &Annotations) -> Result<(Vec<f64>, Vec<f64>)> {
    let att = params.attention.as_ref().ok_or(Error::Variant { expected: "attention" })?;
    if s_prev.len() != params.hidden_dim() {
        return Err(Error::Shape(format!("decoder state of length {}", s_prev.len())));
    }
    if annotations.is_empty() || annotations.vectors.iter().any(|a| a.len() != 2 * params.hidden_dim()) {
        return Err(Error::Shape("annotations must be non-empty with length 2 x hidden".into()));
    }
    let keys = annotation_keys(att, annotations);
    let g = glimpse(att, s_prev, annotations, &keys);
    Ok((g.alpha, g.context))
}

fn decoder_input(params: &ModelParams, y_prev: usize, context: &[f64]) -> Result<Vec<f64>> {
    check_ids(&[y_prev], params.target_vocab_size())?;
    if context.len() != params.context_dim() {
        return Err(Error::Shape(format!(
            "context of length {}, decoder expects {}",
            context.len(),
            params.context_dim()
        )));
    }
    Ok([params.target_embedding.row(y_prev), context].concat())
}

fn output_distribution(params: &ModelParams, s: &[f64]) -> Vec<f64> {
    let mut logits = params.output_bias.as_slice().to_vec();
    params.output_weight.matvec_add(s, &mut logits);
    softmax(&logits)
}

/// One decoder step: new state and the distribution over the next token.
pub fn decode_step(
    params: &ModelParams,
    y_prev: usize,
    s_prev: &DecoderState,
    context: &[f64],
) -> Result<(DecoderState, Vec<f64>)> {
    let x = decoder_input(params, y_prev, context)?;
    let (h, c) = params.decoder.step(&x, &s_prev.h, &s_prev.c)?;
    let dist = output_distribution(params, &h);
    Ok((DecoderState { h, c }, dist))
}

/// Greedy decoding from SOS until EOS or `max_len` tokens.
pub fn translate(params: &ModelParams, source: &[usize], max_len: usize) -> Result<Translation> {
    if max_len == 0 {
        return Err(Error::Input("max_len must be at least 1".into()));
    }
    let annotations = encode(params, source)?;
    let keys = params.attention.as_ref().map(|att| annotation_keys(att, &annotations));
    let mut state = initial_state(params, &annotations)?;
    let mut y_prev = SOS_ID;
    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut truncated = false;
    loop {
        let context = match (&params.attention, &keys) {
            (Some(att), Some(keys)) => {
                let g = glimpse(att, &state.h, &annotations, keys);
                rows.push(g.alpha);
                g.context
            }
            _ => annotations.vectors[0].clone(),
        };
        let (next, dist) = decode_step(params, y_prev, &state, &context)?;
        state = next;
        let y = argmax(&dist);
        if y == EOS_ID {
            break;
        }
        ids.push(y);
        if ids.len() == max_len {
            truncated = true;
            break;
        }
        y_prev = y;
    }
    let attention = keys.map(|_| AttentionRecord::from_rows(&rows, source.len()));
    Ok(Translation { ids, attention, truncated })
}

/// Per-step quantities kept for backpropagation.
struct StepTrace {
    y_prev: usize,
    s_prev: Vec<f64>,
    cache: LstmCache,
    dist: Vec<f64>,
    glimpse: Option<Glimpse>,
}

/// Teacher-forced forward pass over one pair.
struct PairTrace {
    encoder: EncoderTrace,
    keys: Vec<Vec<f64>>,
    init_input: Vec<f64>,
    s0: Vec<f64>,
    steps: Vec<StepTrace>,
    log_likelihood: f64,
}

fn teacher_forced(params: &ModelParams, source: &[usize], target: &[usize]) -> Result<PairTrace> {
    if target.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_ids(target, params.target_vocab_size())?;
    let encoder = run_encoder(params, source)?;
    let keys = params.attention.as_ref().map(|att| annotation_keys(att, &encoder.annotations)).unwrap_or_default();
    let u = init_input(params, &encoder.annotations);
    let s0 = start_hidden(params, &u);
    let h = params.hidden_dim();

    let mut steps = Vec::with_capacity(target.len());
    let (mut s, mut c) = (s0.clone(), vec![0.0; h]);
    let mut log_likelihood = 0.0;
    for (i, &y) in target.iter().enumerate() {
        let y_prev = if i == 0 { SOS_ID } else { target[i - 1] };
        let glimpse = params.attention.as_ref().map(|att| glimpse(att, &s, &encoder.annotations, &keys));
        let context = match &glimpse {
            Some(g) => g.context.as_slice(),
            None => encoder.annotations.vectors[0].as_slice(),
        };
        let x = decoder_input(params, y_prev, context)?;
        let cache = params.decoder.forward(&x, &s, &c)?;
        let dist = output_distribution(params, &cache.h);
        log_likelihood += dist[y].max(LOG_FLOOR).ln();
        let s_prev = std::mem::replace(&mut s, cache.h.clone());
        c.clone_from(&cache.c);
        steps.push(StepTrace { y_prev, s_prev, cache, dist, glimpse });
    }
    Ok(PairTrace { encoder, keys, init_input: u, s0, steps, log_likelihood })
}

/// `log p(target | source)` under teacher forcing; `target` includes EOS.
pub fn score(params: &ModelParams, source: &[usize], target: &[usize]) -> Result<f64> {
    Ok(teacher_forced(params, source, target)?.log_likelihood)
}

/// Attention weights observed while feeding the gold target.
pub fn teacher_forced_attention(params: &ModelParams, source: &[usize], target: &[usize]) -> Result<AttentionRecord> {
    if params.variant != Variant::Attention {
        return Err(Error::Variant { expected: "attention" });
    }
    let trace = teacher_forced(params, source, target)?;
    let rows: Vec<Vec<f64>> = trace.steps.into_iter().map(|s| s.glimpse.expect("attention variant").alpha).collect();
    Ok(AttentionRecord::from_rows(&rows, source.len()))
}

/// Which embedding tables receive gradient.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Frozen {
    pub source: bool,
    pub target: bool,
}

/// Summed token cross-entropy of one pair and its gradient.
pub fn loss_and_gradient(
    params: &ModelParams,
    source: &[usize],
    target: &[usize],
    frozen: Frozen,
) -> Result<(f64, ModelParams)> {
    let trace = teacher_forced(params, source, target)?;
    let mut grads = params.zeros_like();
    backpropagate(params, &trace, source, target, frozen, &mut grads);
    Ok((-trace.log_likelihood, grads))
}

fn backpropagate(
    params: &ModelParams,
    trace: &PairTrace,
    source: &[usize],
    target: &[usize],
    frozen: Frozen,
    grads: &mut ModelParams,
) {
    let h = params.hidden_dim();
    let in_dim = params.input_dim();
    let annotations = &trace.encoder.annotations.vectors;
    let n_src = source.len();
    let ann_dim = annotations[0].len();

    let mut d_annotations = vec![vec![0.0; ann_dim]; annotations.len()];
    let mut d_keys = vec![vec![0.0; h]; trace.keys.len()];
    let mut dh_next = vec![0.0; h];
    let mut dc_next = vec![0.0; h];

    for (step, &y) in trace.steps.iter().zip(target).rev() {
        let mut dlogits = step.dist.clone();
        dlogits[y] -= 1.0;
        grads.output_weight.add_outer(1.0, &dlogits, &step.cache.h);
        axpy(1.0, &dlogits, grads.output_bias.as_mut_slice());
        let mut dh = dh_next;
        params.output_weight.matvec_t_add(&dlogits, &mut dh);

        let mut dx = vec![0.0; in_dim + ann_dim];
        let mut dh_prev = vec![0.0; h];
        let mut dc_prev = vec![0.0; h];
        params.decoder.backward(&step.cache, &dh, &dc_next, &mut grads.decoder, &mut dx, &mut dh_prev, &mut dc_prev);
        if !frozen.target {
            axpy(1.0, &dx[..in_dim], grads.target_embedding.row_mut(step.y_prev));
        }
        let dcontext = &dx[in_dim..];

        match (&step.glimpse, &params.attention, &mut grads.attention) {
            (Some(g), Some(att), Some(gatt)) => {
                let dalpha: Vec<f64> = annotations.iter().map(|a| dot(dcontext, a)).collect();
                for (da, &a) in d_annotations.iter_mut().zip(&g.alpha) {
                    axpy(a, dcontext, da);
                }
                let mean = dot(&g.alpha, &dalpha);
                let v = att.v.as_slice();
                let mut dquery = vec![0.0; h];
                for j in 0..n_src {
                    let de = g.alpha[j] * (dalpha[j] - mean);
                    if de == 0.0 {
                        continue;
                    }
                    let t = &g.hidden[j];
                    axpy(de, t, gatt.v.as_mut_slice());
                    for k in 0..h {
                        let du = de * v[k] * (1.0 - t[k] * t[k]);
                        d_keys[j][k] += du;
                        dquery[k] += du;
                    }
                }
                gatt.w_state.add_outer(1.0, &dquery, &step.s_prev);
                att.w_state.matvec_t_add(&dquery, &mut dh_prev);
            }
            _ => axpy(1.0, dcontext, &mut d_annotations[0]),
        }
        dh_next = dh_prev;
        dc_next = dc_prev;
    }

    // s_0 = tanh(W_init u + b_init); the initial cell is constant.
    let dpre: Vec<f64> = dh_next.iter().zip(&trace.s0).map(|(d, s)| d * (1.0 - s * s)).collect();
    grads.init_weight.add_outer(1.0, &dpre, &trace.init_input);
    axpy(1.0, &dpre, grads.init_bias.as_mut_slice());
    let mut du = vec![0.0; h];
    params.init_weight.matvec_t_add(&dpre, &mut du);

    if let (Some(att), Some(gatt)) = (&params.attention, &mut grads.attention) {
        for (j, dk) in d_keys.iter().enumerate() {
            gatt.w_annotation.add_outer(1.0, dk, &annotations[j]);
            att.w_annotation.matvec_t_add(dk, &mut d_annotations[j]);
        }
        axpy(1.0, &du, &mut d_annotations[0][h..]);
    } else {
        axpy(1.0, &du, &mut d_annotations[0]);
    }

    // Forward encoder, right to left.
    let fwd_out = |j: usize| -> &[f64] {
        match params.variant {
            Variant::Attention => &d_annotations[j][..h],
            Variant::Plain if j + 1 == n_src => &d_annotations[0],
            Variant::Plain => &[],
        }
    };
    let mut dh_carry = vec![0.0; h];
    let mut dc_carry = vec![0.0; h];
    let mut dx = vec![0.0; in_dim];
    for j in (0..n_src).rev() {
        let mut dh = dh_carry.clone();
        let out = fwd_out(j);
        if !out.is_empty() {
            axpy(1.0, out, &mut dh);
        }
        dx.fill(0.0);
        let mut dh_prev = vec![0.0; h];
        let mut dc_prev = vec![0.0; h];
        params.forward_encoder.backward(
            &trace.encoder.forward[j],
            &dh,
            &dc_carry,
            &mut grads.forward_encoder,
            &mut dx,
            &mut dh_prev,
            &mut dc_prev,
        );
        if !frozen.source {
            axpy(1.0, &dx, grads.source_embedding.row_mut(source[j]));
        }
        dh_carry = dh_prev;
        dc_carry = dc_prev;
    }

    // Backward encoder ran right to left, so its gradient flows left to right.
    if let (Some(cell), Some(gcell)) = (&params.backward_encoder, &mut grads.backward_encoder) {
        let mut dh_carry = vec![0.0; h];
        let mut dc_carry = vec![0.0; h];
        for j in 0..n_src {
            let mut dh = dh_carry.clone();
            axpy(1.0, &d_annotations[j][h..], &mut dh);
            dx.fill(0.0);
            let mut dh_prev = vec![0.0; h];
            let mut dc_prev = vec![0.0; h];
            cell.backward(&trace.encoder.backward[j], &dh, &dc_carry, gcell, &mut dx, &mut dh_prev, &mut dc_prev);
            if !frozen.source {
                axpy(1.0, &dx, grads.source_embedding.row_mut(source[j]));
            }
            dh_carry = dh_prev;
            dc_carry = dc_prev;
        }
    }
}
