use crate::error::{Error, Result};

/// Probabilities are clamped to this before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// Softmax with max-subtraction.
pub fn softmax(v: &[f64]) -> Vec<f64> {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = v.iter().map(|x| (x - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    out.iter_mut().for_each(|x| *x /= sum);
    out
}

/// `-ln(dist[target])`, with the probability clamped below at [`PROB_FLOOR`].
pub fn cross_entropy(dist: &[f64], target: usize) -> Result<f64> {
    let p = dist.get(target).ok_or(Error::Index { index: target, len: dist.len() })?;
    Ok(-p.max(PROB_FLOOR).ln())
}

pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}
