use rand::Rng;
use serde::{Deserialize, Serialize};

use super::linalg::{sigmoid, Matrix};
use super::params::ParamSet;
use crate::error::{Error, Result};

/// LSTM cell weights. The four gates are stacked row-wise in the order
/// input, forget, output, candidate: rows `[k*h, (k+1)*h)` belong to gate `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmCell {
    pub input_dim: usize,
    pub hidden_dim: usize,
    /// `4h x input_dim`
    pub w_input: Matrix,
    /// `4h x h`
    pub w_hidden: Matrix,
    /// `4h x 1`
    pub bias: Matrix,
}

/// Everything the backward pass needs from one forward step.
#[derive(Clone, Debug)]
pub struct LstmCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    /// Activated gates, stacked like the weights.
    pub gates: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

impl LstmCell {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        LstmCell {
            input_dim,
            hidden_dim,
            w_input: Matrix::zeros(4 * hidden_dim, input_dim),
            w_hidden: Matrix::zeros(4 * hidden_dim, hidden_dim),
            bias: Matrix::zeros(4 * hidden_dim, 1),
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let h = hidden_dim;
        LstmCell {
            input_dim,
            hidden_dim,
            w_input: Matrix::glorot(4 * h, input_dim, input_dim, h, rng),
            w_hidden: Matrix::glorot(4 * h, h, h, h, rng),
            bias: Matrix::zeros(4 * h, 1),
        }
    }

    pub fn step(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let cache = self.forward(x, h_prev, c_prev)?;
        Ok((cache.h, cache.c))
    }

    pub fn forward(&self, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<LstmCache> {
        let h = self.hidden_dim;
        if x.len() != self.input_dim || h_prev.len() != h || c_prev.len() != h {
            return Err(Error::Shape(format!(
                "lstm cell ({}, {h}) given x={}, h={}, c={}",
                self.input_dim,
                x.len(),
                h_prev.len(),
                c_prev.len()
            )));
        }
        let mut gates = self.bias.as_slice().to_vec();
        self.w_input.matvec_add(x, &mut gates);
        self.w_hidden.matvec_add(h_prev, &mut gates);
        for v in &mut gates[..3 * h] {
            *v = sigmoid(*v);
        }
        for v in &mut gates[3 * h..] {
            *v = v.tanh();
        }
        let (i, rest) = gates.split_at(h);
        let (f, rest) = rest.split_at(h);
        let (o, g) = rest.split_at(h);
        let c: Vec<f64> = (0..h).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
        let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
        let h_out: Vec<f64> = (0..h).map(|k| o[k] * tanh_c[k]).collect();
        Ok(LstmCache { x: x.to_vec(), h_prev: h_prev.to_vec(), c_prev: c_prev.to_vec(), gates, c, tanh_c, h: h_out })
    }

    /// Backpropagates one step.
    ///
    /// `dh` and `dc` are the loss gradients w.r.t. this step's outputs.
    /// Weight gradients accumulate into `grads`; input and previous-state
    /// gradients accumulate into `dx`, `dh_prev` and `dc_prev`.
    #[allow(clippy::too_many_arguments)]
    pub fn backward(
        &self,
        cache: &LstmCache,
        dh: &[f64],
        dc: &[f64],
        grads: &mut LstmCell,
        dx: &mut [f64],
        dh_prev: &mut [f64],
        dc_prev: &mut [f64],
    ) {
        let h = self.hidden_dim;
        let g = &cache.gates;
        let mut dz = vec![0.0; 4 * h];
        for k in 0..h {
            let (i, f, o, cand) = (g[k], g[h + k], g[2 * h + k], g[3 * h + k]);
            let tc = cache.tanh_c[k];
            let dc_total = dc[k] + dh[k] * o * (1.0 - tc * tc);
            dz[k] = dc_total * cand * i * (1.0 - i);
            dz[h + k] = dc_total * cache.c_prev[k] * f * (1.0 - f);
            dz[2 * h + k] = dh[k] * tc * o * (1.0 - o);
            dz[3 * h + k] = dc_total * i * (1.0 - cand * cand);
            dc_prev[k] += dc_total * f;
        }
        grads.w_input.add_outer(1.0, &dz, &cache.x);
        grads.w_hidden.add_outer(1.0, &dz, &cache.h_prev);
        for (b, d) in grads.bias.as_mut_slice().iter_mut().zip(&dz) {
            *b += d;
        }
        self.w_input.matvec_t_add(&dz, dx);
        self.w_hidden.matvec_t_add(&dz, dh_prev);
    }
}

impl ParamSet for LstmCell {
    fn tensors(&self) -> Vec<(&'static str, &Matrix)> {
        vec![("w_input", &self.w_input), ("w_hidden", &self.w_hidden), ("bias", &self.bias)]
    }

    fn tensors_mut(&mut self) -> Vec<(&'static str, &mut Matrix)> {
        vec![("w_input", &mut self.w_input), ("w_hidden", &mut self.w_hidden), ("bias", &mut self.bias)]
    }
}
