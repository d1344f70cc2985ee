use super::linalg::Matrix;

/// A fixed collection of named tensors that can be updated, clipped,
/// checkpointed and gradient-checked uniformly.
///
/// `tensors` and `tensors_mut` must return the same tensors in the same
/// order; gradients are values of the same type.
pub trait ParamSet: Clone {
    fn tensors(&self) -> Vec<(&'static str, &Matrix)>;
    fn tensors_mut(&mut self) -> Vec<(&'static str, &mut Matrix)>;

    /// A copy with every entry set to zero.
    fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        for (_, t) in z.tensors_mut() {
            t.fill(0.0);
        }
        z
    }

    fn num_params(&self) -> usize {
        self.tensors().iter().map(|(_, t)| t.len()).sum()
    }

    fn global_norm(&self) -> f64 {
        self.tensors().iter().map(|(_, t)| t.squared_norm()).sum::<f64>().sqrt()
    }

    fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, t)| t.is_finite())
    }

    fn scale(&mut self, factor: f64) {
        for (_, t) in self.tensors_mut() {
            t.as_mut_slice().iter_mut().for_each(|x| *x *= factor);
        }
    }

    /// Reads the flat parameter at position `index` in tensor order.
    fn flat_get(&self, mut index: usize) -> Option<f64> {
        for (_, t) in self.tensors() {
            if index < t.len() {
                return Some(t.as_slice()[index]);
            }
            index -= t.len();
        }
        None
    }

    fn flat_set(&mut self, mut index: usize, value: f64) -> bool {
        for (_, t) in self.tensors_mut() {
            if index < t.len() {
                t.as_mut_slice()[index] = value;
                return true;
            }
            index -= t.len();
        }
        false
    }
}
