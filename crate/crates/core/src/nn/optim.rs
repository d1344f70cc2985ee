use super::params::ParamSet;
use crate::error::{Error, Result};

/// Gradients whose global L2 norm exceeds this are rescaled to it.
pub const CLIP_NORM: f64 = 5.0;

/// Multiplicative decay applied to the learning rate once per epoch.
pub const LR_DECAY: f64 = 0.9;

/// `params -= lr * clip(grads)`, where clipping rescales the whole gradient
/// to global norm [`CLIP_NORM`] when it is larger.
pub fn sgd_update<P: ParamSet>(params: &mut P, grads: &P, lr: f64) -> Result<()> {
    let norm = grads.global_norm();
    let factor = if norm > CLIP_NORM { CLIP_NORM / norm } else { 1.0 };
    if !(norm * factor).is_finite() {
        return Err(Error::Numerics(format!("gradient norm {norm} is not finite")));
    }
    let step = lr * factor;
    for ((name, p), (_, g)) in params.tensors_mut().into_iter().zip(grads.tensors()) {
        if p.shape() != g.shape() {
            return Err(Error::Shape(format!("{name}: parameter {:?} vs gradient {:?}", p.shape(), g.shape())));
        }
        if step != 0.0 {
            p.add_scaled(-step, g);
        }
    }
    Ok(())
}

/// `initial * 0.9^epoch`.
pub fn lr_schedule(initial: f64, epoch: usize) -> f64 {
    initial * LR_DECAY.powi(epoch as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::linalg::Matrix;
    use approx::assert_abs_diff_eq;

    #[derive(Clone, Debug)]
    struct Flat(Matrix);

    impl ParamSet for Flat {
        fn tensors(&self) -> Vec<(&'static str, &Matrix)> {
            vec![("w", &self.0)]
        }
        fn tensors_mut(&mut self) -> Vec<(&'static str, &mut Matrix)> {
            vec![("w", &mut self.0)]
        }
    }

    fn flat(v: Vec<f64>) -> Flat {
        Flat(Matrix::column(v))
    }

    #[test]
    fn zero_lr_is_identity() {
        let mut p = flat(vec![1.0, -2.0]);
        sgd_update(&mut p, &flat(vec![3.0, 4.0]), 0.0).unwrap();
        assert_eq!(p.0.as_slice(), &[1.0, -2.0]);
    }

    #[test]
    fn plain_step() {
        let mut p = flat(vec![1.0]);
        sgd_update(&mut p, &flat(vec![0.5]), 0.1).unwrap();
        assert_abs_diff_eq!(p.0.as_slice()[0], 0.95, epsilon = 1e-15);
    }

    #[test]
    fn clips_to_global_norm() {
        let mut p = flat(vec![0.0, 0.0]);
        sgd_update(&mut p, &flat(vec![30.0, 40.0]), 1.0).unwrap();
        assert_abs_diff_eq!(p.0.as_slice()[0], -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.0.as_slice()[1], -4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.global_norm(), 5.0, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_gradient_is_rejected() {
        let mut p = flat(vec![0.0]);
        assert!(matches!(sgd_update(&mut p, &flat(vec![f64::NAN]), 0.1), Err(Error::Numerics(_))));
        assert!(matches!(sgd_update(&mut p, &flat(vec![f64::INFINITY]), 0.1), Err(Error::Numerics(_))));
    }

    #[test]
    fn schedule() {
        assert_abs_diff_eq!(lr_schedule(0.9, 0), 0.9);
        assert_abs_diff_eq!(lr_schedule(0.9, 1), 0.81, epsilon = 1e-15);
        assert_abs_diff_eq!(lr_schedule(0.9, 2), 0.729, epsilon = 1e-15);
        for e in 0..200 {
            assert!(lr_schedule(0.9, e + 1) < lr_schedule(0.9, e));
        }
    }
}
