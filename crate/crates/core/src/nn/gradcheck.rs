use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::ParamSet;

/// Parameters compared per check (all of them when there are fewer).
pub const GRADCHECK_SAMPLES: usize = 256;

/// Compares analytic gradients against central differences.
///
/// `loss_and_grad` returns the loss and its analytic gradient. For a seeded
/// sample of parameters the numeric derivative
/// `(loss(p + eps) - loss(p - eps)) / 2 eps` is computed and the largest
/// `|a - n| / max(|a|, |n|, 1e-8)` is returned.
pub fn finite_difference_check<P, F>(loss_and_grad: F, params: &P, epsilon: f64, seed: u64) -> f64
where
    P: ParamSet,
    F: Fn(&P) -> (f64, P),
{
    finite_difference_check_sampled(loss_and_grad, params, epsilon, GRADCHECK_SAMPLES, seed)
}

/// As [`finite_difference_check`], comparing up to `samples` parameters.
pub fn finite_difference_check_sampled<P, F>(
    loss_and_grad: F,
    params: &P,
    epsilon: f64,
    samples: usize,
    seed: u64,
) -> f64
where
    P: ParamSet,
    F: Fn(&P) -> (f64, P),
{
    let (_, analytic) = loss_and_grad(params);
    let total = params.num_params();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices: Vec<usize> =
        if total <= samples { (0..total).collect() } else { sample(&mut rng, total, samples).into_vec() };

    let mut probe = params.clone();
    let mut worst: f64 = 0.0;
    for index in indices {
        let original = params.flat_get(index).expect("index within parameter count");
        probe.flat_set(index, original + epsilon);
        let (plus, _) = loss_and_grad(&probe);
        probe.flat_set(index, original - epsilon);
        let (minus, _) = loss_and_grad(&probe);
        probe.flat_set(index, original);

        let numeric = (plus - minus) / (2.0 * epsilon);
        let a = analytic.flat_get(index).expect("gradient congruent with parameters");
        let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max(rel);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::linalg::Matrix;

    #[derive(Clone, Debug)]
    struct Scalar(Matrix);

    impl ParamSet for Scalar {
        fn tensors(&self) -> Vec<(&'static str, &Matrix)> {
            vec![("p", &self.0)]
        }
        fn tensors_mut(&mut self) -> Vec<(&'static str, &mut Matrix)> {
            vec![("p", &mut self.0)]
        }
    }

    #[test]
    fn quadratic_is_exact() {
        let p = Scalar(Matrix::column(vec![3.0]));
        let err = finite_difference_check(
            |s: &Scalar| {
                let x = s.0.as_slice()[0];
                (0.5 * x * x, Scalar(Matrix::column(vec![x])))
            },
            &p,
            1e-4,
            0,
        );
        assert!(err <= 1e-9, "{err}");
    }

    #[test]
    fn constant_loss_has_zero_error() {
        let p = Scalar(Matrix::column(vec![1.0, 2.0]));
        let err = finite_difference_check(|s: &Scalar| (4.0, s.zeros_like()), &p, 1e-4, 0);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn wrong_gradient_is_detected() {
        let p = Scalar(Matrix::column(vec![2.0]));
        let err = finite_difference_check(
            |s: &Scalar| {
                let x = s.0.as_slice()[0];
                (x * x, Scalar(Matrix::column(vec![x])))
            },
            &p,
            1e-4,
            0,
        );
        assert!(err > 0.4);
    }
}
