use serde::{Deserialize, Serialize};

use crate::corpus::TokenSequence;
use crate::error::{Error, Result};
use crate::sparql::{normalize, validate};

/// Counts behind the two reported rates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub correct: usize,
    pub syntax_errors: usize,
    pub total: usize,
}

impl Metrics {
    pub fn accuracy(&self) -> f64 {
        ratio(self.correct, self.total)
    }

    pub fn syntax_error_rate(&self) -> f64 {
        ratio(self.syntax_errors, self.total)
    }

    pub fn merge(self, other: Metrics) -> Metrics {
        Metrics {
            correct: self.correct + other.correct,
            syntax_errors: self.syntax_errors + other.syntax_errors,
            total: self.total + other.total,
        }
    }
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

/// Whether a single prediction is valid, and whether it is correct.
pub fn judge(prediction: &TokenSequence, gold: &TokenSequence) -> (bool, bool) {
    let valid = validate(prediction).valid;
    (valid, valid && normalize(prediction).tokens == normalize(gold).tokens)
}

/// A prediction is correct when it passes the grammar check and equals the
/// gold query after normalization.
pub fn evaluate(predictions: &[TokenSequence], golds: &[TokenSequence]) -> Result<Metrics> {
    if predictions.len() != golds.len() {
        return Err(Error::Input(format!("{} predictions for {} gold queries", predictions.len(), golds.len())));
    }
    if golds.is_empty() {
        return Err(Error::Input("nothing to evaluate".into()));
    }
    let mut m = Metrics { total: golds.len(), ..Metrics::default() };
    for (p, g) in predictions.iter().zip(golds) {
        let (valid, correct) = judge(p, g);
        m.syntax_errors += usize::from(!valid);
        m.correct += usize::from(correct);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{geo, tokenize_target, Role};
    use proptest::prelude::*;

    fn golds(n: usize) -> Vec<TokenSequence> {
        geo::generate_pairs(n, 5).iter().map(|(_, q)| tokenize_target(q).unwrap()).collect()
    }

    #[test]
    fn perfect_and_empty_predictions() {
        let g = golds(30);
        let m = evaluate(&g, &g).unwrap();
        assert_eq!((m.accuracy(), m.syntax_error_rate()), (1.0, 0.0));
        let empty = vec![TokenSequence::new(vec![], Role::Target); g.len()];
        let m = evaluate(&empty, &g).unwrap();
        assert_eq!((m.accuracy(), m.syntax_error_rate()), (0.0, 1.0));
    }

    #[test]
    fn table_scale_fold() {
        let g = golds(88);
        let mut p = g.clone();
        let broken = tokenize_target("SELECT ?a { ?a p:x }").unwrap();
        let wrong = tokenize_target("SELECT ?a { ?a p:nothing ?b . }").unwrap();
        for slot in p.iter_mut().take(5) {
            *slot = broken.clone();
        }
        for slot in p.iter_mut().skip(5).take(14) {
            *slot = wrong.clone();
        }
        let m = evaluate(&p, &g).unwrap();
        assert_eq!((m.correct, m.syntax_errors, m.total), (69, 5, 88));
        assert!((m.accuracy() - 0.7840).abs() < 1e-4);
        assert!((m.syntax_error_rate() - 0.0568).abs() < 1e-4);
    }

    #[test]
    fn renamed_variables_still_count() {
        let g = vec![tokenize_target("SELECT ?A { ?x p:city ?A . }").unwrap()];
        let p = vec![tokenize_target("SELECT ?q { ?r p:city ?q . }").unwrap()];
        assert_eq!(evaluate(&p, &g).unwrap().correct, 1);
    }

    #[test]
    fn invalid_equal_prediction_is_not_correct() {
        let q = vec![tokenize_target("SELECT ?a { ?a p:x ?b }").unwrap()];
        let m = evaluate(&q, &q).unwrap();
        assert_eq!((m.correct, m.syntax_errors), (0, 1));
    }

    #[test]
    fn length_mismatch_and_empty_input() {
        let g = golds(3);
        assert!(matches!(evaluate(&g[..2], &g), Err(Error::Input(_))));
        assert!(matches!(evaluate(&[], &[]), Err(Error::Input(_))));
    }

    proptest! {
        #[test]
        fn permutation_equivariant_and_disjoint(seed: u64, swaps in proptest::collection::vec((0usize..40, 0usize..40), 0..40)) {
            let g = golds(40);
            let mut p: Vec<TokenSequence> = g.iter().rev().cloned().collect();
            p[(seed % 40) as usize] = tokenize_target("SELECT {").unwrap();
            let base = evaluate(&p, &g).unwrap();
            prop_assert!(base.correct + base.syntax_errors <= base.total);
            let (mut p2, mut g2) = (p.clone(), g.clone());
            for (a, b) in swaps {
                p2.swap(a, b);
                g2.swap(a, b);
            }
            prop_assert_eq!(evaluate(&p2, &g2).unwrap(), base);
        }
    }
}
