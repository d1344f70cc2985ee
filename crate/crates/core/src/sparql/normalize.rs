use std::collections::HashMap;

use crate::corpus::{Token, TokenSequence, EOS};

/// Drops EOS and renames variables to `?V0, ?V1, ...` by first occurrence.
pub fn normalize(seq: &TokenSequence) -> TokenSequence {
    let mut names: HashMap<&str, String> = HashMap::new();
    let tokens = seq
        .iter()
        .filter(|t| t.as_str() != EOS)
        .map(|t| {
            if !t.is_variable() {
                return t.clone();
            }
            let next = names.len();
            let name = names.entry(t.as_str()).or_insert_with(|| format!("?V{next}"));
            Token::new(name.clone()).expect("non-empty")
        })
        .collect();
    TokenSequence::new(tokens, seq.role)
}

/// Canonical text of a query: normalized tokens joined by single spaces.
pub fn canonical_text(seq: &TokenSequence) -> String {
    normalize(seq).to_text()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{geo, tokenize_target};
    use crate::sparql::validate;
    use proptest::prelude::*;

    fn norm(q: &str) -> String {
        canonical_text(&tokenize_target(q).unwrap())
    }

    #[test]
    fn renames_by_first_occurrence() {
        assert_eq!(norm("SELECT ?A { ?x p:city ?A . }"), "SELECT ?V0 { ?V1 p:city ?V0 . }");
    }

    #[test]
    fn literals_and_prefixed_names_untouched() {
        assert_eq!(
            norm(r#"SELECT ?c { ?s p:name "?not_a_var" . ?s p:city ?c . }"#),
            r#"SELECT ?V0 { ?V1 p:name "?not_a_var" . ?V1 p:city ?V0 . }"#
        );
    }

    /// Applies an independent injective renaming to every variable token.
    fn rename_all(q: &str, salt: u32) -> String {
        q.split(' ')
            .map(|w| match w.strip_prefix('?') {
                Some(rest) if !rest.is_empty() && !rest.starts_with(')') => format!("?z{salt}_{rest}"),
                _ => w.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn alpha_renamed_gold_queries_coincide() {
        for (_, q) in geo::generate_pairs(120, 3) {
            let spaced = tokenize_target(&q).unwrap().to_text();
            assert_eq!(norm(&spaced), norm(&rename_all(&spaced, 7)), "{q}");
        }
    }

    proptest! {
        #[test]
        fn idempotent_and_validity_preserving(i in 0usize..880) {
            let pairs = geo::generate_pairs(geo::GEO_CORPUS_SIZE, geo::GEO_CORPUS_SEED);
            let seq = tokenize_target(&pairs[i].1).unwrap();
            let once = normalize(&seq);
            prop_assert_eq!(normalize(&once), once.clone());
            prop_assert_eq!(validate(&seq).valid, validate(&once).valid);
        }
    }
}
