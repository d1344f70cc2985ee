use serde::{Deserialize, Serialize};

use crate::corpus::{TokenSequence, EOS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ErrorKind {
    UnbalancedDelimiter,
    BadClauseOrder,
    BadTriple,
    BadFunctionCall,
    EmptyBody,
    TruncatedQuery,
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::UnbalancedDelimiter => "UnbalancedDelimiter",
            ErrorKind::BadClauseOrder => "BadClauseOrder",
            ErrorKind::BadTriple => "BadTriple",
            ErrorKind::BadFunctionCall => "BadFunctionCall",
            ErrorKind::EmptyBody => "EmptyBody",
            ErrorKind::TruncatedQuery => "TruncatedQuery",
        }
    }
}

/// Outcome of a grammar check. `error` is `Some((kind, token index))` exactly
/// when the query is rejected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub error: Option<(ErrorKind, usize)>,
}

impl ValidationResult {
    fn ok() -> Self {
        ValidationResult { valid: true, error: None }
    }

    fn fail(kind: ErrorKind, position: usize) -> Self {
        ValidationResult { valid: false, error: Some((kind, position)) }
    }

    pub fn error_kind(&self) -> Option<ErrorKind> {
        self.error.map(|(k, _)| k)
    }

    pub fn position(&self) -> Option<usize> {
        self.error.map(|(_, p)| p)
    }

    /// `OK` or `ERR kind@position`.
    pub fn to_line(&self) -> String {
        match self.error {
            None => "OK".to_string(),
            Some((kind, pos)) => format!("ERR {}@{pos}", kind.name()),
        }
    }
}

const KEYWORDS: [&str; 9] = ["SELECT", "COUNT", "AS", "FILTER", "ORDER", "BY", "ASC", "DESC", "LIMIT"];
const FUNCTIONS: [&str; 4] = ["regex", "str", "bound", "lang"];

fn is_keyword(t: &str) -> bool {
    KEYWORDS.iter().any(|k| k.eq_ignore_ascii_case(t))
}

fn is_function(t: &str) -> bool {
    FUNCTIONS.iter().any(|f| f.eq_ignore_ascii_case(t))
}

fn is_var(t: &str) -> bool {
    t.len() > 1 && (t.starts_with('?') || t.starts_with('$'))
}

fn is_term(t: &str) -> bool {
    !(is_keyword(t) || is_function(t) || matches!(t, "(" | ")" | "{" | "}" | "," | ".") || t == EOS)
}

/// Checks a target sequence against the query grammar. A trailing EOS is
/// ignored.
pub fn validate(seq: &TokenSequence) -> ValidationResult {
    let stripped = seq.without_eos();
    let tokens: Vec<&str> = stripped.iter().map(|t| t.as_str()).collect();
    validate_tokens(&tokens)
}

pub fn validate_tokens(tokens: &[&str]) -> ValidationResult {
    if tokens.is_empty() {
        return ValidationResult::fail(ErrorKind::EmptyBody, 0);
    }
    if let Some(pos) = unbalanced(tokens) {
        return ValidationResult::fail(ErrorKind::UnbalancedDelimiter, pos);
    }
    let mut p = Parser { tokens, pos: 0 };
    match p.query().and_then(|()| match p.peek() {
        None => Ok(()),
        Some(_) => Err((ErrorKind::BadClauseOrder, p.pos)),
    }) {
        Ok(()) => ValidationResult::ok(),
        Err((kind, pos)) => ValidationResult::fail(kind, pos),
    }
}

/// Position of the first bracket that is never matched.
fn unbalanced(tokens: &[&str]) -> Option<usize> {
    let mut stack: Vec<(char, usize)> = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match *t {
            "(" => stack.push(('(', i)),
            "{" => stack.push(('{', i)),
            ")" | "}" => {
                let want = if *t == ")" { '(' } else { '{' };
                match stack.pop() {
                    Some((open, _)) if open == want => {}
                    _ => return Some(i),
                }
            }
            _ => {}
        }
    }
    stack.first().map(|&(_, i)| i)
}

type Step = Result<(), (ErrorKind, usize)>;

struct Parser<'a> {
    tokens: &'a [&'a str],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.tokens.get(self.pos).copied()
    }

    fn peek_is(&self, want: &str) -> bool {
        self.peek().is_some_and(|t| t.eq_ignore_ascii_case(want))
    }

    fn fail(&self, kind: ErrorKind) -> Step {
        if self.pos >= self.tokens.len() {
            Err((ErrorKind::TruncatedQuery, self.pos))
        } else {
            Err((kind, self.pos))
        }
    }

    fn expect(&mut self, want: &str, kind: ErrorKind) -> Step {
        if self.peek_is(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(kind)
        }
    }

    fn expect_with(&mut self, pred: fn(&str) -> bool, kind: ErrorKind) -> Step {
        match self.peek() {
            Some(t) if pred(t) => {
                self.pos += 1;
                Ok(())
            }
            _ => self.fail(kind),
        }
    }

    fn query(&mut self) -> Step {
        self.expect("SELECT", ErrorKind::BadClauseOrder)?;
        if self.peek_is("(") {
            self.pos += 1;
            self.expect("COUNT", ErrorKind::BadFunctionCall)?;
            self.expect("(", ErrorKind::BadFunctionCall)?;
            self.expect_with(is_var, ErrorKind::BadFunctionCall)?;
            self.expect(")", ErrorKind::BadFunctionCall)?;
            self.expect("AS", ErrorKind::BadFunctionCall)?;
            self.expect_with(is_var, ErrorKind::BadFunctionCall)?;
            self.expect(")", ErrorKind::BadFunctionCall)?;
        } else {
            self.expect_with(is_var, ErrorKind::BadClauseOrder)?;
            while self.peek().is_some_and(is_var) {
                self.pos += 1;
            }
        }
        self.expect("{", ErrorKind::BadClauseOrder)?;
        self.body()?;
        self.expect("}", ErrorKind::BadClauseOrder)?;
        self.modifiers()
    }

    fn body(&mut self) -> Step {
        let start = self.pos;
        loop {
            match self.peek() {
                Some("}") if self.pos == start => return Err((ErrorKind::EmptyBody, self.pos)),
                Some("}") => return Ok(()),
                None => return self.fail(ErrorKind::TruncatedQuery),
                Some("{") => {
                    self.pos += 1;
                    self.query()?;
                    self.expect("}", ErrorKind::BadClauseOrder)?;
                }
                Some(t) if t.eq_ignore_ascii_case("FILTER") => self.filter()?,
                Some(_) => self.triple()?,
            }
        }
    }

    /// Three terms closed by `.`; the dot may be left to a following FILTER.
    fn triple(&mut self) -> Step {
        for _ in 0..3 {
            self.expect_with(is_term, ErrorKind::BadTriple)?;
        }
        if self.peek_is("FILTER") {
            return Ok(());
        }
        self.expect(".", ErrorKind::BadTriple)
    }

    fn filter(&mut self) -> Step {
        self.pos += 1;
        self.expect("(", ErrorKind::BadFunctionCall)?;
        self.call()?;
        self.expect(")", ErrorKind::BadFunctionCall)?;
        if self.peek_is(".") {
            self.pos += 1;
        }
        Ok(())
    }

    fn call(&mut self) -> Step {
        let head_pos = self.pos;
        let head = match self.peek() {
            Some(t) if is_function(t) => t.to_ascii_lowercase(),
            _ => return self.fail(ErrorKind::BadFunctionCall),
        };
        self.pos += 1;
        self.expect("(", ErrorKind::BadFunctionCall)?;
        let mut args = 0;
        loop {
            if self.peek().is_some_and(is_function) {
                self.call()?;
            } else {
                self.expect_with(is_term, ErrorKind::BadFunctionCall)?;
            }
            args += 1;
            if self.peek_is(",") {
                self.pos += 1;
            } else {
                break;
            }
        }
        self.expect(")", ErrorKind::BadFunctionCall)?;
        let arity_ok = match head.as_str() {
            "regex" => (2..=3).contains(&args),
            _ => args == 1,
        };
        if arity_ok {
            Ok(())
        } else {
            Err((ErrorKind::BadFunctionCall, head_pos))
        }
    }

    fn modifiers(&mut self) -> Step {
        if self.peek_is("ORDER") {
            self.pos += 1;
            self.expect("BY", ErrorKind::BadClauseOrder)?;
            if self.peek_is("ASC") || self.peek_is("DESC") {
                self.pos += 1;
            } else {
                return self.fail(ErrorKind::BadClauseOrder);
            }
            self.expect("(", ErrorKind::BadClauseOrder)?;
            self.expect_with(is_var, ErrorKind::BadClauseOrder)?;
            self.expect(")", ErrorKind::BadClauseOrder)?;
        }
        if self.peek_is("LIMIT") {
            self.pos += 1;
            self.expect_with(|t| t.parse::<u64>().is_ok(), ErrorKind::BadClauseOrder)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize_target;

    fn check(q: &str) -> ValidationResult {
        validate(&tokenize_target(q).unwrap())
    }

    const COUNT_QUERY: &str =
        r#"SELECT (COUNT(?A) AS ?QTD) { ?idaho p:river ?A FILTER (regex(str(?idaho), "idaho", "i")) . }"#;

    #[test]
    fn count_with_filter_is_valid() {
        assert_eq!(check(COUNT_QUERY), ValidationResult::ok());
    }

    #[test]
    fn missing_final_brace() {
        let q = COUNT_QUERY.trim_end_matches('}');
        let r = check(q);
        assert!(!r.valid);
        assert_eq!(r.error_kind(), Some(ErrorKind::UnbalancedDelimiter));
        assert_eq!(r.position(), Some(9));
    }

    #[test]
    fn empty_sequence() {
        let r = validate_tokens(&[]);
        assert_eq!(r.error_kind(), Some(ErrorKind::EmptyBody));
        assert_eq!(check("SELECT ?a { }").error_kind(), Some(ErrorKind::EmptyBody));
    }

    #[test]
    fn nested_select_and_modifiers() {
        assert!(check(
            "SELECT ?B { ?A p:city ?B . { SELECT ?A { ?A r:type p:State . ?A p:high_point ?H . ?H p:height ?X . } ORDER BY DESC(?X) LIMIT 1 } }"
        )
        .valid);
        assert!(check("SELECT ?A ?B { ?A p:area ?B . } ORDER BY ASC(?B) LIMIT 3").valid);
        assert!(check("SELECT ?A { ?A p:x ?B FILTER (bound(?B)) }").valid);
    }

    #[test]
    fn error_kinds_and_positions() {
        let cases = [
            ("WHERE ?a { ?a p:x ?b . }", ErrorKind::BadClauseOrder, 0),
            ("SELECT ?a { ?a p:x . }", ErrorKind::BadTriple, 5),
            ("SELECT ?a { ?a p:x ?b ?c . }", ErrorKind::BadTriple, 6),
            ("SELECT ?a { ?a p:x ?b FILTER (regex(?b)) }", ErrorKind::BadFunctionCall, 8),
            ("SELECT ?a { ?a p:x ?b FILTER (upper(?b)) }", ErrorKind::BadFunctionCall, 8),
            ("SELECT ?a { ?a p:x ?b FILTER (str(?b) ?b) }", ErrorKind::BadFunctionCall, 12),
            ("SELECT ?a", ErrorKind::TruncatedQuery, 2),
            ("SELECT ?a { ?a p:x ?b . } LIMIT", ErrorKind::TruncatedQuery, 9),
            ("SELECT ?a { ?a p:x ?b . } LIMIT ten", ErrorKind::BadClauseOrder, 9),
            ("SELECT ?a { ?a p:x ?b . } ORDER BY ?b", ErrorKind::BadClauseOrder, 10),
            ("SELECT ?a { ?a p:x ?b . } ?b", ErrorKind::BadClauseOrder, 8),
            ("SELECT ?a { ?a p:x ?b ) . }", ErrorKind::UnbalancedDelimiter, 6),
            ("SELECT (COUNT(?a) ?n) { ?a p:x ?b . }", ErrorKind::BadFunctionCall, 6),
        ];
        for (q, kind, pos) in cases {
            let r = check(q);
            assert_eq!(r.error, Some((kind, pos)), "{q}");
            assert!(r.to_line().starts_with("ERR "));
        }
    }

    #[test]
    fn eos_is_ignored() {
        let seq = tokenize_target("SELECT ?a { ?a p:x ?b . }").unwrap();
        assert!(seq.ends_with_eos());
        assert_eq!(validate(&seq).to_line(), "OK");
    }
}
