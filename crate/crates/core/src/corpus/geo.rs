//! Seeded generator for a U.S.-geography question/SPARQL corpus.
//!
//! Questions follow the phrasing of the classic 880-question geography
//! benchmark and queries use its SPARQL conventions: `p:` properties and
//! classes, `r:type` for class membership, a variable named after each
//! mentioned entity and a case-insensitive `regex(str(?x), "x", "i")` filter
//! to bind it.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Number of pairs in the standard corpus.
pub const GEO_CORPUS_SIZE: usize = 880;
/// Seed used for the shipped corpus file.
pub const GEO_CORPUS_SEED: u64 = 880;

const STATES: &[&str] = &[
    "alabama",
    "alaska",
    "arizona",
    "arkansas",
    "california",
    "colorado",
    "connecticut",
    "delaware",
    "florida",
    "georgia",
    "hawaii",
    "idaho",
    "illinois",
    "indiana",
    "iowa",
    "kansas",
    "kentucky",
    "louisiana",
    "maine",
    "maryland",
    "massachusetts",
    "michigan",
    "minnesota",
    "mississippi",
    "missouri",
    "montana",
    "nebraska",
    "nevada",
    "ohio",
    "oklahoma",
    "oregon",
    "pennsylvania",
    "tennessee",
    "texas",
    "utah",
    "vermont",
    "virginia",
    "washington",
    "wisconsin",
    "wyoming",
];

const CITIES: &[&str] = &[
    "austin",
    "dallas",
    "houston",
    "boston",
    "chicago",
    "denver",
    "seattle",
    "portland",
    "atlanta",
    "miami",
    "phoenix",
    "tucson",
    "detroit",
    "columbus",
    "cleveland",
    "pittsburgh",
    "philadelphia",
    "sacramento",
    "fresno",
    "albany",
    "spokane",
    "tacoma",
    "boise",
    "omaha",
    "wichita",
    "memphis",
    "nashville",
    "louisville",
    "milwaukee",
    "minneapolis",
    "indianapolis",
    "baltimore",
    "richmond",
    "charlotte",
    "raleigh",
    "orlando",
    "tampa",
    "jacksonville",
    "birmingham",
    "montgomery",
    "anchorage",
    "honolulu",
    "reno",
    "oakland",
    "riverside",
    "anaheim",
    "stockton",
    "tulsa",
    "lincoln",
    "madison",
    "springfield",
    "dayton",
    "toledo",
    "akron",
    "rochester",
    "buffalo",
    "hartford",
    "providence",
    "newark",
    "trenton",
    "dover",
    "frankfort",
    "topeka",
    "jackson",
    "durham",
    "scottsdale",
    "flint",
    "erie",
    "salem",
    "eugene",
    "provo",
    "ogden",
    "cheyenne",
    "casper",
    "helena",
    "billings",
    "bismarck",
    "fargo",
    "juneau",
    "fairbanks",
];

const RIVERS: &[&str] = &[
    "mississippi",
    "missouri",
    "colorado",
    "ohio",
    "arkansas",
    "red",
    "columbia",
    "snake",
    "platte",
    "potomac",
    "hudson",
    "tennessee",
    "delaware",
    "chattahoochee",
    "yellowstone",
    "gila",
    "canadian",
];

const MOUNTAINS: &[&str] =
    &["mckinley", "whitney", "elbert", "rainier", "massive", "harvard", "shasta", "hood", "wheeler", "borah"];

const LAKES: &[&str] = &["michigan", "superior", "erie", "huron", "ontario", "tahoe", "champlain"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    State,
    City,
    River,
    Mountain,
    Lake,
}

impl Kind {
    fn entities(self) -> &'static [&'static str] {
        match self {
            Kind::State => STATES,
            Kind::City => CITIES,
            Kind::River => RIVERS,
            Kind::Mountain => MOUNTAINS,
            Kind::Lake => LAKES,
        }
    }
}

/// A question family: phrasings plus a query skeleton in which `{e}`
/// stands for the entity and `{F}` for its binding filter.
struct Template {
    kind: Kind,
    questions: &'static [&'static str],
    query: &'static str,
}

const COUNT_RIVERS_IN: &str = "SELECT (COUNT(?A) AS ?QTD) { ?{e} p:river ?A {F} . }";

const TEMPLATES: &[Template] = &[
    Template {
        kind: Kind::State,
        questions: &[
            "how many rivers are there in {e} ?",
            "how many rivers does {e} have ?",
            "how many rivers are in {e} ?",
        ],
        query: COUNT_RIVERS_IN,
    },
    Template {
        kind: Kind::State,
        questions: &[
            "show major cities in {e} ?",
            "what are the major cities in {e} ?",
            "list the major cities of {e} ?",
        ],
        query: "SELECT ?A { ?{e} p:city ?A {F} . ?A r:type p:Major . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the capital of {e} ?", "what is the capital city of {e} ?", "name the capital of {e} ?"],
        query: "SELECT ?A { ?{e} p:capital ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &[
            "what is the population of {e} ?",
            "how many people live in {e} ?",
            "how many citizens does {e} have ?",
        ],
        query: "SELECT ?A { ?{e} p:population ?A {F} . ?{e} r:type p:State . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the area of {e} ?", "how big is {e} ?", "how large is {e} ?"],
        query: "SELECT ?A { ?{e} p:area ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &[
            "what states border {e} ?",
            "which states border {e} ?",
            "what are the neighboring states of {e} ?",
        ],
        query: "SELECT ?A { ?{e} p:next_to ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["how many states border {e} ?", "how many neighbors does {e} have ?"],
        query: "SELECT (COUNT(?A) AS ?QTD) { ?{e} p:next_to ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &[
            "what rivers run through {e} ?",
            "which rivers flow through {e} ?",
            "what are the rivers in {e} ?",
        ],
        query: "SELECT ?A { ?A r:type p:River . ?A p:traverse ?{e} {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the highest point in {e} ?", "what is the highest point of {e} ?"],
        query: "SELECT ?A { ?{e} p:high_point ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the lowest point in {e} ?", "what is the lowest point of {e} ?"],
        query: "SELECT ?A { ?{e} p:low_point ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the largest city in {e} ?", "what is the biggest city in {e} ?"],
        query: "SELECT ?A { ?{e} p:city ?A {F} . ?A p:population ?P . } ORDER BY DESC(?P) LIMIT 1",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the smallest city in {e} ?"],
        query: "SELECT ?A { ?{e} p:city ?A {F} . ?A p:population ?P . } ORDER BY ASC(?P) LIMIT 1",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the longest river in {e} ?", "which is the longest river in {e} ?"],
        query: "SELECT ?A { ?A p:traverse ?{e} {F} . ?A p:length ?L . } ORDER BY DESC(?L) LIMIT 1",
    },
    Template {
        kind: Kind::State,
        questions: &["how many cities are there in {e} ?", "how many cities does {e} have ?"],
        query: "SELECT (COUNT(?A) AS ?QTD) { ?{e} p:city ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the population density of {e} ?", "what is the density of {e} ?"],
        query: "SELECT ?A { ?{e} p:density ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what lakes are in {e} ?", "name the lakes in {e} ?"],
        query: "SELECT ?A { ?{e} p:lake ?A {F} . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the elevation of the highest point in {e} ?", "how high is the highest point in {e} ?"],
        query: "SELECT ?H { ?{e} p:high_point ?A {F} . ?A p:height ?H . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what is the population of the capital of {e} ?", "how many people live in the capital of {e} ?"],
        query: "SELECT ?P { ?{e} p:capital ?A {F} . ?A p:population ?P . }",
    },
    Template {
        kind: Kind::State,
        questions: &["what mountains are in {e} ?", "which mountains are in {e} ?"],
        query: "SELECT ?A { ?A r:type p:Mountain . ?A p:located_in ?{e} {F} . }",
    },
    Template {
        kind: Kind::City,
        questions: &[
            "what is the population of {e} ?",
            "how many people live in {e} ?",
            "how many citizens live in {e} ?",
        ],
        query: "SELECT ?A { ?{e} p:population ?A {F} . ?{e} r:type p:City . }",
    },
    Template {
        kind: Kind::City,
        questions: &["where is {e} ?", "what state is {e} in ?", "in which state is {e} ?"],
        query: "SELECT ?A { ?A p:city ?{e} {F} . ?A r:type p:State . }",
    },
    Template {
        kind: Kind::City,
        questions: &["which states have cities named {e} ?", "what states have a city named {e} ?"],
        query: "SELECT ?A { ?A r:type p:State . ?A p:city ?{e} {F} . }",
    },
    Template {
        kind: Kind::River,
        questions: &["how long is the {e} river ?", "what is the length of the {e} river ?", "how long is the {e} ?"],
        query: "SELECT ?A { ?{e} p:length ?A {F} . ?{e} r:type p:River . }",
    },
    Template {
        kind: Kind::River,
        questions: &[
            "what states does the {e} river run through ?",
            "which states does the {e} flow through ?",
            "through which states does the {e} run ?",
        ],
        query: "SELECT ?A { ?{e} p:traverse ?A {F} . }",
    },
    Template {
        kind: Kind::River,
        questions: &["how many states does the {e} river run through ?", "how many states does the {e} flow through ?"],
        query: "SELECT (COUNT(?A) AS ?QTD) { ?{e} p:traverse ?A {F} . }",
    },
    Template {
        kind: Kind::River,
        questions: &["what are the capitals of the states that the {e} river runs through ?"],
        query: "SELECT ?B { ?{e} p:traverse ?A {F} . ?A p:capital ?B . }",
    },
    Template {
        kind: Kind::Mountain,
        questions: &["how high is mount {e} ?", "what is the height of mount {e} ?", "how tall is mount {e} ?"],
        query: "SELECT ?A { ?{e} p:height ?A {F} . }",
    },
    Template {
        kind: Kind::Mountain,
        questions: &["where is mount {e} ?", "in which state is mount {e} ?"],
        query: "SELECT ?A { ?{e} p:located_in ?A {F} . }",
    },
    Template {
        kind: Kind::Lake,
        questions: &["how big is lake {e} ?", "what is the area of lake {e} ?"],
        query: "SELECT ?A { ?{e} p:area ?A {F} . ?{e} r:type p:Lake . }",
    },
    Template {
        kind: Kind::Lake,
        questions: &["which states border lake {e} ?", "what states are next to lake {e} ?"],
        query: "SELECT ?A { ?{e} p:located_in ?A {F} . }",
    },
];

/// Questions without an entity slot.
const FIXED: &[(&[&str], &str)] = &[
    (
        &["which state has the largest population ?", "what is the most populous state ?"],
        "SELECT ?A { ?A r:type p:State . ?A p:population ?P . } ORDER BY DESC(?P) LIMIT 1",
    ),
    (
        &["which state has the smallest population ?", "what is the least populous state ?"],
        "SELECT ?A { ?A r:type p:State . ?A p:population ?P . } ORDER BY ASC(?P) LIMIT 1",
    ),
    (
        &["what is the largest state ?", "what is the biggest state ?"],
        "SELECT ?A { ?A r:type p:State . ?A p:area ?R . } ORDER BY DESC(?R) LIMIT 1",
    ),
    (
        &["what is the smallest state ?"],
        "SELECT ?A { ?A r:type p:State . ?A p:area ?R . } ORDER BY ASC(?R) LIMIT 1",
    ),
    (
        &["what is the longest river ?", "which river is the longest ?"],
        "SELECT ?A { ?A r:type p:River . ?A p:length ?L . } ORDER BY DESC(?L) LIMIT 1",
    ),
    (
        &["what is the shortest river ?", "which river is the shortest ?"],
        "SELECT ?A { ?A r:type p:River . ?A p:length ?L . } ORDER BY ASC(?L) LIMIT 1",
    ),
    (
        &["what is the highest mountain in the us ?", "what is the tallest mountain in america ?"],
        "SELECT ?A { ?A r:type p:Mountain . ?A p:height ?H . } ORDER BY DESC(?H) LIMIT 1",
    ),
    (
        &["what is the most populous city ?", "what is the largest city in the us ?"],
        "SELECT ?A { ?A r:type p:City . ?A p:population ?P . } ORDER BY DESC(?P) LIMIT 1",
    ),
    (
        &["what are the cities of the state with the highest point ?"],
        "SELECT ?B { ?A p:city ?B . { SELECT ?A { ?A r:type p:State . ?A p:high_point ?C . ?C p:height ?height . } ORDER BY DESC(?height) LIMIT 1 } }",
    ),
    (
        &["what is the capital of the state with the largest population ?"],
        "SELECT ?B { ?A p:capital ?B . { SELECT ?A { ?A r:type p:State . ?A p:population ?P . } ORDER BY DESC(?P) LIMIT 1 } }",
    ),
    (
        &["which states border the state with the largest population ?"],
        "SELECT ?B { ?A p:next_to ?B . { SELECT ?A { ?A r:type p:State . ?A p:population ?P . } ORDER BY DESC(?P) LIMIT 1 } }",
    ),
    (
        &["what states does the longest river run through ?"],
        "SELECT ?B { ?A p:traverse ?B . { SELECT ?A { ?A r:type p:River . ?A p:length ?L . } ORDER BY DESC(?L) LIMIT 1 } }",
    ),
    (
        &["how many states are there ?", "how many states are in the us ?"],
        "SELECT (COUNT(?A) AS ?QTD) { ?A r:type p:State . }",
    ),
    (
        &["how many rivers are there ?", "how many rivers are in the us ?"],
        "SELECT (COUNT(?A) AS ?QTD) { ?A r:type p:River . }",
    ),
    (
        &["name all the rivers in the us ?", "list the rivers in the usa ?"],
        "SELECT ?A { ?A r:type p:River . }",
    ),
    (
        &["what are the major cities in the us ?", "list major cities in the usa ?"],
        "SELECT ?A { ?A r:type p:City . ?A r:type p:Major . }",
    ),
];

fn fill(template: &str, entity: &str) -> String {
    let filter = format!("FILTER (regex(str(?{entity}), \"{entity}\", \"i\"))");
    template.replace("{F}", &filter).replace("{e}", entity)
}

/// Generates `size` distinct (question, query) pairs.
///
/// Every fixed question appears first, then entity questions are drawn by
/// kind (states 60%, cities 22%, rivers 10%, mountains and lakes 4% each).
pub fn generate_pairs(size: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(size);

    for (questions, query) in FIXED {
        for q in questions.iter() {
            if pairs.len() < size && seen.insert(q.to_string()) {
                pairs.push((q.to_string(), query.to_string()));
            }
        }
    }

    let kinds =
        [(Kind::State, 0.60), (Kind::City, 0.22), (Kind::River, 0.10), (Kind::Mountain, 0.04), (Kind::Lake, 0.04)];
    let capacity: usize =
        TEMPLATES.iter().map(|t| t.questions.len() * t.kind.entities().len()).sum::<usize>() + pairs.len();
    assert!(size <= capacity, "corpus generator can produce at most {capacity} pairs");

    while pairs.len() < size {
        let draw: f64 = rng.gen();
        let mut acc = 0.0;
        let kind = kinds
            .iter()
            .find(|(_, w)| {
                acc += w;
                draw < acc
            })
            .map_or(Kind::Lake, |(k, _)| *k);
        let candidates: Vec<&Template> = TEMPLATES.iter().filter(|t| t.kind == kind).collect();
        let template = candidates.choose(&mut rng).expect("every kind has templates");
        let entity = kind.entities().choose(&mut rng).expect("non-empty entity list");
        let phrasing = template.questions.choose(&mut rng).expect("non-empty");
        let question = phrasing.replace("{e}", entity);
        if seen.insert(question.clone()) {
            pairs.push((question, fill(template.query, entity)));
        }
    }
    pairs
}

/// The pair file contents for a generated corpus.
pub fn generate_pair_file(size: usize, seed: u64) -> String {
    let mut out = String::new();
    for (q, s) in generate_pairs(size, seed) {
        out.push_str(&q);
        out.push('\t');
        out.push_str(&s);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::dataset::{parse_pairs, Dataset};

    #[test]
    fn deterministic_and_distinct() {
        let a = generate_pairs(GEO_CORPUS_SIZE, GEO_CORPUS_SEED);
        let b = generate_pairs(GEO_CORPUS_SIZE, GEO_CORPUS_SEED);
        assert_eq!(a, b);
        let questions: HashSet<_> = a.iter().map(|(q, _)| q).collect();
        assert_eq!(questions.len(), GEO_CORPUS_SIZE);
    }

    #[test]
    fn contains_the_reference_phrasings() {
        let pairs = generate_pairs(GEO_CORPUS_SIZE, GEO_CORPUS_SEED);
        let nested =
            pairs.iter().find(|(q, _)| q == "what are the cities of the state with the highest point ?").unwrap();
        assert!(nested.1.contains("ORDER BY DESC(?height) LIMIT 1"));
        let idaho = fill(COUNT_RIVERS_IN, "idaho");
        assert_eq!(
            idaho,
            "SELECT (COUNT(?A) AS ?QTD) { ?idaho p:river ?A FILTER (regex(str(?idaho), \"idaho\", \"i\")) . }"
        );
    }

    #[test]
    fn target_vocabulary_is_rich_enough_for_300_dimensions() {
        let ds = Dataset::new(parse_pairs(&generate_pair_file(GEO_CORPUS_SIZE, GEO_CORPUS_SEED)).unwrap());
        assert!(ds.target_vocab.len() > 300, "{}", ds.target_vocab.len());
    }
}
