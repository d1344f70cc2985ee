use std::path::PathBuf;

use nl2sparql::alignment::KeywordMap;
use nl2sparql::corpus::{geo, load_dataset};

fn data_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

#[test]
fn corpus_file_matches_the_generator() {
    let text = std::fs::read_to_string(data_file("geo880_sparql.tsv")).unwrap();
    assert_eq!(text, geo::generate_pair_file(geo::GEO_CORPUS_SIZE, geo::GEO_CORPUS_SEED));
    assert_eq!(load_dataset(&data_file("geo880_sparql.tsv")).unwrap().len(), 880);
}

#[test]
fn keyword_file_matches_the_default_map() {
    assert_eq!(KeywordMap::load(&data_file("keywords.tsv")).unwrap(), KeywordMap::default());
}
