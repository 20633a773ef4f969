//! Every stored exact value is recomputed from scratch and compared against
//! the regression file, round-tripping through the query-key format.

use std::path::PathBuf;

use gowers_core::verifier::{exact_number, load_regression, parse_query_string, query_string};
use gowers_core::Search;

#[test]
fn regression_file_recomputes() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/exact_numbers.json");
    let reg = load_regression(&path).expect("regression file parses");
    assert!(!reg.is_empty());
    for (key, entry) in &reg {
        let q = parse_query_string(key, entry.n_max).expect("key parses");
        assert_eq!(&query_string(&q), key, "key round trip");
        let search = Search::default();
        let value = exact_number(&search, &q)
            .unwrap()
            .unwrap_or_else(|| panic!("{key} not determined below n_max={}", entry.n_max));
        assert_eq!(value, entry.value, "stored value for {key} is stale");
    }
}
