//! Similarity bounds, symmetry and identity, and the edit-distance ratio
//! against a textbook DP.

mod common;

use common::*;

#[test]
fn similarity_laws_and_dp_oracle() {
    check(2000, (short_string(), short_string()), similarity_property).unwrap();
}

#[test]
fn dp_oracle_known_values() {
    assert_eq!(dp_levenshtein("kitten", "sitting"), 3);
    assert_eq!(dp_levenshtein("", "abc"), 3);
    assert_eq!(dp_levenshtein("đạt", "đại"), 1);
    assert_eq!(dp_ratio("", ""), 1.0);
}
