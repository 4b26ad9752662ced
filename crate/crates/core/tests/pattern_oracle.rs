//! The annotation engine agrees with a brute-force matcher on random token
//! sequences and rule sets.

mod common;

use common::*;
use vnqa::annotation::Quantifier;

#[test]
fn engine_matches_brute_force() {
    check(1000, pattern_case(), pattern_oracle_property).unwrap();
}

#[test]
fn oracle_sanity() {
    // A B+ over A B B A B: two matches, the first taking both Bs
    let rule = vec![(Quantifier::One, vec![0]), (Quantifier::OneOrMore, vec![1])];
    assert_eq!(brute_force_matches(&[0, 1, 1, 0, 1], std::slice::from_ref(&rule)), [(0, 0, 3), (0, 3, 5)]);
    let case = PatternCase { tokens: vec![0, 1, 1, 0, 1], rules: vec![rule] };
    assert_eq!(engine_matches(&case), [(0, 0, 3), (0, 3, 5)]);
}

#[test]
fn longer_rule_wins_and_ties_go_first() {
    let short = vec![(Quantifier::One, vec![0])];
    let long = vec![(Quantifier::One, vec![0]), (Quantifier::Optional, vec![1])];
    let case = PatternCase { tokens: vec![0, 1, 0], rules: vec![short, long] };
    // at 0 the long rule covers A B; at 2 both match A and the first wins
    assert_eq!(engine_matches(&case), [(1, 0, 2), (0, 2, 3)]);
}
