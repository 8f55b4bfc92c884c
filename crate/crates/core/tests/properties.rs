mod common;

use common::props;

fn check(suite: props::Suite) {
    let cases = suite().unwrap_or_else(|e| panic!("{e}"));
    assert!(cases >= 200, "only {cases} cases ran");
}

#[test]
fn ring_axioms() {
    check(props::ring_axioms);
}

#[test]
fn parse_print_round_trip() {
    check(props::parse_print_round_trip);
}

#[test]
fn cofactor_multiplicativity() {
    check(props::cofactor_multiplicativity);
}

#[test]
fn projective_condition() {
    check(props::projective_condition);
}

#[test]
fn branch_pullback() {
    check(props::branch_pullback);
}

#[test]
fn chart_independence() {
    check(props::chart_independence);
}

#[test]
fn truncation_stability() {
    check(props::truncation_stability);
}

#[test]
fn monotone_oval_count() {
    check(props::monotone_oval_count);
}
