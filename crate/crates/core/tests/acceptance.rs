//! One line per acceptance criterion. Run with
//! `cargo test -p permsep-core --test acceptance -- --nocapture`.

use permsep_core::selftest::{self, CheckOutcome, DEFAULT_SEED};

fn report(outcome: CheckOutcome) {
    println!("{outcome} ({:.2}s)", outcome.elapsed.as_secs_f64());
    assert!(outcome.passed, "{outcome}");
}

#[test]
fn c01_coset_counts() {
    report(selftest::coset_counts());
}

#[test]
fn c02_group_order() {
    report(selftest::group_order());
}

#[test]
fn c03_coset_soundness() {
    report(selftest::coset_soundness());
}

#[test]
fn c04_worked_example() {
    report(selftest::worked_example());
}

#[test]
fn c05_census() {
    report(selftest::census());
}

#[test]
fn c06_norm_preservation() {
    report(selftest::norm_preservation(DEFAULT_SEED));
}

#[test]
fn c07_separability_bound() {
    report(selftest::separability_bound(DEFAULT_SEED));
}

#[test]
fn c08_detection_witnesses() {
    report(selftest::detection_witnesses());
}

#[test]
fn c09_bipartite_anchors() {
    report(selftest::bipartite_anchors());
}

#[test]
fn c10_structural_properties() {
    report(selftest::structural_properties(DEFAULT_SEED));
}
