//! The acceptance suite: one test per numbered verification criterion, each
//! printing a single `criterion NN <name>: PASS/FAIL` line (visible under
//! `cargo test --test acceptance -- --nocapture`).

use qesum::verify::run_criterion;
use qesum::DEFAULT_BUDGET;

fn check(id: u32) {
    let res = run_criterion(id, DEFAULT_BUDGET).expect("criterion runner errored");
    println!(
        "criterion {:02} {}: {}",
        res.id,
        res.name,
        if res.passed { "PASS" } else { "FAIL" }
    );
    assert!(
        res.passed,
        "criterion {} ({}) failed: {}",
        res.id, res.name, res.details
    );
}

#[test]
fn criterion_01_exact_second_moment() {
    check(1);
}

#[test]
fn criterion_02_homogeneous_second_moment() {
    check(2);
}

#[test]
fn criterion_03_sixth_moment_bound() {
    check(3);
}

#[test]
fn criterion_04_extremal_sharpness() {
    check(4);
}

#[test]
fn criterion_05_exhaustive_maximality() {
    check(5);
}

#[test]
fn criterion_06_sub_maximal_gap() {
    check(6);
}

#[test]
fn criterion_07_tree_coefficient_bound() {
    check(7);
}

#[test]
fn criterion_08_forest_certificates() {
    check(8);
}

#[test]
fn criterion_09_transform_equivalence() {
    check(9);
}

#[test]
fn criterion_10_chebyshev_values() {
    check(10);
}

#[test]
fn criterion_11_mod3_decomposition() {
    check(11);
}

#[test]
fn criterion_12_tail_sandwich() {
    check(12);
}

#[test]
fn criterion_13_small_n_landscape() {
    check(13);
}
