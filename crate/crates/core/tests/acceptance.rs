//! Acceptance gate: each test runs one criterion from the shared table
//! at full level, so `cargo test --test acceptance` prints exactly one
//! pass/fail line per criterion.

use ccvar_core::acceptance::{Level, CRITERIA};
use ccvar_core::Limits;

fn run(name: &str) {
    let criterion = CRITERIA
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("criterion {name} missing from the table"));
    let started = std::time::Instant::now();
    let cert = (criterion.run)(&Limits::default(), Level::Full)
        .unwrap_or_else(|e| panic!("criterion {name} errored: {e}"));
    let failures: Vec<&str> = cert.failures().iter().map(|c| c.tag.as_str()).collect();
    println!(
        "criterion {name}: {} ({} instances, {:.1?})",
        if failures.is_empty() { "pass" } else { "FAIL" },
        cert.instances(),
        started.elapsed(),
    );
    assert!(failures.is_empty(), "criterion {name} failed checks: {failures:?}");
}

#[test]
fn criterion_1_bset_duality() {
    run("bset-duality");
}

#[test]
fn criterion_2_free_and_exponential() {
    run("free-and-exponential");
}

#[test]
fn criterion_3_unique_decomposition() {
    run("unique-decomposition");
}

#[test]
fn criterion_4_boolean_extraction() {
    run("boolean-extraction");
}

#[test]
fn criterion_5_pair_clone_correspondence() {
    run("pair-clone-correspondence");
}

#[test]
fn criterion_6_cartesian_closure() {
    run("cartesian-closure");
}

#[test]
fn criterion_7_pair_reconstruction() {
    run("pair-reconstruction");
}

#[test]
fn criterion_8_search_oracle_agreement() {
    run("search-oracle-agreement");
}

#[test]
fn criterion_9_coverage_collapse() {
    run("coverage-collapse");
}
