//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! All checks are exact; a single mismatch fails the criterion.

use zzcosheaf::check::{self, SuiteReport};

const SEED: u64 = 0x5eed_2026;

fn conclude(criterion: usize, what: &str, report: &SuiteReport) {
    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion:>2} {verdict}: {what} ({} exact checks, {} failures)",
        report.trials,
        report.failures.len()
    );
    assert!(
        report.passed(),
        "criterion {criterion} failed: {}",
        report.failures.join("; ")
    );
}

#[test]
fn criterion_01_decomposition_oracle_equivalence() {
    let report = check::suite_decompose_oracle(SEED, 200);
    conclude(1, "decompose equals exhaustive interval-summand search", &report);
}

#[test]
fn criterion_02_monotone_persistence_agreement() {
    let report = check::suite_monotone_oracle(SEED + 2, 50);
    conclude(2, "cosheaf diagrams equal column-reduction persistence", &report);
}

#[test]
fn criterion_03_augmented_rank_agreement() {
    let report = check::suite_aug_rank_agreement(SEED + 3, 50);
    conclude(3, "boundary-quotient and index-step augmented ranks agree", &report);
}

#[test]
fn criterion_04_pushforward_isomorphism() {
    let report = check::suite_pushforward_iso(SEED + 4, 50);
    conclude(4, "collapse pushforward of index cosheaves hits the monotone cosheaf", &report);
}

#[test]
fn criterion_05_k0_additivity() {
    let report = check::suite_k0_additivity(SEED + 5, 200);
    conclude(5, "K0 additivity under sums, barcodes, and vertex splits", &report);
}

#[test]
fn criterion_06_euler_identity() {
    let report = check::suite_euler_identity(SEED + 6, 50);
    conclude(6, "Euler class equals Euler curve equals simplex counts", &report);
}

#[test]
fn criterion_07_delta_homomorphism_and_descent() {
    let report = check::suite_delta_descent(SEED + 7, 200);
    conclude(7, "diagram map is a monoid homomorphism and descends to K0", &report);
}

#[test]
fn criterion_08_set_valued_k0() {
    let report = check::suite_set_k0(SEED + 8, 200);
    conclude(8, "set-module trajectories are intervals with matching K0", &report);
}

#[test]
fn criterion_09_weak_equivalence_stability() {
    let report = check::suite_subdivision_stability(SEED + 9, 100);
    conclude(9, "subdivision round-trips and transports barcodes", &report);
}

#[test]
fn criterion_10_augmented_equals_plain_for_index_filtrations() {
    let report = check::suite_augmented_index(SEED + 10, 50);
    conclude(10, "augmented cosheaves of index filtrations are plain", &report);
}
