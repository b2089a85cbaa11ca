//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! straight to stderr so the lines survive output capture.

use std::io::Write;
use std::time::{Duration, Instant};

use oddsym_core::examples::{crossed_product_verify, pair_groupoid_demo, Report};
use oddsym_core::poisson::{darboux, LieStructureConstants, OddPoissonStructure};
use oddsym_core::suites::{self, SuiteConfig};

const BUDGET: Duration = Duration::from_secs(60);

fn record(id: u32, name: &str, started: Instant, passed: bool, reports: &[Report]) {
    let elapsed = started.elapsed();
    let verdict = if passed { "PASS" } else { "FAIL" };
    let line = format!("criterion {id:>2}: {verdict} {name} ({:.1}s)\n", elapsed.as_secs_f64());
    let _ = std::io::stderr().write_all(line.as_bytes());
    let details: String = reports.iter().map(|r| r.to_string()).collect();
    assert!(passed, "criterion {id} failed:\n{details}");
    if elapsed > BUDGET && !cfg!(debug_assertions) {
        panic!("criterion {id} took {elapsed:?}");
    }
}

fn all_pass(reports: &[Report]) -> bool {
    reports.iter().all(Report::passed)
}

#[test]
fn criterion_01_delta_squares_to_zero() {
    let t = Instant::now();
    let r = vec![suites::delta_squared(SuiteConfig::default()).unwrap()];
    record(1, "Δ² = 0", t, all_pass(&r), &r);
}

#[test]
fn criterion_02_delta_is_self_adjoint() {
    let t = Instant::now();
    let r = vec![suites::delta_self_adjoint(SuiteConfig::default()).unwrap()];
    record(2, "Δ is formally self-adjoint", t, all_pass(&r), &r);
}

#[test]
fn criterion_03_commutator_is_lie_derivative() {
    let t = Instant::now();
    let cfg = SuiteConfig {
        max_degree: 4,
        ..SuiteConfig::default()
    };
    let r = vec![suites::lie_derivative(cfg).unwrap()];
    record(3, "[Δ, f] = L_{X_f}", t, all_pass(&r), &r);
}

#[test]
fn criterion_04_darboux_invariance() {
    let t = Instant::now();
    let r = vec![suites::darboux_invariance(SuiteConfig::default()).unwrap()];
    record(4, "Δ commutes with Darboux transforms", t, all_pass(&r), &r);
}

#[test]
fn criterion_05_lagrangian_deltas() {
    let t = Instant::now();
    let r = vec![suites::delta_l_closed(SuiteConfig::default()).unwrap()];
    record(5, "δ_L is closed and frame independent", t, all_pass(&r), &r);
}

#[test]
fn criterion_06_functoriality() {
    let t = Instant::now();
    let r = vec![suites::functoriality(SuiteConfig::default()).unwrap()];
    record(6, "composition of δ_L is functorial", t, all_pass(&r), &r);
}

#[test]
fn criterion_07_deformed_forms_and_negative_control() {
    let t = Instant::now();
    let cfg = SuiteConfig::default();
    let mut reports = Vec::new();
    for (_, pi) in suites::standard_structures().unwrap() {
        reports.push(suites::deformation(&pi, cfg).unwrap());
    }
    let positives = all_pass(&reports);
    let bad = OddPoissonStructure::kirillov_kostant(&LieStructureConstants::sl2_perturbed()).unwrap();
    let control = [suites::jacobi(&bad).unwrap(), suites::deformation(&bad, cfg).unwrap()];
    let witnessed = control
        .iter()
        .all(|r| r.checks.iter().any(|c| !c.passed && c.detail.is_some()));
    let _ = std::io::stderr().write_all(format!("negative control:\n{}{}", control[0], control[1]).as_bytes());
    record(
        7,
        "[f, dg] = {f, g}, associativity, d² = 0, negative control fails",
        t,
        positives && witnessed,
        &reports,
    );
}

#[test]
fn criterion_08_associated_graded() {
    let t = Instant::now();
    let r = vec![
        suites::gr_dimensions(&darboux(1, 1).unwrap(), 4, 3).unwrap(),
        suites::gr_dimensions(&darboux(2, 1).unwrap(), 4, 3).unwrap(),
    ];
    record(8, "normal-form dimensions match free counts", t, all_pass(&r), &r);
}

#[test]
fn criterion_09_crossed_product() {
    let t = Instant::now();
    let r = vec![crossed_product_verify(&LieStructureConstants::sl2()).unwrap()];
    record(9, "sl₂ crossed product relations", t, all_pass(&r), &r);
}

#[test]
fn criterion_10_fourier() {
    let t = Instant::now();
    let r = suites::fourier(SuiteConfig::default()).unwrap();
    record(10, "F ∘ d = Δ ∘ F and the Cartan shadow", t, all_pass(&r), &r);
}

#[test]
fn criterion_11_pairing_invariance() {
    let t = Instant::now();
    let r = vec![suites::bv_invariance(SuiteConfig::default()).unwrap()];
    record(11, "pairing with δ_L is invariant under shears", t, all_pass(&r), &r);
}

#[test]
fn criterion_12_pair_groupoid() {
    let t = Instant::now();
    let r = vec![pair_groupoid_demo(1, 2).unwrap()];
    record(
        12,
        "pair groupoid kernels realize the deformed forms",
        t,
        all_pass(&r),
        &r,
    );
}
