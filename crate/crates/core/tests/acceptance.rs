//! Acceptance criteria 1-10. Each test writes one PASS/FAIL line to stderr
//! (uncaptured) and fails if its criterion does.

use std::io::Write;

use hypercover::acceptance::{run_criterion, Scale};

fn check(id: u8) {
    let r = run_criterion(id, Scale::Full);
    let _ = writeln!(std::io::stderr(), "{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn criterion_01_basic_cover() {
    check(1);
}

#[test]
fn criterion_02_uniform_cover() {
    check(2);
}

#[test]
fn criterion_03_pair_cover() {
    check(3);
}

#[test]
fn criterion_04_strong_cover() {
    check(4);
}

#[test]
fn criterion_05_small_instance_replay() {
    check(5);
}

#[test]
fn criterion_06_augmentation() {
    check(6);
}

#[test]
fn criterion_07_oracles() {
    check(7);
}

#[test]
fn criterion_08_q_integrality() {
    check(8);
}

#[test]
fn criterion_09_structural() {
    check(9);
}

#[test]
fn criterion_10_cli_round_trip() {
    check(10);
}
