//! The acceptance gate: one test per criterion, each printing a pass/fail
//! line (visible with --nocapture) and failing hard on any mismatch.

use quasimap_core::acceptance::{
    criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7,
    criterion_8, CriterionReport,
};

fn check(report: CriterionReport) {
    println!("{report}");
    for d in &report.details {
        println!("  {d}");
    }
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_1_quintic_correction_series() {
    check(criterion_1().expect("criterion 1 must run"));
}

#[test]
fn criterion_2_quintic_lefschetz_series() {
    check(criterion_2().expect("criterion 2 must run"));
}

#[test]
fn criterion_3_fano_vanishing() {
    check(criterion_3().expect("criterion 3 must run"));
}

#[test]
fn criterion_4_cross_oracle() {
    check(criterion_4().expect("criterion 4 must run"));
}

#[test]
fn criterion_5_telescoping_identity() {
    check(criterion_5().expect("criterion 5 must run"));
}

#[test]
fn criterion_6_wall_crossing() {
    check(criterion_6().expect("criterion 6 must run"));
}

#[test]
fn criterion_7_recursion_engine() {
    check(criterion_7().expect("criterion 7 must run"));
}

#[test]
fn criterion_8_ring_property_suite() {
    check(criterion_8().expect("criterion 8 must run"));
}
