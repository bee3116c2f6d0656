mod common;

use common::*;

#[test]
fn field() {
    field_properties(1000).unwrap();
}

#[test]
fn series() {
    series_properties(1000).unwrap();
}

#[test]
fn parser() {
    parser_properties(1000).unwrap();
}

#[test]
fn formats() {
    format_properties(1000).unwrap();
}

#[test]
fn composition() {
    composition_properties(256).unwrap();
}

#[test]
fn jacobi_formulations_agree() {
    jacobi_agreement(200).unwrap();
}

#[test]
fn d2_after_d1() {
    complex_property(300).unwrap();
    complex_on_catalog().unwrap();
}

#[test]
fn invariance() {
    invariance_properties(200).unwrap();
}

#[test]
fn verified_pairs() {
    verified_pairs_consistent().unwrap();
}
