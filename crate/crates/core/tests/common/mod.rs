#![allow(dead_code)]

use borg_spectra::{FourierTerm, OperatorSpec};
use proptest::prelude::*;

pub fn potential(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    p.prop_flat_map(|p| proptest::collection::vec(-1.0f64..=1.0, p))
}

pub fn schrodinger(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OperatorSpec> {
    potential(p).prop_map(|v| OperatorSpec::schrodinger(v).unwrap())
}

pub fn jacobi(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OperatorSpec> {
    p.prop_flat_map(|p| {
        (proptest::collection::vec(-1.0f64..=1.0, p), proptest::collection::vec(0.5f64..=2.0, p))
            .prop_map(|(v, a)| OperatorSpec::jacobi(v, a).unwrap())
    })
}

pub fn laurent(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OperatorSpec> {
    let terms = proptest::collection::vec((-3i64..=3, -1.0f64..=1.0), 1..4);
    (potential(p), terms).prop_map(|(mut v, terms)| {
        v.sort_by(f64::total_cmp);
        let fourier = terms.into_iter().map(|(k, coefficient)| FourierTerm { k, coefficient }).collect();
        OperatorSpec::laurent(v, fourier).unwrap()
    })
}

/// Schrödinger, Jacobi or sorted Laurent.
pub fn any_spec(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![schrodinger(p.clone()), jacobi(p.clone()), laurent(p)]
}

pub fn tridiagonal(p: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = OperatorSpec> {
    prop_oneof![schrodinger(p.clone()), jacobi(p)]
}
