mod common;

use std::f64::consts::{PI, TAU};

use borg_spectra::borg::{interlacing_report, trace_gap, INTERLACING_TOL};
use borg_spectra::eig::{asymmetry, hermitian_eigenvalues, operator_norm};
use borg_spectra::mathieu::{convergents, mathieu_potential, minimal_period, rational_cosine, Convergent};
use borg_spectra::{
    gap_report, hausdorff_distance, pseudospectrum_intervals, spectrum, symbol, Interval, OperatorKind, OperatorSpec,
    RealSpectrum,
};
use common::{any_spec, potential, tridiagonal};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn eigenvalues_at(spec: &OperatorSpec, shift: usize, theta: f64) -> Vec<f64> {
    hermitian_eigenvalues(&symbol(spec, shift, theta).unwrap()).unwrap().values
}

fn random_hermitian(n: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    proptest::collection::vec((-1.0f64..=1.0, -1.0f64..=1.0), n * n).prop_map(move |raw| {
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(raw[i * n + j].0, raw[i * n + j].1));
        (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
    })
}

fn union(intervals: Vec<(f64, f64)>) -> RealSpectrum {
    RealSpectrum::new(intervals.into_iter().map(|(a, b)| Interval::new(a.min(b), a.max(b))), 0.0).unwrap()
}

fn interval_union() -> impl Strategy<Value = RealSpectrum> {
    proptest::collection::vec((-3.0f64..=3.0, -3.0f64..=3.0), 1..5).prop_map(union)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn symbols_are_exactly_hermitian(spec in any_spec(1..=8), theta in -PI..PI) {
        let f = symbol(&spec, 0, theta).unwrap();
        prop_assert_eq!(asymmetry(&f), 0.0);
        prop_assert!(f.entries().diagonal().iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn symbols_are_two_pi_periodic(spec in any_spec(1..=8), theta in -PI..PI) {
        let a = symbol(&spec, 0, theta).unwrap();
        let b = symbol(&spec, 0, theta + TAU).unwrap();
        let diff = (a.entries() - b.entries()).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn symbol_trace_is_potential_sum(spec in tridiagonal(2..=8), theta in -PI..PI) {
        let f = symbol(&spec, 0, theta).unwrap();
        let trace: f64 = f.entries().diagonal().iter().map(|z| z.re).sum();
        let sum: f64 = spec.potential().iter().sum();
        prop_assert!((trace - sum).abs() < 1e-12);
    }

    #[test]
    fn shifted_symbols_share_eigenvalues(spec in tridiagonal(1..=8), theta in -PI..PI, k in 0usize..8) {
        let k = k % spec.period();
        let base = eigenvalues_at(&spec, 0, theta);
        let shifted = eigenvalues_at(&spec, k, theta);
        for (x, y) in base.iter().zip(&shifted) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn shift_covariance(spec in tridiagonal(1..=8), theta in -PI..PI, k in 0usize..8) {
        let k = k % spec.period();
        let a = symbol(&spec, k, theta).unwrap();
        let b = symbol(&spec.rotated(k).unwrap(), 0, theta).unwrap();
        prop_assert_eq!(a.entries(), b.entries());
    }

    #[test]
    fn weyl_inequality(m in random_hermitian(6), e in random_hermitian(6), scale in 0.0f64..=1.0) {
        let e = e * Complex64::new(scale, 0.0);
        let sum = &m + &e;
        let lm = hermitian_eigenvalues(&m).unwrap().values;
        let ls = hermitian_eigenvalues(&sum).unwrap().values;
        let norm = operator_norm(&e).unwrap();
        for (x, y) in lm.iter().zip(&ls) {
            prop_assert!((x - y).abs() <= norm + 1e-10);
        }
    }

    #[test]
    fn interlacing_on_random_specs(spec in any_spec(2..=8)) {
        let r = interlacing_report(&spec, 0, 128).unwrap();
        prop_assert!(r.worst_violation <= INTERLACING_TOL, "{:?}", r);
    }

    #[test]
    fn trace_gap_telescopes(spec in tridiagonal(2..=8), k1 in 0usize..8, k2 in 0usize..8) {
        let p = spec.period();
        let t = trace_gap(&spec, k1 % p, k2 % p).unwrap();
        prop_assert!((t.difference - t.telescoped).abs() <= 1e-12);
    }

    #[test]
    fn fattening_is_monotone(spec in any_spec(1..=6), e1 in 0.0f64..=1.0, e2 in 0.0f64..=1.0) {
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        let s = spectrum(&spec, 256).unwrap();
        let small = pseudospectrum_intervals(&s, lo).unwrap();
        let big = pseudospectrum_intervals(&s, hi).unwrap();
        prop_assert!(big.covers(&small, 1e-12));
        prop_assert!(small.covers(&s, 1e-12));
        prop_assert!(big.component_count() <= small.component_count());
    }

    #[test]
    fn grid_refinement_converges(spec in any_spec(1..=6)) {
        let coarse = spectrum(&spec, 128).unwrap();
        let fine = spectrum(&spec, 256).unwrap();
        let d = hausdorff_distance(&coarse, &fine).unwrap();
        prop_assert!(d <= coarse.resolution_error() + fine.resolution_error() + 1e-9);
    }

    #[test]
    fn diagonal_perturbation_moves_spectrum_by_at_most_its_norm(
        v in potential(1..=6),
        dv in proptest::collection::vec(-0.5f64..=0.5, 6),
    ) {
        let perturbed: Vec<f64> = v.iter().zip(&dv).map(|(x, d)| x + d).collect();
        let bound = v.iter().zip(&perturbed).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let s1 = spectrum(&OperatorSpec::schrodinger(v).unwrap(), 512).unwrap();
        let s2 = spectrum(&OperatorSpec::schrodinger(perturbed).unwrap(), 512).unwrap();
        let d = hausdorff_distance(&s1, &s2).unwrap();
        prop_assert!(d <= bound + s1.resolution_error() + s2.resolution_error() + 1e-9);
    }

    #[test]
    fn hausdorff_is_a_metric(a in interval_union(), b in interval_union(), c in interval_union()) {
        let ab = hausdorff_distance(&a, &b).unwrap();
        prop_assert_eq!(ab, hausdorff_distance(&b, &a).unwrap());
        prop_assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let bc = hausdorff_distance(&b, &c).unwrap();
        let ac = hausdorff_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn epsilon_star_connects(spec in any_spec(1..=6)) {
        let s = spectrum(&spec, 256).unwrap();
        let report = gap_report(&s);
        let fat = pseudospectrum_intervals(&s, report.epsilon_star).unwrap();
        prop_assert!(gap_report(&fat).connected);
        if 0.2 * report.epsilon_star > s.gap_threshold() {
            let thin = pseudospectrum_intervals(&s, 0.9 * report.epsilon_star).unwrap();
            prop_assert!(!gap_report(&thin).connected);
        }
    }

    #[test]
    fn convergent_quality(alpha in 0.001f64..10.0, count in 1usize..12) {
        let list = convergents(alpha, count).unwrap();
        let mut last_b = 0;
        for (n, c) in list.convergents.iter().enumerate() {
            prop_assert!((alpha - c.value).abs() < 1.0 / (c.b as f64 * c.b as f64));
            let g = borg_spectra::mathieu::gcd(c.a.unsigned_abs(), c.b as u64);
            prop_assert_eq!(g, 1);
            if n >= 2 {
                prop_assert!(c.b > last_b);
            } else {
                prop_assert!(c.b >= last_b);
            }
            last_b = c.b;
        }
    }

    #[test]
    fn coupling_scales_the_potential(a in 1i64..40, b in 1i64..40, lambda in -3.0f64..3.0) {
        let c = Convergent::new(a, b).unwrap();
        let scaled = mathieu_potential(&c, lambda).unwrap();
        let unit = mathieu_potential(&c, 1.0).unwrap();
        if lambda.abs() > 1e-6 {
            prop_assert_eq!(scaled.period(), unit.period());
            let v: Vec<f64> = unit.potential().iter().map(|x| lambda * x).collect();
            prop_assert_eq!(scaled.clone(), OperatorSpec::schrodinger(v).unwrap());
        }
        prop_assert_eq!(scaled.kind(), OperatorKind::Schrodinger);
    }

    #[test]
    fn spec_json_round_trip(spec in any_spec(1..=8)) {
        let text = serde_json::to_string(&spec).unwrap();
        prop_assert_eq!(text.parse::<OperatorSpec>().unwrap(), spec);
    }
}

#[test]
fn period_divides_denominator() {
    for b in 1..=64i64 {
        for a in 0..b {
            if borg_spectra::mathieu::gcd(a as u64, b as u64) != 1 {
                continue;
            }
            let c = Convergent::new(a, b).unwrap();
            let p = minimal_period(|j| rational_cosine(&c, j), b as usize).unwrap();
            assert_eq!(b as usize % p, 0, "a/b = {a}/{b}, period {p}");
            // cos(2πja/b) takes the value 1 only when b divides j
            assert_eq!(p, b as usize, "a/b = {a}/{b}");
        }
    }
}
