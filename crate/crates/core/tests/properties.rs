use num_bigint::BigUint;
use num_complex::Complex64;
use proptest::prelude::*;

use gelfond::correlations::{vdc_generalized_check, vdc_mr_check};
use gelfond::digits::{carry_count, digit_sum, thue_morse, windowed_digit_sum, DigitWindow};
use gelfond::dirichlet::partition_into_aps;
use gelfond::discrepancy::discrepancy_1d;
use gelfond::pipeline::{build_schedule, violations, Rational};
use gelfond::trig::{summation_by_parts_check, vaaler_psi};

fn complex_vec(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn digit_sum_is_congruent_mod_q_minus_1(n in any::<u64>(), q in 2u64..=36) {
        prop_assert_eq!(digit_sum(&n, q).unwrap() % (q - 1), n % (q - 1));
    }

    #[test]
    fn digit_sum_agrees_across_widths(n in any::<u64>(), q in 2u64..=16) {
        let big = BigUint::from(n);
        prop_assert_eq!(digit_sum(&n, q).unwrap(), digit_sum(&big, q).unwrap());
        prop_assert_eq!(digit_sum(&(n as u128), q).unwrap(), digit_sum(&big, q).unwrap());
    }

    #[test]
    fn low_window_is_digit_sum_of_residue(n in any::<u128>(), lambda in 0u64..=127) {
        let low = n & ((1u128 << lambda) - 1);
        prop_assert_eq!(windowed_digit_sum(&n, DigitWindow::below(lambda)), low.count_ones() as u64);
    }

    #[test]
    fn windows_split_additively(n in any::<u128>(), a in 0u64..140, b in 0u64..140, c in 0u64..140) {
        let mut w = [a, b, c];
        w.sort_unstable();
        let [a, b, c] = w;
        let whole = windowed_digit_sum(&n, DigitWindow::new(a, c).unwrap());
        let parts = windowed_digit_sum(&n, DigitWindow::new(a, b).unwrap())
            + windowed_digit_sum(&n, DigitWindow::new(b, c).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn truncated_sum_is_periodic(n in 0u64..1 << 40, lambda in 0u64..=20, k in 0u64..1000) {
        let w = DigitWindow::below(lambda);
        prop_assert_eq!(windowed_digit_sum(&n, w), windowed_digit_sum(&(n + (k << lambda)), w));
    }

    #[test]
    fn thue_morse_recurrence(n in 0u64..1 << 62) {
        prop_assert_eq!(thue_morse(&(2 * n)), thue_morse(&n));
        prop_assert_eq!(thue_morse(&(2 * n + 1)), 1 - thue_morse(&n));
    }

    #[test]
    fn discrepancy_range_and_shift(points in prop::collection::vec(0.0f64..1.0, 1..200), shift in -5i32..5) {
        let d = discrepancy_1d(&points).unwrap();
        let n = points.len() as f64;
        prop_assert!(d >= 1.0 / n - 1e-12 && d <= 1.0 + 1e-12, "D = {} for N = {}", d, n);
        let moved: Vec<f64> = points.iter().map(|x| x + shift as f64).collect();
        prop_assert!((discrepancy_1d(&moved).unwrap() - d).abs() < 1e-9);
        let mut rev = points.clone();
        rev.reverse();
        prop_assert_eq!(discrepancy_1d(&rev).unwrap(), d);
    }

    #[test]
    fn vaaler_error_within_fejer(h in 1u64..=512, t in -3.0f64..3.0) {
        let v = vaaler_psi(h, t).unwrap();
        prop_assert!(v.kappa_h >= -1e-12);
        prop_assert!((v.psi_h - v.psi).abs() <= v.kappa_h + 1e-9);
    }

    #[test]
    fn summation_by_parts_identity(pair in (1usize..64).prop_flat_map(|n| (complex_vec(n..n + 1), complex_vec(n..n + 1)))) {
        let (a, b) = pair;
        let (direct, parts) = summation_by_parts_check(&a, &b).unwrap();
        prop_assert!((direct - parts).norm() <= 1e-10 * (a.len() as f64).powi(2));
    }

    #[test]
    fn vdc_generalized_holds(x in complex_vec(1..80), shifts in prop::collection::vec(-20i64..20, 1..8)) {
        let c = vdc_generalized_check(&x, &shifts).unwrap();
        prop_assert!(c.holds(), "{:?}", c);
    }

    #[test]
    fn vdc_mr_holds(z in complex_vec(1..80), m in 1u64..10, r in 1u64..10) {
        let c = vdc_mr_check(&z, m, r).unwrap();
        prop_assert!(c.holds(), "{:?}", c);
    }

    #[test]
    fn carry_count_within_cubic_bound(a in 1u64..2000, len in 0u64..500, r in 1u64..20, lambda in 0u32..30) {
        let c = carry_count(a, a + len, r, lambda).unwrap();
        prop_assert!(c.count <= len);
        prop_assert_eq!(c.within_cubic_bound(), Some(true));
    }

    #[test]
    fn ap_partitions_verify(lo in 0u64..1000, len in 1u64..4000, t in 1u64..20, v in 1u64..40) {
        match partition_into_aps(lo, lo + len, t, v) {
            Ok(p) => prop_assert!(p.verify().is_ok()),
            Err(_) => prop_assert!(t * v > len),
        }
    }

    #[test]
    fn schedule_shape(nu in 1u64..1 << 40) {
        let s = build_schedule(nu, Rational::default()).unwrap();
        prop_assert_eq!(s.lambda % 3, 0);
        prop_assert_eq!(s.tau, s.lambda / 3);
        prop_assert_eq!(s.mu, nu - s.rho);
        prop_assert!(s.zeta <= s.tau && s.tau <= s.rho && s.rho <= nu && nu <= s.u && s.u <= s.lambda);
    }

    #[test]
    fn schedule_passes_between_grid_points(nu in 1_500_000u64..1_000_000_000_000) {
        let s = build_schedule(nu, Rational::default()).unwrap();
        prop_assert!(violations(&s).is_empty(), "nu = {}: {:?}", nu, violations(&s));
    }
}
