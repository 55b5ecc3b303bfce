use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gelfond::digits::{
    carry_count, count_tm_cube_zeros, digit_sum, kummer_carries, legendre_valuation, thue_morse, thue_morse_along,
    windowed_digit_sum, DigitWindow, Poly,
};
use gelfond::Error;

/// Digit sum read off the textual radix expansion.
fn radix_oracle(n: &BigUint, q: u32) -> u64 {
    n.to_str_radix(q).chars().map(|c| c.to_digit(36).unwrap() as u64).sum()
}

#[test]
fn digit_sum_matches_radix_strings() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..2000 {
        let n: u64 = rng.random();
        let q = rng.random_range(2..=36u32);
        let b = BigUint::from(n);
        assert_eq!(digit_sum(&n, q as u64).unwrap(), radix_oracle(&b, q));
        assert_eq!(digit_sum(&b, q as u64).unwrap(), radix_oracle(&b, q));
        let wide = (n as u128) << 64 | rng.random::<u64>() as u128;
        assert_eq!(digit_sum(&wide, q as u64).unwrap(), radix_oracle(&BigUint::from(wide), q));
    }
}

#[test]
fn digit_sum_rejects_small_base() {
    assert!(matches!(digit_sum(&5u64, 1), Err(Error::InvalidBase(1))));
    assert!(matches!(digit_sum(&5u64, 0), Err(Error::InvalidBase(0))));
}

#[test]
fn windowed_sum_matches_bit_string() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..2000 {
        let n: u128 = rng.random();
        let lo = rng.random_range(0..140u64);
        let hi = rng.random_range(lo..=150);
        let bits = format!("{n:0128b}");
        let expected =
            bits.chars().rev().enumerate().filter(|&(i, c)| (i as u64) >= lo && (i as u64) < hi && c == '1').count()
                as u64;
        let w = DigitWindow::new(lo, hi).unwrap();
        assert_eq!(windowed_digit_sum(&n, w), expected);
        assert_eq!(windowed_digit_sum(&BigUint::from(n), w), expected);
    }
    assert!(DigitWindow::new(3, 2).is_err());
}

#[test]
fn big_windows_beyond_128_bits() {
    let n = (BigUint::from(1u8) << 300u32) + (BigUint::from(1u8) << 130u32) + 1u8;
    assert_eq!(windowed_digit_sum(&n, DigitWindow::full()), 3);
    assert_eq!(windowed_digit_sum(&n, DigitWindow::new(129, 301).unwrap()), 2);
    assert_eq!(windowed_digit_sum(&n, DigitWindow::below(130)), 1);
    assert_eq!(thue_morse(&n), 1);
}

#[test]
fn thue_morse_recurrence() {
    for n in 0..5000u64 {
        assert_eq!(thue_morse(&(2 * n)), thue_morse(&n));
        assert_eq!(thue_morse(&(2 * n + 1)), 1 - thue_morse(&n));
    }
}

#[test]
fn oeis_prefixes() {
    let cubes: String = (0..28).map(|n| char::from(b'0' + thue_morse_along(Poly::Cube, n))).collect();
    let squares: String = (0..28).map(|n| char::from(b'0' + thue_morse_along(Poly::Square, n))).collect();
    assert_eq!(cubes, "0110100010000100100000010110");
    assert_eq!(squares, "0110110111110010111110110100");
}

#[test]
fn cube_symbol_past_word_size() {
    for n in [(1u64 << 42) - 1, 1 << 42, (1 << 50) + 12345, u64::MAX] {
        let b = BigUint::from(n);
        let cube = &b * &b * &b;
        let expected = (radix_oracle(&cube, 2) % 2) as u8;
        assert_eq!(thue_morse_along(Poly::Cube, n), expected, "n = {n}");
    }
}

#[test]
fn cube_zero_counts() {
    let brute = |x: u64| (0..x).filter(|&n| thue_morse_along(Poly::Cube, n) == 0).count() as u64;
    for x in [0, 1, 2, 8, 100, 1000, 70_000] {
        assert_eq!(count_tm_cube_zeros(x), brute(x));
    }
    assert_eq!(count_tm_cube_zeros(8), 5);
    // frozen from an exact run
    assert_eq!(count_tm_cube_zeros(1 << 22), 2_094_024);
}

#[test]
fn legendre_and_kummer_examples() {
    assert_eq!(legendre_valuation(10, 2).unwrap(), 8);
    assert_eq!(legendre_valuation(100, 5).unwrap(), 24);
    assert_eq!(kummer_carries(10, 3, 2).unwrap(), 3);
    assert_eq!(kummer_carries(7, 3, 2).unwrap(), 0);
    assert!(legendre_valuation(10, 4).is_err());
    assert!(kummer_carries(3, 4, 2).is_err());
}

#[test]
fn kummer_matches_binomial_valuation() {
    for n in 0..=60u64 {
        let mut binom = BigUint::from(1u8);
        for t in 0..=n {
            if t > 0 {
                binom = binom * (n - t + 1) / t;
            }
            for p in [2u64, 3, 5, 7] {
                let mut v = 0;
                let mut x = binom.clone();
                let pb = BigUint::from(p);
                while (&x % &pb) == BigUint::from(0u8) {
                    x /= &pb;
                    v += 1;
                }
                assert_eq!(kummer_carries(n, t, p).unwrap(), v, "n={n} t={t} p={p}");
            }
        }
    }
}

/// `⌊n³/2^λ⌋ ≠ ⌊(n+r)³/2^λ⌋` counted with big integers.
fn carry_oracle(a: u64, b: u64, r: u64, lambda: u32) -> u64 {
    (a..b)
        .filter(|&n| {
            let x = BigUint::from(n).pow(3) >> lambda;
            let y = BigUint::from(n + r).pow(3) >> lambda;
            x != y
        })
        .count() as u64
}

#[test]
fn carry_count_against_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let a = rng.random_range(0..2000u64);
        let b = rng.random_range(a..a + 500);
        let r = rng.random_range(0..50);
        let lambda = rng.random_range(0..40);
        let c = carry_count(a, b, r, lambda).unwrap();
        assert_eq!(c.count, carry_oracle(a, b, r, lambda));
        if a > 0 {
            assert_eq!(c.within_cubic_bound(), Some(true), "A={a} B={b} r={r} lambda={lambda}");
        }
    }
}

#[test]
fn stated_carry_bound_counterexample() {
    // (B−A)B² undercounts the residue classes hit by n³ when A is close to B
    let c = carry_count(1010, 1183, 10, 27).unwrap();
    assert_eq!(c.count, 50);
    assert_eq!(c.count, carry_oracle(1010, 1183, 10, 27));
    assert_eq!(c.within_bound(), Some(false));
    assert_eq!(c.within_cubic_bound(), Some(true));
    assert!((c.bound_f64().unwrap() - 41.59664956566364).abs() < 1e-9);
}

#[test]
fn stated_carry_bound_small_grid() {
    for a in 1..=64u64 {
        for b in (a..=64).step_by(3) {
            for r in 0..=b - a {
                for lambda in [0, 5, 11, 17, 24] {
                    assert_eq!(carry_count(a, b, r, lambda).unwrap().within_bound(), Some(true));
                }
            }
        }
    }
}

#[test]
fn carry_count_small_example() {
    assert_eq!(carry_count(4, 8, 1, 6).unwrap().count, 3);
    assert_eq!(carry_count(9, 9, 3, 2).unwrap().count, 0);
}

#[test]
fn carry_count_edge_cases() {
    let zero = carry_count(0, 10, 2, 3).unwrap();
    assert!(zero.bound.is_none());
    assert_eq!(zero.within_bound(), None);
    assert_eq!(zero.count, carry_oracle(0, 10, 2, 3));
    assert_eq!(carry_count(5, 20, 0, 4).unwrap().count, 0);
    assert!(carry_count(5, 4, 1, 1).is_err());
    // every cube changes when no digits are discarded
    assert_eq!(carry_count(1, 30, 1, 0).unwrap().count, 29);
    // past the u128 fast path
    let big = (1u64 << 42) - 3;
    assert_eq!(carry_count(big, big + 6, 2, 120).unwrap().count, carry_oracle(big, big + 6, 2, 120));
}
