use degparity::arith::{self, FormRepresentation, NeumannSetzer};
use degparity::error::Error;
use proptest::prelude::*;

fn trial_division_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn all_representations(n: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut v = 1;
    while 16 * v * v < n {
        let rest = n - 16 * v * v;
        let u = (rest as f64).sqrt() as u64;
        for u in u.saturating_sub(1)..=u + 1 {
            if u > 0 && u * u == rest {
                out.push((u, v));
            }
        }
        v += 1;
    }
    out
}

#[test]
fn examples() {
    assert!(!arith::is_prime(1));
    assert!(arith::is_prime(24859));
    assert!(!arith::is_prime(2537));
    assert!(arith::factor(1).factors.is_empty());
    assert_eq!(arith::factor(2537).factors, vec![(43, 1), (59, 1)]);
    assert_eq!(arith::factor(243).factors, vec![(3, 5)]);
    for (n, u, v) in [(17, 1, 1), (73, 3, 2), (113, 7, 2)] {
        assert_eq!(arith::represent_u2_plus_16v2(n).unwrap(), FormRepresentation { u, v });
    }
    assert!(!arith::merel_criterion(17).unwrap());
    assert!(arith::merel_criterion(113).unwrap());
    assert!(!arith::merel_criterion(73).unwrap());
    assert_eq!(arith::neumann_setzer_test(73).unwrap(), Some(NeumannSetzer { u: 3, odd_degree: true }));
    assert_eq!(arith::neumann_setzer_test(113).unwrap(), Some(NeumannSetzer { u: 7, odd_degree: false }));
    assert_eq!(arith::neumann_setzer_test(11).unwrap(), None);
}

#[test]
fn precondition_violations() {
    assert!(matches!(arith::represent_u2_plus_16v2(19), Err(Error::InvalidInput(_))));
    assert!(matches!(arith::represent_u2_plus_16v2(25), Err(Error::NotPrime(25))));
    assert!(arith::merel_criterion(9).is_err());
    assert!(matches!(arith::neumann_setzer_test(100), Err(Error::NotPrime(100))));
}

#[test]
fn large_primes() {
    // 2^61 - 1 and a product of two primes near 2^31
    assert!(arith::is_prime((1 << 61) - 1));
    let n = 2147483647u64 * 2147483629;
    assert!(!arith::is_prime(n));
    assert_eq!(arith::factor(n).factors, vec![(2147483629, 1), (2147483647, 1)]);
    // strong pseudoprime to bases 2, 3, 5, 7
    assert!(!arith::is_prime(3215031751));
}

#[test]
fn representations_up_to_1e5() {
    for p in arith::primes_up_to(100_000).into_iter().filter(|p| p % 8 == 1) {
        let r = arith::represent_u2_plus_16v2(p).unwrap();
        assert_eq!(r.u * r.u + 16 * r.v * r.v, p);
    }
}

#[test]
fn merel_matches_brute_force_below_1e4() {
    for p in arith::primes_up_to(10_000).into_iter().filter(|p| p % 8 == 1) {
        let reps = all_representations(p);
        assert_eq!(reps.len(), 1, "{p}: {reps:?}");
        let (_, v) = reps[0];
        assert_eq!(arith::merel_criterion(p).unwrap(), v % 2 == ((p - 1) / 8) % 2, "{p}");
    }
}

#[test]
fn neumann_setzer_levels_and_merel_below_1e5() {
    let mut seen = 0;
    for p in arith::primes_up_to(100_000) {
        let Some(ns) = arith::neumann_setzer_test(p).unwrap() else { continue };
        seen += 1;
        assert_eq!(ns.u * ns.u + 64, p);
        if p % 8 == 1 {
            assert_eq!(ns.odd_degree, !arith::merel_criterion(p).unwrap(), "{p}");
        }
    }
    assert!(seen > 20);
}

#[test]
fn sieve_matches_trial_division() {
    let sieve = arith::primes_up_to(5000);
    let naive: Vec<u64> = (0..=5000).filter(|&n| trial_division_prime(n)).collect();
    assert_eq!(sieve, naive);
}

proptest! {
    #[test]
    fn is_prime_matches_trial_division(n in 1u64..2_000_000) {
        prop_assert_eq!(arith::is_prime(n), trial_division_prime(n));
    }

    #[test]
    fn factorization_multiplies_back(n in 1u64..(1u64 << 62)) {
        let f = arith::factor(n);
        let mut prod = 1u128;
        let mut last = 0;
        for &(p, e) in &f.factors {
            prop_assert!(p > last);
            last = p;
            prop_assert!(arith::is_prime(p));
            prop_assert!(e >= 1);
            prod *= (p as u128).pow(e);
        }
        prop_assert_eq!(prod, n as u128);
    }

    #[test]
    fn kronecker_is_multiplicative_in_the_top(a in -500i64..500, m in 1i64..300, n in 1i64..300) {
        prop_assert_eq!(arith::kronecker(a, m * n), arith::kronecker(a, m) * arith::kronecker(a, n));
    }
}
