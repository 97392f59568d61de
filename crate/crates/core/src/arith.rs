//! Elementary number theory on machine integers.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Prime factorization `n = prod p^e`, primes in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn num_odd_primes(&self) -> usize {
        self.primes().filter(|&p| p != 2).count()
    }

    pub fn is_prime(&self) -> bool {
        self.factors.len() == 1 && self.factors[0].1 == 1
    }

    /// `Some((p, k))` when `n = p^k` with `k >= 1`.
    pub fn prime_power(&self) -> Option<(u64, u32)> {
        match self.factors.as_slice() {
            [(p, k)] => Some((*p, *k)),
            _ => None,
        }
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

/// `u^2 + 16 v^2 = n` with `u, v > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRepresentation {
    pub u: u64,
    pub v: u64,
}

/// Outcome of the `N = u^2 + 64` test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeumannSetzer {
    pub u: u64,
    pub odd_degree: bool,
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd(a.unsigned_abs(), b.unsigned_abs()) as i64
}

/// Extended gcd: `(g, x, y)` with `a x + b y = g >= 0`.
pub fn xgcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    (r0 as i64, s0 as i64, t0 as i64)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = xgcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x.checked_mul(x).is_none_or(|s| s > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|s| s <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u64) -> Option<u64> {
    let r = isqrt(n);
    (r * r == n).then_some(r)
}

/// Deterministic Miller-Rabin; the base set is exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's variant; n is odd, composite and has no small factors.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut ys = 2u64;
        let mut r = 1u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

/// Factor `n >= 1`: trial division up to 10^6, then Pollard rho.
pub fn factor(n: u64) -> Factorization {
    assert!(n >= 1, "factor(0) is undefined");
    let mut primes = Vec::new();
    let mut m = n;
    let mut p = 2u64;
    while p <= 1_000_000 && p * p <= m {
        while m % p == 0 {
            primes.push(p);
            m /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        push_factors(m, &mut primes);
    }
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Factorization { n, factors }
}

/// Primes `p <= n` by a sieve.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut a = a as i128;
    let mut n = n as i128;
    let mut sign = 1;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -1;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol (a / n), n odd positive.
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        (a, n) = (n % a, a);
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The unique `u, v > 0` with `u^2 + 16 v^2 = n`, for a prime `n = 1 mod 8`.
pub fn represent_u2_plus_16v2(n: u64) -> Result<FormRepresentation> {
    if n % 8 != 1 {
        return Err(Error::InvalidInput(format!("{n} is not 1 mod 8")));
    }
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    let mut v = 1u64;
    while 16 * v * v < n {
        if let Some(u) = is_square(n - 16 * v * v) {
            return Ok(FormRepresentation { u, v });
        }
        v += 1;
    }
    Err(Error::ContractViolation(format!(
        "no representation of the prime {n} as u^2 + 16v^2"
    )))
}

/// `v = (N - 1)/8 (mod 2)` for the representation `N = u^2 + 16 v^2`.
pub fn merel_criterion(n: u64) -> Result<bool> {
    let r = represent_u2_plus_16v2(n)?;
    Ok(r.v % 2 == ((n - 1) / 8) % 2)
}

/// For prime `N` with `N - 64` a perfect square `u^2`, report `u` and
/// whether the degree of the attached curve is odd (`N != 1 mod 16`).
pub fn neumann_setzer_test(n: u64) -> Result<Option<NeumannSetzer>> {
    if !is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    if n < 64 {
        return Ok(None);
    }
    Ok(is_square(n - 64).map(|u| NeumannSetzer {
        u,
        odd_degree: n % 16 != 1,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn primality_small() {
        for n in 0..20_000 {
            assert_eq!(is_prime(n), naive_prime(n), "{n}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
        assert!(!is_prime(3825123056546413051));
    }

    #[test]
    fn factor_examples() {
        assert_eq!(factor(2537).factors, vec![(43, 1), (59, 1)]);
        assert_eq!(factor(243).factors, vec![(3, 5)]);
        assert_eq!(factor(1).factors, vec![]);
        let big = 1_000_003u64 * 998_244_353;
        assert_eq!(factor(big).factors, vec![(1_000_003, 1), (998_244_353, 1)]);
    }

    #[test]
    fn form_examples() {
        assert_eq!(represent_u2_plus_16v2(17).unwrap(), FormRepresentation { u: 1, v: 1 });
        assert_eq!(represent_u2_plus_16v2(73).unwrap(), FormRepresentation { u: 3, v: 2 });
        assert_eq!(represent_u2_plus_16v2(113).unwrap(), FormRepresentation { u: 7, v: 2 });
        assert!(represent_u2_plus_16v2(19).is_err());
        assert!(matches!(represent_u2_plus_16v2(9 * 17 * 3 * 3), Err(_)));
        assert!(!merel_criterion(17).unwrap());
        assert!(merel_criterion(113).unwrap());
        assert!(!merel_criterion(73).unwrap());
    }

    #[test]
    fn neumann_setzer_examples() {
        assert_eq!(
            neumann_setzer_test(73).unwrap(),
            Some(NeumannSetzer { u: 3, odd_degree: true })
        );
        assert_eq!(
            neumann_setzer_test(113).unwrap(),
            Some(NeumannSetzer { u: 7, odd_degree: false })
        );
        assert_eq!(neumann_setzer_test(11).unwrap(), None);
        assert!(neumann_setzer_test(65).is_err());
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_up_to(200).into_iter().filter(|&p| p > 2) {
            for a in -50i64..50 {
                let e = pow_mod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
                let expect = if e == 0 { 0 } else if e == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a, p as i64), expect, "({a}/{p})");
            }
        }
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(3, 4), 1);
    }
}
