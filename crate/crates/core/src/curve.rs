//! Elliptic curves over Q in long Weierstrass form
//! `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.

use crate::arith;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
    /// Reduced numerator of the j-invariant.
    pub j_num: BigInt,
    /// Reduced positive denominator of the j-invariant.
    pub j_den: BigInt,
}

/// Rational 2-torsion data read off the 2-division cubic
/// `X^3 + b2 X^2 + 8 b4 X + 16 b6` (with `X = 4x`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoTorsionInfo {
    pub has_rational_two_torsion: bool,
    pub cubic_disc_sign: Ordering,
    /// Coefficients `[c2, c1, c0]` of the monic cubic.
    pub cubic: [BigInt; 3],
}

/// Discriminants of the thirteen imaginary quadratic orders of class
/// number one, with their j-invariants.
pub const CM_J_TABLE: [(i64, i64); 13] = [
    (-3, 0),
    (-4, 1728),
    (-7, -3375),
    (-8, 8000),
    (-11, -32768),
    (-12, 54000),
    (-16, 287496),
    (-19, -884736),
    (-27, -12288000),
    (-28, 16581375),
    (-43, -884736000),
    (-67, -147197952000),
    (-163, -262537412640768000),
];

impl WeierstrassCurve {
    pub fn new(a: [BigInt; 5]) -> Result<Self> {
        let [a1, a2, a3, a4, a6] = a;
        let b2 = &a1 * &a1 + 4 * &a2;
        let b4 = 2 * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + 4 * &a6;
        let b8 = &a1 * &a1 * &a6 + 4 * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3 - &a4 * &a4;
        let c4 = &b2 * &b2 - 24 * &b4;
        let b2_cubed: BigInt = &b2 * &b2 * &b2;
        let c6: BigInt = -b2_cubed + 36 * &b2 * &b4 - 216 * &b6;
        let b2b2b8: BigInt = &b2 * &b2 * &b8;
        let disc: BigInt = -b2b2b8 - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        let num: BigInt = &c4 * &c4 * &c4;
        let g = num.gcd(&disc);
        let (mut j_num, mut j_den) = (num / &g, &disc / &g);
        if j_den.is_negative() {
            j_num = -j_num;
            j_den = -j_den;
        }
        Ok(WeierstrassCurve { a1, a2, a3, a4, a6, b2, b4, b6, b8, c4, c6, disc, j_num, j_den })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(BigInt::from))
    }

    pub fn ainvs(&self) -> [BigInt; 5] {
        [self.a1.clone(), self.a2.clone(), self.a3.clone(), self.a4.clone(), self.a6.clone()]
    }

    pub fn ainvs_i64(&self) -> Option<[i64; 5]> {
        Some([
            self.a1.to_i64()?,
            self.a2.to_i64()?,
            self.a3.to_i64()?,
            self.a4.to_i64()?,
            self.a6.to_i64()?,
        ])
    }

    /// The real locus is connected exactly when the discriminant is negative.
    pub fn is_real_connected(&self) -> bool {
        self.disc.is_negative()
    }

    pub fn two_torsion_info(&self) -> TwoTorsionInfo {
        let c2 = self.b2.clone();
        let c1 = 8 * &self.b4;
        let c0 = 16 * &self.b6;
        let d = cubic_discriminant(&c2, &c1, &c0);
        TwoTorsionInfo {
            has_rational_two_torsion: integer_root_of_monic_cubic(&c2, &c1, &c0).is_some(),
            cubic_disc_sign: d.sign().cmp_zero(),
            cubic: [c2, c1, c0],
        }
    }

    pub fn has_rational_two_torsion(&self) -> bool {
        self.two_torsion_info().has_rational_two_torsion
    }

    fn reduce_mod(x: &BigInt, p: u64) -> u64 {
        x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
    }

    /// `a_p = p + 1 - #E(F_p)` at a prime of good reduction.
    pub fn ap_point_count(&self, p: u64) -> Result<i64> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if (&self.disc % BigInt::from(p)).is_zero() {
            return Err(Error::BadPrime(p));
        }
        if p > 100_000 {
            return Err(Error::InvalidInput(format!("prime {p} exceeds the point-count range")));
        }
        let r = |x: &BigInt| Self::reduce_mod(x, p);
        if p <= 3 {
            let [a1, a2, a3, a4, a6] = [r(&self.a1), r(&self.a2), r(&self.a3), r(&self.a4), r(&self.a6)];
            let mut count = 1u64;
            for x in 0..p {
                for y in 0..p {
                    let lhs = (y * y + a1 * x * y + a3 * y) % p;
                    let rhs = (x * x * x + a2 * x * x + a4 * x + a6) % p;
                    if lhs == rhs {
                        count += 1;
                    }
                }
            }
            return Ok(p as i64 + 1 - count as i64);
        }
        // (2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6
        let (b2, b4, b6) = (r(&self.b2), r(&self.b4), r(&self.b6));
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for y in 1..p {
            chi[(y * y % p) as usize] = 1;
        }
        let mut s: i64 = 0;
        for x in 0..p {
            let f = (((4 * x + b2) % p * x % p + 2 * b4) % p * x % p + b6) % p;
            s += chi[f as usize] as i64;
        }
        Ok(-s)
    }

    /// Whether `a_2` is even; requires good reduction at 2.
    pub fn is_supersingular_at_2(&self) -> Result<bool> {
        Ok(self.ap_point_count(2)? % 2 == 0)
    }

    /// Discriminant of the CM order for the thirteen class-number-one
    /// j-invariants. j = 0 reports -3; j = 1728 reports -4.
    pub fn cm_discriminant(&self) -> Option<i64> {
        if !self.j_den.is_one() {
            return None;
        }
        let j = self.j_num.to_i64()?;
        CM_J_TABLE.iter().find(|&&(_, jj)| jj == j).map(|&(d, _)| d)
    }

    pub fn has_cm(&self) -> bool {
        self.cm_discriminant().is_some()
    }

    /// The twist `y^2 = x^3 - 27 d^2 c4 x - 54 d^3 c6` by a squarefree `d`.
    pub fn quadratic_twist(&self, d: i64) -> Result<WeierstrassCurve> {
        if d == 0 {
            return Err(Error::InvalidInput("twist by zero".into()));
        }
        if d != 1 && d != -1 && !arith::factor(d.unsigned_abs()).is_squarefree() {
            return Err(Error::InvalidInput(format!("twist parameter {d} is not squarefree")));
        }
        let d = BigInt::from(d);
        let a4 = -27 * &d * &d * &self.c4;
        let a6 = -54 * &d * &d * &d * &self.c6;
        WeierstrassCurve::new([BigInt::zero(), BigInt::zero(), BigInt::zero(), a4, a6])
    }

    /// Necessary condition for the model to be non-minimal at `p`.
    pub fn maybe_non_minimal_at(&self, p: u64) -> bool {
        let p = BigInt::from(p);
        (&self.disc % p.pow(12)).is_zero() && (&self.c4 % p.pow(4)).is_zero()
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{},{},{}]", self.a1, self.a2, self.a3, self.a4, self.a6)
    }
}

impl fmt::Debug for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeierstrassCurve{self}")
    }
}

/// Parse `[a1,a2,a3,a4,a6]`.
pub fn parse_ainvs(s: &str) -> Result<[BigInt; 5]> {
    let t = s.trim();
    let inner = t
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| Error::InvalidInput(format!("expected [a1,a2,a3,a4,a6], got {s:?}")))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(Error::InvalidInput(format!("expected 5 coefficients, got {}", parts.len())));
    }
    let mut out: [BigInt; 5] = Default::default();
    for (o, p) in out.iter_mut().zip(&parts) {
        *o = BigInt::from_str(p)
            .map_err(|_| Error::InvalidInput(format!("bad coefficient {p:?}")))?;
    }
    Ok(out)
}

impl FromStr for WeierstrassCurve {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        WeierstrassCurve::new(parse_ainvs(s)?)
    }
}

trait SignCmp {
    fn cmp_zero(self) -> Ordering;
}

impl SignCmp for num_bigint::Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }
}

pub fn cubic_discriminant(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    18 * a * b * c - 4 * a * a * a * c + a * a * b * b - 4 * b * b * b - 27 * c * c
}

fn eval_cubic(a: &BigInt, b: &BigInt, c: &BigInt, x: &BigInt) -> BigInt {
    ((x + a) * x + b) * x + c
}

/// Find an integer zero of the monotone function `f` on `[lo, hi]`.
fn bisect_zero(
    lo: BigInt,
    hi: BigInt,
    increasing: bool,
    f: &impl Fn(&BigInt) -> BigInt,
) -> Option<BigInt> {
    let (mut lo, mut hi) = (lo, hi);
    while lo <= hi {
        let mid = (&lo + &hi).div_floor(&BigInt::from(2));
        let v = f(&mid);
        if v.is_zero() {
            return Some(mid);
        }
        if v.is_positive() == increasing {
            hi = mid - 1;
        } else {
            lo = mid + 1;
        }
    }
    None
}

/// An integer root of `X^3 + a X^2 + b X + c`, found by bisection on the
/// monotone pieces between the critical points.
pub fn integer_root_of_monic_cubic(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<BigInt> {
    let f = |x: &BigInt| eval_cubic(a, b, c, x);
    let bound: BigInt = BigInt::one() + a.abs().max(b.abs()).max(c.abs());
    let neg = -bound.clone();
    // f' = 3X^2 + 2aX + b has real zeros (-a +- sqrt(D))/3, D = a^2 - 3b.
    let d: BigInt = a * a - 3 * b;
    if d.is_negative() {
        return bisect_zero(neg, bound, true, &f);
    }
    let s: BigInt = d.sqrt();
    let three = BigInt::from(3);
    let na: BigInt = -a;
    let l = (&na - &s - BigInt::one()).div_floor(&three); // <= left critical point
    let m1 = (&na - &s).div_ceil(&three); // >= left critical point
    let m2 = (&na + &s).div_floor(&three); // <= right critical point
    let r = (&na + &s + BigInt::one()).div_ceil(&three); // >= right critical point
    if let Some(x) = bisect_zero(neg, l.clone(), true, &f) {
        return Some(x);
    }
    if m1 <= m2 {
        if let Some(x) = bisect_zero(m1.clone(), m2.clone(), false, &f) {
            return Some(x);
        }
    }
    let mut x = l + 1;
    while x < r {
        if (x < m1 || x > m2) && f(&x).is_zero() {
            return Some(x);
        }
        x += 1;
    }
    bisect_zero(r, bound, true, &f)
}
