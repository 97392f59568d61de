use degparity::cubicfield::{prop5_predicate, two_division_field, CubicField, Prop5Outcome};
use degparity::curve::WeierstrassCurve;
use degparity::Error;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

type Poly = Vec<BigInt>;

fn trim(mut p: Poly) -> Poly {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    p
}

fn eval_sign_at_inf(p: &Poly, positive: bool) -> i32 {
    let lead = p.last().unwrap();
    let deg = p.len() - 1;
    let s = lead.signum().to_string().parse::<i32>().unwrap();
    if positive || deg % 2 == 0 {
        s
    } else {
        -s
    }
}

/// `-(a mod b)` up to a positive factor, by pseudo-division.
fn neg_prem(a: &Poly, b: &Poly) -> Poly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while r.len() - 1 >= db && !(r.len() == 1 && r[0].is_zero()) {
        let lr = r.last().unwrap().clone();
        let shift = r.len() - 1 - db;
        // r <- |lb| r - sign(lb) lr x^shift b keeps the sign of the remainder
        let m = lb.abs();
        let s = if lb.is_negative() { -lr.clone() } else { lr.clone() };
        let mut next: Poly = r.iter().map(|c| c * &m).collect();
        for (i, c) in b.iter().enumerate() {
            next[i + shift] -= &s * c;
        }
        next.pop();
        r = trim(next);
        if r.is_empty() {
            r = vec![BigInt::zero()];
        }
        if r.len() - 1 < db {
            break;
        }
    }
    r.into_iter().map(|c| -c).collect()
}

/// Number of distinct real roots of a squarefree polynomial from a Sturm
/// sequence evaluated at minus and plus infinity.
fn sturm_real_roots(p: &Poly) -> usize {
    let dp: Poly = p.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let mut seq = vec![p.clone(), dp];
    loop {
        let n = seq.len();
        let r = trim(neg_prem(&seq[n - 2], &seq[n - 1]));
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        let last = r.len() == 1;
        seq.push(r);
        if last {
            break;
        }
    }
    let changes = |pos: bool| {
        let signs: Vec<i32> = seq.iter().map(|q| eval_sign_at_inf(q, pos)).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    };
    changes(false) - changes(true)
}

fn irreducible(c: [i64; 3]) -> Option<CubicField> {
    CubicField::new(c.map(BigInt::from)).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn signature_matches_sturm_count(c2 in -60i64..60, c1 in -400i64..400, c0 in -3000i64..3000) {
        let Some(k) = irreducible([c2, c1, c0]) else { return Ok(()) };
        let p: Poly = vec![c0.into(), c1.into(), c2.into(), 1.into()];
        let real = sturm_real_roots(&p);
        prop_assert_eq!(k.poly_disc.is_negative(), real == 1);
        prop_assert_eq!(k.signature, if real == 1 { (1, 1) } else { (3, 0) });
    }

    #[test]
    fn field_disc_divides_poly_disc_with_square_quotient(c2 in -60i64..60, c1 in -400i64..400, c0 in -3000i64..3000) {
        let Some(k) = irreducible([c2, c1, c0]) else { return Ok(()) };
        prop_assert!(!k.field_disc.is_zero());
        let q = &k.poly_disc / &k.field_disc;
        prop_assert_eq!(&q * &k.field_disc, k.poly_disc.clone());
        let r = q.sqrt();
        prop_assert_eq!(&r * &r, q);
        prop_assert_eq!(r, k.index.clone());
    }

    #[test]
    fn scaling_the_root_keeps_the_field(c2 in -20i64..20, c1 in -50i64..50, c0 in -200i64..200, t in 2i64..6) {
        // theta -> t * theta scales the discriminant by t^6, not the field
        let Some(k) = irreducible([c2, c1, c0]) else { return Ok(()) };
        let scaled = irreducible([c2 * t, c1 * t * t, c0 * t * t * t]).unwrap();
        prop_assert_eq!(scaled.field_disc, k.field_disc);
    }
}

#[test]
fn sturm_count_sanity() {
    // (x-1)(x-2)(x+3) and x^3 - 2
    assert_eq!(sturm_real_roots(&vec![6.into(), (-7).into(), 0.into(), 1.into()]), 3);
    assert_eq!(sturm_real_roots(&vec![(-2).into(), 0.into(), 0.into(), 1.into()]), 1);
}

#[test]
fn level_24859_field_is_complex() {
    let e = WeierstrassCurve::from_i64([0, 1, 1, -4, -10]).unwrap();
    assert_eq!(two_division_field(&e).unwrap().signature, (1, 1));
}

#[test]
fn prop5_outcomes() {
    // h = 1, v = 1
    let e11 = WeierstrassCurve::from_i64([0, -1, 1, -10, -20]).unwrap();
    assert_eq!(prop5_predicate(&e11).unwrap(), Prop5Outcome::NeitherDetected);
    // 43a1: h = 1, v = 2
    let e43 = WeierstrassCurve::from_i64([0, 1, 1, 0, 0]).unwrap();
    assert_eq!(prop5_predicate(&e43).unwrap(), Prop5Outcome::DeformationExistsVia2);
    // 571b1: h = 2
    let e571 = WeierstrassCurve::from_i64([0, 1, 1, -4, 2]).unwrap();
    assert_eq!(prop5_predicate(&e571).unwrap(), Prop5Outcome::DeformationExistsVia1);
    // 37a1 has positive discriminant
    let e37 = WeierstrassCurve::from_i64([0, 0, 1, -1, 0]).unwrap();
    assert!(matches!(prop5_predicate(&e37), Err(Error::InvalidInput(_))));
}
