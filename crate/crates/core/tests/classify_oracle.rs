mod common;

use degparity::arith;
use degparity::classify::{self, Citation, Parity, Rule, WatkinsRow, CM_LEVELS};
use degparity::curve::WeierstrassCurve;
use degparity::error::Error;
use degparity::modsym::RankParity;

fn curve(a: [i64; 5]) -> WeierstrassCurve {
    WeierstrassCurve::from_i64(a).unwrap()
}

fn filter(a: [i64; 5], n: u64) -> (Parity, Rule) {
    let v = classify::theorem_one_filter(&curve(a), &arith::factor(n)).unwrap();
    (v.parity, v.rule)
}

fn watkins_row(label: &str, n: u64, degree: u64, a: [i64; 5]) -> WatkinsRow {
    WatkinsRow {
        label: label.into(),
        conductor: n,
        degree,
        has_two_torsion: curve(a).has_rational_two_torsion(),
    }
}

#[test]
fn worked_examples() {
    assert_eq!(filter([1, 1, 1, -10, -10], 15), (Parity::Undetermined, Rule::Case3a));
    assert_eq!(filter([1, -1, 0, -58, -105], 2537), (Parity::Undetermined, Rule::Case3a));
    assert_eq!(filter([0, 1, 1, -4, -10], 24859), (Parity::Undetermined, Rule::Case3b));
    assert_eq!(filter([0, 0, 1, 0, 2], 243), (Parity::Undetermined, Rule::Case3c));
}

#[test]
fn filter_rules() {
    assert_eq!(filter([0, 0, 0, -4, 0], 64), (Parity::Undetermined, Rule::OutsideScope));
    assert_eq!(filter([0, 0, 1, -1, 0], 37), (Parity::Even, Rule::Case3b));
    assert_eq!(filter([1, 1, 1, -30, -76], 121), (Parity::Even, Rule::PrimePowerNonCm));
    assert_eq!(filter([1, 0, 1, -3, 1], 105).1, Rule::TooManyOddPrimes);
    assert!(matches!(
        classify::theorem_one_filter(&curve([0, -1, 1, -10, -20]), &arith::factor(13)),
        Err(Error::ConductorMismatch { .. })
    ));
}

#[test]
fn serialized_names() {
    let v = classify::theorem_one_filter(&curve([0, 1, 1, -4, -10]), &arith::factor(24859)).unwrap();
    let json = serde_json::to_value(&v).unwrap();
    assert_eq!(json["parity"], "undetermined");
    assert_eq!(json["rule"], "CASE_3B");
    assert_eq!(json["citations"][0], "odd-degree-conditions");
    assert_eq!(serde_json::to_value(Rule::CompositeNo2Torsion).unwrap(), "COMPOSITE_NO_2TORSION");
    assert_eq!(serde_json::to_value(Citation::NeumannSetzer).unwrap(), Citation::NeumannSetzer.as_str());
}

#[test]
fn prime_level_predictions() {
    for (a, n) in [([0, -1, 1, -10, -20], 11), ([1, -1, 1, -1, -14], 17)] {
        let v = classify::predict_parity_prime_level(&curve(a), n).unwrap();
        assert_eq!(v.parity, Parity::Odd);
    }
    // 37a has even degree 2
    let v = classify::predict_parity_prime_level(&curve([0, 0, 1, -1, 0]), 37).unwrap();
    assert_eq!((v.parity, v.rule), (Parity::Even, Rule::TmNeZ2));
    assert!(matches!(classify::predict_parity_prime_level(&curve([1, 1, 1, -10, -10]), 15), Err(Error::NotPrime(15))));
}

#[test]
fn watkins_examples() {
    let rep = classify::watkins_verdict(&[watkins_row("11a1", 11, 1, [0, -1, 1, -10, -20])]);
    assert!(rep.passed());
    assert_eq!(rep.checked, ["11a1"]);
    let rep = classify::watkins_verdict(&[watkins_row("24859a1", 24859, 3979, [0, 1, 1, -4, -10])]);
    assert!(rep.passed());
    assert_eq!(rep.checked, ["24859a1"]);
    let rep = classify::watkins_verdict(&[watkins_row("17a1", 17, 1, [1, -1, 1, -1, -14])]);
    assert!(rep.checked.is_empty());
    assert_eq!(rep.excluded_two_torsion, ["17a1"]);
    let rep = classify::watkins_verdict(&[watkins_row("fake", 37, 1, [0, 0, 1, -1, 0])]);
    assert_eq!(rep.violations, ["fake"]);
}

#[test]
fn composite_examples() {
    let c = classify::composite_conditions(&curve([1, -1, 0, -58, -105]), &arith::factor(2537), RankParity::Even);
    assert!(c.all_pass(), "{:?}", c.failures());
    let c = classify::composite_conditions(&curve([1, 1, 1, -10, -10]), &arith::factor(1155), RankParity::Even);
    assert!(!c.at_most_two_odd_primes);
    let c = classify::composite_conditions(&curve([1, 1, 1, -10, -10]), &arith::factor(15), RankParity::Odd);
    assert!(!c.even_analytic_rank && !c.all_pass());
    let c = classify::composite_conditions(&curve([1, 1, 1, -10, -10]), &arith::factor(15), RankParity::Even);
    assert!(c.all_pass());
}

/// The filter only ever rules out odd degree; no odd-degree row of the
/// database may be called even.
#[test]
fn filter_is_sound_on_the_database() {
    let (records, _) = common::fixture();
    let mut odd = 0;
    for r in records.iter().filter(|r| r.is_optimal()) {
        let v = classify::theorem_one_filter(&r.curve().unwrap(), &arith::factor(r.conductor)).unwrap();
        assert!(!v.citations.is_empty());
        if r.degree.unwrap() % 2 == 1 {
            odd += 1;
            assert_ne!(v.parity, Parity::Even, "{} {:?}", r.label, v);
        }
        if v.parity == Parity::Odd {
            panic!("{}: the filter never decides odd", r.label);
        }
    }
    assert!(odd > 50);
}

/// Apart from 2-torsion cases, a CM curve is left undetermined only at
/// the four CM levels.
#[test]
fn cm_undetermined_only_at_cm_levels() {
    let (records, _) = common::fixture();
    let mut seen = Vec::new();
    for r in &records {
        let e = r.curve().unwrap();
        if !e.has_cm() || e.has_rational_two_torsion() {
            continue;
        }
        let v = classify::theorem_one_filter(&e, &arith::factor(r.conductor)).unwrap();
        if v.parity == Parity::Undetermined && v.rule != Rule::OutsideScope {
            assert!(CM_LEVELS.contains(&r.conductor), "{}", r.label);
            seen.push(r.conductor);
        }
    }
    seen.sort();
    seen.dedup();
    // the CM curves at 32 and 49 all have 2-torsion
    assert_eq!(seen, [27, 243]);
}
