//! Verdicts on the parity of the modular degree.
//!
//! The conductor/curve filter only ever rules parity even or leaves it
//! open; an odd verdict comes from the local Hecke algebra at prime level.

use crate::arith::{self, Factorization};
use crate::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::hecke2::{self, TmTest};
use crate::modsym::{self, RankParity};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
    Undetermined,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Odd => "odd",
            Parity::Even => "even",
            Parity::Undetermined => "undetermined",
        })
    }
}

impl Parity {
    pub fn of(n: u64) -> Parity {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    TooManyOddPrimes,
    OddAnalyticRank,
    #[serde(rename = "COMPOSITE_NO_2TORSION")]
    CompositeNo2Torsion,
    PrimePowerNonCm,
    #[serde(rename = "CASE_3A")]
    Case3a,
    #[serde(rename = "CASE_3B")]
    Case3b,
    #[serde(rename = "CASE_3C")]
    Case3c,
    #[serde(rename = "TM_EQ_Z2")]
    TmEqZ2,
    #[serde(rename = "TM_NE_Z2")]
    TmNeZ2,
    OutsideScope,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::TooManyOddPrimes => "TOO_MANY_ODD_PRIMES",
            Rule::OddAnalyticRank => "ODD_ANALYTIC_RANK",
            Rule::CompositeNo2Torsion => "COMPOSITE_NO_2TORSION",
            Rule::PrimePowerNonCm => "PRIME_POWER_NON_CM",
            Rule::Case3a => "CASE_3A",
            Rule::Case3b => "CASE_3B",
            Rule::Case3c => "CASE_3C",
            Rule::TmEqZ2 => "TM_EQ_Z2",
            Rule::TmNeZ2 => "TM_NE_Z2",
            Rule::OutsideScope => "OUTSIDE_SCOPE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which result a verdict rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Citation {
    /// Necessary conditions on an odd-degree curve: conductor shape, rank
    /// parity, and the three admissible cases.
    OddDegreeConditions,
    /// Odd degree at prime level without 2-torsion forces `N = 3 mod 8`.
    WatkinsPrimeLevel,
    /// Composite conductor: even analytic rank and a rational 2-torsion
    /// point.
    CompositeLevel,
    /// Atkin–Lehner sign and analytic rank.
    AtkinLehnerSign,
    /// Quadratic twists preserve E[2]; prime-power conductors.
    PrimePowerTwist,
    /// Degree parity versus congruences between eigenforms at prime level.
    CongruenceCriterion,
    /// Odd degree exactly when the local Hecke algebra is Z2.
    LocalHeckeRank,
    /// Residual representations supersingular at 2.
    SupersingularResidual,
    /// Eisenstein ideal rank and the `u^2 + 16 v^2` criterion.
    EisensteinRank,
    /// Prime conductor `u^2 + 64` curves.
    NeumannSetzer,
    /// Class number and unit of the cubic 2-division field.
    CubicFieldDeformation,
}

impl Citation {
    pub fn as_str(self) -> &'static str {
        match self {
            Citation::OddDegreeConditions => "odd-degree-conditions",
            Citation::WatkinsPrimeLevel => "watkins-prime-level",
            Citation::CompositeLevel => "composite-level",
            Citation::AtkinLehnerSign => "atkin-lehner-sign",
            Citation::PrimePowerTwist => "prime-power-twist",
            Citation::CongruenceCriterion => "congruence-criterion",
            Citation::LocalHeckeRank => "local-hecke-rank",
            Citation::SupersingularResidual => "supersingular-residual",
            Citation::EisensteinRank => "eisenstein-rank",
            Citation::NeumannSetzer => "neumann-setzer",
            Citation::CubicFieldDeformation => "cubic-field-deformation",
        }
    }
}

impl fmt::Display for Citation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub parity: Parity,
    pub rule: Rule,
    pub citations: Vec<Citation>,
}

impl Verdict {
    fn new(parity: Parity, rule: Rule, citations: &[Citation]) -> Verdict {
        Verdict { parity, rule, citations: citations.to_vec() }
    }

    fn even(rule: Rule, citations: &[Citation]) -> Verdict {
        Verdict::new(Parity::Even, rule, citations)
    }

    fn open(rule: Rule, citations: &[Citation]) -> Verdict {
        Verdict::new(Parity::Undetermined, rule, citations)
    }
}

/// Levels at which a CM curve may have odd degree without 2-torsion.
pub const CM_LEVELS: [u64; 4] = [27, 32, 49, 243];

/// Cheap consistency check between a model and a claimed conductor: every
/// prime of `N` divides the discriminant, and what is left of the
/// discriminant after removing those primes is a twelfth power (the
/// contribution of a non-minimal model).
pub fn validate_conductor(curve: &WeierstrassCurve, conductor: &Factorization) -> Result<()> {
    let n = conductor.n;
    if n < 11 {
        return Err(Error::ConductorMismatch { conductor: n, reason: "no curves below 11".into() });
    }
    let mut rest = curve.disc.abs();
    for p in conductor.primes() {
        let bp = BigInt::from(p);
        if !rest.is_multiple_of(&bp) {
            return Err(Error::ConductorMismatch {
                conductor: n,
                reason: format!("{p} does not divide the discriminant"),
            });
        }
        while rest.is_multiple_of(&bp) {
            rest /= &bp;
        }
    }
    if !rest.is_one() {
        let root = rest.nth_root(12);
        if root.pow(12) != rest {
            return Err(Error::ConductorMismatch {
                conductor: n,
                reason: format!("discriminant has bad primes outside the conductor (cofactor {rest})"),
            });
        }
    }
    Ok(())
}

/// The closed-form filter: the first violated necessary condition makes
/// the verdict even; otherwise the applicable case is reported with
/// parity left undetermined.
pub fn theorem_one_filter(curve: &WeierstrassCurve, conductor: &Factorization) -> Result<Verdict> {
    use Citation::*;
    validate_conductor(curve, conductor)?;
    let n = conductor.n;
    if conductor.num_odd_primes() > 2 {
        return Ok(Verdict::even(Rule::TooManyOddPrimes, &[OddDegreeConditions]));
    }
    let prime_power = conductor.prime_power();
    if let Some((2, _)) = prime_power {
        if n != 32 {
            return Ok(Verdict::open(Rule::OutsideScope, &[OddDegreeConditions]));
        }
    }
    let cm = curve.has_cm();
    if let Some((p, k)) = prime_power {
        if p != 2 && k >= 2 && !CM_LEVELS.contains(&n) && !cm {
            return Ok(Verdict::even(Rule::PrimePowerNonCm, &[OddDegreeConditions, PrimePowerTwist]));
        }
    }
    let two_torsion = curve.has_rational_two_torsion();
    if conductor.num_primes() >= 2 && !two_torsion {
        return Ok(Verdict::even(Rule::CompositeNo2Torsion, &[OddDegreeConditions, CompositeLevel]));
    }
    if two_torsion {
        return Ok(Verdict::open(Rule::Case3a, &[OddDegreeConditions]));
    }
    if cm && CM_LEVELS.contains(&n) {
        return Ok(Verdict::open(Rule::Case3c, &[OddDegreeConditions]));
    }
    if conductor.is_prime() {
        let supersingular = curve.is_supersingular_at_2()?;
        return Ok(if supersingular && curve.disc.is_negative() {
            Verdict::open(Rule::Case3b, &[OddDegreeConditions, SupersingularResidual])
        } else {
            Verdict::even(Rule::Case3b, &[OddDegreeConditions, SupersingularResidual])
        });
    }
    // prime power, no 2-torsion, and not a CM curve at one of the CM levels
    Ok(Verdict::even(Rule::Case3c, &[OddDegreeConditions]))
}

/// `a_l mod 2` for the primes used to match a curve against local factors.
pub fn ap_mod2(curve: &WeierstrassCurve, level: u64) -> Result<BTreeMap<u64, bool>> {
    let mut out = BTreeMap::new();
    for p in hecke2::eigensystem_primes(level) {
        if level % p != 0 {
            out.insert(p, curve.ap_point_count(p)? % 2 != 0);
        }
    }
    Ok(out)
}

/// Parity at prime level from the local factor of T/2T containing the
/// curve's mod-2 eigensystem: odd exactly when that factor is Z2. The
/// curve is assumed optimal in its isogeny class.
pub fn predict_parity_prime_level(curve: &WeierstrassCurve, n: u64) -> Result<Verdict> {
    if !arith::is_prime(n) {
        return Err(Error::NotPrime(n));
    }
    validate_conductor(curve, &arith::factor(n))?;
    let decomp = hecke2::decomposition_for_level(n)?;
    let ap = ap_mod2(curve, n)?;
    let matches: Vec<_> =
        decomp.factors.iter().filter(|f| hecke2::matches_eigensystem(n, f, &ap)).collect();
    let factor = match matches.as_slice() {
        [] => return Err(Error::NoMatchingFactor),
        [f] => *f,
        _ => {
            return Err(Error::ContractViolation(format!(
                "{} local factors share the curve's eigensystem",
                matches.len()
            )))
        }
    };
    let mut citations = vec![Citation::CongruenceCriterion, Citation::LocalHeckeRank];
    if factor.eisenstein {
        citations.push(Citation::EisensteinRank);
    }
    Ok(match hecke2::tm_equals_z2(factor) {
        TmTest::EqualsZ2 => Verdict { parity: Parity::Odd, rule: Rule::TmEqZ2, citations },
        _ => Verdict { parity: Parity::Even, rule: Rule::TmNeZ2, citations },
    })
}

/// Rank parity from the Atkin–Lehner sign on the curve's eigenline.
pub fn computed_rank_parity(curve: &WeierstrassCurve, n: u64) -> Result<RankParity> {
    let space = modsym::build_space(n)?;
    let mut ap = BTreeMap::new();
    for p in arith::primes_up_to(modsym::sturm_bound(n).max(3)) {
        if n % p != 0 {
            ap.insert(p, curve.ap_point_count(p)?);
        }
    }
    let line = modsym::locate_eigenform(&space, &ap)?;
    modsym::analytic_rank_parity(&space, &line)
}

/// Row consumed by the prime-level congruence check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WatkinsRow {
    pub label: String,
    pub conductor: u64,
    pub degree: u64,
    pub has_two_torsion: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct WatkinsReport {
    /// Rows with odd degree, prime conductor and no 2-torsion.
    pub checked: Vec<String>,
    /// Checked rows whose conductor is not 3 mod 8.
    pub violations: Vec<String>,
    /// Odd-degree prime-conductor rows skipped because of 2-torsion.
    pub excluded_two_torsion: Vec<String>,
}

impl WatkinsReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn watkins_verdict(rows: &[WatkinsRow]) -> WatkinsReport {
    let mut rep = WatkinsReport::default();
    for r in rows {
        if r.degree % 2 == 0 || !arith::is_prime(r.conductor) {
            continue;
        }
        if r.has_two_torsion {
            rep.excluded_two_torsion.push(r.label.clone());
            continue;
        }
        rep.checked.push(r.label.clone());
        if r.conductor % 8 != 3 {
            rep.violations.push(r.label.clone());
        }
    }
    rep
}

/// Conditions an odd-degree curve must meet, each reported separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CompositeChecklist {
    pub at_most_three_primes: bool,
    pub odd_level_at_most_two_primes: bool,
    pub at_most_two_odd_primes: bool,
    pub even_analytic_rank: bool,
    pub composite_has_two_torsion: bool,
}

impl CompositeChecklist {
    pub fn all_pass(&self) -> bool {
        self.at_most_three_primes
            && self.odd_level_at_most_two_primes
            && self.at_most_two_odd_primes
            && self.even_analytic_rank
            && self.composite_has_two_torsion
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.at_most_three_primes {
            out.push("at_most_three_primes");
        }
        if !self.odd_level_at_most_two_primes {
            out.push("odd_level_at_most_two_primes");
        }
        if !self.at_most_two_odd_primes {
            out.push("at_most_two_odd_primes");
        }
        if !self.even_analytic_rank {
            out.push("even_analytic_rank");
        }
        if !self.composite_has_two_torsion {
            out.push("composite_has_two_torsion");
        }
        out
    }
}

pub fn composite_conditions(
    curve: &WeierstrassCurve,
    conductor: &Factorization,
    rank_parity: RankParity,
) -> CompositeChecklist {
    let k = conductor.num_primes();
    CompositeChecklist {
        at_most_three_primes: k <= 3,
        odd_level_at_most_two_primes: conductor.n % 2 == 0 || k <= 2,
        at_most_two_odd_primes: conductor.num_odd_primes() <= 2,
        even_analytic_rank: rank_parity == RankParity::Even,
        composite_has_two_torsion: k < 2 || curve.has_rational_two_torsion(),
    }
}

/// Reduce a model's discriminant sign to an ordering, for reports.
pub fn discriminant_sign(curve: &WeierstrassCurve) -> i8 {
    if curve.disc.is_zero() {
        0
    } else if curve.disc.is_negative() {
        -1
    } else {
        1
    }
}
