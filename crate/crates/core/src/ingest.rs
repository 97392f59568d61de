//! Cremona-style flat files in, audit reports out.
//!
//! `allcurves` rows: `N class number [a1,a2,a3,a4,a6] rank torsion`.
//! `degphi` rows: `N class number [a1,a2,a3,a4,a6] degree`.

use crate::arith;
use crate::classify::{self, Citation, CompositeChecklist, Parity, Rule, Verdict, WatkinsReport, WatkinsRow};
use crate::cubicfield::{self, Prop5Outcome};
use crate::curve::{parse_ainvs, WeierstrassCurve};
use crate::error::{Error, Result};
use crate::hecke2;
use crate::modsym::RankParity;
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::BufRead;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveRecord {
    pub conductor: u64,
    pub class_code: String,
    pub curve_number: u32,
    #[serde(serialize_with = "ser_ainvs")]
    pub a_invariants: [BigInt; 5],
    pub rank: u32,
    pub torsion_order: u32,
    pub degree: Option<u64>,
    pub label: String,
}

fn ser_ainvs<S: Serializer>(a: &[BigInt; 5], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_ainvs(a))
}

pub fn format_ainvs(a: &[BigInt; 5]) -> String {
    format!("[{},{},{},{},{}]", a[0], a[1], a[2], a[3], a[4])
}

impl CurveRecord {
    pub fn curve(&self) -> Result<WeierstrassCurve> {
        WeierstrassCurve::new(self.a_invariants.clone())
    }

    /// The row in `allcurves` format.
    pub fn to_allcurves_line(&self) -> String {
        format!(
            "{} {} {} {} {} {}",
            self.conductor,
            self.class_code,
            self.curve_number,
            format_ainvs(&self.a_invariants),
            self.rank,
            self.torsion_order
        )
    }

    /// The row in `degphi` format, when a degree is attached.
    pub fn to_degphi_line(&self) -> Option<String> {
        self.degree.map(|d| {
            format!(
                "{} {} {} {} {}",
                self.conductor,
                self.class_code,
                self.curve_number,
                format_ainvs(&self.a_invariants),
                d
            )
        })
    }

    pub fn is_optimal(&self) -> bool {
        self.curve_number == 1
    }
}

/// A problem with one input line; parsing carries on past it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    fn new(line: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, message: message.into() }
    }
}

struct Head {
    conductor: u64,
    class_code: String,
    curve_number: u32,
    a_invariants: [BigInt; 5],
}

fn parse_head(fields: &[&str]) -> std::result::Result<Head, String> {
    let conductor: u64 = fields[0].parse().map_err(|_| format!("bad conductor {:?}", fields[0]))?;
    if conductor == 0 {
        return Err("conductor must be positive".into());
    }
    let class_code = fields[1];
    if class_code.is_empty() || !class_code.chars().all(|c| c.is_ascii_lowercase()) {
        return Err(format!("bad class code {class_code:?}"));
    }
    let curve_number: u32 = fields[2].parse().map_err(|_| format!("bad curve number {:?}", fields[2]))?;
    if curve_number == 0 {
        return Err("curve number must be positive".into());
    }
    let a_invariants = parse_ainvs(fields[3]).map_err(|e| e.to_string())?;
    WeierstrassCurve::new(a_invariants.clone()).map_err(|e| e.to_string())?;
    Ok(Head { conductor, class_code: class_code.to_string(), curve_number, a_invariants })
}

fn label(conductor: u64, class_code: &str, number: u32) -> String {
    format!("{conductor}{class_code}{number}")
}

fn lines(input: impl BufRead) -> impl Iterator<Item = (usize, std::io::Result<String>)> {
    input.lines().enumerate().map(|(i, l)| (i + 1, l))
}

/// Parse an `allcurves` stream. Malformed lines become diagnostics.
pub fn parse_allcurves(input: impl BufRead) -> (Vec<CurveRecord>, Vec<Diagnostic>) {
    let mut records = Vec::new();
    let mut diags = Vec::new();
    for (n, line) in lines(input) {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                diags.push(Diagnostic::new(n, format!("read error: {e}")));
                continue;
            }
        };
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 6 {
            diags.push(Diagnostic::new(n, format!("expected 6 fields, found {}", fields.len())));
            continue;
        }
        let head = match parse_head(&fields) {
            Ok(h) => h,
            Err(m) => {
                diags.push(Diagnostic::new(n, m));
                continue;
            }
        };
        let Ok(rank) = fields[4].parse::<u32>() else {
            diags.push(Diagnostic::new(n, format!("bad rank {:?}", fields[4])));
            continue;
        };
        let torsion_order = match fields[5].parse::<u32>() {
            Ok(t) if t >= 1 => t,
            _ => {
                diags.push(Diagnostic::new(n, format!("bad torsion order {:?}", fields[5])));
                continue;
            }
        };
        records.push(CurveRecord {
            label: label(head.conductor, &head.class_code, head.curve_number),
            conductor: head.conductor,
            class_code: head.class_code,
            curve_number: head.curve_number,
            a_invariants: head.a_invariants,
            rank,
            torsion_order,
            degree: None,
        });
    }
    (records, diags)
}

/// Parse a `degphi` stream into label → degree. A repeated label keeps
/// the last value and adds a warning.
pub fn parse_degphi(input: impl BufRead) -> (BTreeMap<String, u64>, Vec<Diagnostic>) {
    let mut out = BTreeMap::new();
    let mut diags = Vec::new();
    for (n, line) in lines(input) {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                diags.push(Diagnostic::new(n, format!("read error: {e}")));
                continue;
            }
        };
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 5 {
            diags.push(Diagnostic::new(n, format!("expected 5 fields, found {}", fields.len())));
            continue;
        }
        let head = match parse_head(&fields) {
            Ok(h) => h,
            Err(m) => {
                diags.push(Diagnostic::new(n, m));
                continue;
            }
        };
        let degree = match fields[4].parse::<u64>() {
            Ok(d) if d >= 1 => d,
            _ => {
                diags.push(Diagnostic::new(n, format!("bad degree {:?}", fields[4])));
                continue;
            }
        };
        let key = label(head.conductor, &head.class_code, head.curve_number);
        if out.insert(key.clone(), degree).is_some() {
            diags.push(Diagnostic::new(n, format!("duplicate label {key}; keeping the last value")));
        }
    }
    (out, diags)
}

/// Attach degrees to records by label.
pub fn attach_degrees(records: &mut [CurveRecord], degrees: &BTreeMap<String, u64>) {
    for r in records.iter_mut() {
        r.degree = degrees.get(&r.label).copied();
    }
}

// ---------------------------------------------------------------------------
// audit

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AuditOptions {
    /// Ignore records above this conductor.
    pub max_level: Option<u64>,
    /// Run the modular-symbol computations (Hecke algebra, rank parity,
    /// Eisenstein factors, cubic fields).
    pub slow: bool,
    /// Largest prime level for Hecke-algebra predictions in slow mode.
    pub hecke_max_level: u64,
    /// Largest prime level for the Atkin–Lehner rank parity in slow mode.
    pub rank_max_level: u64,
}

impl Default for AuditOptions {
    fn default() -> Self {
        AuditOptions { max_level: None, slow: false, hecke_max_level: 1000, rank_max_level: 500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Agreement {
    Agree,
    Disagree,
    /// The verdict leaves the parity open.
    Open,
    NoDegree,
    /// The verdict could not be computed; see `error`.
    Error,
}

impl Agreement {
    fn as_str(self) -> &'static str {
        match self {
            Agreement::Agree => "agree",
            Agreement::Disagree => "disagree",
            Agreement::Open => "open",
            Agreement::NoDegree => "no_degree",
            Agreement::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankParitySource {
    /// Rank column of the input.
    Database,
    /// Atkin–Lehner sign, checked against the rank column.
    ModularSymbols,
}

/// One audited optimal curve. TSV columns, in order: label, conductor,
/// verdict, rule, case, citations, degree_parity_actual, agreement,
/// rank_parity_source, optimality, error.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictRow {
    pub label: String,
    pub conductor: u64,
    pub verdict: Parity,
    pub rule: Option<Rule>,
    /// The admissible case of the conductor filter (`3a`, `3b`, `3c`).
    pub case: Option<&'static str>,
    pub citations: Vec<Citation>,
    pub degree_parity_actual: Option<Parity>,
    pub agreement: Agreement,
    pub rank_parity_source: RankParitySource,
    /// Always `curve_number_1`: the first curve of each class is taken to
    /// be the optimal one.
    pub optimality: &'static str,
    pub error: Option<String>,
}

pub const TSV_COLUMNS: [&str; 11] = [
    "label",
    "conductor",
    "verdict",
    "rule",
    "case",
    "citations",
    "degree_parity_actual",
    "agreement",
    "rank_parity_source",
    "optimality",
    "error",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CompositeRow {
    pub label: String,
    pub conductor: u64,
    pub checklist: CompositeChecklist,
    pub failures: Vec<&'static str>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CompositeReport {
    pub checked: usize,
    pub violations: Vec<CompositeRow>,
    pub citations: Vec<Citation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MerelRow {
    pub level: u64,
    pub criterion: bool,
    /// `d >= 2` for the Eisenstein factor; absent outside slow mode.
    pub eisenstein_rank_at_least_two: Option<bool>,
    pub agreement: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NeumannSetzerRow {
    pub level: u64,
    pub u: u64,
    pub label: Option<String>,
    pub predicted: Parity,
    pub actual: Option<Parity>,
    pub agreement: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankParityRow {
    pub label: String,
    pub database: RankParity,
    pub computed: Option<RankParity>,
    pub agreement: Option<bool>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Prop5Row {
    pub label: String,
    /// Dimension of the matching local factor of T/2T.
    pub local_dimension: Option<usize>,
    pub outcome: Option<Prop5Outcome>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub records: usize,
    pub audited: usize,
    pub skipped_not_optimal: usize,
    pub skipped_above_max_level: usize,
    pub odd: usize,
    pub even: usize,
    pub undetermined: usize,
    pub by_rule: BTreeMap<String, usize>,
    pub agree: usize,
    pub disagree: usize,
    pub open: usize,
    pub no_degree: usize,
    pub errors: usize,
    pub watkins_violations: usize,
    pub composite_violations: usize,
    pub merel_mismatches: usize,
    pub neumann_setzer_mismatches: usize,
    pub rank_parity_mismatches: usize,
    /// Rows of the prop5 table with `d >= 2` and a deformation detected.
    pub prop5_detected_with_large_factor: usize,
    pub prop5_large_factor: usize,
    pub anomalies: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub options: Option<AuditOptions>,
    pub rows: Vec<VerdictRow>,
    pub watkins: WatkinsReport,
    pub composite: CompositeReport,
    pub merel: Vec<MerelRow>,
    pub neumann_setzer: Vec<NeumannSetzerRow>,
    pub rank_parity: Vec<RankParityRow>,
    pub prop5: Vec<Prop5Row>,
    pub summary: Summary,
}

fn rank_parity_of(rank: u32) -> RankParity {
    if rank % 2 == 0 {
        RankParity::Even
    } else {
        RankParity::Odd
    }
}

fn case_of(rule: Rule) -> Option<&'static str> {
    match rule {
        Rule::Case3a => Some("3a"),
        Rule::Case3b => Some("3b"),
        Rule::Case3c => Some("3c"),
        _ => None,
    }
}

fn verdict_for(r: &CurveRecord, opts: &AuditOptions) -> VerdictRow {
    let mut row = VerdictRow {
        label: r.label.clone(),
        conductor: r.conductor,
        verdict: Parity::Undetermined,
        rule: None,
        case: None,
        citations: Vec::new(),
        degree_parity_actual: r.degree.map(Parity::of),
        agreement: Agreement::Error,
        rank_parity_source: RankParitySource::Database,
        optimality: "curve_number_1",
        error: None,
    };
    let result = (|| -> Result<Verdict> {
        let curve = r.curve()?;
        let fact = arith::factor(r.conductor);
        let mut v = classify::theorem_one_filter(&curve, &fact)?;
        row.case = case_of(v.rule);
        if opts.slow && fact.is_prime() && r.conductor <= opts.hecke_max_level {
            let mut p = classify::predict_parity_prime_level(&curve, r.conductor)?;
            for c in v.citations {
                if !p.citations.contains(&c) {
                    p.citations.push(c);
                }
            }
            if v.parity == Parity::Even && p.parity == Parity::Odd {
                return Err(Error::ContractViolation(format!(
                    "filter rule {} says even, Hecke algebra says odd",
                    v.rule
                )));
            }
            v = p;
        }
        if v.parity == Parity::Undetermined && r.rank % 2 == 1 {
            v = Verdict {
                parity: Parity::Even,
                rule: Rule::OddAnalyticRank,
                citations: vec![Citation::OddDegreeConditions, Citation::AtkinLehnerSign],
            };
        }
        Ok(v)
    })();
    match result {
        Ok(v) => {
            row.verdict = v.parity;
            row.rule = Some(v.rule);
            row.citations = v.citations;
            row.agreement = match (v.parity, row.degree_parity_actual) {
                (_, None) => Agreement::NoDegree,
                (Parity::Undetermined, _) => Agreement::Open,
                (p, Some(a)) if p == a => Agreement::Agree,
                _ => Agreement::Disagree,
            };
        }
        Err(e) => {
            row.citations = vec![Citation::OddDegreeConditions];
            row.error = Some(e.to_string());
        }
    }
    row
}

/// Run every check over the records. Output depends only on the inputs
/// and options, not on the number of worker threads.
pub fn audit(records: &[CurveRecord], degrees: &BTreeMap<String, u64>, opts: &AuditOptions) -> Report {
    let mut summary = Summary { records: records.len(), ..Summary::default() };
    let mut selected: Vec<CurveRecord> = Vec::new();
    for r in records {
        if opts.max_level.is_some_and(|m| r.conductor > m) {
            summary.skipped_above_max_level += 1;
        } else if !r.is_optimal() {
            summary.skipped_not_optimal += 1;
        } else {
            let mut r = r.clone();
            r.degree = degrees.get(&r.label).copied().or(r.degree);
            selected.push(r);
        }
    }
    selected.sort_by(|a, b| (a.conductor, &a.class_code).cmp(&(b.conductor, &b.class_code)));

    // group prime levels so each Hecke algebra is built once per worker
    let rows: Vec<VerdictRow> = selected.par_iter().map(|r| verdict_for(r, opts)).collect();

    let mut watkins_rows = Vec::new();
    let mut composite = CompositeReport {
        citations: vec![Citation::CompositeLevel, Citation::OddDegreeConditions],
        ..CompositeReport::default()
    };
    for r in &selected {
        let (Some(d), Ok(curve)) = (r.degree, r.curve()) else { continue };
        let two_torsion = curve.has_rational_two_torsion();
        watkins_rows.push(WatkinsRow {
            label: r.label.clone(),
            conductor: r.conductor,
            degree: d,
            has_two_torsion: two_torsion,
        });
        if d % 2 == 1 {
            let fact = arith::factor(r.conductor);
            let checklist = classify::composite_conditions(&curve, &fact, rank_parity_of(r.rank));
            composite.checked += 1;
            if !checklist.all_pass() {
                composite.violations.push(CompositeRow {
                    label: r.label.clone(),
                    conductor: r.conductor,
                    failures: checklist.failures(),
                    checklist,
                });
            }
        }
    }
    let watkins = classify::watkins_verdict(&watkins_rows);

    let levels: BTreeSet<u64> = selected.iter().map(|r| r.conductor).collect();
    let top = levels.iter().next_back().copied().unwrap_or(0);
    let merel_top = if opts.slow { top.min(opts.hecke_max_level) } else { top };
    let merel: Vec<MerelRow> = arith::primes_up_to(merel_top)
        .into_par_iter()
        .filter(|p| p % 8 == 1)
        .map(|p| merel_row(p, opts.slow))
        .collect();

    let neumann_setzer = neumann_setzer_rows(&selected, &levels);

    let rank_parity: Vec<RankParityRow> = if opts.slow {
        selected
            .par_iter()
            .filter(|r| r.conductor <= opts.rank_max_level && arith::is_prime(r.conductor))
            .map(rank_parity_row)
            .collect()
    } else {
        Vec::new()
    };
    let rows = rows
        .into_iter()
        .map(|mut row| {
            if rank_parity.iter().any(|p| p.label == row.label && p.computed.is_some()) {
                row.rank_parity_source = RankParitySource::ModularSymbols;
            }
            row
        })
        .collect::<Vec<_>>();

    let prop5: Vec<Prop5Row> = if opts.slow {
        selected
            .par_iter()
            .filter(|r| arith::is_prime(r.conductor) && r.conductor <= opts.hecke_max_level)
            .filter(|r| r.curve().is_ok_and(|c| in_3b_scope(&c)))
            .map(prop5_row)
            .collect()
    } else {
        Vec::new()
    };

    summary.audited = rows.len();
    for row in &rows {
        match row.verdict {
            Parity::Odd => summary.odd += 1,
            Parity::Even => summary.even += 1,
            Parity::Undetermined => summary.undetermined += 1,
        }
        if let Some(rule) = row.rule {
            *summary.by_rule.entry(rule.as_str().to_string()).or_default() += 1;
        }
        match row.agreement {
            Agreement::Agree => summary.agree += 1,
            Agreement::Disagree => summary.disagree += 1,
            Agreement::Open => summary.open += 1,
            Agreement::NoDegree => summary.no_degree += 1,
            Agreement::Error => summary.errors += 1,
        }
    }
    summary.watkins_violations = watkins.violations.len();
    summary.composite_violations = composite.violations.len();
    summary.merel_mismatches = merel.iter().filter(|m| m.agreement == Some(false) || m.error.is_some()).count();
    summary.neumann_setzer_mismatches = neumann_setzer.iter().filter(|m| m.agreement == Some(false)).count();
    summary.rank_parity_mismatches =
        rank_parity.iter().filter(|m| m.agreement == Some(false) || m.error.is_some()).count();
    summary.prop5_large_factor = prop5.iter().filter(|p| p.local_dimension.is_some_and(|d| d >= 2)).count();
    summary.prop5_detected_with_large_factor = prop5
        .iter()
        .filter(|p| p.local_dimension.is_some_and(|d| d >= 2))
        .filter(|p| {
            matches!(p.outcome, Some(Prop5Outcome::DeformationExistsVia1 | Prop5Outcome::DeformationExistsVia2))
        })
        .count();
    summary.anomalies = summary.disagree
        + summary.errors
        + summary.watkins_violations
        + summary.composite_violations
        + summary.merel_mismatches
        + summary.neumann_setzer_mismatches
        + summary.rank_parity_mismatches;

    Report {
        options: Some(*opts),
        rows,
        watkins,
        composite,
        merel,
        neumann_setzer,
        rank_parity,
        prop5,
        summary,
    }
}

fn merel_row(p: u64, slow: bool) -> MerelRow {
    let criterion = match arith::merel_criterion(p) {
        Ok(c) => c,
        Err(e) => {
            return MerelRow {
                level: p,
                criterion: false,
                eisenstein_rank_at_least_two: None,
                agreement: None,
                error: Some(e.to_string()),
            }
        }
    };
    let mut row = MerelRow { level: p, criterion, eisenstein_rank_at_least_two: None, agreement: None, error: None };
    if slow {
        match hecke2::decomposition_for_level(p) {
            Ok(d) => {
                let eis: Vec<_> = d.factors.iter().filter(|f| f.eisenstein).collect();
                if let [f] = eis.as_slice() {
                    let big = f.local_dim >= 2;
                    row.eisenstein_rank_at_least_two = Some(big);
                    row.agreement = Some(big == criterion);
                } else {
                    row.error = Some(format!("{} Eisenstein factors", eis.len()));
                }
            }
            Err(e) => row.error = Some(e.to_string()),
        }
    }
    row
}

fn neumann_setzer_rows(selected: &[CurveRecord], levels: &BTreeSet<u64>) -> Vec<NeumannSetzerRow> {
    let mut out = Vec::new();
    for &p in levels.iter().filter(|&&p| arith::is_prime(p)) {
        let Ok(Some(ns)) = arith::neumann_setzer_test(p) else { continue };
        let predicted = if ns.odd_degree { Parity::Odd } else { Parity::Even };
        // the class at level p with a rational 2-torsion point
        let rec = selected
            .iter()
            .filter(|r| r.conductor == p)
            .find(|r| r.curve().is_ok_and(|c| c.has_rational_two_torsion()));
        let actual = rec.and_then(|r| r.degree).map(Parity::of);
        out.push(NeumannSetzerRow {
            level: p,
            u: ns.u,
            label: rec.map(|r| r.label.clone()),
            predicted,
            actual,
            agreement: actual.map(|a| a == predicted),
        });
    }
    out
}

fn rank_parity_row(r: &CurveRecord) -> RankParityRow {
    let database = rank_parity_of(r.rank);
    let computed = r.curve().and_then(|c| classify::computed_rank_parity(&c, r.conductor));
    match computed {
        Ok(c) => RankParityRow {
            label: r.label.clone(),
            database,
            computed: Some(c),
            agreement: Some(c == database),
            error: None,
        },
        Err(e) => RankParityRow {
            label: r.label.clone(),
            database,
            computed: None,
            agreement: None,
            error: Some(e.to_string()),
        },
    }
}

/// Prime conductor, supersingular at 2, negative discriminant, no
/// rational 2-torsion.
pub fn in_3b_scope(c: &WeierstrassCurve) -> bool {
    use num_traits::Signed;
    c.disc.is_negative() && !c.has_rational_two_torsion() && c.is_supersingular_at_2().unwrap_or(false)
}

fn prop5_row(r: &CurveRecord) -> Prop5Row {
    let mut row = Prop5Row { label: r.label.clone(), local_dimension: None, outcome: None, error: None };
    let res = (|| -> Result<()> {
        let c = r.curve()?;
        let d = hecke2::decomposition_for_level(r.conductor)?;
        let ap = classify::ap_mod2(&c, r.conductor)?;
        let f = d
            .factors
            .iter()
            .find(|f| hecke2::matches_eigensystem(r.conductor, f, &ap))
            .ok_or(Error::NoMatchingFactor)?;
        row.local_dimension = Some(f.local_dim);
        row.outcome = Some(cubicfield::prop5_predicate(&c)?);
        Ok(())
    })();
    if let Err(e) = res {
        row.error = Some(e.to_string());
    }
    row
}

// ---------------------------------------------------------------------------
// output

pub fn to_json(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map_or_else(|| "-".to_string(), |v| v.to_string())
}

/// Verdict rows as TSV (columns in [`TSV_COLUMNS`] order) followed by
/// `#`-prefixed summary lines.
pub fn to_tsv(report: &Report) -> String {
    let mut s = TSV_COLUMNS.join("\t");
    s.push('\n');
    for r in &report.rows {
        let cites: Vec<&str> = r.citations.iter().map(|c| c.as_str()).collect();
        let source = match r.rank_parity_source {
            RankParitySource::Database => "database",
            RankParitySource::ModularSymbols => "modular_symbols",
        };
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.label,
            r.conductor,
            r.verdict,
            opt(r.rule.map(Rule::as_str)),
            opt(r.case),
            cites.join(","),
            opt(r.degree_parity_actual),
            r.agreement.as_str(),
            source,
            r.optimality,
            r.error.as_deref().unwrap_or("-").replace(['\t', '\n'], " "),
        );
    }
    let sm = serde_json::to_value(&report.summary).expect("summary serializes");
    if let Some(map) = sm.as_object() {
        for (k, v) in map {
            let _ = writeln!(s, "# {k}\t{v}");
        }
    }
    s
}
