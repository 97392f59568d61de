mod common;

use degparity::classify::Parity;
use degparity::curve::WeierstrassCurve;
use degparity::ingest::{self, Agreement, AuditOptions, CurveRecord, TSV_COLUMNS};
use num_bigint::BigInt;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn audit_with_threads(k: usize, records: &[CurveRecord], opts: &AuditOptions) -> ingest::Report {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().unwrap();
    pool.install(|| ingest::audit(records, &BTreeMap::new(), opts))
}

#[test]
fn examples() {
    let (recs, diags) = ingest::parse_allcurves("11 a 1 [0,-1,1,-10,-20] 0 5\n".as_bytes());
    assert!(diags.is_empty());
    assert_eq!(recs[0].label, "11a1");
    assert_eq!(recs[0].curve().unwrap().disc, BigInt::from(-161051));
    let (recs, diags) = ingest::parse_allcurves("# comment\n".as_bytes());
    assert!(recs.is_empty() && diags.is_empty());
    let (recs, diags) = ingest::parse_allcurves("11 a 1 [0,-1,1]\n".as_bytes());
    assert!(recs.is_empty());
    assert_eq!(diags[0].line, 1);

    let (m, diags) = ingest::parse_degphi("11 a 1 [0,-1,1,-10,-20] 1\n".as_bytes());
    assert!(diags.is_empty());
    assert_eq!(m, BTreeMap::from([("11a1".to_string(), 1)]));
    let (m, _) = ingest::parse_degphi("".as_bytes());
    assert!(m.is_empty());
    let (m, diags) = ingest::parse_degphi("11 a 1 [0,-1,1,-10,-20] 1\n11 a 1 [0,-1,1,-10,-20] 5\n".as_bytes());
    assert_eq!(m["11a1"], 5);
    assert_eq!(diags.len(), 1);
}

#[test]
fn parsing_is_total() {
    let text = "11 a 1 [0,-1,1,-10,-20] 0 5\n\
                garbage\n\
                11 a 1 [0,-1,1,-10,-20] -1 5\n\
                11 a 1 [0,-1,1,-10,-20] 0 0\n\
                11 A 1 [0,-1,1,-10,-20] 0 5\n\
                0 a 1 [0,-1,1,-10,-20] 0 5\n\
                11 a 0 [0,-1,1,-10,-20] 0 5\n\
                37 a 1 [0,0,1,-1,0] 1 1\n";
    let (recs, diags) = ingest::parse_allcurves(text.as_bytes());
    assert_eq!(recs.iter().map(|r| r.label.as_str()).collect::<Vec<_>>(), ["11a1", "37a1"]);
    assert_eq!(diags.iter().map(|d| d.line).collect::<Vec<_>>(), [2, 3, 4, 5, 6, 7]);
}

#[test]
fn empty_report() {
    let rep = ingest::audit(&[], &BTreeMap::new(), &AuditOptions { slow: true, ..AuditOptions::default() });
    assert!(rep.rows.is_empty() && rep.merel.is_empty() && rep.neumann_setzer.is_empty());
    assert_eq!(rep.summary, ingest::Summary::default());
}

#[test]
fn example_rows() {
    let text = "11 a 1 [0,-1,1,-10,-20] 0 5\n2537 e 1 [1,-1,0,-58,-105] 0 4\n";
    let (recs, _) = ingest::parse_allcurves(text.as_bytes());
    let degrees = BTreeMap::from([("11a1".to_string(), 1), ("2537e1".to_string(), 445)]);
    let rep = ingest::audit(&recs, &degrees, &AuditOptions { slow: true, ..AuditOptions::default() });
    let r = &rep.rows[0];
    assert_eq!((r.verdict, r.degree_parity_actual, r.agreement), (Parity::Odd, Some(Parity::Odd), Agreement::Agree));
    let r = &rep.rows[1];
    assert_eq!(r.case, Some("3a"));
    assert_eq!((r.verdict, r.degree_parity_actual, r.agreement), (Parity::Undetermined, Some(Parity::Odd), Agreement::Open));
    assert!(rep.composite.violations.is_empty());
    assert_eq!(rep.summary.anomalies, 0);
}

#[test]
fn tsv_layout() {
    let (recs, _) = ingest::parse_allcurves("11 a 1 [0,-1,1,-10,-20] 0 5\n".as_bytes());
    let degrees = BTreeMap::from([("11a1".to_string(), 1)]);
    let tsv = ingest::to_tsv(&ingest::audit(&recs, &degrees, &AuditOptions::default()));
    let mut lines = tsv.lines();
    assert_eq!(lines.next().unwrap(), TSV_COLUMNS.join("\t"));
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(row.len(), TSV_COLUMNS.len());
    assert_eq!(&row[..3], ["11a1", "11", "undetermined"]);
    assert_eq!(row[9], "curve_number_1");
    assert!(lines.all(|l| l.starts_with('#')));
}

/// Byte-identical JSON and TSV across runs and worker counts.
#[test]
fn audit_is_deterministic() {
    let (records, _) = common::fixture();
    let opts = AuditOptions { max_level: Some(300), slow: true, ..AuditOptions::default() };
    let a = audit_with_threads(1, &records, &opts);
    let b = audit_with_threads(4, &records, &opts);
    let c = audit_with_threads(3, &records, &opts);
    assert_eq!(ingest::to_json(&a), ingest::to_json(&b));
    assert_eq!(ingest::to_json(&a), ingest::to_json(&c));
    assert_eq!(ingest::to_tsv(&a), ingest::to_tsv(&b));
    assert!(a.rows.len() > 100);
}

/// Full database in fast mode: no anomalies, and every row cites a result.
#[test]
fn database_audit() {
    let (records, degrees) = common::fixture();
    let rep = ingest::audit(&records, &degrees, &AuditOptions::default());
    assert_eq!(rep.summary.anomalies, 0, "{:?}", rep.summary);
    assert_eq!(rep.summary.no_degree, 0);
    assert!(rep.rows.iter().all(|r| !r.citations.is_empty()));
    assert!(rep.rows.iter().all(|r| r.optimality == "curve_number_1"));
    assert_eq!(rep.summary.audited + rep.summary.skipped_not_optimal, records.len());
    assert!(rep.neumann_setzer.iter().all(|r| r.agreement == Some(true)));
}

#[test]
fn round_trip_of_the_database() {
    let (records, _) = common::fixture();
    let text: String = records.iter().map(|r| r.to_allcurves_line() + "\n").collect();
    let (again, diags) = ingest::parse_allcurves(text.as_bytes());
    assert!(diags.is_empty());
    let stripped: Vec<CurveRecord> = records.iter().cloned().map(|mut r| {
        r.degree = None;
        r
    }).collect();
    assert_eq!(again, stripped);
}

fn record() -> impl Strategy<Value = CurveRecord> {
    (
        1u64..1_000_000,
        "[a-z]{1,3}",
        1u32..10,
        prop::array::uniform5(-1_000_000i64..1_000_000),
        0u32..5,
        1u32..17,
        prop::option::of(1u64..1_000_000),
    )
        .prop_filter_map("singular", |(n, class_code, k, a, rank, torsion, degree)| {
            WeierstrassCurve::from_i64(a).ok()?;
            Some(CurveRecord {
                conductor: n,
                label: format!("{n}{class_code}{k}"),
                class_code,
                curve_number: k,
                a_invariants: a.map(BigInt::from),
                rank,
                torsion_order: torsion,
                degree,
            })
        })
}

proptest! {
    #[test]
    fn allcurves_round_trip(recs in prop::collection::vec(record(), 0..20)) {
        let text: String = recs.iter().map(|r| r.to_allcurves_line() + "\n").collect();
        let (mut parsed, diags) = ingest::parse_allcurves(text.as_bytes());
        prop_assert!(diags.is_empty());
        let degrees: BTreeMap<String, u64> = {
            let deg_text: String = recs.iter().filter_map(|r| r.to_degphi_line()).map(|l| l + "\n").collect();
            ingest::parse_degphi(deg_text.as_bytes()).0
        };
        ingest::attach_degrees(&mut parsed, &degrees);
        // later duplicates of a label win
        let expect: Vec<CurveRecord> = recs
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.degree = recs.iter().rev().find(|s| s.label == r.label && s.degree.is_some()).and_then(|s| s.degree);
                r
            })
            .collect();
        prop_assert_eq!(parsed, expect);
    }
}
