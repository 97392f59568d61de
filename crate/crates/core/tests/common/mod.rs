#![allow(dead_code)]

use degparity::ingest::{self, CurveRecord};
use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn open(name: &str) -> impl BufRead {
    BufReader::new(File::open(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}")))
}

/// All records of the shipped database, degrees attached.
pub fn fixture() -> (Vec<CurveRecord>, BTreeMap<String, u64>) {
    let mut records = Vec::new();
    for f in ["allcurves.00000-03000", "allcurves.extra"] {
        let (r, diags) = ingest::parse_allcurves(open(f));
        assert!(diags.is_empty(), "{f}: {diags:?}");
        records.extend(r);
    }
    let mut degrees = BTreeMap::new();
    for f in ["degphi.00000-03000", "degphi.extra"] {
        let (d, diags) = ingest::parse_degphi(open(f));
        assert!(diags.is_empty(), "{f}: {diags:?}");
        degrees.extend(d);
    }
    ingest::attach_degrees(&mut records, &degrees);
    (records, degrees)
}

/// Optimal curves (first in class) up to `max` conductor.
pub fn optimal_up_to(records: &[CurveRecord], max: u64) -> Vec<&CurveRecord> {
    records.iter().filter(|r| r.is_optimal() && r.conductor <= max).collect()
}
