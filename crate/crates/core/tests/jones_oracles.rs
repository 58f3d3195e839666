mod common;

use std::time::Instant;

use knotscan::jones::{jones, jones_via_bracket};
use knotscan::pd::parse_pd;

use common::{records, reference_jones};

#[test]
fn every_table_knot_matches_bracket_and_atlas() {
    let start = Instant::now();
    let reference = reference_jones();
    assert_eq!(reference.len(), 249);
    let mut mismatches = Vec::new();
    for r in records() {
        let bracket = jones_via_bracket(&r.pd).unwrap();
        let atlas = &reference[&r.name];
        if r.jones != bracket || &r.jones != atlas {
            mismatches.push(format!("{}: matrix {} bracket {} atlas {}", r.name, r.jones, bracket, atlas));
        }
        assert!(r.jones.has_integral_powers(), "{}", r.name);
    }
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn trefoil_anchor_text() {
    let v = jones(&parse_pd(common::TREFOIL).unwrap()).unwrap();
    assert_eq!(v.to_string(), "-q^-4+q^-3+q^-1");
}
