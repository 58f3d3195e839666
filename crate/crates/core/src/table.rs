//! The knot table: ingestion, the Jones index, lookup and distinct-value
//! statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::jones::jones;
use crate::laurent::Laurent;
use crate::pd::{parse_pd, PdCode, PdError};

/// The shipped table of prime knots with 3 to 10 crossings.
pub const BUILTIN_CSV: &str = include_str!("../data/knots.csv");

pub const UNKNOT_LABEL: &str = "unknot (Jones-trivial)";

const TORUS: &[&str] = &["3_1", "5_1", "7_1", "8_19", "9_1", "10_124"];
const TWIST: &[&str] = &["3_1", "4_1", "5_2", "6_1", "7_2", "8_1", "9_2", "10_1"];

#[derive(Clone, Debug)]
pub struct KnotRecord {
    pub name: String,
    pub crossing_number: usize,
    pub pd: PdCode,
    pub jones: Laurent,
    pub is_torus: bool,
    pub is_twist: bool,
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error("line {line}: {msg}")]
    Row { line: usize, msg: String },
    #[error("table header must be `name,crossing_number,pd`")]
    Header,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("no records with crossing number {0}")]
    EmptyClass(usize),
}

fn row_error(line: usize, msg: impl ToString) -> TableError {
    TableError::Row { line, msg: msg.to_string() }
}

pub fn load_table(path: &Path) -> Result<Vec<KnotRecord>, TableError> {
    load_table_from_reader(std::fs::File::open(path)?)
}

pub fn builtin_table() -> Result<Vec<KnotRecord>, TableError> {
    load_table_from_reader(BUILTIN_CSV.as_bytes())
}

/// Parses and validates every row, then computes Jones values in parallel.
/// Any bad row aborts the load.
pub fn load_table_from_reader<R: Read>(reader: R) -> Result<Vec<KnotRecord>, TableError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> =
        rdr.headers().map_err(|e| row_error(1, e))?.iter().map(|h| h.trim().to_string()).collect();
    if header != ["name", "crossing_number", "pd"] {
        return Err(TableError::Header);
    }
    let mut rows = Vec::new();
    let mut names = BTreeSet::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| row_error(e.position().map_or(0, |p| p.line() as usize), e))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let name = rec[0].trim().to_string();
        let crossing_number: usize = rec[1].trim().parse().map_err(|_| row_error(line, "bad crossing number"))?;
        let pd = parse_pd(&rec[2]).map_err(|e| row_error(line, e))?;
        let report = pd.validate();
        if !report.is_ok() {
            return Err(row_error(line, PdError::Invalid(report)));
        }
        if pd.components().map_err(|e| row_error(line, e))? != 1 {
            return Err(row_error(line, "table entries must be knots"));
        }
        if pd.n() != crossing_number {
            return Err(row_error(line, format!("diagram has {} crossings, row says {crossing_number}", pd.n())));
        }
        if !names.insert(name.clone()) {
            return Err(row_error(line, format!("duplicate name {name}")));
        }
        rows.push((line, name, crossing_number, pd));
    }
    rows.into_par_iter()
        .map(|(line, name, crossing_number, pd)| {
            let jones = jones(&pd).map_err(|e| row_error(line, e))?;
            Ok(KnotRecord {
                is_torus: TORUS.contains(&name.as_str()),
                is_twist: TWIST.contains(&name.as_str()),
                name,
                crossing_number,
                pd,
                jones,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Chirality {
    AsListed,
    Mirror,
    /// The value is its own mirror, so the entry matches either way.
    Either,
}

impl Chirality {
    pub fn swapped(self) -> Self {
        match self {
            Chirality::AsListed => Chirality::Mirror,
            Chirality::Mirror => Chirality::AsListed,
            Chirality::Either => Chirality::Either,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Candidate {
    pub name: String,
    pub chirality: Chirality,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LookupResult {
    pub candidates: Vec<Candidate>,
    /// Set when the value is 1: such a diagram is only known to share the
    /// unknot's Jones polynomial.
    pub jones_trivial: bool,
}

/// Jones value → knots (and mirrors) carrying it, over records up to `c0`.
#[derive(Clone, Debug, Default)]
pub struct InvariantIndex {
    c0: usize,
    map: HashMap<String, Vec<Candidate>>,
}

impl InvariantIndex {
    pub fn build(records: &[KnotRecord], c0: usize) -> Self {
        let mut map: HashMap<String, Vec<Candidate>> = HashMap::new();
        for r in records.iter().filter(|r| r.crossing_number <= c0) {
            let text = r.jones.to_string();
            let mirror = r.jones.substitute_q_inverse().to_string();
            if text == mirror {
                map.entry(text).or_default().push(Candidate { name: r.name.clone(), chirality: Chirality::Either });
            } else {
                map.entry(text).or_default().push(Candidate { name: r.name.clone(), chirality: Chirality::AsListed });
                map.entry(mirror).or_default().push(Candidate { name: r.name.clone(), chirality: Chirality::Mirror });
            }
        }
        for v in map.values_mut() {
            v.sort();
        }
        Self { c0, map }
    }

    pub fn c0(&self) -> usize {
        self.c0
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn lookup(&self, value: &Laurent) -> LookupResult {
        let mut candidates = self.map.get(&value.to_string()).cloned().unwrap_or_default();
        let jones_trivial = value.is_one();
        if jones_trivial {
            candidates.insert(0, Candidate { name: UNKNOT_LABEL.to_string(), chirality: Chirality::Either });
        }
        LookupResult { candidates, jones_trivial }
    }
}

/// Which records make up the class for `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StatsClass {
    /// Crossing number at most `n`.
    #[default]
    UpTo,
    /// Crossing number exactly `n`.
    Exactly,
}

/// Percentage of distinct Jones values (as listed, mirrors not added) in
/// the class, unrounded.
pub fn unique_value_stats(records: &[KnotRecord], n: usize, class: StatsClass) -> Result<f64, TableError> {
    let members: Vec<&KnotRecord> = records
        .iter()
        .filter(|r| match class {
            StatsClass::UpTo => r.crossing_number <= n,
            StatsClass::Exactly => r.crossing_number == n,
        })
        .collect();
    if members.is_empty() {
        return Err(TableError::EmptyClass(n));
    }
    let distinct: BTreeSet<String> = members.iter().map(|r| r.jones.to_string()).collect();
    Ok(100.0 * distinct.len() as f64 / members.len() as f64)
}

/// Groups of records sharing a Jones value.
pub fn collisions(records: &[KnotRecord], c0: usize) -> Vec<Vec<String>> {
    let mut by_value: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.crossing_number <= c0) {
        by_value.entry(r.jones.to_string()).or_default().push(r.name.clone());
    }
    by_value.into_values().filter(|v| v.len() > 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Ok,
    Failed,
    /// The search ran but found nothing.
    Miss,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageOutcome {
    pub status: StageStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl StageOutcome {
    pub fn ok() -> Self {
        Self { status: StageStatus::Ok, detail: None }
    }
    pub fn with(status: StageStatus, detail: impl Into<String>) -> Self {
        Self { status, detail: Some(detail.into()) }
    }
    pub fn skipped() -> Self {
        Self { status: StageStatus::Skipped, detail: None }
    }
    pub fn is_ok(&self) -> bool {
        self.status == StageStatus::Ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stages {
    pub repair: StageOutcome,
    pub invariant: StageOutcome,
    pub search: StageOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationReport {
    pub jones: Option<String>,
    pub candidates: Vec<Candidate>,
    pub jones_trivial: bool,
    pub stages: Stages,
}

impl ClassificationReport {
    /// The first stage that did not succeed.
    pub fn failed_stage(&self) -> Option<&'static str> {
        if !self.stages.repair.is_ok() {
            Some("repair")
        } else if !self.stages.invariant.is_ok() {
            Some("invariant")
        } else if !self.stages.search.is_ok() {
            Some("search")
        } else {
            None
        }
    }
}

/// Validation and Morse conversion ("repair"), Jones evaluation, lookup.
pub fn classify(pd: &PdCode, index: &InvariantIndex) -> ClassificationReport {
    classify_timed(pd, index).0
}

/// Wall-clock milliseconds spent in each classification stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub repair: f64,
    pub invariant: f64,
    pub search: f64,
}

fn elapsed_ms(t: std::time::Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

pub fn classify_timed(pd: &PdCode, index: &InvariantIndex) -> (ClassificationReport, StageTimings) {
    let mut timings = StageTimings::default();
    let mut report = ClassificationReport {
        jones: None,
        candidates: Vec::new(),
        jones_trivial: false,
        stages: Stages {
            repair: StageOutcome::ok(),
            invariant: StageOutcome::skipped(),
            search: StageOutcome::skipped(),
        },
    };
    let t = std::time::Instant::now();
    let validation = pd.validate();
    let repaired = if validation.is_ok() {
        crate::morse::pd_to_morse(pd).map_err(|e| e.to_string())
    } else {
        Err(validation.to_string())
    };
    timings.repair = elapsed_ms(t);
    if let Err(e) = repaired {
        report.stages.repair = StageOutcome::with(StageStatus::Failed, e);
        return (report, timings);
    }
    let t = std::time::Instant::now();
    let value = jones(pd);
    timings.invariant = elapsed_ms(t);
    let value = match value {
        Ok(v) => v,
        Err(e) => {
            report.stages.invariant = StageOutcome::with(StageStatus::Failed, e.to_string());
            return (report, timings);
        }
    };
    report.stages.invariant = StageOutcome::ok();
    report.jones = Some(value.to_string());
    let t = std::time::Instant::now();
    let found = index.lookup(&value);
    timings.search = elapsed_ms(t);
    report.jones_trivial = found.jones_trivial;
    report.stages.search = if found.candidates.is_empty() {
        StageOutcome::with(StageStatus::Miss, format!("value not in table at c0={}", index.c0()))
    } else {
        StageOutcome::ok()
    };
    report.candidates = found.candidates;
    (report, timings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn records() -> &'static [KnotRecord] {
        static R: std::sync::OnceLock<Vec<KnotRecord>> = std::sync::OnceLock::new();
        R.get_or_init(|| builtin_table().unwrap())
    }

    #[test]
    fn builtin_rows() {
        let r = records();
        assert_eq!(r.len(), 249);
        let t = r.iter().find(|k| k.name == "3_1").unwrap();
        assert_eq!(t.jones.to_string(), "-q^-4+q^-3+q^-1");
        assert!(t.is_torus && t.is_twist);
        let f = r.iter().find(|k| k.name == "4_1").unwrap();
        assert_eq!(f.jones, f.jones.substitute_q_inverse());
    }

    #[test]
    fn bad_rows_abort_with_line() {
        let csv = "name,crossing_number,pd\n3_1,3,\"PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]\"\nbad,3,\"PD[X[1,5,3,4],X[2,1,4,6],X[5,3,6,2]]\"\n";
        match load_table_from_reader(csv.as_bytes()) {
            Err(TableError::Row { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "name,crossing_number,pd\na,3,\"PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]\"\na,3,\"PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]\"\n";
        assert!(matches!(load_table_from_reader(dup.as_bytes()), Err(TableError::Row { line: 3, .. })));
        assert!(matches!(load_table_from_reader("a,b\n".as_bytes()), Err(TableError::Header)));
    }

    #[test]
    fn lookup_trefoil_and_unknot() {
        let idx = InvariantIndex::build(records(), 10);
        let t: Laurent = "-q^-4+q^-3+q^-1".parse().unwrap();
        assert_eq!(idx.lookup(&t).candidates, vec![Candidate { name: "3_1".into(), chirality: Chirality::AsListed }]);
        let m = idx.lookup(&t.substitute_q_inverse());
        assert_eq!(m.candidates[0].chirality, Chirality::Mirror);
        let u = idx.lookup(&Laurent::one());
        assert!(u.jones_trivial);
        assert_eq!(u.candidates[0].name, UNKNOT_LABEL);
    }

    #[test]
    fn stats_rows() {
        for n in 3..=9 {
            assert_eq!(unique_value_stats(records(), n, StatsClass::UpTo).unwrap(), 100.0);
            assert_eq!(unique_value_stats(records(), n, StatsClass::Exactly).unwrap(), 100.0);
        }
        let ten = unique_value_stats(records(), 10, StatsClass::UpTo).unwrap();
        assert!((ten - 96.3).abs() <= 1.0, "{ten}");
        assert!(matches!(unique_value_stats(records(), 2, StatsClass::Exactly), Err(TableError::EmptyClass(2))));
    }

    #[test]
    fn classify_out_of_table() {
        let idx = InvariantIndex::build(records(), 3);
        let f8 = parse_pd("PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]").unwrap();
        let rep = classify(&f8, &idx);
        assert_eq!(rep.stages.search.status, StageStatus::Miss);
        assert_eq!(rep.failed_stage(), Some("search"));
        let bad = PdCode::from_quads(&[[1, 5, 3, 4], [2, 1, 4, 6], [5, 3, 6, 2]]);
        assert_eq!(classify(&bad, &idx).failed_stage(), Some("repair"));
    }
}
