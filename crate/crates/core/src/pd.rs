//! Planar diagram codes.
//!
//! A crossing is `X[a,b,c,d]`: the four edge labels read counterclockwise,
//! starting from the incoming under-strand edge. Labels run `1..=2n` and follow
//! the orientation of each component, so the under strand always continues
//! from `a` to `a+1` (with wraparound inside its component).

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

pub type Label = u32;

/// Global orientation of the crossing sign. `+1` keeps the raw rule
/// (positive when the over strand runs from `b` to `d`); it is pinned by the
/// trefoil anchor test in `jones`.
pub const SIGN_CONVENTION: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CrossingQuad(pub [Label; 4]);

impl CrossingQuad {
    pub fn a(&self) -> Label {
        self.0[0]
    }
    pub fn b(&self) -> Label {
        self.0[1]
    }
    pub fn c(&self) -> Label {
        self.0[2]
    }
    pub fn d(&self) -> Label {
        self.0[3]
    }
}

impl fmt::Display for CrossingQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.0;
        write!(f, "X[{a},{b},{c},{d}]")
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PdCode {
    crossings: Vec<CrossingQuad>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PdError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("labels must appear exactly twice; offending (label, count): {0:?}")]
    LabelCount(Vec<(Label, usize)>),
    #[error("label {label} outside 1..={max}")]
    LabelRange { label: Label, max: Label },
    #[error("invalid PD code: {0}")]
    Invalid(ValidationReport),
    #[error("edge {0} does not occur in the diagram")]
    NoSuchEdge(Label),
    #[error("chirality must be +1 or -1, got {0}")]
    BadChirality(i32),
    #[error("edges {0} and {1} do not bound a common face")]
    NoCommonFace(Label, Label),
    #[error("a second Reidemeister move needs two distinct edges of a nonempty diagram")]
    DegenerateR2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    LabelCount {
        label: Label,
        count: usize,
    },
    LabelRange {
        label: Label,
        max: Label,
    },
    /// The component through this label is not a contiguous label range.
    ComponentLabels {
        label: Label,
    },
    UnderContinuity {
        crossing: usize,
    },
    OverContinuity {
        crossing: usize,
    },
    /// A label is not entered exactly once by the induced orientation.
    Orientation {
        label: Label,
    },
    NonPlanar {
        faces: usize,
        expected: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::LabelCount { label, count } => {
                write!(f, "label {label} appears {count} times")
            }
            Violation::LabelRange { label, max } => write!(f, "label {label} outside 1..={max}"),
            Violation::ComponentLabels { label } => {
                write!(f, "component through label {label} is not a contiguous label range")
            }
            Violation::UnderContinuity { crossing } => {
                write!(f, "crossing {crossing}: under strand does not continue c = a+1")
            }
            Violation::OverContinuity { crossing } => {
                write!(f, "crossing {crossing}: over strand labels are not consecutive")
            }
            Violation::Orientation { label } => {
                write!(f, "label {label} is not entered exactly once")
            }
            Violation::NonPlanar { faces, expected } => {
                write!(f, "diagram has {faces} faces, a planar one has {expected}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// A crossing with explicit strand directions; slot 0 is always the incoming
/// under edge and slots run counterclockwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct OrientedCrossing {
    pub slots: [Label; 4],
    /// Over strand runs from slot 1 to slot 3.
    pub over_forward: bool,
}

impl OrientedCrossing {
    pub fn is_incoming(&self, slot: usize) -> bool {
        match slot {
            0 => true,
            2 => false,
            1 => self.over_forward,
            _ => !self.over_forward,
        }
    }

    /// Raw sign before [`SIGN_CONVENTION`].
    fn raw_sign(&self) -> i32 {
        if self.over_forward {
            1
        } else {
            -1
        }
    }
}

/// Slot reached by continuing straight through the crossing.
pub(crate) fn through(slot: usize) -> usize {
    (slot + 2) % 4
}

impl PdCode {
    pub fn new(crossings: Vec<CrossingQuad>) -> Self {
        Self { crossings }
    }

    pub fn unknot() -> Self {
        Self::default()
    }

    pub fn from_quads(quads: &[[Label; 4]]) -> Self {
        Self::new(quads.iter().map(|q| CrossingQuad(*q)).collect())
    }

    pub fn crossings(&self) -> &[CrossingQuad] {
        &self.crossings
    }

    /// Crossing count.
    pub fn n(&self) -> usize {
        self.crossings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.crossings.is_empty()
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.crossings.iter().flat_map(|x| x.0).collect()
    }

    /// The two `(crossing, slot)` positions of every label, indexed by label.
    pub(crate) fn positions(&self) -> Vec<Vec<(usize, usize)>> {
        let max = self.crossings.iter().flat_map(|x| x.0).max().unwrap_or(0) as usize;
        let mut pos = vec![Vec::new(); max + 1];
        for (i, x) in self.crossings.iter().enumerate() {
            for (s, &l) in x.0.iter().enumerate() {
                pos[l as usize].push((i, s));
            }
        }
        pos
    }

    pub fn validate(&self) -> ValidationReport {
        match analyze(self) {
            Ok(_) => ValidationReport::default(),
            Err(report) => report,
        }
    }

    pub(crate) fn oriented(&self) -> Result<Vec<OrientedCrossing>, PdError> {
        analyze(self).map_err(PdError::Invalid)
    }

    /// Number of link components; the empty diagram is one unknotted circle.
    pub fn components(&self) -> Result<usize, PdError> {
        let oriented = self.oriented()?;
        if oriented.is_empty() {
            return Ok(1);
        }
        Ok(label_components(self).1)
    }

    /// Crossing signs under the calibrated convention.
    pub fn signs(&self) -> Result<Vec<i32>, PdError> {
        Ok(self.oriented()?.iter().map(|x| x.raw_sign() * SIGN_CONVENTION).collect())
    }

    pub fn writhe(&self) -> Result<i32, PdError> {
        Ok(self.signs()?.iter().sum())
    }

    /// The diagram with every crossing switched.
    pub fn mirror(&self) -> Result<PdCode, PdError> {
        self.switch(&vec![true; self.n()])
    }

    /// Switches over and under at the crossings flagged in `which`. Each such
    /// quadruple is rotated by one position so that it starts from the old
    /// incoming over edge.
    pub fn switch(&self, which: &[bool]) -> Result<PdCode, PdError> {
        let oriented = self.oriented()?;
        let crossings = self
            .crossings
            .iter()
            .zip(&oriented)
            .enumerate()
            .map(|(i, (x, o))| {
                let [a, b, c, d] = x.0;
                match (which.get(i).copied().unwrap_or(false), o.over_forward) {
                    (false, _) => *x,
                    (true, true) => CrossingQuad([b, c, d, a]),
                    (true, false) => CrossingQuad([d, a, b, c]),
                }
            })
            .collect();
        Ok(PdCode::new(crossings))
    }

    /// Faces of the planar embedding as cycles of darts `(crossing, slot)`;
    /// a dart leaves its crossing through `slot` and has the face on its left.
    pub fn faces(&self) -> Vec<Vec<(usize, usize)>> {
        let pos = self.positions();
        let other_end = |i: usize, s: usize| -> (usize, usize) {
            let l = self.crossings[i].0[s] as usize;
            let p = &pos[l];
            if p[0] == (i, s) {
                p[1]
            } else {
                p[0]
            }
        };
        let n = self.crossings.len();
        let mut seen = vec![[false; 4]; n];
        let mut faces = Vec::new();
        for i in 0..n {
            for s in 0..4 {
                if seen[i][s] {
                    continue;
                }
                let mut face = Vec::new();
                let (mut ci, mut cs) = (i, s);
                while !seen[ci][cs] {
                    seen[ci][cs] = true;
                    face.push((ci, cs));
                    let (j, t) = other_end(ci, cs);
                    ci = j;
                    cs = (t + 3) % 4;
                }
                faces.push(face);
            }
        }
        faces
    }

    /// Inserts a kink on `edge` whose new crossing has sign `chirality`.
    pub fn apply_r1(&self, edge: Label, chirality: i32) -> Result<PdCode, PdError> {
        if chirality != 1 && chirality != -1 {
            return Err(PdError::BadChirality(chirality));
        }
        let mut oriented = self.oriented()?;
        let forward = chirality * SIGN_CONVENTION == 1;
        let (entry, loop_edge, exit) = if oriented.is_empty() {
            (1, 2, 1)
        } else {
            let (q, sq) = incoming_position(&oriented, edge).ok_or(PdError::NoSuchEdge(edge))?;
            let exit = FRESH;
            oriented[q].slots[sq] = exit;
            (edge, FRESH + 1, exit)
        };
        let (b, d) = if forward { (loop_edge, exit) } else { (exit, loop_edge) };
        oriented.push(OrientedCrossing { slots: [entry, b, loop_edge, d], over_forward: forward });
        Ok(relabel(&oriented))
    }

    /// Pushes `over_edge` across `under_edge`, creating a bigon; the edges
    /// must share a face of the diagram.
    pub fn apply_r2(&self, over_edge: Label, under_edge: Label) -> Result<PdCode, PdError> {
        if self.is_empty() || over_edge == under_edge {
            return Err(PdError::DegenerateR2);
        }
        let mut oriented = self.oriented()?;
        for e in [over_edge, under_edge] {
            if incoming_position(&oriented, e).is_none() {
                return Err(PdError::NoSuchEdge(e));
            }
        }
        let faces = self.faces();
        let dart_label = |(i, s): (usize, usize)| self.crossings[i].0[s];
        let (d1, d2) = faces
            .iter()
            .find_map(|f| {
                let d1 = f.iter().copied().find(|&d| dart_label(d) == over_edge)?;
                let d2 = f.iter().copied().find(|&d| dart_label(d) == under_edge)?;
                Some((d1, d2))
            })
            .ok_or(PdError::NoCommonFace(over_edge, under_edge))?;

        let pos = self.positions();
        let far_end = |(i, s): (usize, usize)| {
            let p = &pos[self.crossings[i].0[s] as usize];
            if p[0] == (i, s) {
                p[1]
            } else {
                p[0]
            }
        };
        // A dart is aligned when it leaves through the outgoing slot of its edge.
        let aligned1 = !oriented[d1.0].is_incoming(d1.1);
        let aligned2 = !oriented[d2.0].is_incoming(d2.1);
        let y1 = far_end(d1);
        let y2 = far_end(d2);

        // Pieces in dart order: `a` touches the dart's start, `c` its end.
        let mut fresh = FRESH;
        let mut next = || {
            fresh += 1;
            fresh
        };
        let (e1a, e1b, e1c) = if aligned1 { (over_edge, next(), next()) } else { (next(), next(), over_edge) };
        let (e2a, e2b, e2c) = if aligned2 { (under_edge, next(), next()) } else { (next(), next(), under_edge) };
        oriented[d1.0].slots[d1.1] = e1a;
        oriented[y1.0].slots[y1.1] = e1c;
        oriented[d2.0].slots[d2.1] = e2a;
        oriented[y2.0].slots[y2.1] = e2c;

        // Counterclockwise from east; the under strand runs east-west.
        let c1 = [(e2c, !aligned2), (e1a, aligned1), (e2b, aligned2), (e1b, !aligned1)];
        let c2 = [(e2b, !aligned2), (e1c, !aligned1), (e2a, aligned2), (e1b, aligned1)];
        oriented.push(orient_geometric(c1));
        oriented.push(orient_geometric(c2));
        Ok(relabel(&oriented))
    }

    /// Applies one random Reidemeister I or II move.
    pub fn random_move<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PdCode, PdError> {
        let labels: Vec<Label> = self.labels().into_iter().collect();
        if labels.is_empty() || rng.gen_bool(0.4) {
            let edge = labels.get(rng.gen_range(0..labels.len().max(1))).copied().unwrap_or(1);
            let chirality = if rng.gen_bool(0.5) { 1 } else { -1 };
            return self.apply_r1(edge, chirality);
        }
        let faces = self.faces();
        let candidates: Vec<Vec<Label>> = faces
            .iter()
            .map(|f| {
                let set: BTreeSet<Label> = f.iter().map(|&(i, s)| self.crossings[i].0[s]).collect();
                set.into_iter().collect::<Vec<_>>()
            })
            .filter(|f| f.len() >= 2)
            .collect();
        if candidates.is_empty() {
            return self.apply_r1(labels[0], 1);
        }
        let face = &candidates[rng.gen_range(0..candidates.len())];
        let i = rng.gen_range(0..face.len());
        let mut j = rng.gen_range(0..face.len() - 1);
        if j >= i {
            j += 1;
        }
        self.apply_r2(face[i], face[j])
    }
}

/// Ids handed out to new edges before relabeling; above any real label.
const FRESH: Label = 1 << 30;

fn incoming_position(oriented: &[OrientedCrossing], edge: Label) -> Option<(usize, usize)> {
    oriented
        .iter()
        .enumerate()
        .find_map(|(i, x)| (0..4).find(|&s| x.slots[s] == edge && x.is_incoming(s)).map(|s| (i, s)))
}

/// Turns a counterclockwise list of `(edge, incoming)` slots, with the under
/// strand on positions 0 and 2, into an oriented crossing.
fn orient_geometric(slots: [(Label, bool); 4]) -> OrientedCrossing {
    let start = if slots[0].1 { 0 } else { 2 };
    let rot: Vec<(Label, bool)> = (0..4).map(|k| slots[(start + k) % 4]).collect();
    OrientedCrossing { slots: [rot[0].0, rot[1].0, rot[2].0, rot[3].0], over_forward: rot[1].1 }
}

/// Renumbers edges `1..=2n` along the orientation, starting each component
/// from its lowest remaining id.
pub(crate) fn relabel(oriented: &[OrientedCrossing]) -> PdCode {
    use std::collections::BTreeMap;
    // id -> (crossing, incoming slot)
    let mut incoming: BTreeMap<Label, (usize, usize)> = BTreeMap::new();
    for (i, x) in oriented.iter().enumerate() {
        for s in 0..4 {
            if x.is_incoming(s) {
                incoming.insert(x.slots[s], (i, s));
            }
        }
    }
    let mut new_label: BTreeMap<Label, Label> = BTreeMap::new();
    let mut next = 1;
    let ids: Vec<Label> = incoming.keys().copied().collect();
    for start in ids {
        if new_label.contains_key(&start) {
            continue;
        }
        let mut id = start;
        while !new_label.contains_key(&id) {
            new_label.insert(id, next);
            next += 1;
            let (i, s) = incoming[&id];
            id = oriented[i].slots[through(s)];
        }
    }
    PdCode::new(oriented.iter().map(|x| CrossingQuad(x.slots.map(|l| new_label[&l]))).collect())
}

/// Union-find over labels joined through strands; returns per-label component
/// ids (index = label) and the component count.
fn label_components(pd: &PdCode) -> (Vec<usize>, usize) {
    let max = pd.crossings.iter().flat_map(|x| x.0).max().unwrap_or(0) as usize;
    let mut parent: Vec<usize> = (0..=max).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let nx = p[y];
            p[y] = r;
            y = nx;
        }
        r
    }
    for x in &pd.crossings {
        let [a, b, c, d] = x.0.map(|l| l as usize);
        for (u, v) in [(a, c), (b, d)] {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
    }
    let present: BTreeSet<usize> = pd.crossings.iter().flat_map(|x| x.0).map(|l| l as usize).collect();
    let mut ids = vec![usize::MAX; max + 1];
    let mut roots = std::collections::BTreeMap::new();
    for &l in &present {
        let r = find(&mut parent, l);
        let k = roots.len();
        let id = *roots.entry(r).or_insert(k);
        ids[l] = id;
    }
    (ids, roots.len())
}

/// Full structural check; on success returns strand directions per crossing.
fn analyze(pd: &PdCode) -> Result<Vec<OrientedCrossing>, ValidationReport> {
    let n = pd.crossings.len();
    let mut violations = Vec::new();
    if n == 0 {
        return Ok(Vec::new());
    }
    let max = (2 * n) as Label;
    let mut counts = std::collections::BTreeMap::new();
    for x in &pd.crossings {
        for &l in &x.0 {
            *counts.entry(l).or_insert(0usize) += 1;
        }
    }
    for (&label, &count) in &counts {
        if count != 2 {
            violations.push(Violation::LabelCount { label, count });
        }
    }
    for &label in counts.keys() {
        if label == 0 || label > max {
            violations.push(Violation::LabelRange { label, max });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    let (comp, ncomp) = label_components(pd);
    let mut lo = vec![Label::MAX; ncomp];
    let mut hi = vec![0; ncomp];
    let mut size = vec![0usize; ncomp];
    for l in 1..=max {
        let c = comp[l as usize];
        lo[c] = lo[c].min(l);
        hi[c] = hi[c].max(l);
        size[c] += 1;
    }
    for c in 0..ncomp {
        if (hi[c] - lo[c] + 1) as usize != size[c] {
            violations.push(Violation::ComponentLabels { label: lo[c] });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }
    let succ = |l: Label| {
        let c = comp[l as usize];
        if l == hi[c] {
            lo[c]
        } else {
            l + 1
        }
    };

    let mut forward: Vec<Option<bool>> = vec![None; n];
    for (i, x) in pd.crossings.iter().enumerate() {
        let [a, b, c, d] = x.0;
        if c != succ(a) {
            violations.push(Violation::UnderContinuity { crossing: i });
        }
        match (d == succ(b), b == succ(d)) {
            (true, false) => forward[i] = Some(true),
            (false, true) => forward[i] = Some(false),
            (true, true) => {}
            (false, false) => violations.push(Violation::OverContinuity { crossing: i }),
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    // Two-edge components make both over relations hold; settle their
    // direction from the other occurrence of the label.
    let pos = pd.positions();
    while forward.iter().any(Option::is_none) {
        let mut progress = false;
        for i in 0..n {
            if forward[i].is_some() {
                continue;
            }
            let b = pd.crossings[i].0[1];
            let other = pos[b as usize].iter().copied().find(|&p| p != (i, 1));
            let incoming_elsewhere = other.and_then(|(j, t)| match t {
                0 => Some(true),
                2 => Some(false),
                1 => forward[j],
                _ => forward[j].map(|f| !f),
            });
            if let Some(inc) = incoming_elsewhere {
                forward[i] = Some(!inc);
                progress = true;
            }
        }
        if !progress {
            if let Some(i) = forward.iter().position(Option::is_none) {
                forward[i] = Some(true);
            }
        }
    }
    let oriented: Vec<OrientedCrossing> = pd
        .crossings
        .iter()
        .zip(&forward)
        .map(|(x, f)| OrientedCrossing { slots: x.0, over_forward: f.unwrap_or(true) })
        .collect();

    let mut entered = vec![0usize; max as usize + 1];
    for x in &oriented {
        for s in 0..4 {
            if x.is_incoming(s) {
                entered[x.slots[s] as usize] += 1;
            }
        }
    }
    for l in 1..=max {
        if entered[l as usize] != 1 {
            violations.push(Violation::Orientation { label: l });
        }
    }
    if !violations.is_empty() {
        return Err(ValidationReport { violations });
    }

    let faces = pd.faces().len();
    let expected = n + 1 + graph_components(pd);
    if faces != expected {
        violations.push(Violation::NonPlanar { faces, expected });
        return Err(ValidationReport { violations });
    }
    Ok(oriented)
}

/// Connected components of the underlying 4-valent graph.
fn graph_components(pd: &PdCode) -> usize {
    let n = pd.crossings.len();
    let pos = pd.positions();
    let mut seen = vec![false; n];
    let mut count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            for &l in &pd.crossings[i].0 {
                for &(j, _) in &pos[l as usize] {
                    if !seen[j] {
                        seen[j] = true;
                        stack.push(j);
                    }
                }
            }
        }
    }
    count
}

/// Canonical text: `PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]`.
impl fmt::Display for PdCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PD[")?;
        for (i, x) in self.crossings.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for PdCode {
    type Err = PdError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pd(s)
    }
}

struct Scanner<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Scanner<'_> {
    fn skip_ws(&mut self) {
        while self.s.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }
    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }
    fn expect(&mut self, b: u8) -> Result<(), PdError> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", b as char)))
        }
    }
    fn error(&self, msg: &str) -> PdError {
        PdError::Syntax { pos: self.pos, msg: msg.to_string() }
    }
    fn number(&mut self) -> Result<Label, PdError> {
        self.skip_ws();
        let start = self.pos;
        while self.s.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a decimal label"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or(PdError::Syntax { pos: start, msg: "label too large".into() })
    }
}

/// Parses `PD[X[a,b,c,d],...]` and checks label multiplicities and range.
/// Strand continuity is left to [`PdCode::validate`].
pub fn parse_pd(text: &str) -> Result<PdCode, PdError> {
    let mut sc = Scanner { s: text.as_bytes(), pos: 0 };
    sc.expect(b'P')?;
    sc.expect(b'D')?;
    sc.expect(b'[')?;
    let mut crossings = Vec::new();
    if sc.peek() != Some(b']') {
        loop {
            sc.expect(b'X')?;
            sc.expect(b'[')?;
            let mut q = [0; 4];
            for (k, slot) in q.iter_mut().enumerate() {
                if k > 0 {
                    sc.expect(b',')?;
                }
                *slot = sc.number()?;
            }
            sc.expect(b']')?;
            crossings.push(CrossingQuad(q));
            match sc.peek() {
                Some(b',') => sc.pos += 1,
                _ => break,
            }
        }
    }
    sc.expect(b']')?;
    if sc.peek().is_some() {
        return Err(sc.error("trailing input"));
    }

    let pd = PdCode::new(crossings);
    let mut counts = std::collections::BTreeMap::new();
    for &l in pd.crossings.iter().flat_map(|x| x.0.iter()) {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    let bad: Vec<(Label, usize)> = counts.iter().filter(|(_, &c)| c != 2).map(|(&l, &c)| (l, c)).collect();
    if !bad.is_empty() {
        return Err(PdError::LabelCount(bad));
    }
    let max = 2 * pd.n() as Label;
    if let Some(&label) = counts.keys().find(|&&l| l == 0 || l > max) {
        return Err(PdError::LabelRange { label, max });
    }
    Ok(pd)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const TREFOIL: &str = "PD[X[1,5,2,4],X[3,1,4,6],X[5,3,6,2]]";
    pub const FIGURE_EIGHT: &str = "PD[X[4,2,5,1],X[8,6,1,5],X[6,3,7,4],X[2,7,3,8]]";
    const HOPF: &str = "PD[X[4,1,3,2],X[2,3,1,4]]";

    fn pd(s: &str) -> PdCode {
        parse_pd(s).unwrap()
    }

    #[test]
    fn parses_trefoil_and_empty() {
        let t = pd(TREFOIL);
        assert_eq!(t.n(), 3);
        assert_eq!(t.to_string(), TREFOIL);
        assert_eq!(pd("PD[]").n(), 0);
        assert_eq!(pd(" PD[ X[1, 5, 2, 4], X[3,1,4,6] ,X[5,3,6,2] ] ").to_string(), TREFOIL);
    }

    #[test]
    fn parse_reports_missing_partners() {
        match parse_pd("PD[X[1,5,2,4],X[3,1,4,6]]") {
            Err(PdError::LabelCount(bad)) => {
                let labels: Vec<Label> = bad.iter().map(|b| b.0).collect();
                assert_eq!(labels, vec![2, 3, 5, 6]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_reports_position_and_range() {
        match parse_pd("PD[X[1,2,,4]]") {
            Err(PdError::Syntax { pos, .. }) => assert_eq!(pos, 9),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_pd("PD[X[1,9,2,9],X[1,2,3,3]]"), Err(PdError::LabelRange { label: 9, max: 4 })));
        assert!(matches!(parse_pd("PD[X[1,1,2,2]] x"), Err(PdError::Syntax { .. })));
    }

    #[test]
    fn validates_table_examples() {
        assert!(pd(TREFOIL).validate().is_ok());
        assert!(pd(FIGURE_EIGHT).validate().is_ok());
        assert!(pd(HOPF).validate().is_ok());
    }

    #[test]
    fn under_continuity_violation() {
        let bad = PdCode::from_quads(&[[1, 5, 3, 4], [3, 1, 4, 6], [5, 3, 6, 2]]);
        let report = bad.validate();
        assert!(
            report.violations.contains(&Violation::LabelCount { label: 2, count: 1 })
                || report.violations.contains(&Violation::UnderContinuity { crossing: 0 })
        );
        // keep the multiset intact so the continuity rule is what fails
        let bad = PdCode::from_quads(&[[1, 5, 3, 4], [2, 1, 4, 6], [5, 3, 6, 2]]);
        assert!(bad.validate().violations.contains(&Violation::UnderContinuity { crossing: 0 }));
    }

    #[test]
    fn component_counts() {
        assert_eq!(pd(TREFOIL).components().unwrap(), 1);
        assert_eq!(pd("PD[]").components().unwrap(), 1);
        assert_eq!(pd(HOPF).components().unwrap(), 2);
    }

    #[test]
    fn writhe_values() {
        assert_eq!(pd(TREFOIL).writhe().unwrap(), -3);
        assert_eq!(pd(FIGURE_EIGHT).writhe().unwrap(), 0);
        assert_eq!(pd("PD[]").writhe().unwrap(), 0);
    }

    #[test]
    fn mirror_is_an_involution() {
        for s in [TREFOIL, FIGURE_EIGHT, HOPF, "PD[]"] {
            let p = pd(s);
            let m = p.mirror().unwrap();
            assert!(m.validate().is_ok());
            assert_eq!(m.mirror().unwrap(), p);
            assert_eq!(m.writhe().unwrap(), -p.writhe().unwrap());
        }
    }

    #[test]
    fn face_count_is_euler() {
        assert_eq!(pd(TREFOIL).faces().len(), 5);
        assert_eq!(pd(FIGURE_EIGHT).faces().len(), 6);
    }

    #[test]
    fn r1_on_empty_diagram() {
        for ch in [1, -1] {
            let k = PdCode::unknot().apply_r1(1, ch).unwrap();
            assert_eq!(k.n(), 1);
            assert!(k.validate().is_ok(), "{k}: {}", k.validate());
            assert_eq!(k.writhe().unwrap(), ch);
        }
    }

    #[test]
    fn r1_and_r2_keep_validity_and_components() {
        let t = pd(TREFOIL);
        for e in 1..=6 {
            for ch in [1, -1] {
                let k = t.apply_r1(e, ch).unwrap();
                assert_eq!(k.n(), 4);
                assert!(k.validate().is_ok(), "{k}");
                assert_eq!(k.writhe().unwrap(), t.writhe().unwrap() + ch);
            }
        }
        let faces = t.faces();
        let mut applied = 0;
        for f in &faces {
            let labels: BTreeSet<Label> = f.iter().map(|&(i, s)| t.crossings()[i].0[s]).collect();
            let labels: Vec<_> = labels.into_iter().collect();
            for &x in &labels {
                for &y in &labels {
                    if x != y {
                        let k = t.apply_r2(x, y).unwrap();
                        assert_eq!(k.n(), 5);
                        assert!(k.validate().is_ok(), "{k}: {}", k.validate());
                        assert_eq!(k.components().unwrap(), 1);
                        assert_eq!(k.writhe().unwrap(), t.writhe().unwrap());
                        applied += 1;
                    }
                }
            }
        }
        assert!(applied > 0);
        let h = pd(HOPF);
        let k = h.apply_r1(1, 1).unwrap();
        assert_eq!(k.components().unwrap(), 2);
    }

    #[test]
    fn r2_rejects_edges_without_common_face() {
        let f8 = pd(FIGURE_EIGHT);
        let faces = f8.faces();
        let on_face = |e: Label| -> BTreeSet<usize> {
            faces
                .iter()
                .enumerate()
                .filter(|(_, f)| f.iter().any(|&(i, s)| f8.crossings()[i].0[s] == e))
                .map(|(k, _)| k)
                .collect()
        };
        let mut found = false;
        for x in 1..=8 {
            for y in 1..=8 {
                if x != y && on_face(x).is_disjoint(&on_face(y)) {
                    assert_eq!(f8.apply_r2(x, y), Err(PdError::NoCommonFace(x, y)));
                    found = true;
                }
            }
        }
        assert!(found);
        assert_eq!(f8.apply_r2(3, 3), Err(PdError::DegenerateR2));
    }
}
