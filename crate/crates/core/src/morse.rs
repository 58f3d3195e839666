//! Morse presentations: a diagram cut into horizontal slices, each holding a
//! single cup, cap or crossing, read from bottom to top.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::pd::{Label, PdCode, PdError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    Cup,
    Cap,
    /// The crossing evaluated by `R`: the over strand runs from the bottom
    /// right to the top left.
    CrossPos,
    /// Evaluated by `R⁻¹`: the over strand runs from the bottom left to the
    /// top right.
    CrossNeg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct MorseEvent {
    pub kind: EventKind,
    pub at: usize,
}

impl MorseEvent {
    pub fn cup(at: usize) -> Self {
        Self { kind: EventKind::Cup, at }
    }
    pub fn cap(at: usize) -> Self {
        Self { kind: EventKind::Cap, at }
    }
    pub fn pos(at: usize) -> Self {
        Self { kind: EventKind::CrossPos, at }
    }
    pub fn neg(at: usize) -> Self {
        Self { kind: EventKind::CrossNeg, at }
    }

    /// Strand positions touched, as a half-open range of the slice below.
    pub fn support(&self) -> std::ops::Range<usize> {
        match self.kind {
            EventKind::Cup => self.at..self.at,
            _ => self.at..self.at + 2,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MorseWord {
    pub events: Vec<MorseEvent>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("event {index}: {msg}")]
    Invalid { index: usize, msg: String },
    #[error("word ends at width {0}, expected 0")]
    Unclosed(usize),
    #[error(transparent)]
    Pd(#[from] PdError),
    #[error("frontier conversion stuck with {0} crossings left")]
    Stuck(usize),
}

impl MorseWord {
    pub fn new(events: Vec<MorseEvent>) -> Self {
        Self { events }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Width below each event followed by the final width.
    pub fn widths(&self) -> Result<Vec<usize>, MorseError> {
        let mut w = 0usize;
        let mut out = Vec::with_capacity(self.events.len() + 1);
        for (index, e) in self.events.iter().enumerate() {
            out.push(w);
            w = match e.kind {
                EventKind::Cup if e.at <= w => w + 2,
                EventKind::Cup => {
                    return Err(MorseError::Invalid { index, msg: format!("cup at {} beyond width {w}", e.at) })
                }
                _ if e.at + 2 > w => {
                    return Err(MorseError::Invalid {
                        index,
                        msg: format!("{:?} at {} needs width {}, have {w}", e.kind, e.at, e.at + 2),
                    })
                }
                EventKind::Cap => w - 2,
                _ => w,
            };
        }
        out.push(w);
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), MorseError> {
        let widths = self.widths()?;
        match widths.last() {
            Some(0) | None => Ok(()),
            Some(&w) => Err(MorseError::Unclosed(w)),
        }
    }

    /// Maximum running width.
    pub fn width(&self) -> Result<usize, MorseError> {
        self.validate()?;
        Ok(self.widths()?.into_iter().max().unwrap_or(0))
    }

    pub fn crossings(&self) -> usize {
        self.events.iter().filter(|e| matches!(e.kind, EventKind::CrossPos | EventKind::CrossNeg)).count()
    }

    /// `#R − #R⁻¹`.
    pub fn crossing_balance(&self) -> i32 {
        self.events
            .iter()
            .map(|e| match e.kind {
                EventKind::CrossPos => 1,
                EventKind::CrossNeg => -1,
                _ => 0,
            })
            .sum()
    }

    /// Swaps events `i` and `i + 1` when they touch disjoint strands (a
    /// planar isotopy), re-indexing positions. `None` if they interact.
    pub fn exchange(&self, i: usize) -> Option<MorseWord> {
        let (a, b) = (*self.events.get(i)?, *self.events.get(i + 1)?);
        let arity = |e: MorseEvent| match e.kind {
            EventKind::Cup => (0, 2),
            EventKind::Cap => (2, 0),
            _ => (2, 2),
        };
        let ((a_in, a_out), (b_in, b_out)) = (arity(a), arity(b));
        let (first, second) = if b.at + b_in <= a.at {
            (b, MorseEvent { at: a.at + b_out - b_in, ..a })
        } else if b.at >= a.at + a_out {
            (MorseEvent { at: b.at + a_in - a_out, ..b }, a)
        } else {
            return None;
        };
        let mut events = self.events.clone();
        events[i] = first;
        events[i + 1] = second;
        Some(MorseWord { events })
    }
}

impl fmt::Display for MorseWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths = self.widths().unwrap_or_default();
        let mut last = None;
        for (i, e) in self.events.iter().enumerate() {
            if let Some(&w) = widths.get(i) {
                if last != Some(w) {
                    writeln!(f, "WIDTH {w}")?;
                    last = Some(w);
                }
            }
            let tag = match e.kind {
                EventKind::Cup => "CUP",
                EventKind::Cap => "CAP",
                EventKind::CrossPos => "X+",
                EventKind::CrossNeg => "X-",
            };
            writeln!(f, "{tag}@{}", e.at)?;
        }
        Ok(())
    }
}

/// Where a frontier strand is headed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Target {
    /// It ends in this (crossing, slot) once that crossing is placed.
    Slot(usize, usize),
    /// It is the other half of the edge carried by strand `id`; the two
    /// close with a cap when adjacent.
    Partner(usize),
}

/// A frontier strand runs upward along one edge; `left` and `right` are the
/// faces of the diagram on either side of it.
#[derive(Clone, Copy, Debug)]
struct Strand {
    id: usize,
    target: Target,
    left: usize,
    right: usize,
}

/// How a crossing joins the frontier. With rotation `k`, slots `k` and `k+1`
/// are its bottom legs (left, right), `k+2` the top right and `k+3` the top left.
#[derive(Clone, Copy, Debug)]
enum Placement {
    /// Both legs already adjacent: left one at this position.
    Adjacent(usize),
    /// Left leg at this position; open a cup for the right leg after it.
    CupRight(usize),
    /// Right leg at this position; open a cup for the left leg before it.
    CupLeft(usize),
    /// No leg on the frontier; open cups in this gap.
    Fresh(usize),
}

struct Converter<'a> {
    pd: &'a PdCode,
    pos: Vec<Vec<(usize, usize)>>,
    /// Face to the left of each dart, indexed `[crossing][slot]`.
    face: Vec<[usize; 4]>,
    /// Face containing both ends of the frontier.
    outer: Option<usize>,
    frontier: Vec<Strand>,
    next_id: usize,
    events: Vec<MorseEvent>,
}

impl Converter<'_> {
    fn new(pd: &PdCode) -> Converter<'_> {
        let mut face = vec![[0; 4]; pd.n()];
        for (f, darts) in pd.faces().iter().enumerate() {
            for &(c, s) in darts {
                face[c][s] = f;
            }
        }
        Converter { pd, pos: pd.positions(), face, outer: None, frontier: Vec::new(), next_id: 0, events: Vec::new() }
    }

    fn label(&self, c: usize, s: usize) -> Label {
        self.pd.crossings()[c].0[s % 4]
    }

    fn far_end(&self, c: usize, s: usize) -> (usize, usize) {
        let p = &self.pos[self.label(c, s) as usize];
        if p[0] == (c, s % 4) {
            p[1]
        } else {
            p[0]
        }
    }

    fn find(&self, c: usize, s: usize) -> Option<usize> {
        self.frontier.iter().position(|st| st.target == Target::Slot(c, s % 4))
    }

    /// A strand leaving crossing `c` through slot `s`.
    fn leaving(&mut self, c: usize, s: usize) -> Strand {
        let (fc, fs) = self.far_end(c, s);
        self.next_id += 1;
        Strand { id: self.next_id, target: Target::Slot(fc, fs), left: self.face[c][s % 4], right: self.face[fc][fs] }
    }

    /// Face of the gap in front of frontier position `j`; `None` when the
    /// frontier is empty and any face will do.
    fn gap_face(&self, j: usize) -> Option<usize> {
        if self.frontier.is_empty() {
            None
        } else if j == 0 || j == self.frontier.len() {
            self.outer
        } else {
            Some(self.frontier[j - 1].right)
        }
    }

    /// Inserts a cup at `at` for the edge at (c, s); the strand heading to
    /// (c, s) goes on the side given by `toward_left`.
    fn open_cup(&mut self, at: usize, c: usize, s: usize, toward_left: bool) {
        let (fc, fs) = self.far_end(c, s);
        let near = self.leaving(fc, fs);
        let far = self.leaving(c, s);
        let pair = if toward_left { [near, far] } else { [far, near] };
        self.frontier.splice(at..at, pair);
        self.events.push(MorseEvent::cup(at));
    }

    fn fresh_gap(&self, c: usize, k: usize) -> Option<usize> {
        let needed =
            if self.label(c, k) == self.label(c, k + 1) { self.face[c][(k + 1) % 4] } else { self.face[c][k % 4] };
        (0..=self.frontier.len()).rev().find(|&j| self.gap_face(j).is_none_or(|f| f == needed))
    }

    fn best_move(&self, done: &[bool]) -> Option<(usize, usize, Placement)> {
        let mut best: Option<(usize, Label, usize, usize, Placement)> = None;
        for (c, x) in self.pd.crossings().iter().enumerate() {
            if done[c] {
                continue;
            }
            let min_label = *x.0.iter().min().unwrap();
            for k in 0..4 {
                let left = self.find(c, k);
                let right = self.find(c, k + 1);
                let candidate = match (left, right) {
                    (Some(i), Some(j)) if j == i + 1 => Some((2, Placement::Adjacent(i))),
                    (Some(_), Some(_)) => None,
                    (Some(i), None) => Some((1, Placement::CupRight(i))),
                    (None, Some(j)) => Some((1, Placement::CupLeft(j))),
                    (None, None) => self.fresh_gap(c, k).map(|j| (0, Placement::Fresh(j))),
                };
                if let Some((score, placement)) = candidate {
                    let better = match &best {
                        None => true,
                        Some((bs, bl, _, _, _)) => score > *bs || (score == *bs && min_label < *bl),
                    };
                    if better {
                        best = Some((score, min_label, c, k, placement));
                    }
                }
            }
        }
        best.map(|(_, _, c, k, p)| (c, k, p))
    }

    fn place(&mut self, c: usize, k: usize, placement: Placement) -> usize {
        match placement {
            Placement::Adjacent(i) => i,
            Placement::CupRight(i) => {
                self.open_cup(i + 1, c, k + 1, true);
                i
            }
            Placement::CupLeft(j) => {
                self.open_cup(j, c, k, false);
                j + 1
            }
            Placement::Fresh(j) => {
                if self.frontier.is_empty() {
                    self.outer = Some(if self.label(c, k) == self.label(c, k + 1) {
                        self.face[c][(k + 1) % 4]
                    } else {
                        self.face[c][k % 4]
                    });
                }
                if self.label(c, k) == self.label(c, k + 1) {
                    // a loop edge joining the two bottom legs
                    let b = self.leaving(c, k);
                    let a = self.leaving(c, k + 1);
                    self.frontier.splice(j..j, [a, b]);
                    self.events.push(MorseEvent::cup(j));
                    j
                } else {
                    self.open_cup(j, c, k, false);
                    self.open_cup(j + 2, c, k + 1, true);
                    j + 1
                }
            }
        }
    }

    fn cross(&mut self, c: usize, k: usize, at: usize) {
        // Slots 0 and 2 carry the under strand: with k even it runs from the
        // bottom left to the top right, so the over strand runs bottom right
        // to top left.
        let kind = if k.is_multiple_of(2) { EventKind::CrossPos } else { EventKind::CrossNeg };
        self.events.push(MorseEvent { kind, at });
        let top_left = (k + 3) % 4;
        let top_right = (k + 2) % 4;
        let mut outs = [self.leaving(c, top_left), self.leaving(c, top_right)];
        for (o, s) in outs.iter_mut().zip([top_left, top_right]) {
            if let Some(p) = self.find(c, s) {
                o.target = Target::Partner(self.frontier[p].id);
            }
        }
        // The two top legs may be the two ends of one edge.
        if self.label(c, top_left) == self.label(c, top_right) {
            outs[0].target = Target::Partner(outs[1].id);
            outs[1].target = Target::Partner(outs[0].id);
        }
        for o in &outs {
            if let Target::Partner(pid) = o.target {
                if let Some(p) = self.frontier.iter().position(|st| st.id == pid) {
                    self.frontier[p].target = Target::Partner(o.id);
                }
            }
        }
        self.frontier.splice(at..at + 2, outs);
    }

    fn close_caps(&mut self) {
        loop {
            let hit = self.frontier.windows(2).position(|w| {
                matches!((w[0].target, w[1].target),
                    (Target::Partner(a), Target::Partner(b)) if a == w[1].id && b == w[0].id)
            });
            match hit {
                Some(i) => {
                    self.frontier.drain(i..i + 2);
                    self.events.push(MorseEvent::cap(i));
                }
                None => break,
            }
        }
        if self.frontier.is_empty() {
            self.outer = None;
        }
    }

    /// Neighbouring strands must agree on the face between them.
    fn planar(&self) -> bool {
        let ends = match (self.frontier.first(), self.frontier.last()) {
            (Some(a), Some(b)) => Some(a.left) == self.outer && Some(b.right) == self.outer,
            _ => true,
        };
        ends && self.frontier.windows(2).all(|w| w[0].right == w[1].left)
    }
}

/// Greedy frontier conversion. Each step places the crossing with the most
/// legs already on the frontier, opening cups for missing legs next to the
/// present ones, and closes caps as soon as both halves of an edge meet.
/// Every strand carries the faces on its two sides, so fresh cups are only
/// opened in a gap lying in the right face of the diagram.
pub fn pd_to_morse(pd: &PdCode) -> Result<MorseWord, MorseError> {
    let report = pd.validate();
    if !report.is_ok() {
        return Err(PdError::Invalid(report).into());
    }
    if pd.is_empty() {
        return Ok(MorseWord::new(vec![MorseEvent::cup(0), MorseEvent::cap(0)]));
    }
    let mut conv = Converter::new(pd);
    let n = pd.n();
    let mut done = vec![false; n];
    for placed in 0..n {
        let (c, k, placement) = conv.best_move(&done).ok_or(MorseError::Stuck(n - placed))?;
        let at = conv.place(c, k, placement);
        conv.cross(c, k, at);
        done[c] = true;
        conv.close_caps();
        if !conv.planar() {
            return Err(MorseError::Stuck(n - placed - 1));
        }
    }
    if !conv.frontier.is_empty() {
        return Err(MorseError::Stuck(0));
    }
    let word = MorseWord::new(conv.events);
    word.validate()?;
    Ok(word)
}
