use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use super::raster::RasterImage;
use super::skeleton::{Skeleton, RING};
use crate::pd::{CrossingQuad, Label, PdCode};

/// Image coordinates: x to the right, y down.
pub type Point = (f64, f64);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JunctionKind {
    /// Cluster of skeleton pixels with three or more neighbours.
    Branch,
    /// Two facing stub ends with a strand passing between them.
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcEnd {
    Start,
    End,
}

impl ArcEnd {
    pub fn other(self) -> Self {
        match self {
            ArcEnd::Start => ArcEnd::End,
            ArcEnd::End => ArcEnd::Start,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Port {
    pub arc: usize,
    pub end: ArcEnd,
    /// Unit vector from the junction centroid along the arc.
    pub direction: Point,
}

#[derive(Clone, Debug)]
pub struct Junction {
    pub centroid: Point,
    pub kind: JunctionKind,
    pub ports: Vec<Port>,
    /// Port indices paired into the two transversal strands.
    pub strands: Option<[[usize; 2]; 2]>,
    /// Index into `strands` of the over strand, once classified.
    pub over: Option<usize>,
}

impl Junction {
    pub fn valence(&self) -> usize {
        self.ports.len()
    }

    fn partner(&self, port: usize) -> Option<usize> {
        let s = self.strands?;
        s.iter().find(|pair| pair.contains(&port)).map(|pair| if pair[0] == port { pair[1] } else { pair[0] })
    }
}

#[derive(Clone, Debug)]
pub struct Arc {
    pub points: Vec<Point>,
    pub start: Option<usize>,
    pub end: Option<usize>,
    pub closed: bool,
}

impl Arc {
    pub fn attachment(&self, end: ArcEnd) -> Option<usize> {
        match end {
            ArcEnd::Start => self.start,
            ArcEnd::End => self.end,
        }
    }

    fn end_point(&self, end: ArcEnd) -> Point {
        match end {
            ArcEnd::Start => self.points[0],
            ArcEnd::End => *self.points.last().expect("arcs are non-empty"),
        }
    }

    /// Point `k` samples in from the given end.
    fn inward(&self, end: ArcEnd, k: usize) -> Point {
        let k = k.min(self.points.len() - 1);
        match end {
            ArcEnd::Start => self.points[k],
            ArcEnd::End => self.points[self.points.len() - 1 - k],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Diagnostic {
    NonGeneric { x: f64, y: f64, valence: usize },
    UnpairedEnd { x: f64, y: f64 },
    Ambiguous { junction: usize, x: f64, y: f64 },
    Noise { x: f64, y: f64, pixels: usize },
}

#[derive(Clone, Debug)]
pub struct JunctionGraph {
    pub junctions: Vec<Junction>,
    pub arcs: Vec<Arc>,
    pub diagnostics: Vec<Diagnostic>,
    pub stroke: f64,
}

impl JunctionGraph {
    /// Junctions resolved into two transversal strands.
    pub fn crossing_count(&self) -> usize {
        self.junctions.iter().filter(|j| j.valence() == 4 && j.strands.is_some()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectOptions {
    /// Expected gap in the under strand, px; over/under probes and stub
    /// pairing look within three times this distance.
    pub gap: f64,
}

impl Default for DetectOptions {
    fn default() -> Self {
        Self { gap: 6.0 }
    }
}

impl DetectOptions {
    pub fn window(&self) -> f64 {
        3.0 * self.gap
    }
}

struct Grid<'a> {
    sk: &'a Skeleton,
    w: usize,
}

impl Grid<'_> {
    fn fg(&self, i: usize) -> bool {
        self.sk.mask()[i]
    }

    fn xy(&self, i: usize) -> (i64, i64) {
        ((i % self.w) as i64, (i / self.w) as i64)
    }

    fn point(&self, i: usize) -> Point {
        let (x, y) = self.xy(i);
        (x as f64, y as f64)
    }

    fn neighbours(&self, i: usize) -> Vec<usize> {
        let (x, y) = self.xy(i);
        RING.iter()
            .filter(|(dx, dy)| self.sk.get(x + dx, y + dy))
            .map(|(dx, dy)| (y + dy) as usize * self.w + (x + dx) as usize)
            .collect()
    }
}

fn find(uf: &mut [usize], mut a: usize) -> usize {
    while uf[a] != a {
        uf[a] = uf[uf[a]];
        a = uf[a];
    }
    a
}

fn dist(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn unit(v: Point) -> Point {
    let n = v.0.hypot(v.1);
    if n == 0.0 {
        (0.0, 0.0)
    } else {
        (v.0 / n, v.1 / n)
    }
}

fn dot(a: Point, b: Point) -> f64 {
    a.0 * b.0 + a.1 * b.1
}

struct RawArc {
    pixels: Vec<usize>,
    start: Option<usize>,
    end: Option<usize>,
    closed: bool,
}

/// Traces the skeleton into junction clusters and arcs, then adds a gap
/// junction wherever two stub ends face each other across a passing strand.
pub fn detect_junctions(sk: &Skeleton, opts: &DetectOptions) -> JunctionGraph {
    let g = Grid { sk, w: sk.width() };
    let stroke = sk.stroke().max(1.0);
    let r_merge = 1.5 * stroke;
    let n = sk.width() * sk.height();
    let degree: Vec<usize> = (0..n).map(|i| if g.fg(i) { g.neighbours(i).len() } else { 0 }).collect();
    let branch: Vec<usize> = (0..n).filter(|&i| degree[i] >= 3).collect();
    let is_branch = |i: usize| degree[i] >= 3;

    // cluster branch pixels within r_merge
    let mut uf: Vec<usize> = (0..branch.len()).collect();
    for a in 0..branch.len() {
        for b in a + 1..branch.len() {
            if dist(g.point(branch[a]), g.point(branch[b])) <= r_merge {
                let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                uf[ra] = rb;
            }
        }
    }
    let mut cluster_of_pixel: HashMap<usize, usize> = HashMap::new();
    for (a, &p) in branch.iter().enumerate() {
        let r = find(&mut uf, a);
        cluster_of_pixel.insert(p, r);
    }

    // trace arcs through non-branch pixels
    let mut visited = vec![false; n];
    let mut raw: Vec<RawArc> = Vec::new();
    let walk = |from: usize, visited: &mut Vec<bool>| -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = from;
        loop {
            let next = g.neighbours(cur).into_iter().filter(|&q| !is_branch(q) && !visited[q]).min_by_key(|&q| {
                let ((x0, y0), (x1, y1)) = (g.xy(cur), g.xy(q));
                (x0 - x1).abs() + (y0 - y1).abs()
            });
            match next {
                Some(q) => {
                    visited[q] = true;
                    path.push(q);
                    cur = q;
                }
                None => return path,
            }
        }
    };
    let attach =
        |i: usize| -> Option<usize> { g.neighbours(i).into_iter().find_map(|q| cluster_of_pixel.get(&q).copied()) };
    // free ends first so open arcs are traced from an end
    let mut seeds: Vec<usize> = (0..n).filter(|&i| g.fg(i) && !is_branch(i) && degree[i] <= 1).collect();
    seeds.extend((0..n).filter(|&i| g.fg(i) && !is_branch(i) && attach(i).is_some()));
    seeds.extend((0..n).filter(|&i| g.fg(i) && !is_branch(i)));
    for s in seeds {
        if visited[s] {
            continue;
        }
        visited[s] = true;
        let fwd = walk(s, &mut visited);
        let back = walk(s, &mut visited);
        let mut pixels: Vec<usize> = back.into_iter().rev().collect();
        pixels.push(s);
        pixels.extend(fwd);
        let (first, last) = (pixels[0], *pixels.last().unwrap());
        let start = attach(first);
        let end = attach(last);
        let adjacent = g.neighbours(first).contains(&last);
        let closed = start.is_none() && end.is_none() && pixels.len() >= 4 && adjacent;
        raw.push(RawArc { pixels, start, end, closed });
    }

    // merge clusters joined by very short arcs
    let mut cuf: Vec<usize> = (0..branch.len()).collect();
    let short = (2.0 * r_merge).ceil() as usize;
    raw.retain(|a| match (a.start, a.end) {
        (Some(s), Some(e)) if a.pixels.len() <= short => {
            let (rs, re) = (find(&mut cuf, s), find(&mut cuf, e));
            cuf[rs] = re;
            false
        }
        _ => true,
    });
    let mut cluster_ids: HashMap<usize, usize> = HashMap::new();
    let mut cluster_pixels: Vec<Vec<usize>> = Vec::new();
    for (a, &px) in branch.iter().enumerate() {
        let root = find(&mut uf, a);
        let root = find(&mut cuf, root);
        let id = *cluster_ids.entry(root).or_insert_with(|| {
            cluster_pixels.push(Vec::new());
            cluster_pixels.len() - 1
        });
        cluster_pixels[id].push(px);
    }
    for a in raw.iter_mut() {
        a.start = a.start.map(|c| cluster_ids[&find(&mut cuf, c)]);
        a.end = a.end.map(|c| cluster_ids[&find(&mut cuf, c)]);
    }

    let mut diagnostics = Vec::new();
    let noise = (2.0 * stroke).ceil() as usize;
    raw.retain(|a| {
        let keep = a.start.is_some() || a.end.is_some() || a.pixels.len() >= noise;
        if !keep {
            let (x, y) = g.point(a.pixels[0]);
            diagnostics.push(Diagnostic::Noise { x, y, pixels: a.pixels.len() });
        }
        keep
    });

    let mut junctions: Vec<Junction> = cluster_pixels
        .iter()
        .map(|px| {
            let (sx, sy) = px.iter().fold((0.0, 0.0), |(sx, sy), &i| {
                let (x, y) = g.point(i);
                (sx + x, sy + y)
            });
            let k = px.len() as f64;
            Junction {
                centroid: (sx / k, sy / k),
                kind: JunctionKind::Branch,
                ports: Vec::new(),
                strands: None,
                over: None,
            }
        })
        .collect();

    let arcs: Vec<Arc> = raw
        .into_iter()
        .map(|a| Arc {
            points: a.pixels.iter().map(|&i| g.point(i)).collect(),
            start: a.start,
            end: a.end,
            closed: a.closed,
        })
        .collect();
    let mut arcs = add_gap_junctions(arcs, &mut junctions, stroke, opts, &mut diagnostics);

    // ports, directions and transversal pairing
    let reach = (3.0 * stroke).ceil() as usize;
    for (ai, arc) in arcs.iter_mut().enumerate() {
        for end in [ArcEnd::Start, ArcEnd::End] {
            if let Some(j) = arc.attachment(end) {
                let c = junctions[j].centroid;
                let p = arc.inward(end, reach);
                let mut d = unit((p.0 - c.0, p.1 - c.1));
                if d == (0.0, 0.0) {
                    d = unit((arc.end_point(end).0 - c.0, arc.end_point(end).1 - c.1));
                }
                junctions[j].ports.push(Port { arc: ai, end, direction: d });
            }
        }
    }
    for j in junctions.iter_mut() {
        if j.valence() == 4 {
            j.strands = Some(pair_ports(&j.ports));
        } else {
            diagnostics.push(Diagnostic::NonGeneric { x: j.centroid.0, y: j.centroid.1, valence: j.valence() });
        }
    }
    for a in &arcs {
        if a.closed {
            continue;
        }
        for end in [ArcEnd::Start, ArcEnd::End] {
            if a.attachment(end).is_none() {
                let (x, y) = a.end_point(end);
                diagnostics.push(Diagnostic::UnpairedEnd { x, y });
            }
        }
    }
    JunctionGraph { junctions, arcs, diagnostics, stroke }
}

/// Chooses the pairing of four directions closest to two straight lines.
fn pair_ports(ports: &[Port]) -> [[usize; 2]; 2] {
    let options = [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]];
    let cost = |p: &[[usize; 2]; 2]| -> f64 {
        p.iter().map(|[a, b]| 1.0 + dot(ports[*a].direction, ports[*b].direction)).sum()
    };
    *options.iter().min_by(|a, b| cost(a).total_cmp(&cost(b))).unwrap()
}

struct FreeEnd {
    arc: usize,
    end: ArcEnd,
    tip: Point,
    out: Point,
}

fn add_gap_junctions(
    arcs: Vec<Arc>,
    junctions: &mut Vec<Junction>,
    stroke: f64,
    opts: &DetectOptions,
    diagnostics: &mut Vec<Diagnostic>,
) -> Vec<Arc> {
    let back = ((2.0 * stroke).ceil() as usize + 2).max(3);
    let mut ends = Vec::new();
    for (ai, a) in arcs.iter().enumerate() {
        if a.closed {
            continue;
        }
        for end in [ArcEnd::Start, ArcEnd::End] {
            if a.attachment(end).is_none() {
                let tip = a.end_point(end);
                let inner = a.inward(end, back);
                ends.push(FreeEnd { arc: ai, end, tip, out: unit((tip.0 - inner.0, tip.1 - inner.1)) });
            }
        }
    }
    let max_pair = 2.0 * opts.window();
    let min_cos = 0.5;
    let mut candidates: Vec<(f64, usize, usize, usize, usize)> = Vec::new();
    for a in 0..ends.len() {
        for b in a + 1..ends.len() {
            let (ea, eb) = (&ends[a], &ends[b]);
            let d = dist(ea.tip, eb.tip);
            if d > max_pair || d < stroke {
                continue;
            }
            let ab = unit((eb.tip.0 - ea.tip.0, eb.tip.1 - ea.tip.1));
            let (ca, cb) = (dot(ea.out, ab), -dot(eb.out, ab));
            if ca < min_cos || cb < min_cos {
                continue;
            }
            let mid = ((ea.tip.0 + eb.tip.0) / 2.0, (ea.tip.1 + eb.tip.1) / 2.0);
            let mut best: Option<(f64, usize, usize)> = None;
            for (ai, arc) in arcs.iter().enumerate() {
                for (k, &p) in arc.points.iter().enumerate() {
                    if !arc.closed && (k == 0 || k + 1 == arc.points.len()) {
                        continue;
                    }
                    let dm = dist(p, mid);
                    if dm > d / 2.0 + stroke || dist(p, ea.tip) < 0.3 * d || dist(p, eb.tip) < 0.3 * d {
                        continue;
                    }
                    if best.is_none_or(|(bd, _, _)| dm < bd) {
                        best = Some((dm, ai, k));
                    }
                }
            }
            if let Some((dm, ai, k)) = best {
                candidates.push((d * (3.0 - ca - cb) + dm, a, b, ai, k));
            }
        }
    }
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used = vec![false; ends.len()];
    let mut splits: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut tips: HashMap<(usize, ArcEnd), usize> = HashMap::new();
    for (_, a, b, ai, k) in candidates {
        if used[a] || used[b] {
            continue;
        }
        let taken = splits.get(&ai).is_some_and(|v| v.iter().any(|&(kk, _)| kk.abs_diff(k) < 2));
        if taken {
            continue;
        }
        used[a] = true;
        used[b] = true;
        let j = junctions.len();
        junctions.push(Junction {
            centroid: arcs[ai].points[k],
            kind: JunctionKind::Gap,
            ports: Vec::new(),
            strands: None,
            over: None,
        });
        splits.entry(ai).or_default().push((k, j));
        tips.insert((ends[a].arc, ends[a].end), j);
        tips.insert((ends[b].arc, ends[b].end), j);
    }
    let _ = diagnostics;

    let mut out = Vec::new();
    for (ai, arc) in arcs.into_iter().enumerate() {
        let start = arc.start.or_else(|| tips.get(&(ai, ArcEnd::Start)).copied());
        let end = arc.end.or_else(|| tips.get(&(ai, ArcEnd::End)).copied());
        let mut cuts = splits.remove(&ai).unwrap_or_default();
        cuts.sort();
        if cuts.is_empty() {
            out.push(Arc { start, end, ..arc });
            continue;
        }
        let pts = &arc.points;
        if arc.closed {
            for m in 0..cuts.len() {
                let (k0, j0) = cuts[m];
                let (k1, j1) = cuts[(m + 1) % cuts.len()];
                let piece: Vec<Point> = if k1 > k0 {
                    pts[k0..=k1].to_vec()
                } else {
                    pts[k0..].iter().chain(pts[..=k1].iter()).copied().collect()
                };
                out.push(Arc { points: piece, start: Some(j0), end: Some(j1), closed: false });
            }
        } else {
            let mut prev = (0usize, start);
            for &(k, j) in &cuts {
                out.push(Arc { points: pts[prev.0..=k].to_vec(), start: prev.1, end: Some(j), closed: false });
                prev = (k, Some(j));
            }
            out.push(Arc { points: pts[prev.0..].to_vec(), start: prev.1, end, closed: false });
        }
    }
    out
}

/// Labels each junction's over strand from the broken-understrand cue: a
/// strand whose arcs stop short of the centroid, with background between,
/// is the under strand.
pub fn classify_over_under(mut jg: JunctionGraph, bin: &RasterImage, opts: &DetectOptions) -> JunctionGraph {
    let stroke = jg.stroke;
    let window = opts.window() + stroke;
    let mut diagnostics = Vec::new();
    for (ji, j) in jg.junctions.iter_mut().enumerate() {
        let Some(strands) = j.strands else { continue };
        let c = j.centroid;
        let gapped_port = |p: &Port| -> bool {
            let e = jg.arcs[p.arc].end_point(p.end);
            let reach = dist(c, e);
            if reach < stroke || reach > window {
                return false;
            }
            let u = unit((e.0 - c.0, e.1 - c.1));
            let mut t = 0.5 * stroke;
            while t < reach - 1.0 {
                let (x, y) = ((c.0 + t * u.0).round() as i64, (c.1 + t * u.1).round() as i64);
                if bin.get_or(x, y, 0) == 0 {
                    return true;
                }
                t += 0.5;
            }
            false
        };
        let gapped: Vec<bool> = strands.iter().map(|pair| pair.iter().all(|&p| gapped_port(&j.ports[p]))).collect();
        j.over = match (gapped[0], gapped[1]) {
            (true, false) => Some(1),
            (false, true) => Some(0),
            _ => {
                diagnostics.push(Diagnostic::Ambiguous { junction: ji, x: c.0, y: c.1 });
                None
            }
        };
    }
    jg.diagnostics.extend(diagnostics);
    jg
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("junction {index} at ({x:.0}, {y:.0}) has no over/under label")]
    Unlabeled { index: usize, x: f64, y: f64 },
    #[error("open curve: free end at ({x:.0}, {y:.0})")]
    OpenCurve { x: f64, y: f64 },
    #[error("traversal inconsistency: {0}")]
    Inconsistent(String),
}

pub fn graph_to_pd(jg: &JunctionGraph) -> Result<PdCode, GraphError> {
    graph_to_pd_from(jg, 0)
}

/// Traverses the curve leaving through port number `start` (counted over
/// all junctions in order, modulo the total), numbering arcs as met.
pub fn graph_to_pd_from(jg: &JunctionGraph, start: usize) -> Result<PdCode, GraphError> {
    for a in &jg.arcs {
        if a.closed {
            continue;
        }
        for end in [ArcEnd::Start, ArcEnd::End] {
            if a.attachment(end).is_none() {
                let (x, y) = a.end_point(end);
                return Err(GraphError::OpenCurve { x, y });
            }
        }
    }
    for j in &jg.junctions {
        if j.valence() != 4 || j.strands.is_none() {
            return Err(GraphError::Inconsistent(format!(
                "junction at ({:.0}, {:.0}) has valence {}",
                j.centroid.0,
                j.centroid.1,
                j.valence()
            )));
        }
    }
    for (index, j) in jg.junctions.iter().enumerate() {
        if j.over.is_none() {
            return Err(GraphError::Unlabeled { index, x: j.centroid.0, y: j.centroid.1 });
        }
    }
    let loops = jg.arcs.iter().filter(|a| a.closed).count();
    if jg.junctions.is_empty() {
        return match loops {
            1 => Ok(PdCode::unknot()),
            k => Err(GraphError::Inconsistent(format!("{k} closed curves without crossings"))),
        };
    }
    if loops > 0 {
        return Err(GraphError::Inconsistent("closed curve without crossings beside crossed curves".into()));
    }

    let mut port_of: HashMap<(usize, ArcEnd), (usize, usize)> = HashMap::new();
    let mut all_ports = Vec::new();
    for (ji, j) in jg.junctions.iter().enumerate() {
        for (pi, p) in j.ports.iter().enumerate() {
            if port_of.insert((p.arc, p.end), (ji, pi)).is_some() {
                return Err(GraphError::Inconsistent("arc end attached twice".into()));
            }
            all_ports.push((ji, pi));
        }
    }
    let mut label: Vec<Option<Label>> = vec![None; jg.arcs.len()];
    let mut incoming: Vec<[Option<bool>; 4]> = vec![[None; 4]; jg.junctions.len()];
    let mut next: Label = 1;
    let total = all_ports.len();
    for step in 0..total {
        let (mut ji, mut pi) = all_ports[(start + step) % total];
        if label[jg.junctions[ji].ports[pi].arc].is_some() {
            continue;
        }
        loop {
            let port = jg.junctions[ji].ports[pi];
            if label[port.arc].is_some() {
                break;
            }
            label[port.arc] = Some(next);
            next += 1;
            incoming[ji][pi] = Some(false);
            let &(j2, p2) = port_of
                .get(&(port.arc, port.end.other()))
                .ok_or_else(|| GraphError::Inconsistent("arc with one attached end".into()))?;
            incoming[j2][p2] = Some(true);
            ji = j2;
            pi = jg.junctions[j2].partner(p2).expect("strands checked above");
        }
    }

    let mut quads = Vec::new();
    for (ji, j) in jg.junctions.iter().enumerate() {
        let strands = j.strands.expect("checked");
        let under = strands[1 - j.over.expect("checked")];
        let &under_in = under
            .iter()
            .find(|&&p| incoming[ji][p] == Some(true))
            .ok_or_else(|| GraphError::Inconsistent("under strand has no incoming end".into()))?;
        // counterclockwise as seen on the page: flip y
        let angle = |p: usize| {
            let (dx, dy) = j.ports[p].direction;
            (-dy).atan2(dx)
        };
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
        let rot = order.iter().position(|&p| p == under_in).unwrap();
        order.rotate_left(rot);
        if j.partner(order[0]) != Some(order[2]) {
            return Err(GraphError::Inconsistent(format!(
                "strands at ({:.0}, {:.0}) do not cross transversally",
                j.centroid.0, j.centroid.1
            )));
        }
        let labels: Vec<Label> = order.iter().map(|&p| label[j.ports[p].arc].expect("all arcs labelled")).collect();
        quads.push(CrossingQuad([labels[0], labels[1], labels[2], labels[3]]));
    }
    let pd = PdCode::new(quads);
    let report = pd.validate();
    if !report.is_ok() {
        return Err(GraphError::Inconsistent(report.to_string()));
    }
    Ok(pd)
}
