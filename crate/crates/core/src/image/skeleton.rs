use std::sync::OnceLock;

use super::binarize::estimate_stroke;
use super::raster::{ImageError, RasterImage};

/// Neighbour offsets clockwise from north, y pointing down.
pub(crate) const RING: [(i64, i64); 8] = [(0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1)];

#[derive(Clone, Debug)]
pub struct Skeleton {
    width: usize,
    height: usize,
    pixels: Vec<bool>,
    stroke: f64,
    degenerate: bool,
}

impl Skeleton {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn stroke(&self) -> f64 {
        self.stroke
    }

    /// Set when some component shrank to a blob shorter than two stroke
    /// widths: the source had no curve structure there.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        x >= 0
            && y >= 0
            && x < self.width as i64
            && y < self.height as i64
            && self.pixels[y as usize * self.width + x as usize]
    }

    pub fn mask(&self) -> &[bool] {
        &self.pixels
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p).count()
    }

    pub fn degree(&self, x: i64, y: i64) -> usize {
        RING.iter().filter(|(dx, dy)| self.get(x + dx, y + dy)).count()
    }

    pub fn components(&self) -> usize {
        count_components(&self.pixels, self.width, self.height)
    }

    pub fn to_image(&self) -> RasterImage {
        let px = self.pixels.iter().map(|&p| u8::from(p)).collect();
        RasterImage::from_pixels(self.width, self.height, px).expect("dimensions already checked")
    }
}

fn ring_mask(px: &[bool], w: usize, h: usize, x: usize, y: usize) -> u8 {
    let mut m = 0u8;
    for (k, (dx, dy)) in RING.iter().enumerate() {
        let (qx, qy) = (x as i64 + dx, y as i64 + dy);
        if qx >= 0 && qy >= 0 && qx < w as i64 && qy < h as i64 && px[qy as usize * w + qx as usize] {
            m |= 1 << k;
        }
    }
    m
}

/// A foreground pixel is simple when its foreground neighbours form one
/// 8-connected group and its 4-adjacent background neighbours one
/// 4-connected group: deleting it changes no connectivity.
fn simple_table() -> &'static [bool; 256] {
    static T: OnceLock<[bool; 256]> = OnceLock::new();
    T.get_or_init(|| {
        let mut t = [false; 256];
        for (m, slot) in t.iter_mut().enumerate() {
            let fg = |k: usize| m & (1 << (k % 8)) != 0;
            let adjacent8 = |a: usize, b: usize| {
                let (ax, ay) = RING[a];
                let (bx, by) = RING[b];
                (ax - bx).abs() <= 1 && (ay - by).abs() <= 1
            };
            let adjacent4 = |a: usize, b: usize| {
                let (ax, ay) = RING[a];
                let (bx, by) = RING[b];
                (ax - bx).abs() + (ay - by).abs() == 1
            };
            let groups = |members: Vec<usize>, adj: &dyn Fn(usize, usize) -> bool| -> usize {
                let mut seen = vec![false; members.len()];
                let mut count = 0;
                for s in 0..members.len() {
                    if seen[s] {
                        continue;
                    }
                    count += 1;
                    let mut stack = vec![s];
                    seen[s] = true;
                    while let Some(i) = stack.pop() {
                        for j in 0..members.len() {
                            if !seen[j] && adj(members[i], members[j]) {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
                count
            };
            let fgs: Vec<usize> = (0..8).filter(|&k| fg(k)).collect();
            // background ring pixels reachable from the 4-neighbours of the centre
            let bgs: Vec<usize> = (0..8).filter(|&k| !fg(k)).collect();
            let fg_groups = groups(fgs.clone(), &adjacent8);
            let bg_touching = {
                let mut seen = vec![false; bgs.len()];
                let mut count = 0;
                for s in 0..bgs.len() {
                    if seen[s] || !bgs[s].is_multiple_of(2) {
                        continue;
                    }
                    count += 1;
                    let mut stack = vec![s];
                    seen[s] = true;
                    while let Some(i) = stack.pop() {
                        for j in 0..bgs.len() {
                            if !seen[j] && adjacent4(bgs[i], bgs[j]) {
                                seen[j] = true;
                                stack.push(j);
                            }
                        }
                    }
                }
                count
            };
            *slot = fgs.len() >= 2 && fg_groups == 1 && bg_touching == 1;
        }
        t
    })
}

fn zhang_suen(px: &mut [bool], w: usize, h: usize) {
    let mut live: Vec<usize> = (0..px.len()).filter(|&i| px[i]).collect();
    loop {
        let mut changed = false;
        for step in 0..2 {
            let doomed: Vec<usize> = live
                .iter()
                .copied()
                .filter(|&i| {
                    let m = ring_mask(px, w, h, i % w, i / w);
                    let p = |k: usize| m & (1 << k) != 0;
                    let b = m.count_ones();
                    let a = (0..8).filter(|&k| !p(k) && p((k + 1) % 8)).count();
                    // ring index: 0 N, 2 E, 4 S, 6 W
                    let cond = if step == 0 {
                        !(p(0) && p(2) && p(4)) && !(p(2) && p(4) && p(6))
                    } else {
                        !(p(0) && p(2) && p(6)) && !(p(0) && p(4) && p(6))
                    };
                    (2..=6).contains(&b) && a == 1 && cond
                })
                .collect();
            for &i in &doomed {
                px[i] = false;
            }
            changed |= !doomed.is_empty();
            live.retain(|&i| px[i]);
        }
        if !changed {
            break;
        }
    }
}

/// Deletes simple pixels until every remaining one is needed, leaving
/// curves with no 2×2 blocks and no staircase corners.
fn remove_redundant(px: &mut [bool], w: usize, h: usize) {
    let table = simple_table();
    loop {
        let mut changed = false;
        for i in 0..px.len() {
            if px[i] && table[ring_mask(px, w, h, i % w, i / w) as usize] {
                px[i] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
}

fn neighbours(px: &[bool], w: usize, h: usize, i: usize) -> impl Iterator<Item = usize> + '_ {
    let (x, y) = ((i % w) as i64, (i / w) as i64);
    RING.iter().filter_map(move |(dx, dy)| {
        let (qx, qy) = (x + dx, y + dy);
        (qx >= 0 && qy >= 0 && qx < w as i64 && qy < h as i64 && px[qy as usize * w + qx as usize])
            .then_some(qy as usize * w + qx as usize)
    })
}

/// Removes branches that run from a free end to a junction pixel in fewer
/// than `max_len` pixels. Returns whether anything changed.
fn prune_spurs(px: &mut [bool], w: usize, h: usize, max_len: usize) -> bool {
    let ends: Vec<usize> = (0..px.len()).filter(|&i| px[i] && neighbours(px, w, h, i).count() == 1).collect();
    let mut changed = false;
    for e in ends {
        if !px[e] {
            continue;
        }
        let mut path = vec![e];
        let mut prev = usize::MAX;
        let mut cur = e;
        let spur = loop {
            let next: Vec<usize> = neighbours(px, w, h, cur).filter(|&q| q != prev && !path.contains(&q)).collect();
            if next.len() >= 2 || neighbours(px, w, h, cur).count() >= 3 {
                path.pop();
                break true;
            }
            match next.first() {
                None => break false,
                Some(&q) => {
                    prev = cur;
                    cur = q;
                    path.push(q);
                }
            }
            if path.len() > max_len + 1 {
                break false;
            }
        };
        if spur && !path.is_empty() {
            for &i in &path {
                px[i] = false;
            }
            changed = true;
        }
    }
    changed
}

pub fn count_components(px: &[bool], w: usize, h: usize) -> usize {
    let mut seen = vec![false; px.len()];
    let mut count = 0;
    for s in 0..px.len() {
        if !px[s] || seen[s] {
            continue;
        }
        count += 1;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            for q in neighbours(px, w, h, i) {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    count
}

fn component_sizes(px: &[bool], w: usize, h: usize) -> Vec<usize> {
    let mut seen = vec![false; px.len()];
    let mut sizes = Vec::new();
    for s in 0..px.len() {
        if !px[s] || seen[s] {
            continue;
        }
        let mut n = 0;
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(i) = stack.pop() {
            n += 1;
            for q in neighbours(px, w, h, i) {
                if !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
        sizes.push(n);
    }
    sizes
}

/// Zhang–Suen thinning, then removal of redundant pixels and of spurs
/// shorter than twice the estimated stroke width.
pub fn skeletonize(bin: &RasterImage) -> Result<Skeleton, ImageError> {
    let (w, h) = (bin.width(), bin.height());
    let mut px: Vec<bool> = bin.pixels().iter().map(|&p| p != 0).collect();
    if !px.iter().any(|&p| p) {
        return Err(ImageError::Blank);
    }
    let stroke = estimate_stroke(bin);
    zhang_suen(&mut px, w, h);
    remove_redundant(&mut px, w, h);
    let max_len = (2.0 * stroke).ceil() as usize;
    for _ in 0..4 {
        if !prune_spurs(&mut px, w, h, max_len) {
            break;
        }
        remove_redundant(&mut px, w, h);
    }
    let degenerate = component_sizes(&px, w, h).iter().any(|&n| (n as f64) < 2.0 * stroke);
    Ok(Skeleton { width: w, height: h, pixels: px, stroke, degenerate })
}
