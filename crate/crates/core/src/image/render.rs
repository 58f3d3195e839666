use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::raster::RasterImage;
use crate::morse::{pd_to_morse, EventKind, MorseError, MorseWord};
use crate::pd::PdCode;

pub const INK: u8 = 0;
pub const PAPER: u8 = 255;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrokeStyle {
    /// The under strand is interrupted on both sides of every crossing.
    Broken,
    /// Both strands drawn through; carries no over/under information.
    Solid,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RenderOptions {
    pub size: usize,
    pub stroke: f64,
    pub gap: f64,
    pub seed: u64,
    pub style: StrokeStyle,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self { size: 512, stroke: 3.0, gap: 6.0, seed: 0, style: StrokeStyle::Broken }
    }
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error(transparent)]
    Morse(#[from] MorseError),
    #[error("Morse word of width {width} needs lanes {spacing:.1} px apart, below the {min:.1} px minimum")]
    TooWide { width: usize, spacing: f64, min: f64 },
    #[error("{events} events leave {height:.1} px per crossing band, below the {min:.1} px minimum")]
    TooTall { events: usize, height: f64, min: f64 },
}

const CROSS_WEIGHT: f64 = 1.0;
const TURN_WEIGHT: f64 = 0.8;
const MARGIN: f64 = 0.09;

pub fn render_pd(pd: &PdCode, opts: &RenderOptions) -> Result<RasterImage, RenderError> {
    render_word(&pd_to_morse(pd)?, opts)
}

/// Lays the word out bottom to top: strands on vertical lanes centred on the
/// canvas, each event in its own horizontal band, lanes shifting with smooth
/// S-curves as the width changes.
pub fn render_word(word: &MorseWord, opts: &RenderOptions) -> Result<RasterImage, RenderError> {
    let widths = word.widths()?;
    let max_w = widths.iter().copied().max().unwrap_or(0).max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let size = opts.size as f64;
    let usable = size * (1.0 - 2.0 * MARGIN);
    let cut = opts.gap + opts.stroke;

    let weights: Vec<f64> = word
        .events
        .iter()
        .map(|e| {
            let base = match e.kind {
                EventKind::Cup | EventKind::Cap => TURN_WEIGHT,
                _ => CROSS_WEIGHT,
            };
            base * rng.gen_range(0.85..1.18)
        })
        .collect();
    let unit = usable / weights.iter().sum::<f64>().max(1.0);
    let min_band = 2.0 * cut;
    if word.crossings() > 0 && unit * 0.85 < min_band {
        return Err(RenderError::TooTall { events: word.len(), height: unit, min: min_band });
    }

    let sp_max = (usable / (max_w - 1) as f64).min(size * 0.3);
    let min_sp = 2.0 * cut;
    if sp_max < min_sp {
        return Err(RenderError::TooWide { width: max_w, spacing: sp_max, min: min_sp });
    }
    let sp = ((1.4 * unit).max(2.2 * cut).min(sp_max) * rng.gen_range(0.9..1.0)).max(min_sp);
    let cx = size / 2.0 + rng.gen_range(-0.02..0.02) * size;
    let lane = |w: usize, i: usize| cx + (i as f64 - (w as f64 - 1.0) / 2.0) * sp;

    let mut canvas = Canvas::new(opts.size, opts.stroke / 2.0);
    let mut y0 = size * MARGIN;
    for (k, ev) in word.events.iter().enumerate() {
        let h = weights[k] * unit;
        let y1 = y0 + h;
        let (wb, wt) = (widths[k], widths[k + 1]);
        let at = ev.at;
        let passing = |i: usize| -> Option<usize> {
            match ev.kind {
                EventKind::Cup => Some(if i < at { i } else { i + 2 }),
                EventKind::Cap => match i {
                    i if i < at => Some(i),
                    i if i < at + 2 => None,
                    i => Some(i - 2),
                },
                _ => (i != at && i != at + 1).then_some(i),
            }
        };
        for i in 0..wb {
            if let Some(j) = passing(i) {
                canvas.draw(&s_curve(lane(wb, i), lane(wt, j), y0, y1), None);
            }
        }
        match ev.kind {
            EventKind::Cup => {
                let (a, b) = (lane(wt, at), lane(wt, at + 1));
                canvas.draw(&turn((a + b) / 2.0, (b - a) / 2.0, y1, -0.75 * h), None);
            }
            EventKind::Cap => {
                let (a, b) = (lane(wb, at), lane(wb, at + 1));
                canvas.draw(&turn((a + b) / 2.0, (b - a) / 2.0, y0, 0.75 * h), None);
            }
            EventKind::CrossPos | EventKind::CrossNeg => {
                let (l, r) = (lane(wb, at), lane(wb, at + 1));
                let rising = s_curve(l, r, y0, y1);
                let falling = s_curve(r, l, y0, y1);
                let centre = ((l + r) / 2.0, (y0 + y1) / 2.0);
                let skip = match opts.style {
                    StrokeStyle::Broken => Some((centre, cut)),
                    StrokeStyle::Solid => None,
                };
                // CrossPos: the strand entering bottom right passes over
                let (over, under) = if ev.kind == EventKind::CrossPos { (falling, rising) } else { (rising, falling) };
                canvas.draw(&over, None);
                canvas.draw(&under, skip);
            }
        }
        y0 = y1;
    }
    Ok(canvas.finish())
}

fn smooth(t: f64) -> f64 {
    (1.0 - (std::f64::consts::PI * t).cos()) / 2.0
}

fn samples(len: f64) -> usize {
    ((len / 0.4).ceil() as usize).max(8)
}

fn s_curve(xb: f64, xt: f64, y0: f64, y1: f64) -> Vec<(f64, f64)> {
    let n = samples((xt - xb).abs() * 1.6 + (y1 - y0));
    (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            (xb + (xt - xb) * smooth(t), y0 + (y1 - y0) * t)
        })
        .collect()
}

/// Half ellipse from `(xc - r, y)` to `(xc + r, y)` reaching `y + depth`.
fn turn(xc: f64, r: f64, y: f64, depth: f64) -> Vec<(f64, f64)> {
    let n = samples(std::f64::consts::PI * (r + depth.abs()));
    (0..=n)
        .map(|k| {
            let th = std::f64::consts::PI * k as f64 / n as f64;
            (xc - r * th.cos(), y + depth * th.sin())
        })
        .collect()
}

struct Canvas {
    img: RasterImage,
    radius: f64,
}

impl Canvas {
    fn new(size: usize, radius: f64) -> Self {
        Self { img: RasterImage::new(size, size, PAPER), radius }
    }

    /// Stamps a disk at every sample, skipping samples inside the optional
    /// `(centre, radius)` hole. Curve coordinates have y pointing up.
    fn draw(&mut self, pts: &[(f64, f64)], hole: Option<((f64, f64), f64)>) {
        let size = self.img.height() as f64;
        let r = self.radius;
        let reach = r.ceil() as i64;
        for &(x, y) in pts {
            if let Some(((hx, hy), hr)) = hole {
                if (x - hx).hypot(y - hy) < hr {
                    continue;
                }
            }
            let (px, py) = (x, size - y);
            let (ix, iy) = (px.round() as i64, py.round() as i64);
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    let (qx, qy) = (ix + dx, iy + dy);
                    if qx < 0 || qy < 0 || qx >= self.img.width() as i64 || qy >= self.img.height() as i64 {
                        continue;
                    }
                    if (qx as f64 - px).hypot(qy as f64 - py) <= r + 0.25 {
                        self.img.set(qx as usize, qy as usize, INK);
                    }
                }
            }
        }
    }

    fn finish(self) -> RasterImage {
        self.img
    }
}
