use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::binarize::binarize;
use super::raster::RasterImage;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum AugmentStep {
    /// Tilts the image plane about both in-plane axes by independent angles
    /// drawn from `[-max_tilt, max_tilt]` degrees, keeping the centre fixed.
    Perspective {
        max_tilt: f64,
    },
    FlipH,
    FlipV,
    /// Counterclockwise on the page, degrees.
    Rotate {
        degrees: f64,
    },
    Invert,
    Binarize,
}

/// Applies the steps in order. Uncovered pixels take the background value,
/// the most common border intensity. A binarize step on a blank image
/// leaves it unchanged.
pub fn augment(img: &RasterImage, seed: u64, recipe: &[AugmentStep]) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = img.clone();
    for step in recipe {
        out = match *step {
            AugmentStep::FlipH => remap_exact(&out, |x, y, w, _| (w - 1 - x, y)),
            AugmentStep::FlipV => remap_exact(&out, |x, y, _, h| (x, h - 1 - y)),
            AugmentStep::Rotate { degrees } => rotate(&out, degrees),
            AugmentStep::Perspective { max_tilt } => {
                let ax = rng.gen_range(-max_tilt..=max_tilt).to_radians();
                let ay = rng.gen_range(-max_tilt..=max_tilt).to_radians();
                perspective(&out, ax, ay)
            }
            AugmentStep::Invert => {
                let top = if out.is_binary() { 1 } else { 255 };
                let px = out.pixels().iter().map(|&p| top - p).collect();
                RasterImage::from_pixels(out.width(), out.height(), px).expect("same dimensions")
            }
            AugmentStep::Binarize => binarize(&out).unwrap_or(out),
        };
    }
    out
}

pub fn background(img: &RasterImage) -> u8 {
    let (w, h) = (img.width(), img.height());
    let mut hist = [0usize; 256];
    for x in 0..w {
        hist[img.get(x, 0) as usize] += 1;
        hist[img.get(x, h - 1) as usize] += 1;
    }
    for y in 0..h {
        hist[img.get(0, y) as usize] += 1;
        hist[img.get(w - 1, y) as usize] += 1;
    }
    (0..256).max_by_key(|&v| (hist[v], v)).unwrap() as u8
}

/// Output pixel `(x, y)` copies input pixel `f(x, y, w, h)`.
fn remap_exact(img: &RasterImage, f: impl Fn(usize, usize, usize, usize) -> (usize, usize)) -> RasterImage {
    let (w, h) = (img.width(), img.height());
    let mut out = RasterImage::new(w, h, 0);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = f(x, y, w, h);
            out.set(x, y, img.get(sx, sy));
        }
    }
    out
}

fn rotate(img: &RasterImage, degrees: f64) -> RasterImage {
    let (w, h) = (img.width(), img.height());
    let quarter = degrees / 90.0;
    if w == h && (quarter - quarter.round()).abs() < 1e-9 {
        return match quarter.round().rem_euclid(4.0) as u8 {
            0 => img.clone(),
            1 => remap_exact(img, |x, y, w, _| (w - 1 - y, x)),
            2 => remap_exact(img, |x, y, w, h| (w - 1 - x, h - 1 - y)),
            _ => remap_exact(img, |x, y, _, h| (y, h - 1 - x)),
        };
    }
    let (s, c) = degrees.to_radians().sin_cos();
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    // inverse of a counterclockwise rotation on a y-down page
    sample(img, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        (cx + c * dx - s * dy, cy + s * dx + c * dy)
    })
}

fn perspective(img: &RasterImage, ax: f64, ay: f64) -> RasterImage {
    let (w, h) = (img.width() as f64, img.height() as f64);
    let f = w.max(h);
    let (cx, cy) = ((w - 1.0) / 2.0, (h - 1.0) / 2.0);
    let (sx, cxr) = ax.sin_cos();
    let (sy, cyr) = ay.sin_cos();
    let rx = [[1.0, 0.0, 0.0], [0.0, cxr, -sx], [0.0, sx, cxr]];
    let ry = [[cyr, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cyr]];
    let r = mat_mul(&ry, &rx);
    // page point -> centred plane point -> rotated about the plane centre
    let a = [[1.0, 0.0, -cx], [0.0, 1.0, -cy], [0.0, 0.0, 0.0]];
    let mut m = mat_mul(&r, &a);
    m[2][2] += f;
    let k = [[f, 0.0, cx], [0.0, f, cy], [0.0, 0.0, 1.0]];
    let fwd = mat_mul(&k, &m);
    let inv = mat_inv(&fwd);
    sample(img, |x, y| {
        let v = [
            inv[0][0] * x + inv[0][1] * y + inv[0][2],
            inv[1][0] * x + inv[1][1] * y + inv[1][2],
            inv[2][0] * x + inv[2][1] * y + inv[2][2],
        ];
        (v[0] / v[2], v[1] / v[2])
    })
}

/// Bilinear resampling through an output-to-input map.
fn sample(img: &RasterImage, map: impl Fn(f64, f64) -> (f64, f64)) -> RasterImage {
    let (w, h) = (img.width(), img.height());
    let bg = background(img);
    let binary = img.is_binary();
    let mut out = RasterImage::new(w, h, bg);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = map(x as f64, y as f64);
            if !(u.is_finite() && v.is_finite()) || u < -1.0 || v < -1.0 || u > w as f64 || v > h as f64 {
                continue;
            }
            let (x0, y0) = (u.floor(), v.floor());
            let (fx, fy) = (u - x0, v - y0);
            let at = |dx: i64, dy: i64| img.get_or(x0 as i64 + dx, y0 as i64 + dy, bg) as f64;
            let val = at(0, 0) * (1.0 - fx) * (1.0 - fy)
                + at(1, 0) * fx * (1.0 - fy)
                + at(0, 1) * (1.0 - fx) * fy
                + at(1, 1) * fx * fy;
            let px = if binary { u8::from(val >= 0.5) } else { val.round().clamp(0.0, 255.0) as u8 };
            out.set(x, y, px);
        }
    }
    out
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

#[allow(clippy::needless_range_loop)]
fn mat_inv(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((j + 1) % 3, (j + 2) % 3);
            let (c, d) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) / det;
        }
    }
    r
}
