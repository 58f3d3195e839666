use super::raster::{ImageError, RasterImage};

/// Otsu threshold over the 256-bin histogram; returns the largest intensity
/// of the dark class.
pub fn otsu_threshold(img: &RasterImage) -> u8 {
    let mut hist = [0u64; 256];
    for &p in img.pixels() {
        hist[p as usize] += 1;
    }
    let total = img.pixels().len() as f64;
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &h)| i as f64 * h as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let (mut best, mut best_t) = (-1.0, 0u8);
    for (t, &h) in hist.iter().enumerate().take(255) {
        w0 += h as f64;
        sum0 += t as f64 * h as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let (m0, m1) = (sum0 / w0, (sum_all - sum0) / w1);
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if between > best {
            best = between;
            best_t = t as u8;
        }
    }
    best_t
}

/// Foreground (strand) pixels become 1. The dark class is taken as
/// foreground unless it covers more than half the image, in which case the
/// polarity is flipped.
pub fn binarize(img: &RasterImage) -> Result<RasterImage, ImageError> {
    let first = img.pixels()[0];
    if img.pixels().iter().all(|&p| p == first) {
        return Err(ImageError::Blank);
    }
    let t = otsu_threshold(img);
    let dark = img.pixels().iter().filter(|&&p| p <= t).count();
    let flip = dark * 2 > img.pixels().len();
    let pixels = img.pixels().iter().map(|&p| u8::from((p <= t) != flip)).collect();
    RasterImage::from_pixels(img.width(), img.height(), pixels)
}

/// Chamfer distance (1, √2) from each foreground pixel to the nearest
/// background pixel; pixels on the border of a stroke get 1.
pub fn distance_transform(bin: &RasterImage) -> Vec<f64> {
    let (w, h) = (bin.width(), bin.height());
    let inf = f64::MAX / 4.0;
    let mut d: Vec<f64> = bin.pixels().iter().map(|&p| if p == 0 { 0.0 } else { inf }).collect();
    let diag = std::f64::consts::SQRT_2;
    let at = |d: &Vec<f64>, x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w as i64 || y >= h as i64 {
            0.0
        } else {
            d[y as usize * w + x as usize]
        }
    };
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            let i = y as usize * w + x as usize;
            if d[i] == 0.0 {
                continue;
            }
            let v = (at(&d, x - 1, y) + 1.0)
                .min(at(&d, x, y - 1) + 1.0)
                .min(at(&d, x - 1, y - 1) + diag)
                .min(at(&d, x + 1, y - 1) + diag);
            d[i] = d[i].min(v);
        }
    }
    for y in (0..h as i64).rev() {
        for x in (0..w as i64).rev() {
            let i = y as usize * w + x as usize;
            if d[i] == 0.0 {
                continue;
            }
            let v = (at(&d, x + 1, y) + 1.0)
                .min(at(&d, x, y + 1) + 1.0)
                .min(at(&d, x + 1, y + 1) + diag)
                .min(at(&d, x - 1, y + 1) + diag);
            d[i] = d[i].min(v);
        }
    }
    d
}

/// Twice the mean distance-transform value over the foreground.
pub fn estimate_stroke(bin: &RasterImage) -> f64 {
    let d = distance_transform(bin);
    let fg: Vec<f64> = d.into_iter().filter(|&v| v > 0.0).collect();
    if fg.is_empty() {
        return 0.0;
    }
    2.0 * fg.iter().sum::<f64>() / fg.len() as f64
}

pub fn foreground_components(bin: &RasterImage) -> usize {
    let mask: Vec<bool> = bin.pixels().iter().map(|&p| p != 0).collect();
    super::skeleton::count_components(&mask, bin.width(), bin.height())
}
