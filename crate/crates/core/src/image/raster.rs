use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("image has no foreground")]
    Blank,
    #[error("image dimensions must be positive")]
    Empty,
    #[error("cannot read or write image: {0}")]
    Codec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 8-bit grayscale raster, row-major, `(0, 0)` at the top left. Binary
/// images hold only 0 and 1.
#[derive(Clone, PartialEq, Eq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl std::fmt::Debug for RasterImage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "RasterImage({}x{})", self.width, self.height)
    }
}

impl RasterImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        Self { width, height, pixels: vec![fill; width * height] }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || pixels.len() != width * height {
            return Err(ImageError::Empty);
        }
        Ok(Self { width, height, pixels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    /// Out-of-range coordinates read as `outside`.
    pub fn get_or(&self, x: i64, y: i64, outside: u8) -> u8 {
        if x < 0 || y < 0 || x >= self.width as i64 || y >= self.height as i64 {
            outside
        } else {
            self.get(x as usize, y as usize)
        }
    }

    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.pixels[y * self.width + x] = v;
    }

    pub fn is_binary(&self) -> bool {
        self.pixels.iter().all(|&p| p <= 1)
    }

    /// Binary images are scaled to 0/255 for viewing.
    pub fn to_png(&self, path: &Path) -> Result<(), ImageError> {
        let data: Vec<u8> =
            if self.is_binary() { self.pixels.iter().map(|&p| p * 255).collect() } else { self.pixels.clone() };
        image::save_buffer(path, &data, self.width as u32, self.height as u32, image::ExtendedColorType::L8)
            .map_err(|e| ImageError::Codec(e.to_string()))
    }

    /// Reads any PNG; colour is reduced to luminance.
    pub fn from_png(path: &Path) -> Result<Self, ImageError> {
        let img = image::open(path).map_err(|e| ImageError::Codec(e.to_string()))?;
        let gray = img.to_luma8();
        let (w, h) = gray.dimensions();
        Self::from_pixels(w as usize, h as usize, gray.into_raw())
    }

    pub fn png_bytes(&self) -> Result<Vec<u8>, ImageError> {
        let mut out = Vec::new();
        let data: Vec<u8> =
            if self.is_binary() { self.pixels.iter().map(|&p| p * 255).collect() } else { self.pixels.clone() };
        image::write_buffer_with_format(
            &mut std::io::Cursor::new(&mut out),
            &data,
            self.width as u32,
            self.height as u32,
            image::ExtendedColorType::L8,
            image::ImageFormat::Png,
        )
        .map_err(|e| ImageError::Codec(e.to_string()))?;
        Ok(out)
    }
}
