//! RGB24 rasters and the square, padded frames the cipher operates on.

use crate::error::{Error, Result};

/// Interleaved 8-bit RGB raster, row-major, no row padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height * 3],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        let expected = width
            .checked_mul(height)
            .and_then(|p| p.checked_mul(3))
            .ok_or_else(|| Error::Geometry(format!("{width}x{height} overflows")))?;
        if data.len() != expected {
            return Err(Error::Geometry(format!(
                "{width}x{height} RGB needs {expected} bytes, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    /// Values of one channel (0 = R, 1 = G, 2 = B) in raster order.
    pub fn channel(&self, c: usize) -> impl Iterator<Item = u8> + '_ {
        self.data.iter().skip(c).step_by(3).copied()
    }
}

/// Smallest side that covers `width x height` and is a multiple of `workers`.
pub fn padded_side(width: usize, height: usize, workers: usize) -> usize {
    let longest = width.max(height).max(1);
    longest.div_ceil(workers) * workers
}

/// A square `side x side` RGB frame plus the dimensions it had before padding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    image: RgbImage,
    orig_width: usize,
    orig_height: usize,
}

impl Frame {
    /// Pads `image` right and bottom with zero bytes so the side is a
    /// multiple of `workers`.
    pub fn from_image(image: &RgbImage, workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        if image.width == 0 || image.height == 0 {
            return Err(Error::Geometry("empty image".into()));
        }
        let side = padded_side(image.width, image.height, workers);
        let mut square = RgbImage::new(side, side);
        let row = image.width * 3;
        for y in 0..image.height {
            square.data[y * side * 3..y * side * 3 + row]
                .copy_from_slice(&image.data[y * row..(y + 1) * row]);
        }
        Ok(Self {
            image: square,
            orig_width: image.width,
            orig_height: image.height,
        })
    }

    /// A square image taken as-is.
    pub fn from_square(image: RgbImage) -> Result<Self> {
        let (w, h) = (image.width, image.height);
        Self::with_original(image, w, h)
    }

    pub fn with_original(image: RgbImage, orig_width: usize, orig_height: usize) -> Result<Self> {
        if image.width != image.height || image.width == 0 {
            return Err(Error::Geometry(format!(
                "frames must be square and non-empty, got {}x{}",
                image.width, image.height
            )));
        }
        if orig_width == 0
            || orig_height == 0
            || orig_width > image.width
            || orig_height > image.height
        {
            return Err(Error::Geometry(format!(
                "original size {orig_width}x{orig_height} does not fit side {}",
                image.width
            )));
        }
        Ok(Self {
            image,
            orig_width,
            orig_height,
        })
    }

    pub fn side(&self) -> usize {
        self.image.width
    }

    pub fn orig_width(&self) -> usize {
        self.orig_width
    }

    pub fn orig_height(&self) -> usize {
        self.orig_height
    }

    pub fn image(&self) -> &RgbImage {
        &self.image
    }

    pub fn image_mut(&mut self) -> &mut RgbImage {
        &mut self.image
    }

    pub fn pixels(&self) -> &[u8] {
        &self.image.data
    }

    pub fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.image.data
    }

    pub fn into_image(self) -> RgbImage {
        self.image
    }

    /// The frame with padding removed.
    pub fn cropped(&self) -> RgbImage {
        let side = self.side();
        if self.orig_width == side && self.orig_height == side {
            return self.image.clone();
        }
        let row = self.orig_width * 3;
        let mut data = Vec::with_capacity(row * self.orig_height);
        for y in 0..self.orig_height {
            data.extend_from_slice(&self.image.data[y * side * 3..y * side * 3 + row]);
        }
        RgbImage {
            width: self.orig_width,
            height: self.orig_height,
            data,
        }
    }
}
