use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::RgbImage;

/// Replaces exactly `round(rate * w * h)` distinct pixels with black or
/// white (each with probability one half) on all channels.
pub fn add_salt_pepper(image: &RgbImage, rate: f64, seed: u64) -> Result<RgbImage> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain {
            name: "rate",
            value: rate,
            domain: "[0, 1]",
        });
    }
    let total = image.pixel_count();
    let count = (rate * total as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = image.clone();
    for k in index::sample(&mut rng, total, count) {
        let v = if rng.gen::<bool>() { 0xFF } else { 0x00 };
        out.set_pixel(k % image.width(), k / image.width(), [v; 3]);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fill {
    Black,
    White,
}

impl Fill {
    pub fn value(self) -> u8 {
        match self {
            Fill::Black => 0x00,
            Fill::White => 0xFF,
        }
    }
}

/// Square region anchored at its top-left corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub x: usize,
    pub y: usize,
    pub side: usize,
    pub fill: Fill,
}

/// Overwrites every listed block. All blocks are checked before any is drawn.
pub fn crop_blocks(image: &RgbImage, blocks: &[Block]) -> Result<RgbImage> {
    for b in blocks {
        if b.x + b.side > image.width() || b.y + b.side > image.height() {
            return Err(Error::Geometry(format!(
                "block {}x{} at ({}, {}) exceeds {}x{} image",
                b.side,
                b.side,
                b.x,
                b.y,
                image.width(),
                image.height()
            )));
        }
    }
    let mut out = image.clone();
    let stride = image.width() * 3;
    for b in blocks {
        for y in b.y..b.y + b.side {
            let start = y * stride + b.x * 3;
            out.data_mut()[start..start + b.side * 3].fill(b.fill.value());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn noise(w: usize, h: usize) -> RgbImage {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data = (0..w * h * 3).map(|_| rng.gen_range(1..255)).collect();
        RgbImage::from_raw(w, h, data).unwrap()
    }

    #[test]
    fn zero_rate_is_identity() {
        let img = noise(8, 8);
        assert_eq!(add_salt_pepper(&img, 0.0, 1).unwrap(), img);
    }

    #[test]
    fn full_rate_saturates() {
        let out = add_salt_pepper(&noise(8, 8), 1.0, 1).unwrap();
        assert!(out.data().iter().all(|&v| v == 0 || v == 255));
    }

    #[test]
    fn exact_count() {
        let img = noise(64, 64);
        let out = add_salt_pepper(&img, 0.05, 9).unwrap();
        let hit = img
            .data()
            .chunks_exact(3)
            .zip(out.data().chunks_exact(3))
            .filter(|(a, b)| a != b)
            .count();
        assert_eq!(hit, (0.05f64 * 4096.0).round() as usize);
    }

    #[test]
    fn bad_rate() {
        assert!(add_salt_pepper(&noise(2, 2), 1.5, 0).is_err());
        assert!(add_salt_pepper(&noise(2, 2), f64::NAN, 0).is_err());
    }

    #[test]
    fn blocks() {
        let img = noise(8, 8);
        assert_eq!(crop_blocks(&img, &[]).unwrap(), img);
        let full = crop_blocks(
            &img,
            &[Block {
                x: 0,
                y: 0,
                side: 8,
                fill: Fill::White,
            }],
        )
        .unwrap();
        assert!(full.data().iter().all(|&v| v == 255));
        let part = crop_blocks(
            &img,
            &[Block {
                x: 6,
                y: 6,
                side: 2,
                fill: Fill::Black,
            }],
        )
        .unwrap();
        assert_eq!(part.pixel(7, 7), [0; 3]);
        assert_eq!(part.pixel(5, 7), img.pixel(5, 7));
        assert!(crop_blocks(
            &img,
            &[Block {
                x: 7,
                y: 0,
                side: 2,
                fill: Fill::Black
            }]
        )
        .is_err());
    }
}
