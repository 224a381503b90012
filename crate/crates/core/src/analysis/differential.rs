use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::RgbImage;

/// NPCR and UACI (both in percent) per channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DifferentialMetrics {
    pub npcr: [f64; 3],
    pub uaci: [f64; 3],
}

impl DifferentialMetrics {
    pub fn mean_npcr(&self) -> f64 {
        self.npcr.iter().sum::<f64>() / 3.0
    }

    pub fn mean_uaci(&self) -> f64 {
        self.uaci.iter().sum::<f64>() / 3.0
    }
}

fn check_dims(a: &RgbImage, b: &RgbImage) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::Analysis(format!(
            "cannot compare {}x{} with {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

pub fn differential(c1: &RgbImage, c2: &RgbImage) -> Result<DifferentialMetrics> {
    check_dims(c1, c2)?;
    let mut changed = [0u64; 3];
    let mut distance = [0u64; 3];
    for (i, (&a, &b)) in c1.data().iter().zip(c2.data()).enumerate() {
        let c = i % 3;
        changed[c] += (a != b) as u64;
        distance[c] += a.abs_diff(b) as u64;
    }
    let n = c1.pixel_count() as f64;
    Ok(DifferentialMetrics {
        npcr: changed.map(|d| 100.0 * d as f64 / n),
        uaci: distance.map(|d| 100.0 * d as f64 / (n * 255.0)),
    })
}

pub fn npcr(c1: &RgbImage, c2: &RgbImage) -> Result<[f64; 3]> {
    Ok(differential(c1, c2)?.npcr)
}

pub fn uaci(c1: &RgbImage, c2: &RgbImage) -> Result<[f64; 3]> {
    Ok(differential(c1, c2)?.uaci)
}

/// Fraction of pixel positions (0..=1) where any channel differs.
pub fn pixel_difference_ratio(a: &RgbImage, b: &RgbImage) -> Result<f64> {
    check_dims(a, b)?;
    let differing = a
        .data()
        .chunks_exact(3)
        .zip(b.data().chunks_exact(3))
        .filter(|(p, q)| p != q)
        .count();
    Ok(differing as f64 / a.pixel_count() as f64)
}

/// Copy of `image` with one pixel, chosen by `seed`, changed by flipping
/// the lowest bit of all three channels. Returns the copy and the position.
pub fn change_one_pixel(image: &RgbImage, seed: u64) -> (RgbImage, (usize, usize)) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = rng.gen_range(0..image.width());
    let y = rng.gen_range(0..image.height());
    let mut out = image.clone();
    out.set_pixel(x, y, image.pixel(x, y).map(|v| v ^ 1));
    (out, (x, y))
}
