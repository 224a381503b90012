use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::stats::{entropy, Histogram};
use crate::error::{Error, Result};
use crate::frame::RgbImage;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [
        Direction::Horizontal,
        Direction::Vertical,
        Direction::Diagonal,
    ];

    /// Offset from a pixel to its neighbour.
    pub fn step(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (1, 0),
            Direction::Vertical => (0, 1),
            Direction::Diagonal => (1, 1),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Direction::Horizontal => "h",
            Direction::Vertical => "v",
            Direction::Diagonal => "d",
        }
    }

    /// Width and height of the grid of positions that have a neighbour.
    fn grid(self, image: &RgbImage) -> (usize, usize) {
        let (dx, dy) = self.step();
        (
            image.width().saturating_sub(dx),
            image.height().saturating_sub(dy),
        )
    }
}

/// A sampled pixel and its neighbour in the sampling direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AdjacentPair {
    pub x: usize,
    pub y: usize,
    pub first: [u8; 3],
    pub second: [u8; 3],
}

impl AdjacentPair {
    pub fn channel(&self, c: usize) -> (u8, u8) {
        (self.first[c], self.second[c])
    }
}

/// Positions that have a neighbour in `direction`.
pub fn available_positions(image: &RgbImage, direction: Direction) -> usize {
    let (w, h) = direction.grid(image);
    w * h
}

/// Draws `count` distinct positions uniformly from those with a neighbour in
/// `direction`. The draw depends only on the image size, `count` and `seed`.
pub fn sample_adjacent_pairs(
    image: &RgbImage,
    direction: Direction,
    count: usize,
    seed: u64,
) -> Result<Vec<AdjacentPair>> {
    let available = available_positions(image, direction);
    if count > available {
        return Err(Error::Analysis(format!(
            "requested {count} adjacent pairs but only {available} positions exist"
        )));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    let (grid_w, _) = direction.grid(image);
    let (dx, dy) = direction.step();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(index::sample(&mut rng, available, count)
        .into_iter()
        .map(|k| {
            let (x, y) = (k % grid_w, k / grid_w);
            AdjacentPair {
                x,
                y,
                first: image.pixel(x, y),
                second: image.pixel(x + dx, y + dy),
            }
        })
        .collect())
}

/// Mean entropy of `blocks` randomly placed, non-overlapping square blocks
/// of `block_pixels` pixels each, per channel. `block_pixels` must be a
/// perfect square.
pub fn local_entropy(
    image: &RgbImage,
    blocks: usize,
    block_pixels: usize,
    seed: u64,
) -> Result<[f64; 3]> {
    let side = (block_pixels as f64).sqrt().round() as usize;
    if blocks == 0 || side == 0 || side * side != block_pixels {
        return Err(Error::Analysis(format!(
            "need a positive block count and a square block size, got {blocks} x {block_pixels}"
        )));
    }
    let capacity = (image.width() / side) * (image.height() / side);
    if capacity < blocks {
        return Err(Error::Analysis(format!(
            "a {}x{} image holds at most {capacity} disjoint {side}x{side} blocks, {blocks} requested",
            image.width(),
            image.height()
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placed: Vec<(usize, usize)> = Vec::with_capacity(blocks);
    let max_attempts = 10_000 * blocks;
    let mut attempts = 0;
    while placed.len() < blocks {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Analysis(format!(
                "could not place {blocks} disjoint blocks after {max_attempts} attempts"
            )));
        }
        let x = rng.gen_range(0..=image.width() - side);
        let y = rng.gen_range(0..=image.height() - side);
        let overlaps = placed
            .iter()
            .any(|&(px, py)| x < px + side && px < x + side && y < py + side && py < y + side);
        if !overlaps {
            placed.push((x, y));
        }
    }

    let mut sums = [0.0f64; 3];
    for &(bx, by) in &placed {
        for (c, sum) in sums.iter_mut().enumerate() {
            let values = (by..by + side)
                .flat_map(|y| (bx..bx + side).map(move |x| (x, y)))
                .map(|(x, y)| image.pixel(x, y)[c]);
            *sum += entropy(&Histogram::from_values(values));
        }
    }
    Ok(sums.map(|s| s / blocks as f64))
}

/// Block count and block size used for local entropy by default.
pub const LOCAL_ENTROPY_BLOCKS: usize = 30;
pub const LOCAL_ENTROPY_BLOCK_PIXELS: usize = 1936;
