//! Pixel permutation by a discretized Chirikov standard map.
//!
//! For a source pixel at row `a`, column `o` of a `w x w` frame:
//!
//! ```text
//! alpha = (a + o) mod w
//! beta  = (o + floor(s_c * sin(2*pi*alpha / w))) mod w
//! ```
//!
//! The offset depends on `alpha` alone, so the inverse is exact:
//! `o = (beta - offset(alpha)) mod w`, `a = (alpha - o) mod w`.

use std::f64::consts::PI;
use std::ops::Range;

use super::shared::SharedBuf;

/// Per-row offsets of the confusion map for one frame side and seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMap {
    side: usize,
    offsets: Vec<usize>,
}

impl ConfusionMap {
    pub fn new(side: usize, seed: u32) -> Self {
        assert!(side > 0, "confusion map needs a non-empty frame");
        let offsets = (0..side)
            .map(|alpha| {
                let angle = 2.0 * PI * alpha as f64 / side as f64;
                let d = (seed as f64 * angle.sin()).floor() as i64;
                d.rem_euclid(side as i64) as usize
            })
            .collect();
        Self { side, offsets }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Euclidean-reduced column offset applied on destination row `alpha`.
    #[inline]
    pub fn offset(&self, alpha: usize) -> usize {
        self.offsets[alpha]
    }

    /// Where the pixel at `(a, o)` moves to.
    #[inline]
    pub fn destination(&self, a: usize, o: usize) -> (usize, usize) {
        let w = self.side;
        let alpha = (a + o) % w;
        let beta = (o + self.offsets[alpha]) % w;
        (alpha, beta)
    }

    /// Which source pixel lands on `(alpha, beta)`.
    #[inline]
    pub fn source(&self, alpha: usize, beta: usize) -> (usize, usize) {
        let w = self.side;
        let o = (beta + w - self.offsets[alpha]) % w;
        let a = (alpha + w - o) % w;
        (a, o)
    }
}

/// Scatters every pixel of source rows `rows` of `snapshot` to its
/// destination in `out`.
///
/// # Safety
/// `snapshot` must not be written while this runs, `out` must have the same
/// length, and no other writer may target the destinations of `rows`.
pub(crate) unsafe fn confuse_rows(
    snapshot: &[u8],
    out: SharedBuf,
    map: &ConfusionMap,
    rows: Range<usize>,
) {
    let w = map.side;
    for a in rows {
        let row = &snapshot[a * w * 3..(a + 1) * w * 3];
        for (o, px) in row.chunks_exact(3).enumerate() {
            let (alpha, beta) = map.destination(a, o);
            out.write_pixel((alpha * w + beta) * 3, [px[0], px[1], px[2]]);
        }
    }
}

/// Inverse of [`confuse_rows`], partitioned by destination rows: every pixel
/// on rows `dest_rows` of `snapshot` goes back to its source in `out`.
///
/// # Safety
/// Same contract as [`confuse_rows`].
pub(crate) unsafe fn inverse_confuse_rows(
    snapshot: &[u8],
    out: SharedBuf,
    map: &ConfusionMap,
    dest_rows: Range<usize>,
) {
    let w = map.side;
    for alpha in dest_rows {
        let row = &snapshot[alpha * w * 3..(alpha + 1) * w * 3];
        for (beta, px) in row.chunks_exact(3).enumerate() {
            let (a, o) = map.source(alpha, beta);
            out.write_pixel((a * w + o) * 3, [px[0], px[1], px[2]]);
        }
    }
}

fn check_buffers(snapshot: &[u8], out: &[u8], map: &ConfusionMap, rows: &Range<usize>) {
    let len = map.side * map.side * 3;
    assert_eq!(snapshot.len(), len, "snapshot size does not match the map");
    assert_eq!(out.len(), len, "output size does not match the map");
    assert!(rows.end <= map.side, "row range outside the frame");
}

/// Applies the forward permutation to source rows `rows`.
pub fn confuse(snapshot: &[u8], out: &mut [u8], map: &ConfusionMap, rows: Range<usize>) {
    check_buffers(snapshot, out, map, &rows);
    // SAFETY: `out` is exclusively borrowed and distinct from `snapshot`.
    unsafe { confuse_rows(snapshot, SharedBuf::new(out), map, rows) }
}

/// Applies the inverse permutation to destination rows `dest_rows`.
pub fn inverse_confuse(
    snapshot: &[u8],
    out: &mut [u8],
    map: &ConfusionMap,
    dest_rows: Range<usize>,
) {
    check_buffers(snapshot, out, map, &dest_rows);
    // SAFETY: as in `confuse`.
    unsafe { inverse_confuse_rows(snapshot, SharedBuf::new(out), map, dest_rows) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_seed_is_a_shear() {
        let map = ConfusionMap::new(4, 0);
        assert_eq!(map.destination(1, 2), (3, 2));
        assert_eq!(map.source(3, 2), (1, 2));
    }

    #[test]
    fn alpha_zero_has_no_offset() {
        let map = ConfusionMap::new(4, 7);
        assert_eq!(map.destination(2, 2), (0, 2));
        assert_eq!(map.source(0, 2), (2, 2));
    }

    #[test]
    fn negative_sine_uses_euclidean_reduction() {
        // alpha = 3 on w = 4: sin(3*pi/2) = -1, so d = -5 and the offset is 3.
        let map = ConfusionMap::new(4, 5);
        assert_eq!(map.offset(3), 3);
        assert_eq!(map.offset(1), 1);
    }

    #[test]
    fn eight_by_eight_is_a_permutation() {
        let map = ConfusionMap::new(8, 5);
        let mut hits = [0u32; 64];
        for a in 0..8 {
            for o in 0..8 {
                let (alpha, beta) = map.destination(a, o);
                hits[alpha * 8 + beta] += 1;
            }
        }
        assert!(hits.iter().all(|&h| h == 1));
    }

    #[test]
    fn split_rows_match_whole_frame() {
        let w = 16;
        let map = ConfusionMap::new(w, 123_456);
        let src: Vec<u8> = (0..w * w * 3).map(|i| (i % 256) as u8).collect();
        let mut whole = vec![0u8; src.len()];
        confuse(&src, &mut whole, &map, 0..w);
        let mut split = vec![0u8; src.len()];
        confuse(&src, &mut split, &map, 0..5);
        confuse(&src, &mut split, &map, 5..w);
        assert_eq!(whole, split);

        let mut back = vec![0u8; src.len()];
        inverse_confuse(&whole, &mut back, &map, 0..7);
        inverse_confuse(&whole, &mut back, &map, 7..w);
        assert_eq!(back, src);
    }
}
