//! Chained byte diffusion over a worker's rows.
//!
//! Each byte is masked with a fresh stream byte and chained to the previous
//! cipher byte of the same subframe; the first byte of a subframe chains to
//! the diffusion seed instead, which is the last byte of the next subframe
//! as it stood before this diffusion phase.

/// `c = b ^ ((v + b) mod 256) ^ prev`
#[inline]
pub fn diffuse_byte(plain: u8, stream: u8, prev: u8) -> u8 {
    stream ^ plain.wrapping_add(stream) ^ prev
}

/// `v = ((b ^ c ^ prev) - b) mod 256`
#[inline]
pub fn inverse_diffuse_byte(cipher: u8, stream: u8, prev_cipher: u8) -> u8 {
    (stream ^ cipher ^ prev_cipher).wrapping_sub(stream)
}

/// Byte length of one worker's subframe (its `side / workers` rows).
pub fn subframe_len(side: usize, workers: usize) -> usize {
    side / workers * side * 3
}

/// Index of the byte worker `worker` uses as its diffusion seed: the final
/// byte of subframe `(worker + 1) mod workers`.
pub fn diffusion_seed_index(worker: usize, workers: usize, side: usize) -> usize {
    let neighbour = (worker + 1) % workers;
    (neighbour + 1) * subframe_len(side, workers) - 1
}

/// Diffuses `region` in place. `region` holds the worker's rows of the
/// pre-diffusion frame on entry and the cipher bytes on return.
pub fn diffuse_subframe(region: &mut [u8], stream: &[u8], seed: u8) {
    assert!(
        stream.len() >= region.len(),
        "diffusion stream underrun: {} bytes for {} pixel bytes",
        stream.len(),
        region.len()
    );
    let mut prev = seed;
    for (v, &b) in region.iter_mut().zip(stream) {
        prev = diffuse_byte(*v, b, prev);
        *v = prev;
    }
}

/// The first byte of a subframe, which can only be recovered once the
/// neighbouring subframe's last plain byte (the diffusion seed) is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[must_use]
pub struct PendingFirstByte {
    pub cipher: u8,
    pub stream: u8,
}

impl PendingFirstByte {
    pub fn resolve(self, seed: u8) -> u8 {
        inverse_diffuse_byte(self.cipher, self.stream, seed)
    }
}

/// Inverts [`diffuse_subframe`] in place for every byte but the first, which
/// is left as cipher text and described by the returned token.
pub fn inverse_diffuse_subframe(region: &mut [u8], stream: &[u8]) -> PendingFirstByte {
    assert!(!region.is_empty(), "empty subframe");
    assert!(
        stream.len() >= region.len(),
        "diffusion stream underrun: {} bytes for {} pixel bytes",
        stream.len(),
        region.len()
    );
    // Walk backwards so each predecessor is still cipher text when read.
    for k in (1..region.len()).rev() {
        region[k] = inverse_diffuse_byte(region[k], stream[k], region[k - 1]);
    }
    PendingFirstByte {
        cipher: region[0],
        stream: stream[0],
    }
}
