//! Chaotic maps and the byte generators built on top of them.
//!
//! Two map families are supported: the piecewise linear chaotic map (PLCM)
//! and the two-dimensional logistic-adjusted-sine map (2D-LASM). A [`Prbg`]
//! iterates two independent instances ("lanes") of one family, pulls six
//! bytes out of the mantissa of every iterate and XORs the two lanes'
//! streams together.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Bytes pulled out of a single iterate.
pub const MANTISSA_BYTES: usize = 6;

/// Iterations discarded after a lane is seeded and before any byte is emitted.
pub const WARMUP_ITERATIONS: usize = 256;

const LOW_48_BITS: u64 = (1 << 48) - 1;

/// Nudge applied when a PLCM state lands exactly on a branch boundary.
const PLCM_NUDGE: f64 = f64::EPSILON;

/// Largest number of bytes a single lane step can produce (2D-LASM: x then y).
const MAX_BLOCK: usize = 2 * MANTISSA_BYTES;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    Plcm,
    Lasm,
}

impl MapKind {
    /// Tag byte used in keys and container headers.
    pub fn tag(self) -> u8 {
        match self {
            MapKind::Plcm => 0x01,
            MapKind::Lasm => 0x02,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0x01 => Ok(MapKind::Plcm),
            0x02 => Ok(MapKind::Lasm),
            other => Err(Error::UnknownMapTag(other)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MapKind::Plcm => "plcm",
            MapKind::Lasm => "lasm",
        }
    }

    /// Bytes a single lane emits per iteration.
    pub fn block_len(self) -> usize {
        match self {
            MapKind::Plcm => MANTISSA_BYTES,
            MapKind::Lasm => 2 * MANTISSA_BYTES,
        }
    }
}

impl fmt::Display for MapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "plcm" => Ok(MapKind::Plcm),
            "lasm" | "2dlasm" => Ok(MapKind::Lasm),
            other => Err(Error::InvalidConfig(format!("unknown map kind {other:?}"))),
        }
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

fn check_plcm_control(p: f64) -> Result<()> {
    if p > 0.0 && p < 0.5 {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "p",
            value: p,
            domain: "(0, 0.5)",
        })
    }
}

/// Whether `mu` lies in the 2D-LASM chaotic parameter set
/// `[0.37, 0.38] ∪ [0.40, 0.42] ∪ [0.44, 0.93] ∪ {1}`.
pub fn is_valid_lasm_mu(mu: f64) -> bool {
    (0.37..=0.38).contains(&mu)
        || (0.40..=0.42).contains(&mu)
        || (0.44..=0.93).contains(&mu)
        || mu == 1.0
}

fn check_lasm_mu(mu: f64) -> Result<()> {
    if is_valid_lasm_mu(mu) {
        Ok(())
    } else {
        Err(Error::Domain {
            name: "mu",
            value: mu,
            domain: "[0.37,0.38] ∪ [0.40,0.42] ∪ [0.44,0.93] ∪ {1}",
        })
    }
}

#[inline]
fn plcm_next(x: f64, p: f64) -> f64 {
    let x = if x > 0.5 { 1.0 - x } else { x };
    if x < p {
        x / p
    } else {
        (x - p) / (0.5 - p)
    }
}

#[inline]
fn lasm_next(x: f64, y: f64, mu: f64) -> (f64, f64) {
    let x1 = (PI * mu * (y + 3.0) * x * (1.0 - x)).sin();
    let y1 = (PI * mu * (x1 + 3.0) * y * (1.0 - y)).sin();
    (x1, y1)
}

/// One PLCM iteration with domain checks.
pub fn plcm_step(x: f64, p: f64) -> Result<f64> {
    check_unit("x", x)?;
    check_plcm_control(p)?;
    Ok(plcm_next(x, p))
}

/// One 2D-LASM iteration with domain checks. `y'` is computed from the
/// already-updated `x'`.
pub fn lasm_step(x: f64, y: f64, mu: f64) -> Result<(f64, f64)> {
    check_unit("x", x)?;
    check_unit("y", y)?;
    check_lasm_mu(mu)?;
    Ok(lasm_next(x, y, mu))
}

#[inline]
fn mantissa_bytes(v: f64) -> [u8; MANTISSA_BYTES] {
    let low = (v.to_bits() & LOW_48_BITS).to_le_bytes();
    let mut out = [0u8; MANTISSA_BYTES];
    out.copy_from_slice(&low[..MANTISSA_BYTES]);
    out
}

/// The low 48 bits of the binary64 mantissa field, least-significant byte first.
pub fn extract_bytes(v: f64) -> Result<[u8; MANTISSA_BYTES]> {
    if !v.is_finite() {
        return Err(Error::NonFinite(v));
    }
    Ok(mantissa_bytes(v))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlcmState {
    x: f64,
    p: f64,
}

impl PlcmState {
    pub fn new(x: f64, p: f64) -> Result<Self> {
        check_unit("x0", x)?;
        check_plcm_control(p)?;
        Ok(Self {
            x: Self::guard(x, p),
            p,
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    // Branch boundaries and the fixed point 0 are nudged off deterministically.
    #[inline]
    fn guard(x: f64, p: f64) -> f64 {
        if x == 0.0 || x == p || x == 0.5 || x == 1.0 {
            let nudged = x + PLCM_NUDGE;
            if nudged > 1.0 {
                nudged - 1.0
            } else {
                nudged
            }
        } else {
            x
        }
    }

    #[inline]
    pub fn step(&mut self) -> f64 {
        self.x = Self::guard(plcm_next(self.x, self.p), self.p);
        self.x
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LasmState {
    x: f64,
    y: f64,
    mu: f64,
}

impl LasmState {
    pub fn new(x: f64, y: f64, mu: f64) -> Result<Self> {
        check_unit("x0", x)?;
        check_unit("y0", y)?;
        check_lasm_mu(mu)?;
        Ok(Self { x, y, mu })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    #[inline]
    pub fn step(&mut self) -> (f64, f64) {
        let (x, y) = lasm_next(self.x, self.y, self.mu);
        self.x = x;
        self.y = y;
        (x, y)
    }
}

/// Initial conditions for one lane of a generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LaneParams {
    Plcm { x0: f64, p: f64 },
    Lasm { x0: f64, y0: f64, mu: f64 },
}

impl LaneParams {
    pub fn kind(&self) -> MapKind {
        match self {
            LaneParams::Plcm { .. } => MapKind::Plcm,
            LaneParams::Lasm { .. } => MapKind::Lasm,
        }
    }
}

/// A seeded, warmed-up map instance that emits mantissa bytes.
#[derive(Clone, Debug)]
pub enum ChaosLane {
    Plcm(PlcmState),
    Lasm(LasmState),
}

impl ChaosLane {
    /// Seeds the lane and runs the warm-up iterations.
    pub fn new(params: LaneParams) -> Result<Self> {
        let mut lane = match params {
            LaneParams::Plcm { x0, p } => ChaosLane::Plcm(PlcmState::new(x0, p)?),
            LaneParams::Lasm { x0, y0, mu } => ChaosLane::Lasm(LasmState::new(x0, y0, mu)?),
        };
        for _ in 0..WARMUP_ITERATIONS {
            lane.iterate();
        }
        Ok(lane)
    }

    pub fn kind(&self) -> MapKind {
        match self {
            ChaosLane::Plcm(_) => MapKind::Plcm,
            ChaosLane::Lasm(_) => MapKind::Lasm,
        }
    }

    #[inline]
    fn iterate(&mut self) {
        match self {
            ChaosLane::Plcm(s) => {
                s.step();
            }
            ChaosLane::Lasm(s) => {
                s.step();
            }
        }
    }

    /// Advances one iteration and writes its bytes to the front of `out`,
    /// returning how many were written (6 for PLCM, 12 for 2D-LASM).
    #[inline]
    pub fn next_block(&mut self, out: &mut [u8; MAX_BLOCK]) -> usize {
        match self {
            ChaosLane::Plcm(s) => {
                out[..MANTISSA_BYTES].copy_from_slice(&mantissa_bytes(s.step()));
                MANTISSA_BYTES
            }
            ChaosLane::Lasm(s) => {
                let (x, y) = s.step();
                out[..MANTISSA_BYTES].copy_from_slice(&mantissa_bytes(x));
                out[MANTISSA_BYTES..].copy_from_slice(&mantissa_bytes(y));
                MAX_BLOCK
            }
        }
    }
}

/// Pseudorandom byte generator: the position-wise XOR of two lanes' streams.
///
/// A generator built with [`Prbg::single`] has no second lane and emits the
/// first lane's stream unchanged.
#[derive(Clone, Debug)]
pub struct Prbg {
    lane_a: ChaosLane,
    lane_b: Option<ChaosLane>,
    pending: [u8; MAX_BLOCK],
    pending_pos: usize,
    pending_len: usize,
    emitted: u64,
}

impl Prbg {
    pub fn new(a: LaneParams, b: LaneParams) -> Result<Self> {
        if a.kind() != b.kind() {
            return Err(Error::InvalidConfig(
                "both generator lanes must use the same map".into(),
            ));
        }
        Ok(Self::from_lanes(
            ChaosLane::new(a)?,
            Some(ChaosLane::new(b)?),
        ))
    }

    pub fn single(a: LaneParams) -> Result<Self> {
        Ok(Self::from_lanes(ChaosLane::new(a)?, None))
    }

    fn from_lanes(lane_a: ChaosLane, lane_b: Option<ChaosLane>) -> Self {
        Self {
            lane_a,
            lane_b,
            pending: [0; MAX_BLOCK],
            pending_pos: 0,
            pending_len: 0,
            emitted: 0,
        }
    }

    pub fn kind(&self) -> MapKind {
        self.lane_a.kind()
    }

    /// Total bytes handed out since construction.
    pub fn bytes_emitted(&self) -> u64 {
        self.emitted
    }

    #[inline]
    fn next_block(&mut self, out: &mut [u8; MAX_BLOCK]) -> usize {
        let len = self.lane_a.next_block(out);
        if let Some(lane_b) = &mut self.lane_b {
            let mut other = [0u8; MAX_BLOCK];
            lane_b.next_block(&mut other);
            for (o, b) in out[..len].iter_mut().zip(&other[..len]) {
                *o ^= b;
            }
        }
        len
    }

    /// Fills `out` with the next `out.len()` bytes of the stream.
    pub fn fill_bytes(&mut self, out: &mut [u8]) {
        let mut filled = 0;

        let buffered = (self.pending_len - self.pending_pos).min(out.len());
        out[..buffered]
            .copy_from_slice(&self.pending[self.pending_pos..self.pending_pos + buffered]);
        self.pending_pos += buffered;
        filled += buffered;

        let block_len = self.kind().block_len();
        let mut block = [0u8; MAX_BLOCK];
        while out.len() - filled >= block_len {
            self.next_block(&mut block);
            out[filled..filled + block_len].copy_from_slice(&block[..block_len]);
            filled += block_len;
        }

        if filled < out.len() {
            let len = self.next_block(&mut block);
            self.pending = block;
            self.pending_len = len;
            let take = out.len() - filled;
            out[filled..].copy_from_slice(&block[..take]);
            self.pending_pos = take;
        }

        self.emitted += out.len() as u64;
    }

    /// Returns the next `count` bytes of the stream.
    pub fn fill(&mut self, count: usize) -> Vec<u8> {
        let mut out = vec![0u8; count];
        self.fill_bytes(&mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plcm(x0: f64, p: f64) -> LaneParams {
        LaneParams::Plcm { x0, p }
    }

    fn lasm(x0: f64, y0: f64, mu: f64) -> LaneParams {
        LaneParams::Lasm { x0, y0, mu }
    }

    #[test]
    fn plcm_branches() {
        assert!((plcm_step(0.1, 0.25).unwrap() - 0.4).abs() < 1e-15);
        assert!((plcm_step(0.3, 0.25).unwrap() - 0.2).abs() < 1e-15);
        assert!((plcm_step(0.9, 0.25).unwrap() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn plcm_rejects_out_of_domain() {
        assert!(plcm_step(-0.1, 0.25).is_err());
        assert!(plcm_step(1.1, 0.25).is_err());
        assert!(plcm_step(0.3, 0.0).is_err());
        assert!(plcm_step(0.3, 0.5).is_err());
        assert!(PlcmState::new(0.3, 0.5).is_err());
    }

    #[test]
    fn lasm_fixed_point_and_zeroed_x() {
        assert_eq!(lasm_step(0.0, 0.0, 0.9).unwrap(), (0.0, 0.0));
        let (x, y) = lasm_step(1.0, 0.5, 0.9).unwrap();
        assert_eq!(x, 0.0);
        assert_eq!(y, (PI * 0.9 * 3.0 * 0.5 * 0.5).sin());
    }

    #[test]
    fn lasm_mu_set() {
        for ok in [0.37, 0.375, 0.38, 0.40, 0.42, 0.44, 0.9, 0.93, 1.0] {
            assert!(is_valid_lasm_mu(ok), "{ok}");
        }
        for bad in [0.36, 0.39, 0.43, 0.935, 0.99, 1.01] {
            assert!(!is_valid_lasm_mu(bad), "{bad}");
            assert!(lasm_step(0.5, 0.5, bad).is_err());
        }
    }

    #[test]
    fn mantissa_extraction() {
        assert_eq!(extract_bytes(1.0).unwrap(), [0; 6]);
        assert_eq!(extract_bytes(1.5).unwrap(), [0; 6]);
        assert!(extract_bytes(f64::NAN).is_err());
        assert!(extract_bytes(f64::INFINITY).is_err());
    }

    #[test]
    fn plcm_guard_leaves_boundaries() {
        let p = 0.25;
        for start in [0.0, 0.25, 0.5, 1.0] {
            let s = PlcmState::new(start, p).unwrap();
            assert!(s.x() != 0.0 && s.x() != p && s.x() != 0.5 && s.x() != 1.0);
            assert!((0.0..=1.0).contains(&s.x()));
        }
        // 1 + 2^-52 wraps back into the unit interval.
        assert_eq!(PlcmState::new(1.0, p).unwrap().x(), f64::EPSILON);
    }

    #[test]
    fn empty_fill() {
        let mut g = Prbg::new(plcm(0.1, 0.2), plcm(0.3, 0.4)).unwrap();
        assert!(g.fill(0).is_empty());
        assert_eq!(g.bytes_emitted(), 0);
    }

    #[test]
    fn identical_lanes_cancel() {
        let mut g = Prbg::new(plcm(0.123, 0.321), plcm(0.123, 0.321)).unwrap();
        assert!(g.fill(1000).iter().all(|&b| b == 0));
        let mut g = Prbg::new(lasm(0.4, 0.6, 0.9), lasm(0.4, 0.6, 0.9)).unwrap();
        assert!(g.fill(1000).iter().all(|&b| b == 0));
    }

    #[test]
    fn mixed_lane_kinds_rejected() {
        assert!(Prbg::new(plcm(0.1, 0.2), lasm(0.1, 0.2, 0.9)).is_err());
    }

    #[test]
    fn chunked_equals_one_shot_across_block_edges() {
        for (a, b) in [
            (plcm(0.11, 0.21), plcm(0.31, 0.41)),
            (lasm(0.11, 0.21, 0.8), lasm(0.31, 0.41, 0.9)),
        ] {
            let one = Prbg::new(a, b).unwrap().fill(97);
            let mut g = Prbg::new(a, b).unwrap();
            let mut chunked = Vec::new();
            for n in [1, 5, 6, 7, 11, 12, 13, 0, 42] {
                chunked.extend(g.fill(n));
            }
            assert_eq!(one, chunked);
            assert_eq!(g.bytes_emitted(), 97);
        }
    }
}
