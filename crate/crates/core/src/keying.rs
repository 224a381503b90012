//! The user key, the coordinator generator it seeds, and everything the
//! coordinator derives from it: per-worker generator parameters and the
//! per-frame confusion seeds.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::chaos::{is_valid_lasm_mu, LaneParams, MapKind, Prbg};
use crate::error::{Error, Result};

/// Target intervals for derived parameters. Derived `mu` values stay in the
/// widest chaotic band of the 2D-LASM parameter set.
const UNIT: (f64, f64) = (0.0, 1.0);
const PLCM_CONTROL: (f64, f64) = (0.0, 0.5);
const LASM_MU: (f64, f64) = (0.44, 0.93);

/// Secret that seeds the coordinator generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Key {
    /// Two PLCM lanes.
    Plcm {
        x0_a: f64,
        p_a: f64,
        x0_b: f64,
        p_b: f64,
    },
    /// One 2D-LASM instance.
    Lasm { x0: f64, y0: f64, mu: f64 },
}

impl Key {
    pub fn plcm(x0_a: f64, p_a: f64, x0_b: f64, p_b: f64) -> Result<Self> {
        let key = Key::Plcm {
            x0_a,
            p_a,
            x0_b,
            p_b,
        };
        key.validate()?;
        Ok(key)
    }

    pub fn lasm(x0: f64, y0: f64, mu: f64) -> Result<Self> {
        let key = Key::Lasm { x0, y0, mu };
        key.validate()?;
        Ok(key)
    }

    /// Builds a key of the same kind from raw parameters in declaration order.
    pub fn from_params(kind: MapKind, params: &[f64]) -> Result<Self> {
        match (kind, params) {
            (MapKind::Plcm, &[x0_a, p_a, x0_b, p_b]) => Key::plcm(x0_a, p_a, x0_b, p_b),
            (MapKind::Lasm, &[x0, y0, mu]) => Key::lasm(x0, y0, mu),
            _ => Err(Error::MalformedKey(format!(
                "{kind} keys take {} parameters, got {}",
                param_count(kind),
                params.len()
            ))),
        }
    }

    /// Draws a fresh key whose parameters lie strictly inside their domains.
    pub fn random<R: Rng + ?Sized>(kind: MapKind, rng: &mut R) -> Self {
        let mut draw = |(lo, hi)| map_into(rng.gen::<f64>(), lo, hi);
        match kind {
            MapKind::Plcm => Key::Plcm {
                x0_a: draw(UNIT),
                p_a: draw(PLCM_CONTROL),
                x0_b: draw(UNIT),
                p_b: draw(PLCM_CONTROL),
            },
            MapKind::Lasm => Key::Lasm {
                x0: draw(UNIT),
                y0: draw(UNIT),
                mu: draw(LASM_MU),
            },
        }
    }

    pub fn kind(&self) -> MapKind {
        match self {
            Key::Plcm { .. } => MapKind::Plcm,
            Key::Lasm { .. } => MapKind::Lasm,
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            Key::Plcm {
                x0_a,
                p_a,
                x0_b,
                p_b,
            } => vec![x0_a, p_a, x0_b, p_b],
            Key::Lasm { x0, y0, mu } => vec![x0, y0, mu],
        }
    }

    /// Copy of this key with parameter `index` replaced.
    pub fn with_param(&self, index: usize, value: f64) -> Result<Self> {
        let mut params = self.params();
        let slot = params
            .get_mut(index)
            .ok_or_else(|| Error::MalformedKey(format!("parameter index {index} out of range")))?;
        *slot = value;
        Key::from_params(self.kind(), &params)
    }

    /// Number of secret bits carried by the payload (every binary64 counts fully).
    pub fn payload_bits(&self) -> u32 {
        64 * param_count(self.kind()) as u32
    }

    fn validate(&self) -> Result<()> {
        // Building the lanes runs the same checks the maps enforce.
        self.lanes().map(|_| ())
    }

    fn lanes(&self) -> Result<(LaneParams, Option<LaneParams>)> {
        let (a, b) = match *self {
            Key::Plcm {
                x0_a,
                p_a,
                x0_b,
                p_b,
            } => (
                LaneParams::Plcm { x0: x0_a, p: p_a },
                Some(LaneParams::Plcm { x0: x0_b, p: p_b }),
            ),
            Key::Lasm { x0, y0, mu } => (LaneParams::Lasm { x0, y0, mu }, None),
        };
        check_lane(&a)?;
        if let Some(b) = &b {
            check_lane(b)?;
        }
        Ok((a, b))
    }

    /// The coordinator generator seeded by this key, warm-up already applied.
    pub fn coordinator_prbg(&self) -> Result<Prbg> {
        match self.lanes()? {
            (a, Some(b)) => Prbg::new(a, b),
            (a, None) => Prbg::single(a),
        }
    }

    /// Canonical lowercase hex: one tag byte followed by the parameters as
    /// little-endian binary64.
    pub fn to_hex(&self) -> String {
        let mut bytes = vec![self.kind().tag()];
        for p in self.params() {
            bytes.extend_from_slice(&p.to_le_bytes());
        }
        hex::encode(bytes)
    }
}

fn check_lane(lane: &LaneParams) -> Result<()> {
    let unit = |name, v: f64| {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(Error::Domain {
                name,
                value: v,
                domain: "[0, 1]",
            })
        }
    };
    match *lane {
        LaneParams::Plcm { x0, p } => {
            unit("x0", x0)?;
            if !(p > 0.0 && p < 0.5) {
                return Err(Error::Domain {
                    name: "p",
                    value: p,
                    domain: "(0, 0.5)",
                });
            }
        }
        LaneParams::Lasm { x0, y0, mu } => {
            unit("x0", x0)?;
            unit("y0", y0)?;
            if !is_valid_lasm_mu(mu) {
                return Err(Error::Domain {
                    name: "mu",
                    value: mu,
                    domain: "[0.37,0.38] ∪ [0.40,0.42] ∪ [0.44,0.93] ∪ {1}",
                });
            }
        }
    }
    Ok(())
}

fn param_count(kind: MapKind) -> usize {
    match kind {
        MapKind::Plcm => 4,
        MapKind::Lasm => 3,
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl FromStr for Key {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_key(s)
    }
}

/// Parses the canonical hex encoding produced by [`Key::to_hex`].
pub fn parse_key(text: &str) -> Result<Key> {
    let bytes = hex::decode(text.trim()).map_err(|e| Error::MalformedKey(e.to_string()))?;
    let (&tag, payload) = bytes
        .split_first()
        .ok_or_else(|| Error::MalformedKey("empty key".into()))?;
    let kind = MapKind::from_tag(tag)?;
    let expected = 8 * param_count(kind);
    if payload.len() != expected {
        return Err(Error::MalformedKey(format!(
            "{kind} key payload must be {expected} bytes, got {}",
            payload.len()
        )));
    }
    let params: Vec<f64> = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8")))
        .collect();
    Key::from_params(kind, &params)
}

/// Affine map of `u ∈ [0,1]` onto `(lo, hi)`, pulled one representable step
/// inside either end.
fn map_into(u: f64, lo: f64, hi: f64) -> f64 {
    let v = lo + u * (hi - lo);
    if v <= lo {
        lo.next_up()
    } else if v >= hi {
        hi.next_down()
    } else {
        v
    }
}

/// Generator parameters for every worker, two lanes each.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerParams {
    kind: MapKind,
    lanes: Vec<[LaneParams; 2]>,
}

impl WorkerParams {
    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.lanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lanes.is_empty()
    }

    pub fn lanes(&self) -> &[[LaneParams; 2]] {
        &self.lanes
    }

    /// Fresh generators, one per worker.
    pub fn prbgs(&self) -> Result<Vec<Prbg>> {
        self.lanes.iter().map(|[a, b]| Prbg::new(*a, *b)).collect()
    }
}

/// The coordinator: owns the key-seeded generator and hands out worker
/// parameters once and one confusion seed per frame.
#[derive(Clone, Debug)]
pub struct Coordinator {
    prbg: Prbg,
    seeds_drawn: u64,
}

impl Coordinator {
    pub fn new(key: &Key) -> Result<Self> {
        Ok(Self {
            prbg: key.coordinator_prbg()?,
            seeds_drawn: 0,
        })
    }

    /// A raw draw in `[0, 1)` built from the top 53 bits of eight stream bytes.
    fn next_unit(&mut self) -> f64 {
        let mut buf = [0u8; 8];
        self.prbg.fill_bytes(&mut buf);
        (u64::from_le_bytes(buf) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Derives parameters for `workers` generators. Draw order is worker 0
    /// lane a, worker 0 lane b, worker 1 lane a, ...; within a lane the
    /// parameters are drawn in declaration order.
    pub fn derive_worker_params(&mut self, workers: usize) -> Result<WorkerParams> {
        if workers == 0 {
            return Err(Error::InvalidConfig(
                "worker count must be at least 1".into(),
            ));
        }
        let kind = self.prbg.kind();
        let lane = |c: &mut Self| match kind {
            MapKind::Plcm => LaneParams::Plcm {
                x0: map_into(c.next_unit(), UNIT.0, UNIT.1),
                p: map_into(c.next_unit(), PLCM_CONTROL.0, PLCM_CONTROL.1),
            },
            MapKind::Lasm => LaneParams::Lasm {
                x0: map_into(c.next_unit(), UNIT.0, UNIT.1),
                y0: map_into(c.next_unit(), UNIT.0, UNIT.1),
                mu: map_into(c.next_unit(), LASM_MU.0, LASM_MU.1),
            },
        };
        let lanes = (0..workers)
            .map(|_| {
                let a = lane(self);
                let b = lane(self);
                [a, b]
            })
            .collect();
        Ok(WorkerParams { kind, lanes })
    }

    /// Confusion seed for the next frame.
    pub fn next_confusion_seed(&mut self) -> u32 {
        let mut buf = [0u8; 4];
        self.prbg.fill_bytes(&mut buf);
        self.seeds_drawn += 1;
        seed_from_bytes(buf)
    }

    pub fn seeds_drawn(&self) -> u64 {
        self.seeds_drawn
    }
}

/// Maps four little-endian bytes onto `[1, 2^32 - 1]`.
pub fn seed_from_bytes(bytes: [u8; 4]) -> u32 {
    (u32::from_le_bytes(bytes) % u32::MAX) + 1
}

/// Convenience wrapper: derive worker parameters from a fresh coordinator.
pub fn derive_worker_params(key: &Key, workers: usize) -> Result<WorkerParams> {
    Coordinator::new(key)?.derive_worker_params(workers)
}
