//! Benchmark harness: generator throughput, per-phase cost, per-frame video
//! latency against a frame-rate deadline, and round sweeps of the
//! differential and scrambling metrics.
//!
//! Every timing window covers in-memory work only; frames are built before
//! the clock starts.

use std::io::Write;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::{change_one_pixel, differential, image_correlation, Correlation};
use crate::chaos::{MapKind, Prbg};
use crate::cipher::{FrameCipher, FrameTiming, Phases};
use crate::error::{Error, Result};
use crate::frame::{Frame, RgbImage};
use crate::keying::{derive_worker_params, Key};

/// Distinct synthetic frames generated per frame size; longer runs cycle
/// through them.
pub const SYNTHETIC_POOL: usize = 8;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub map: MapKind,
    pub sides: Vec<usize>,
    pub workers: Vec<usize>,
    pub rounds: Vec<usize>,
    pub frames: usize,
    pub fps: u16,
    pub repetitions: usize,
    pub seed: u64,
}

impl BenchConfig {
    /// Frame sizes, frame count and rate of the per-size latency table.
    pub fn table2(map: MapKind, workers: usize) -> Self {
        Self {
            map,
            sides: (1..=8).map(|k| 96 * k).collect(),
            workers: vec![workers],
            rounds: vec![5],
            frames: 300,
            fps: 24,
            repetitions: 1,
            seed: 0,
        }
    }

    /// The 20 FPS, 600-frame setting described alongside the table.
    pub fn prose(map: MapKind, workers: usize) -> Self {
        Self {
            sides: vec![576, 672, 960],
            frames: 600,
            fps: 20,
            ..Self::table2(map, workers)
        }
    }

    /// Per-frame deadline in milliseconds.
    pub fn deadline_ms(&self) -> f64 {
        1000.0 / self.fps as f64
    }

    pub fn validate(&self) -> Result<()> {
        let empty = self.sides.is_empty() || self.workers.is_empty() || self.rounds.is_empty();
        if empty || self.frames == 0 || self.fps == 0 || self.repetitions == 0 {
            return Err(Error::InvalidConfig(
                "benchmark lists, frame count, fps and repetitions must be non-empty and positive"
                    .into(),
            ));
        }
        if self.sides.contains(&0) || self.workers.contains(&0) {
            return Err(Error::InvalidConfig(
                "frame sides and worker counts must be positive".into(),
            ));
        }
        for &side in &self.sides {
            if let Some(&n) = self.workers.iter().find(|&&n| side % n != 0) {
                return Err(Error::InvalidConfig(format!(
                    "side {side} is not divisible by {n} workers"
                )));
            }
        }
        Ok(())
    }
}

/// Mean, minimum and maximum of a set of durations, in milliseconds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseStats {
    pub mean_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

impl PhaseStats {
    pub fn from_samples(samples: impl IntoIterator<Item = Duration>) -> Self {
        let ms: Vec<f64> = samples.into_iter().map(|d| d.as_secs_f64() * 1e3).collect();
        if ms.is_empty() {
            return Self::default();
        }
        Self {
            mean_ms: ms.iter().sum::<f64>() / ms.len() as f64,
            min_ms: ms.iter().copied().fold(f64::INFINITY, f64::min),
            max_ms: ms.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// One CSV row. Column order is the field order below.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRecord {
    pub bench: &'static str,
    pub map: &'static str,
    pub side: usize,
    pub workers: usize,
    pub rounds: usize,
    pub frames: usize,
    pub fps: u16,
    pub bytegen_mean_ms: f64,
    pub bytegen_min_ms: f64,
    pub bytegen_max_ms: f64,
    pub confusion_mean_ms: f64,
    pub confusion_min_ms: f64,
    pub confusion_max_ms: f64,
    pub diffusion_mean_ms: f64,
    pub diffusion_min_ms: f64,
    pub diffusion_max_ms: f64,
    pub total_mean_ms: f64,
    pub total_min_ms: f64,
    pub total_max_ms: f64,
    pub throughput_mbps: f64,
    pub realtime_ok: bool,
}

pub const BENCH_CSV_HEADER: &str = "bench,map,side,workers,rounds,frames,fps,\
bytegen_mean_ms,bytegen_min_ms,bytegen_max_ms,\
confusion_mean_ms,confusion_min_ms,confusion_max_ms,\
diffusion_mean_ms,diffusion_min_ms,diffusion_max_ms,\
total_mean_ms,total_min_ms,total_max_ms,throughput_mbps,realtime_ok";

struct Echo {
    bench: &'static str,
    map: MapKind,
    side: usize,
    workers: usize,
    rounds: usize,
    frames: usize,
    fps: u16,
}

impl BenchRecord {
    fn from_timings(echo: Echo, timings: &[FrameTiming], bytes: f64) -> Self {
        let stats =
            |f: fn(&FrameTiming) -> Duration| PhaseStats::from_samples(timings.iter().map(f));
        let bytegen = stats(|t| t.bytegen);
        let confusion = stats(|t| t.confusion);
        let diffusion = stats(|t| t.diffusion);
        let total = stats(|t| t.total);
        let elapsed: f64 = timings.iter().map(|t| t.total.as_secs_f64()).sum();
        let throughput_mbps = if elapsed > 0.0 {
            bytes / elapsed / 1e6
        } else {
            0.0
        };
        let deadline = 1000.0 / echo.fps as f64;
        Self {
            bench: echo.bench,
            map: echo.map.name(),
            side: echo.side,
            workers: echo.workers,
            rounds: echo.rounds,
            frames: echo.frames,
            fps: echo.fps,
            bytegen_mean_ms: bytegen.mean_ms,
            bytegen_min_ms: bytegen.min_ms,
            bytegen_max_ms: bytegen.max_ms,
            confusion_mean_ms: confusion.mean_ms,
            confusion_min_ms: confusion.min_ms,
            confusion_max_ms: confusion.max_ms,
            diffusion_mean_ms: diffusion.mean_ms,
            diffusion_min_ms: diffusion.min_ms,
            diffusion_max_ms: diffusion.max_ms,
            total_mean_ms: total.mean_ms,
            total_min_ms: total.min_ms,
            total_max_ms: total.max_ms,
            throughput_mbps,
            realtime_ok: total.mean_ms <= deadline,
        }
    }
}

pub fn write_bench_csv<W: Write>(sink: W, records: &[BenchRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    if records.is_empty() {
        w.write_record(BENCH_CSV_HEADER.split(','))?;
    }
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed key used by the harness; benchmarks do not depend on key material.
pub fn bench_key(map: MapKind) -> Key {
    Key::random(map, &mut ChaCha8Rng::seed_from_u64(0xbe_4c))
}

/// Deterministic pseudo-noise frame.
pub fn synthetic_frame(side: usize, seed: u64) -> Frame {
    let mut data = vec![0u8; side * side * 3];
    ChaCha8Rng::seed_from_u64(seed).fill_bytes(&mut data);
    let image = RgbImage::from_raw(side, side, data).expect("buffer sized for the frame");
    Frame::from_square(image).expect("square frame")
}

const BYTEGEN_CHUNK: usize = 1 << 16;

/// Aggregate generator throughput. `total_iterations` map iterations are
/// split evenly over the workers, which run concurrently.
pub fn bench_bytegen(
    map: MapKind,
    worker_counts: &[usize],
    total_iterations: u64,
    repetitions: usize,
) -> Result<Vec<BenchRecord>> {
    if worker_counts.contains(&0) || repetitions == 0 {
        return Err(Error::InvalidConfig(
            "worker counts and repetitions must be positive".into(),
        ));
    }
    let key = bench_key(map);
    let mut records = Vec::with_capacity(worker_counts.len());
    for &n in worker_counts {
        let per_worker = (total_iterations / n as u64) as usize * map.block_len();
        let mut samples = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let mut prbgs: Vec<Prbg> = derive_worker_params(&key, n)?.prbgs()?;
            let start = Instant::now();
            std::thread::scope(|s| {
                for prbg in prbgs.iter_mut() {
                    s.spawn(move || {
                        let mut buf = vec![0u8; BYTEGEN_CHUNK];
                        let mut left = per_worker;
                        while left > 0 {
                            let take = left.min(BYTEGEN_CHUNK);
                            prbg.fill_bytes(&mut buf[..take]);
                            left -= take;
                        }
                        std::hint::black_box(&buf);
                    });
                }
            });
            samples.push(start.elapsed());
        }
        let timings: Vec<FrameTiming> = samples
            .iter()
            .map(|&d| FrameTiming {
                bytegen: d,
                total: d,
                ..FrameTiming::default()
            })
            .collect();
        let echo = Echo {
            bench: "bytegen",
            map,
            side: 0,
            workers: n,
            rounds: 0,
            frames: 0,
            fps: 0,
        };
        let mut record =
            BenchRecord::from_timings(echo, &timings, (per_worker * n * repetitions) as f64);
        record.realtime_ok = false;
        records.push(record);
    }
    Ok(records)
}

fn phase_label(phases: Phases) -> &'static str {
    match phases {
        Phases::Full => "full",
        Phases::ConfusionOnly => "confusion",
        Phases::DiffusionOnly => "diffusion",
    }
}

/// Per-image cost of confusion-only, diffusion-only (byte generation
/// included) and full rounds. Zero rounds does no work and reports zero.
pub fn bench_phases(
    map: MapKind,
    side: usize,
    worker_counts: &[usize],
    rounds: usize,
    image_count: usize,
) -> Result<Vec<BenchRecord>> {
    if image_count == 0 || worker_counts.contains(&0) {
        return Err(Error::InvalidConfig(
            "image count and worker counts must be positive".into(),
        ));
    }
    let key = bench_key(map);
    let images: Vec<Frame> = (0..image_count.min(SYNTHETIC_POOL))
        .map(|i| synthetic_frame(side, i as u64))
        .collect();
    let mut records = Vec::new();
    for &n in worker_counts {
        if !side.is_multiple_of(n) {
            return Err(Error::InvalidConfig(format!(
                "side {side} is not divisible by {n} workers"
            )));
        }
        for phases in [Phases::ConfusionOnly, Phases::DiffusionOnly, Phases::Full] {
            let timings = if rounds == 0 {
                vec![FrameTiming::default(); image_count]
            } else {
                let mut cipher = FrameCipher::new(&key, n, rounds)?.with_phases(phases);
                let mut timings = Vec::with_capacity(image_count);
                for i in 0..image_count {
                    let (_, t) = cipher.encrypt_next_timed(&images[i % images.len()])?;
                    timings.push(t);
                }
                timings
            };
            let echo = Echo {
                bench: phase_label(phases),
                map,
                side,
                workers: n,
                rounds,
                frames: image_count,
                fps: 0,
            };
            let mut record =
                BenchRecord::from_timings(echo, &timings, (side * side * 3 * image_count) as f64);
            record.realtime_ok = false;
            records.push(record);
        }
    }
    Ok(records)
}

/// Encrypts `frames` in order as one video and reports per-frame latency.
pub fn bench_video_frames(
    key: &Key,
    frames: &[Frame],
    frame_count: usize,
    workers: usize,
    rounds: usize,
    fps: u16,
) -> Result<BenchRecord> {
    if frames.is_empty() || frame_count == 0 || fps == 0 {
        return Err(Error::InvalidConfig(
            "video benchmark needs frames and a positive fps".into(),
        ));
    }
    let side = frames[0].side();
    let mut cipher = FrameCipher::new(key, workers, rounds)?;
    let mut timings = Vec::with_capacity(frame_count);
    for i in 0..frame_count {
        let (_, t) = cipher.encrypt_next_timed(&frames[i % frames.len()])?;
        timings.push(t);
    }
    let echo = Echo {
        bench: "video",
        map: key.kind(),
        side,
        workers,
        rounds,
        frames: frame_count,
        fps,
    };
    Ok(BenchRecord::from_timings(
        echo,
        &timings,
        (side * side * 3 * frame_count) as f64,
    ))
}

/// One video record per frame side, worker count and round count of `config`,
/// on synthetic frames.
pub fn bench_video(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let key = bench_key(config.map);
    let mut records = Vec::new();
    for &side in &config.sides {
        let pool: Vec<Frame> = (0..config.frames.min(SYNTHETIC_POOL))
            .map(|i| synthetic_frame(side, config.seed.wrapping_add(i as u64)))
            .collect();
        for &n in &config.workers {
            for &r in &config.rounds {
                for _ in 0..config.repetitions {
                    records.push(bench_video_frames(
                        &key,
                        &pool,
                        config.frames,
                        n,
                        r,
                        config.fps,
                    )?);
                }
            }
        }
    }
    Ok(records)
}

/// Differential and scrambling metrics after `round` rounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub round: usize,
    /// NPCR per channel after full rounds under a one-pixel plaintext change.
    pub npcr: [f64; 3],
    pub uaci: [f64; 3],
    /// Plain-vs-scrambled correlation after confusion-only rounds.
    pub correlation: [Correlation; 3],
}

impl SweepPoint {
    pub fn mean_npcr(&self) -> f64 {
        self.npcr.iter().sum::<f64>() / 3.0
    }

    pub fn mean_uaci(&self) -> f64 {
        self.uaci.iter().sum::<f64>() / 3.0
    }
}

fn encrypt_once(
    key: &Key,
    frame: &Frame,
    workers: usize,
    rounds: usize,
    phases: Phases,
) -> Result<Frame> {
    if rounds == 0 {
        return Ok(frame.clone());
    }
    FrameCipher::new(key, workers, rounds)?
        .with_phases(phases)
        .encrypt_next(frame)
}

/// Metrics for rounds `0..=max_rounds`. The image is padded to a square
/// divisible by `workers`; the changed pixel is chosen by `seed`.
pub fn sweep_rounds(
    image: &RgbImage,
    key: &Key,
    workers: usize,
    max_rounds: usize,
    seed: u64,
) -> Result<Vec<SweepPoint>> {
    let plain = Frame::from_image(image, workers)?;
    let (changed, _) = change_one_pixel(plain.image(), seed);
    let changed = Frame::from_square(changed)?;
    (0..=max_rounds)
        .map(|r| {
            let c1 = encrypt_once(key, &plain, workers, r, Phases::Full)?;
            let c2 = encrypt_once(key, &changed, workers, r, Phases::Full)?;
            let diff = differential(c1.image(), c2.image())?;
            let scrambled = encrypt_once(key, &plain, workers, r, Phases::ConfusionOnly)?;
            let corr = image_correlation(plain.image(), scrambled.image())?
                .map(|c| c.map_or(Correlation::Degenerate, Correlation::Value));
            Ok(SweepPoint {
                round: r,
                npcr: diff.npcr,
                uaci: diff.uaci,
                correlation: corr,
            })
        })
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    round: usize,
    npcr_r: f64,
    npcr_g: f64,
    npcr_b: f64,
    npcr_mean: f64,
    uaci_r: f64,
    uaci_g: f64,
    uaci_b: f64,
    uaci_mean: f64,
    corr_r: String,
    corr_g: String,
    corr_b: String,
}

pub fn write_sweep_csv<W: Write>(sink: W, points: &[SweepPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for p in points {
        let [corr_r, corr_g, corr_b] = p.correlation.map(|c| c.to_string());
        w.serialize(SweepRow {
            round: p.round,
            npcr_r: p.npcr[0],
            npcr_g: p.npcr[1],
            npcr_b: p.npcr[2],
            npcr_mean: p.mean_npcr(),
            uaci_r: p.uaci[0],
            uaci_g: p.uaci[1],
            uaci_b: p.uaci[2],
            uaci_mean: p.mean_uaci(),
            corr_r,
            corr_g,
            corr_b,
        })?;
    }
    w.flush()?;
    Ok(())
}
