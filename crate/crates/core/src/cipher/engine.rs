//! Round scheduling: `n` worker lanes run `r` rounds of confusion and
//! diffusion over their horizontal subframes, separated by barriers.

use std::ops::Range;
use std::sync::Barrier;
use std::time::{Duration, Instant};

use super::confusion::{confuse_rows, inverse_confuse_rows, ConfusionMap};
use super::diffusion::{
    diffuse_subframe, diffusion_seed_index, inverse_diffuse_subframe, subframe_len,
    PendingFirstByte,
};
use super::shared::SharedBuf;
use crate::chaos::Prbg;
use crate::error::{Error, Result};
use crate::frame::{Frame, RgbImage};

/// How worker lanes are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Schedule {
    /// One OS thread per worker, phases separated by barriers.
    #[default]
    Parallel,
    /// Workers simulated one after another on the calling thread. Produces
    /// output bit-identical to [`Schedule::Parallel`].
    Sequential,
}

/// Which halves of each round are executed. Anything but `Full` exists for
/// benchmarks and parameter sweeps.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Phases {
    #[default]
    Full,
    ConfusionOnly,
    DiffusionOnly,
}

impl Phases {
    fn confusion(self) -> bool {
        matches!(self, Phases::Full | Phases::ConfusionOnly)
    }

    fn diffusion(self) -> bool {
        matches!(self, Phases::Full | Phases::DiffusionOnly)
    }
}

/// Wall-clock split of one frame, measured at phase barriers.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FrameTiming {
    pub bytegen: Duration,
    pub confusion: Duration,
    pub diffusion: Duration,
    pub total: Duration,
}

struct PhaseClock {
    last: Instant,
    timing: FrameTiming,
}

enum Phase {
    Bytegen,
    Confusion,
    Diffusion,
}

impl PhaseClock {
    fn start() -> Self {
        Self {
            last: Instant::now(),
            timing: FrameTiming::default(),
        }
    }

    fn lap(&mut self, phase: Phase) {
        let now = Instant::now();
        let spent = now - self.last;
        self.last = now;
        match phase {
            Phase::Bytegen => self.timing.bytegen += spent,
            Phase::Confusion => self.timing.confusion += spent,
            Phase::Diffusion => self.timing.diffusion += spent,
        }
    }
}

/// Per-frame state handed to the engine: worker generators, round count and
/// the frame's confusion seed.
#[derive(Debug)]
pub struct EncryptionContext {
    rounds: usize,
    confusion_seed: u32,
    workers: Vec<Prbg>,
    streams: Vec<Vec<u8>>,
    schedule: Schedule,
    phases: Phases,
}

impl EncryptionContext {
    pub fn new(workers: Vec<Prbg>, rounds: usize) -> Result<Self> {
        if workers.is_empty() {
            return Err(Error::InvalidConfig("need at least one worker".into()));
        }
        if rounds == 0 {
            return Err(Error::InvalidConfig("need at least one round".into()));
        }
        let streams = vec![Vec::new(); workers.len()];
        Ok(Self {
            rounds,
            confusion_seed: 1,
            workers,
            streams,
            schedule: Schedule::default(),
            phases: Phases::default(),
        })
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_phases(mut self, phases: Phases) -> Self {
        self.phases = phases;
        self
    }

    pub fn set_confusion_seed(&mut self, seed: u32) {
        self.confusion_seed = seed;
    }

    pub fn confusion_seed(&self) -> u32 {
        self.confusion_seed
    }

    pub fn worker_count(&self) -> usize {
        self.workers.len()
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn schedule(&self) -> Schedule {
        self.schedule
    }

    pub fn phases(&self) -> Phases {
        self.phases
    }

    pub fn workers(&self) -> &[Prbg] {
        &self.workers
    }

    /// Stream bytes drawn from all worker generators so far.
    pub fn bytes_consumed(&self) -> u64 {
        self.workers.iter().map(Prbg::bytes_emitted).sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    Encrypt,
    Decrypt,
}

/// Geometry and buffers shared by all lanes for one frame.
struct Job {
    side: usize,
    workers: usize,
    rows_per: usize,
    sub_len: usize,
    rounds: usize,
    phases: Phases,
    map: ConfusionMap,
    bufs: [SharedBuf; 2],
}

impl Job {
    fn rows(&self, i: usize) -> Range<usize> {
        i * self.rows_per..(i + 1) * self.rows_per
    }

    fn bytes(&self, i: usize) -> Range<usize> {
        i * self.sub_len..(i + 1) * self.sub_len
    }

    fn round_stream<'s>(&self, stream: &'s [u8], round: usize) -> &'s [u8] {
        &stream[round * self.sub_len..(round + 1) * self.sub_len]
    }

    // Each method below is one lane's share of one phase. Callers must run
    // every lane's share of a phase before any lane starts the next phase.

    unsafe fn confuse(&self, i: usize, cur: usize) {
        confuse_rows(
            self.bufs[cur].as_slice(),
            self.bufs[1 - cur],
            &self.map,
            self.rows(i),
        );
    }

    unsafe fn inverse_confuse(&self, i: usize, cur: usize) {
        inverse_confuse_rows(
            self.bufs[cur].as_slice(),
            self.bufs[1 - cur],
            &self.map,
            self.rows(i),
        );
    }

    unsafe fn seed(&self, i: usize, cur: usize) -> u8 {
        self.bufs[cur].read(diffusion_seed_index(i, self.workers, self.side))
    }

    unsafe fn diffuse(&self, i: usize, cur: usize, stream: &[u8], seed: u8) {
        diffuse_subframe(self.bufs[cur].region_mut(self.bytes(i)), stream, seed);
    }

    unsafe fn inverse_diffuse(&self, i: usize, cur: usize, stream: &[u8]) -> PendingFirstByte {
        inverse_diffuse_subframe(self.bufs[cur].region_mut(self.bytes(i)), stream)
    }

    unsafe fn finish_first(&self, i: usize, cur: usize, pending: PendingFirstByte) {
        // Reads the last byte of the next subframe and writes the first byte
        // of this one; no other lane touches either index in this phase.
        let seed = self.seed(i, cur);
        self.bufs[cur].write(self.bytes(i).start, pending.resolve(seed));
    }

    /// Runs all rounds for lane `i`; returns the index of the buffer holding
    /// the result.
    fn run_lane(
        &self,
        i: usize,
        direction: Direction,
        stream: &[u8],
        barrier: &Barrier,
        mut clock: Option<&mut PhaseClock>,
    ) -> usize {
        let mut lap = |phase| {
            if let Some(c) = clock.as_deref_mut() {
                c.lap(phase)
            }
        };
        let mut cur = 0;
        // SAFETY (all blocks below): every phase ends at a barrier, lanes write
        // only their own rows or their rows' confusion images, and reads of a
        // buffer never overlap a write to it within the same phase.
        match direction {
            Direction::Encrypt => {
                for round in 0..self.rounds {
                    if self.phases.confusion() {
                        unsafe { self.confuse(i, cur) };
                        barrier.wait();
                        cur = 1 - cur;
                        lap(Phase::Confusion);
                    }
                    if self.phases.diffusion() {
                        let seed = unsafe { self.seed(i, cur) };
                        barrier.wait();
                        unsafe { self.diffuse(i, cur, self.round_stream(stream, round), seed) };
                        barrier.wait();
                        lap(Phase::Diffusion);
                    }
                }
            }
            Direction::Decrypt => {
                for round in (0..self.rounds).rev() {
                    if self.phases.diffusion() {
                        let pending = unsafe {
                            self.inverse_diffuse(i, cur, self.round_stream(stream, round))
                        };
                        barrier.wait();
                        unsafe { self.finish_first(i, cur, pending) };
                        barrier.wait();
                        lap(Phase::Diffusion);
                    }
                    if self.phases.confusion() {
                        unsafe { self.inverse_confuse(i, cur) };
                        barrier.wait();
                        cur = 1 - cur;
                        lap(Phase::Confusion);
                    }
                }
            }
        }
        cur
    }

    /// Same phase order as `run_lane`, with the lanes simulated in sequence.
    fn run_sequential(
        &self,
        direction: Direction,
        streams: &[Vec<u8>],
        clock: &mut PhaseClock,
    ) -> usize {
        let n = self.workers;
        let mut cur = 0;
        // SAFETY: single thread; each phase completes for all lanes before
        // the next one starts.
        match direction {
            Direction::Encrypt => {
                for round in 0..self.rounds {
                    if self.phases.confusion() {
                        (0..n).for_each(|i| unsafe { self.confuse(i, cur) });
                        cur = 1 - cur;
                        clock.lap(Phase::Confusion);
                    }
                    if self.phases.diffusion() {
                        let seeds: Vec<u8> = (0..n).map(|i| unsafe { self.seed(i, cur) }).collect();
                        for (i, seed) in seeds.into_iter().enumerate() {
                            let stream = self.round_stream(&streams[i], round);
                            unsafe { self.diffuse(i, cur, stream, seed) };
                        }
                        clock.lap(Phase::Diffusion);
                    }
                }
            }
            Direction::Decrypt => {
                for round in (0..self.rounds).rev() {
                    if self.phases.diffusion() {
                        let pending: Vec<_> = (0..n)
                            .map(|i| unsafe {
                                self.inverse_diffuse(i, cur, self.round_stream(&streams[i], round))
                            })
                            .collect();
                        for (i, p) in pending.into_iter().enumerate() {
                            unsafe { self.finish_first(i, cur, p) };
                        }
                        clock.lap(Phase::Diffusion);
                    }
                    if self.phases.confusion() {
                        (0..n).for_each(|i| unsafe { self.inverse_confuse(i, cur) });
                        cur = 1 - cur;
                        clock.lap(Phase::Confusion);
                    }
                }
            }
        }
        cur
    }
}

fn run(
    frame: &Frame,
    ctx: &mut EncryptionContext,
    direction: Direction,
) -> Result<(Frame, FrameTiming)> {
    let started = Instant::now();
    let side = frame.side();
    let n = ctx.workers.len();
    if side < n || !side.is_multiple_of(n) {
        return Err(Error::Geometry(format!(
            "frame side {side} must be a positive multiple of the worker count {n}"
        )));
    }

    let sub_len = subframe_len(side, n);
    let budget = if ctx.phases.diffusion() {
        ctx.rounds * sub_len
    } else {
        0
    };

    let mut a = frame.pixels().to_vec();
    let mut b = vec![0u8; a.len()];
    let job = Job {
        side,
        workers: n,
        rows_per: side / n,
        sub_len,
        rounds: ctx.rounds,
        phases: ctx.phases,
        map: ConfusionMap::new(side, ctx.confusion_seed),
        bufs: [SharedBuf::new(&mut a), SharedBuf::new(&mut b)],
    };

    let (cur, mut timing) = match ctx.schedule {
        Schedule::Sequential => {
            let mut clock = PhaseClock::start();
            for (prbg, stream) in ctx.workers.iter_mut().zip(ctx.streams.iter_mut()) {
                stream.resize(budget, 0);
                prbg.fill_bytes(stream);
            }
            clock.lap(Phase::Bytegen);
            let cur = job.run_sequential(direction, &ctx.streams, &mut clock);
            (cur, clock.timing)
        }
        Schedule::Parallel => {
            let barrier = Barrier::new(n);
            let job = &job;
            let barrier = &barrier;
            std::thread::scope(|scope| {
                let handles: Vec<_> = ctx
                    .workers
                    .iter_mut()
                    .zip(ctx.streams.iter_mut())
                    .enumerate()
                    .map(|(i, (prbg, stream))| {
                        scope.spawn(move || {
                            let mut clock = (i == 0).then(PhaseClock::start);
                            stream.resize(budget, 0);
                            prbg.fill_bytes(stream);
                            barrier.wait();
                            if let Some(c) = clock.as_mut() {
                                c.lap(Phase::Bytegen);
                            }
                            let cur = job.run_lane(i, direction, stream, barrier, clock.as_mut());
                            (cur, clock.map(|c| c.timing))
                        })
                    })
                    .collect();
                let mut result = (0, FrameTiming::default());
                for handle in handles {
                    let (cur, timing) = handle.join().expect("worker lane panicked");
                    result.0 = cur;
                    if let Some(t) = timing {
                        result.1 = t;
                    }
                }
                result
            })
        }
    };

    let pixels = if cur == 0 { a } else { b };
    let image = RgbImage::from_raw(side, side, pixels)?;
    let out = Frame::with_original(image, frame.orig_width(), frame.orig_height())?;
    timing.total = started.elapsed();
    Ok((out, timing))
}

/// Encrypts one frame with the context's seed and worker streams.
pub fn encrypt_frame(frame: &Frame, ctx: &mut EncryptionContext) -> Result<Frame> {
    run(frame, ctx, Direction::Encrypt).map(|(f, _)| f)
}

/// Inverts [`encrypt_frame`]. The context must be positioned exactly where
/// the encrypting context was for this frame.
pub fn decrypt_frame(frame: &Frame, ctx: &mut EncryptionContext) -> Result<Frame> {
    run(frame, ctx, Direction::Decrypt).map(|(f, _)| f)
}

pub fn encrypt_frame_timed(
    frame: &Frame,
    ctx: &mut EncryptionContext,
) -> Result<(Frame, FrameTiming)> {
    run(frame, ctx, Direction::Encrypt)
}

pub fn decrypt_frame_timed(
    frame: &Frame,
    ctx: &mut EncryptionContext,
) -> Result<(Frame, FrameTiming)> {
    run(frame, ctx, Direction::Decrypt)
}
