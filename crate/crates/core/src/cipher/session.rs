use super::engine::{
    decrypt_frame_timed, encrypt_frame_timed, EncryptionContext, FrameTiming, Phases, Schedule,
};
use crate::chaos::MapKind;
use crate::error::Result;
use crate::frame::Frame;
use crate::keying::{Coordinator, Key};

/// A keyed frame-sequence cipher: the coordinator plus its worker context.
///
/// Frame `k` of a sequence is processed with the `(k+1)`-th confusion seed
/// and the `k`-th slice of every worker stream, so a session must see frames
/// in order and in a single direction.
#[derive(Debug)]
pub struct FrameCipher {
    kind: MapKind,
    coordinator: Coordinator,
    ctx: EncryptionContext,
    frames: u64,
}

impl FrameCipher {
    pub fn new(key: &Key, workers: usize, rounds: usize) -> Result<Self> {
        Self::with_schedule(key, workers, rounds, Schedule::Parallel)
    }

    pub fn with_schedule(
        key: &Key,
        workers: usize,
        rounds: usize,
        schedule: Schedule,
    ) -> Result<Self> {
        let mut coordinator = Coordinator::new(key)?;
        let params = coordinator.derive_worker_params(workers)?;
        let ctx = EncryptionContext::new(params.prbgs()?, rounds)?.with_schedule(schedule);
        Ok(Self {
            kind: key.kind(),
            coordinator,
            ctx,
            frames: 0,
        })
    }

    /// Restricts every round to one half; used by benchmarks and sweeps.
    pub fn with_phases(self, phases: Phases) -> Self {
        Self {
            ctx: self.ctx.with_phases(phases),
            ..self
        }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn workers(&self) -> usize {
        self.ctx.worker_count()
    }

    pub fn rounds(&self) -> usize {
        self.ctx.rounds()
    }

    pub fn frames_processed(&self) -> u64 {
        self.frames
    }

    pub fn seeds_drawn(&self) -> u64 {
        self.coordinator.seeds_drawn()
    }

    pub fn context(&self) -> &EncryptionContext {
        &self.ctx
    }

    fn advance(&mut self) {
        let seed = self.coordinator.next_confusion_seed();
        self.ctx.set_confusion_seed(seed);
        self.frames += 1;
    }

    pub fn encrypt_next(&mut self, frame: &Frame) -> Result<Frame> {
        self.encrypt_next_timed(frame).map(|(f, _)| f)
    }

    pub fn decrypt_next(&mut self, frame: &Frame) -> Result<Frame> {
        self.decrypt_next_timed(frame).map(|(f, _)| f)
    }

    pub fn encrypt_next_timed(&mut self, frame: &Frame) -> Result<(Frame, FrameTiming)> {
        self.advance();
        encrypt_frame_timed(frame, &mut self.ctx)
    }

    pub fn decrypt_next_timed(&mut self, frame: &Frame) -> Result<(Frame, FrameTiming)> {
        self.advance();
        decrypt_frame_timed(frame, &mut self.ctx)
    }
}
