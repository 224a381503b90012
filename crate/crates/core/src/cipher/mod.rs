//! The frame cipher: subframe partitioning, confusion, diffusion and the
//! barrier-synchronized worker schedule that runs them.

pub mod confusion;
pub mod diffusion;
pub mod engine;
mod session;
mod shared;

pub use confusion::{confuse, inverse_confuse, ConfusionMap};
pub use diffusion::{
    diffuse_byte, diffuse_subframe, diffusion_seed_index, inverse_diffuse_byte,
    inverse_diffuse_subframe, subframe_len, PendingFirstByte,
};
pub use engine::{
    decrypt_frame, decrypt_frame_timed, encrypt_frame, encrypt_frame_timed, EncryptionContext,
    FrameTiming, Phases, Schedule,
};
pub use session::FrameCipher;
