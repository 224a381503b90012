//! Real-time chaotic video frame encryption.
//!
//! Frames are split into horizontal subframes, one per worker. Every round,
//! all workers permute pixel positions with a discretized Chirikov map and
//! then diffuse pixel values along their subframe with keystream bytes drawn
//! from chaotic-map generators; barriers keep the phases apart. The crate
//! also carries the statistical analysis suite used to evaluate cipher
//! frames and a benchmark harness.
//!
//! ```
//! use chaovid::{Frame, FrameCipher, Key, RgbImage};
//!
//! let key = Key::plcm(0.123, 0.234, 0.345, 0.456)?;
//! let image = RgbImage::from_raw(16, 16, (0..768).map(|i| i as u8).collect())?;
//! let frame = Frame::from_image(&image, 4)?;
//!
//! let cipher = FrameCipher::new(&key, 4, 5)?.encrypt_next(&frame)?;
//! let plain = FrameCipher::new(&key, 4, 5)?.decrypt_next(&cipher)?;
//! assert_eq!(plain.cropped(), image);
//! # Ok::<(), chaovid::Error>(())
//! ```

pub mod analysis;
pub mod bench;
pub mod chaos;
pub mod cipher;
pub mod error;
pub mod frame;
pub mod keying;
pub mod video_io;

pub use chaos::{MapKind, Prbg};
pub use cipher::{FrameCipher, Schedule};
pub use error::{Error, Result};
pub use frame::{Frame, RgbImage};
pub use keying::Key;
