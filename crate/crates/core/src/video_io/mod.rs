//! Frame ingestion and emission: P6 images, raw RGB24 streams, and the
//! `CVE1` container that carries cipher frames.

pub mod container;
pub mod ppm;
pub mod source;

pub use container::{
    read_container, write_container, ContainerHeader, ContainerReader, ContainerWriter,
};
pub use ppm::{read_ppm, write_ppm};
pub use source::{store_plain_frame, FrameSource, PlainFormat, DEFAULT_FPS};
