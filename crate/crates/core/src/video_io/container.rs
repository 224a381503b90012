//! The `CVE1` encrypted container.
//!
//! ```text
//! offset size field
//!      0    4 magic "CVE1"
//!      4    1 version (1)
//!      5    1 map kind tag (0x01 PLCM, 0x02 2D-LASM)
//!      6    4 frame side w
//!     10    4 original width
//!     14    4 original height
//!     18    2 worker count n
//!     20    1 rounds r
//!     21    2 frames per second
//!     23    4 frame count
//!     27      frame count payloads of w*w*3 bytes
//! ```
//!
//! All integers are little-endian.

use std::io::{Read, Seek, SeekFrom, Write};

use crate::chaos::MapKind;
use crate::error::{Error, Result};
use crate::frame::{Frame, RgbImage};

pub const MAGIC: [u8; 4] = *b"CVE1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 27;

const FRAME_COUNT_OFFSET: u64 = 23;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContainerHeader {
    pub map_kind: MapKind,
    pub side: u32,
    pub orig_width: u32,
    pub orig_height: u32,
    pub workers: u16,
    pub rounds: u8,
    pub fps: u16,
    pub frame_count: u32,
}

fn mismatch(field: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::HeaderMismatch {
        field,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl ContainerHeader {
    /// Header for frames shaped like `frame`, with `frame_count` left at zero.
    pub fn for_frame(
        frame: &Frame,
        map_kind: MapKind,
        workers: usize,
        rounds: usize,
        fps: u16,
    ) -> Result<Self> {
        let header = Self {
            map_kind,
            side: to_u32(frame.side(), "side")?,
            orig_width: to_u32(frame.orig_width(), "width")?,
            orig_height: to_u32(frame.orig_height(), "height")?,
            workers: u16::try_from(workers).map_err(|_| {
                Error::InvalidConfig(format!("{workers} workers do not fit the header"))
            })?,
            rounds: u8::try_from(rounds).map_err(|_| {
                Error::InvalidConfig(format!("{rounds} rounds do not fit the header"))
            })?,
            fps,
            frame_count: 0,
        };
        header.validate()?;
        Ok(header)
    }

    pub fn encode(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = self.map_kind.tag();
        out[6..10].copy_from_slice(&self.side.to_le_bytes());
        out[10..14].copy_from_slice(&self.orig_width.to_le_bytes());
        out[14..18].copy_from_slice(&self.orig_height.to_le_bytes());
        out[18..20].copy_from_slice(&self.workers.to_le_bytes());
        out[20] = self.rounds;
        out[21..23].copy_from_slice(&self.fps.to_le_bytes());
        out[23..27].copy_from_slice(&self.frame_count.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::Truncated(format!(
                "container header needs {HEADER_LEN} bytes, found {}",
                bytes.len()
            )));
        }
        let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes[4] != VERSION {
            return Err(Error::UnsupportedVersion(bytes[4]));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let u16_at = |i: usize| u16::from_le_bytes(bytes[i..i + 2].try_into().unwrap());
        let header = Self {
            map_kind: MapKind::from_tag(bytes[5])?,
            side: u32_at(6),
            orig_width: u32_at(10),
            orig_height: u32_at(14),
            workers: u16_at(18),
            rounds: bytes[20],
            fps: u16_at(21),
            frame_count: u32_at(23),
        };
        header.validate()?;
        Ok(header)
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Format(msg));
        if self.side == 0 || self.workers == 0 || self.rounds == 0 {
            return bad(format!(
                "side {}, workers {} and rounds {} must all be positive",
                self.side, self.workers, self.rounds
            ));
        }
        if !self.side.is_multiple_of(self.workers as u32) {
            return bad(format!(
                "side {} is not divisible by {} workers",
                self.side, self.workers
            ));
        }
        if self.orig_width == 0
            || self.orig_height == 0
            || self.orig_width > self.side
            || self.orig_height > self.side
        {
            return bad(format!(
                "original size {}x{} does not fit side {}",
                self.orig_width, self.orig_height, self.side
            ));
        }
        Ok(())
    }

    /// Payload bytes per frame, if addressable on this platform.
    pub fn frame_len(&self) -> Result<usize> {
        (self.side as usize)
            .checked_mul(self.side as usize)
            .and_then(|p| p.checked_mul(3))
            .ok_or_else(|| Error::Format(format!("side {} is too large", self.side)))
    }

    /// Refuses to proceed when the container was written with different
    /// cipher settings than the ones supplied.
    pub fn check_context(&self, map_kind: MapKind, workers: usize, rounds: usize) -> Result<()> {
        if self.map_kind != map_kind {
            return Err(mismatch("map kind", map_kind, self.map_kind));
        }
        if self.workers as usize != workers {
            return Err(mismatch("worker count", workers, self.workers));
        }
        if self.rounds as usize != rounds {
            return Err(mismatch("rounds", rounds, self.rounds));
        }
        Ok(())
    }

    /// Checks a frame against the header geometry.
    pub fn check_frame(&self, frame: &Frame) -> Result<()> {
        if frame.side() != self.side as usize {
            return Err(mismatch("side", self.side, frame.side()));
        }
        if (frame.orig_width(), frame.orig_height())
            != (self.orig_width as usize, self.orig_height as usize)
        {
            return Err(mismatch(
                "original size",
                format!("{}x{}", self.orig_width, self.orig_height),
                format!("{}x{}", frame.orig_width(), frame.orig_height()),
            ));
        }
        Ok(())
    }
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v)
        .map_err(|_| Error::InvalidConfig(format!("{what} {v} does not fit the header")))
}

/// Streams frames into a container, patching the frame count on `finish`.
pub struct ContainerWriter<W: Write + Seek> {
    inner: W,
    header: ContainerHeader,
    start: u64,
}

impl<W: Write + Seek> ContainerWriter<W> {
    pub fn new(mut inner: W, header: ContainerHeader) -> Result<Self> {
        let start = inner.stream_position()?;
        let mut header = header;
        header.frame_count = 0;
        inner.write_all(&header.encode())?;
        Ok(Self {
            inner,
            header,
            start,
        })
    }

    pub fn write_frame(&mut self, frame: &Frame) -> Result<()> {
        self.header.check_frame(frame)?;
        self.header.frame_count = self
            .header
            .frame_count
            .checked_add(1)
            .ok_or_else(|| Error::InvalidConfig("too many frames for one container".into()))?;
        self.inner.write_all(frame.pixels())?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        let end = self.inner.stream_position()?;
        self.inner
            .seek(SeekFrom::Start(self.start + FRAME_COUNT_OFFSET))?;
        self.inner
            .write_all(&self.header.frame_count.to_le_bytes())?;
        self.inner.seek(SeekFrom::Start(end))?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Writes a complete container to any sink; `frame_count` comes from `frames`.
pub fn write_container<W: Write>(
    w: &mut W,
    header: &ContainerHeader,
    frames: &[Frame],
) -> Result<()> {
    let mut header = *header;
    header.frame_count = u32::try_from(frames.len())
        .map_err(|_| Error::InvalidConfig("too many frames for one container".into()))?;
    w.write_all(&header.encode())?;
    for f in frames {
        header.check_frame(f)?;
        w.write_all(f.pixels())?;
    }
    Ok(())
}

/// Reads a container frame by frame.
pub struct ContainerReader<R: Read> {
    inner: R,
    header: ContainerHeader,
    read: u32,
}

impl<R: Read> ContainerReader<R> {
    pub fn new(mut inner: R) -> Result<Self> {
        let mut buf = Vec::with_capacity(HEADER_LEN);
        (&mut inner).take(HEADER_LEN as u64).read_to_end(&mut buf)?;
        let header = ContainerHeader::decode(&buf)?;
        Ok(Self {
            inner,
            header,
            read: 0,
        })
    }

    pub fn header(&self) -> &ContainerHeader {
        &self.header
    }

    pub fn next_frame(&mut self) -> Result<Option<Frame>> {
        if self.read == self.header.frame_count {
            return Ok(None);
        }
        let len = self.header.frame_len()?;
        let mut data = Vec::new();
        (&mut self.inner).take(len as u64).read_to_end(&mut data)?;
        if data.len() != len {
            return Err(Error::Truncated(format!(
                "frame {} of {}: {} of {len} payload bytes",
                self.read,
                self.header.frame_count,
                data.len()
            )));
        }
        self.read += 1;
        let side = self.header.side as usize;
        let image = RgbImage::from_raw(side, side, data)?;
        Frame::with_original(
            image,
            self.header.orig_width as usize,
            self.header.orig_height as usize,
        )
        .map(Some)
    }
}

/// Reads the whole container into memory.
pub fn read_container<R: Read>(r: R) -> Result<(ContainerHeader, Vec<Frame>)> {
    let mut reader = ContainerReader::new(r)?;
    let mut frames = Vec::new();
    while let Some(f) = reader.next_frame()? {
        frames.push(f);
    }
    Ok((reader.header, frames))
}
