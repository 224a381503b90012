use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::{Path, PathBuf};

use super::ppm::{read_ppm, write_ppm};
use crate::error::{Error, Result};
use crate::frame::{Frame, RgbImage};

/// Frame rate assumed for sources that do not declare one.
pub const DEFAULT_FPS: u16 = 24;

enum Kind {
    PpmImage(Option<PathBuf>),
    PpmSequence(std::vec::IntoIter<PathBuf>),
    Raw {
        reader: Box<dyn Read + Send>,
        width: usize,
        height: usize,
    },
}

/// A sequence of RGB frames of constant size.
pub struct FrameSource {
    kind: Kind,
    fps: u16,
    dims: Option<(usize, usize)>,
    cursor: usize,
}

impl FrameSource {
    /// A single P6 image, yielded once.
    pub fn ppm_image(path: impl Into<PathBuf>) -> Self {
        Self::from_kind(Kind::PpmImage(Some(path.into())), DEFAULT_FPS, None)
    }

    /// Every `*.ppm` file in `dir`, in file-name order.
    pub fn ppm_sequence(dir: impl AsRef<Path>, fps: u16) -> Result<Self> {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir.as_ref())?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("ppm")))
            .collect();
        files.sort();
        Ok(Self::from_kind(
            Kind::PpmSequence(files.into_iter()),
            fps,
            None,
        ))
    }

    /// Headerless RGB24 frames of the declared size, back to back.
    pub fn raw<R: Read + Send + 'static>(
        reader: R,
        width: usize,
        height: usize,
        fps: u16,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Geometry(format!(
                "raw frame size {width}x{height} is empty"
            )));
        }
        Ok(Self::from_kind(
            Kind::Raw {
                reader: Box::new(reader),
                width,
                height,
            },
            fps,
            Some((width, height)),
        ))
    }

    pub fn open_raw(path: impl AsRef<Path>, width: usize, height: usize, fps: u16) -> Result<Self> {
        Self::raw(BufReader::new(File::open(path)?), width, height, fps)
    }

    fn from_kind(kind: Kind, fps: u16, dims: Option<(usize, usize)>) -> Self {
        Self {
            kind,
            fps,
            dims,
            cursor: 0,
        }
    }

    pub fn fps(&self) -> u16 {
        self.fps
    }

    /// Index of the next frame to be yielded.
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// Declared or first-seen frame size.
    pub fn dimensions(&self) -> Option<(usize, usize)> {
        self.dims
    }

    /// Next image at its original size, or `None` when the source is done.
    pub fn next_image(&mut self) -> Result<Option<RgbImage>> {
        let image = match &mut self.kind {
            Kind::PpmImage(path) => match path.take() {
                Some(p) => Some(read_ppm(&mut BufReader::new(File::open(p)?))?),
                None => None,
            },
            Kind::PpmSequence(files) => match files.next() {
                Some(p) => Some(read_ppm(&mut BufReader::new(File::open(p)?))?),
                None => None,
            },
            Kind::Raw {
                reader,
                width,
                height,
            } => {
                let len = *width * *height * 3;
                let mut data = Vec::with_capacity(len);
                reader.take(len as u64).read_to_end(&mut data)?;
                match data.len() {
                    0 => None,
                    n if n == len => Some(RgbImage::from_raw(*width, *height, data)?),
                    n => {
                        return Err(Error::Truncated(format!(
                            "raw frame {} has {n} of {len} bytes",
                            self.cursor
                        )))
                    }
                }
            }
        };
        if let Some(img) = &image {
            let dims = (img.width(), img.height());
            match self.dims {
                Some(expected) if expected != dims => {
                    return Err(Error::Geometry(format!(
                        "frame {} is {}x{}, expected {}x{}",
                        self.cursor, dims.0, dims.1, expected.0, expected.1
                    )))
                }
                _ => self.dims = Some(dims),
            }
            self.cursor += 1;
        }
        Ok(image)
    }

    /// Next frame padded to a square whose side is a multiple of `workers`.
    pub fn load_frame(&mut self, workers: usize) -> Result<Frame> {
        let image = self.next_image()?.ok_or(Error::Exhausted)?;
        Frame::from_image(&image, workers)
    }
}

impl Iterator for FrameSource {
    type Item = Result<RgbImage>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_image().transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlainFormat {
    Ppm,
    Raw,
}

/// Writes `frame` with its padding cropped off.
pub fn store_plain_frame<W: Write>(frame: &Frame, sink: &mut W, format: PlainFormat) -> Result<()> {
    let image = frame.cropped();
    match format {
        PlainFormat::Ppm => write_ppm(sink, &image),
        PlainFormat::Raw => Ok(sink.write_all(image.data())?),
    }
}
