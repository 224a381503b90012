//! Binary PPM (P6) with 8-bit channels.

use std::io::{BufRead, Read, Write};

use crate::error::{Error, Result};
use crate::frame::RgbImage;

fn read_byte<R: BufRead>(r: &mut R) -> Result<Option<u8>> {
    let mut b = [0u8; 1];
    match r.read(&mut b)? {
        0 => Ok(None),
        _ => Ok(Some(b[0])),
    }
}

/// Reads one whitespace-delimited header token, skipping `#` comments.
fn header_token<R: BufRead>(r: &mut R) -> Result<String> {
    let mut token = String::new();
    loop {
        let Some(b) = read_byte(r)? else {
            if token.is_empty() {
                return Err(Error::Truncated("PPM header".into()));
            }
            return Ok(token);
        };
        match b {
            b'#' if token.is_empty() => {
                let mut comment = Vec::new();
                r.read_until(b'\n', &mut comment)?;
            }
            b if b.is_ascii_whitespace() => {
                if !token.is_empty() {
                    return Ok(token);
                }
            }
            b => token.push(b as char),
        }
    }
}

fn header_number<R: BufRead>(r: &mut R, what: &str) -> Result<usize> {
    let tok = header_token(r)?;
    tok.parse()
        .map_err(|_| Error::Format(format!("PPM {what} {tok:?} is not a number")))
}

/// Reads one P6 image. Returns `Ok(None)` on a clean end of input.
pub fn read_ppm_opt<R: BufRead>(r: &mut R) -> Result<Option<RgbImage>> {
    // Skip whitespace between concatenated images.
    loop {
        let buf = r.fill_buf()?;
        match buf.first() {
            None => return Ok(None),
            Some(b) if b.is_ascii_whitespace() => r.consume(1),
            Some(_) => break,
        }
    }
    let magic = header_token(r)?;
    if magic != "P6" {
        return Err(Error::Format(format!("expected P6 magic, found {magic:?}")));
    }
    let width = header_number(r, "width")?;
    let height = header_number(r, "height")?;
    let maxval = header_number(r, "maxval")?;
    if maxval != 255 {
        return Err(Error::Format(format!(
            "only 8-bit PPM (maxval 255) is supported, found maxval {maxval}"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("empty PPM image {width}x{height}")));
    }
    let len = width
        .checked_mul(height)
        .and_then(|p| p.checked_mul(3))
        .ok_or_else(|| Error::Format(format!("PPM dimensions {width}x{height} overflow")))?;
    let mut data = Vec::new();
    r.take(len as u64).read_to_end(&mut data)?;
    if data.len() != len {
        return Err(Error::Truncated(format!(
            "PPM pixel data: expected {len} bytes, found {}",
            data.len()
        )));
    }
    RgbImage::from_raw(width, height, data).map(Some)
}

pub fn read_ppm<R: BufRead>(r: &mut R) -> Result<RgbImage> {
    read_ppm_opt(r)?.ok_or_else(|| Error::Truncated("empty PPM input".into()))
}

pub fn write_ppm<W: Write>(w: &mut W, image: &RgbImage) -> Result<()> {
    write!(w, "P6\n{} {}\n255\n", image.width(), image.height())?;
    w.write_all(image.data())?;
    Ok(())
}
