//! Netpbm PGM (P2/P5) and PPM (P3/P6) codecs, maxval 255 only.
//!
//! Writers always emit the binary variants with a fixed header layout
//! (`P5\n<w> <h>\n255\n`), so encoding the same image always yields the same
//! bytes. Readers accept both variants and `#` comments anywhere whitespace
//! is allowed in the header.

use std::fs;
use std::path::Path;

use super::{BinaryImage, ColorImage, GrayImage, RasterError};

/// A decoded Netpbm file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyImage {
    Gray(GrayImage),
    Color(ColorImage),
}

impl AnyImage {
    pub fn width(&self) -> usize {
        match self {
            AnyImage::Gray(g) => g.width(),
            AnyImage::Color(c) => c.width(),
        }
    }

    pub fn height(&self) -> usize {
        match self {
            AnyImage::Gray(g) => g.height(),
            AnyImage::Color(c) => c.height(),
        }
    }
}

impl From<GrayImage> for AnyImage {
    fn from(img: GrayImage) -> Self {
        AnyImage::Gray(img)
    }
}

impl From<ColorImage> for AnyImage {
    fn from(img: ColorImage) -> Self {
        AnyImage::Color(img)
    }
}

/// Types with a canonical Netpbm encoding.
pub trait Netpbm {
    fn encode(&self) -> Vec<u8>;
}

fn header(magic: &str, width: usize, height: usize) -> Vec<u8> {
    format!("{magic}\n{width} {height}\n255\n").into_bytes()
}

impl Netpbm for GrayImage {
    fn encode(&self) -> Vec<u8> {
        let mut out = header("P5", self.width(), self.height());
        out.extend_from_slice(self.pixels());
        out
    }
}

impl Netpbm for BinaryImage {
    fn encode(&self) -> Vec<u8> {
        let mut out = header("P5", self.width(), self.height());
        out.extend(self.pixels().iter().map(|&p| if p { 255u8 } else { 0 }));
        out
    }
}

impl Netpbm for ColorImage {
    fn encode(&self) -> Vec<u8> {
        let mut out = header("P6", self.width(), self.height());
        out.reserve(self.pixels().len() * 3);
        for px in self.pixels() {
            out.extend_from_slice(px);
        }
        out
    }
}

impl Netpbm for AnyImage {
    fn encode(&self) -> Vec<u8> {
        match self {
            AnyImage::Gray(g) => g.encode(),
            AnyImage::Color(c) => c.encode(),
        }
    }
}

pub fn write_image(img: &impl Netpbm, path: impl AsRef<Path>) -> Result<(), RasterError> {
    fs::write(path, img.encode())?;
    Ok(())
}

pub fn read_image(path: impl AsRef<Path>) -> Result<AnyImage, RasterError> {
    let bytes = fs::read(path)?;
    decode(&bytes)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Pgm,
    Ppm,
}

impl Kind {
    fn channels(self) -> usize {
        match self {
            Kind::Pgm => 1,
            Kind::Ppm => 3,
        }
    }
}

struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn malformed(&self, reason: impl Into<String>) -> RasterError {
        RasterError::MalformedHeader {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    /// Skips whitespace and `#`-to-end-of-line comments.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Reads an unsigned decimal, returning it with its starting offset.
    fn number(&mut self, what: &str) -> Result<(u64, usize), RasterError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add((b - b'0') as u64))
                .ok_or_else(|| self.malformed(format!("{what} overflows")))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(if self.pos >= self.data.len() {
                self.malformed(format!("unexpected end of data, expected {what}"))
            } else {
                self.malformed(format!("expected {what}"))
            });
        }
        Ok((value, start))
    }
}

/// Decodes a PGM or PPM byte stream.
pub fn decode(data: &[u8]) -> Result<AnyImage, RasterError> {
    let mut cur = Cursor { data, pos: 0 };
    let (kind, ascii) = match data.get(..2) {
        Some(b"P2") => (Kind::Pgm, true),
        Some(b"P5") => (Kind::Pgm, false),
        Some(b"P3") => (Kind::Ppm, true),
        Some(b"P6") => (Kind::Ppm, false),
        _ => return Err(cur.malformed("expected magic number P2, P3, P5 or P6")),
    };
    cur.pos = 2;
    if !data
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(cur.malformed("expected whitespace after magic number"));
    }

    let (width, w_off) = cur.number("width")?;
    let (height, h_off) = cur.number("height")?;
    if width == 0 {
        return Err(RasterError::MalformedHeader {
            offset: w_off,
            reason: "width is zero".into(),
        });
    }
    if height == 0 {
        return Err(RasterError::MalformedHeader {
            offset: h_off,
            reason: "height is zero".into(),
        });
    }
    let (maxval, m_off) = cur.number("maxval")?;
    if maxval != 255 {
        return Err(RasterError::UnsupportedMaxval {
            offset: m_off,
            maxval: maxval.min(u32::MAX as u64) as u32,
        });
    }
    let width = usize::try_from(width).map_err(|_| RasterError::MalformedHeader {
        offset: w_off,
        reason: "width too large".into(),
    })?;
    let height = usize::try_from(height).map_err(|_| RasterError::MalformedHeader {
        offset: h_off,
        reason: "height too large".into(),
    })?;
    let samples = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(kind.channels()))
        .ok_or_else(|| RasterError::MalformedHeader {
            offset: w_off,
            reason: "image dimensions overflow".into(),
        })?;

    let raw = if ascii {
        read_ascii_samples(&mut cur, samples)?
    } else {
        // Exactly one whitespace byte separates maxval from the payload.
        match data.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return Err(cur.malformed("expected single whitespace after maxval")),
        }
        let payload = &data[cur.pos..];
        if payload.len() < samples {
            return Err(RasterError::TruncatedPixelData {
                offset: data.len(),
                expected: samples,
                found: payload.len(),
            });
        }
        payload[..samples].to_vec()
    };

    Ok(match kind {
        Kind::Pgm => AnyImage::Gray(GrayImage::new(width, height, raw)?),
        Kind::Ppm => {
            let pixels = raw.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
            AnyImage::Color(ColorImage::new(width, height, pixels)?)
        }
    })
}

fn read_ascii_samples(cur: &mut Cursor<'_>, samples: usize) -> Result<Vec<u8>, RasterError> {
    let mut raw = Vec::with_capacity(samples);
    for _ in 0..samples {
        cur.skip_separators();
        if cur.pos >= cur.data.len() {
            return Err(RasterError::TruncatedPixelData {
                offset: cur.pos,
                expected: samples,
                found: raw.len(),
            });
        }
        let (v, off) = cur.number("sample")?;
        if v > 255 {
            return Err(RasterError::MalformedHeader {
                offset: off,
                reason: format!("sample {v} exceeds maxval 255"),
            });
        }
        raw.push(v as u8);
    }
    Ok(raw)
}
