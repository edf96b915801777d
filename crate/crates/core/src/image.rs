//! Grayscale rasters and binary PGM (P5) reading/writing.
//!
//! Only the binary graymap variant is handled, with maxval 255 (one byte per
//! sample) or 65535 (two bytes per sample, big-endian). The writer always
//! emits the canonical header `P5\n<w> <h>\n<maxval>\n`, so any file it
//! produces reads back sample-exactly and re-writes byte-exactly.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("not a binary PGM file (expected magic \"P5\")")]
    BadMagic,
    #[error("malformed PGM header: {0}")]
    BadHeader(&'static str),
    #[error("unsupported PGM maxval {0} (expected 255 or 65535)")]
    UnsupportedMaxval(u32),
    #[error("PGM data truncated: expected {expected} bytes of samples, found {found}")]
    Truncated { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pixel buffer holds {actual} samples, {width}x{height} needs {expected}")]
pub struct SizeMismatch {
    pub width: u32,
    pub height: u32,
    pub expected: usize,
    pub actual: usize,
}

/// 8-bit grayscale raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Image8 {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

/// 16-bit grayscale raster, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Image16 {
    width: u32,
    height: u32,
    pixels: Vec<u16>,
}

fn check_len(width: u32, height: u32, actual: usize) -> Result<(), SizeMismatch> {
    let expected = (width as usize).saturating_mul(height as usize);
    if expected != actual {
        return Err(SizeMismatch {
            width,
            height,
            expected,
            actual,
        });
    }
    Ok(())
}

macro_rules! raster_impl {
    ($name:ident, $sample:ty) => {
        impl $name {
            pub fn new(
                width: u32,
                height: u32,
                pixels: Vec<$sample>,
            ) -> Result<Self, SizeMismatch> {
                check_len(width, height, pixels.len())?;
                Ok(Self {
                    width,
                    height,
                    pixels,
                })
            }

            /// An image with every sample set to `value`.
            pub fn filled(width: u32, height: u32, value: $sample) -> Self {
                let len = width as usize * height as usize;
                Self {
                    width,
                    height,
                    pixels: vec![value; len],
                }
            }

            pub fn width(&self) -> u32 {
                self.width
            }

            pub fn height(&self) -> u32 {
                self.height
            }

            pub fn pixels(&self) -> &[$sample] {
                &self.pixels
            }

            pub fn pixels_mut(&mut self) -> &mut [$sample] {
                &mut self.pixels
            }

            pub fn into_pixels(self) -> Vec<$sample> {
                self.pixels
            }

            pub fn get(&self, x: u32, y: u32) -> $sample {
                self.pixels[y as usize * self.width as usize + x as usize]
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.debug_struct(stringify!($name))
                    .field("width", &self.width)
                    .field("height", &self.height)
                    .field("pixels", &format_args!("[{} samples]", self.pixels.len()))
                    .finish()
            }
        }
    };
}

raster_impl!(Image8, u8);
raster_impl!(Image16, u16);

/// A decoded PGM: the sample depth is chosen by the file's maxval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PgmImage {
    Gray8(Image8),
    Gray16(Image16),
}

impl PgmImage {
    pub fn width(&self) -> u32 {
        match self {
            PgmImage::Gray8(i) => i.width(),
            PgmImage::Gray16(i) => i.width(),
        }
    }

    pub fn height(&self) -> u32 {
        match self {
            PgmImage::Gray8(i) => i.height(),
            PgmImage::Gray16(i) => i.height(),
        }
    }

    pub fn maxval(&self) -> u32 {
        match self {
            PgmImage::Gray8(_) => 255,
            PgmImage::Gray16(_) => 65535,
        }
    }

    pub fn into_gray8(self) -> Option<Image8> {
        match self {
            PgmImage::Gray8(i) => Some(i),
            PgmImage::Gray16(_) => None,
        }
    }
}

impl From<Image8> for PgmImage {
    fn from(img: Image8) -> Self {
        PgmImage::Gray8(img)
    }
}

impl From<Image16> for PgmImage {
    fn from(img: Image16) -> Self {
        PgmImage::Gray16(img)
    }
}

/// Header tokenizer: skips whitespace and `#` comments between tokens.
struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderCursor<'a> {
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &'static str) -> Result<u32, PgmError> {
        self.skip_separators();
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u32::from(b - b'0')))
                .ok_or(PgmError::BadHeader(what))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PgmError::BadHeader(what));
        }
        Ok(value)
    }
}

/// Parse a binary PGM. Bytes past the declared samples are ignored.
pub fn read_pgm(bytes: &[u8]) -> Result<PgmImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::BadMagic);
    }
    let mut cur = HeaderCursor { bytes, pos: 2 };
    match bytes.get(2) {
        Some(b) if b.is_ascii_whitespace() || *b == b'#' => {}
        _ => return Err(PgmError::BadMagic),
    }
    let width = cur.number("width is not a number")?;
    let height = cur.number("height is not a number")?;
    let maxval = cur.number("maxval is not a number")?;
    if width == 0 || height == 0 {
        return Err(PgmError::BadHeader("dimensions must be positive"));
    }
    let bytes_per_sample = match maxval {
        255 => 1,
        65535 => 2,
        other => return Err(PgmError::UnsupportedMaxval(other)),
    };
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        Some(_) => return Err(PgmError::BadHeader("missing whitespace after maxval")),
        None => {
            return Err(PgmError::Truncated {
                expected: sample_bytes(width, height, bytes_per_sample)?,
                found: 0,
            })
        }
    }
    let expected = sample_bytes(width, height, bytes_per_sample)?;
    let data = &bytes[cur.pos..];
    if data.len() < expected {
        return Err(PgmError::Truncated {
            expected,
            found: data.len(),
        });
    }
    let data = &data[..expected];
    Ok(if bytes_per_sample == 1 {
        PgmImage::Gray8(Image8 {
            width,
            height,
            pixels: data.to_vec(),
        })
    } else {
        PgmImage::Gray16(Image16 {
            width,
            height,
            pixels: data
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect(),
        })
    })
}

fn sample_bytes(width: u32, height: u32, per_sample: usize) -> Result<usize, PgmError> {
    (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(per_sample))
        .ok_or(PgmError::BadHeader("image dimensions overflow"))
}

/// Serialize in canonical form.
pub fn write_pgm(img: &PgmImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n{}\n", img.width(), img.height(), img.maxval());
    let mut out = header.into_bytes();
    match img {
        PgmImage::Gray8(i) => out.extend_from_slice(i.pixels()),
        PgmImage::Gray16(i) => {
            out.reserve(i.pixels().len() * 2);
            for s in i.pixels() {
                out.extend_from_slice(&s.to_be_bytes());
            }
        }
    }
    out
}

/// Shorthand for writing an 8-bit image.
pub fn write_pgm8(img: &Image8) -> Vec<u8> {
    write_pgm(&PgmImage::Gray8(img.clone()))
}
