//! Self-describing payload frame: header ‖ Huffman table ‖ payload ‖ padding.
//!
//! ```text
//! bits    0..16    magic 0x5347
//!        16..24    version (1)
//!        24..32    secret kind (0 = raw bytes, 1 = 8-bit grayscale image)
//!        32..48    secret width  (0 for raw bytes)
//!        48..64    secret height (0 for raw bytes)
//!        64..96    symbol count
//!        96..128   payload bit length
//!       128..2176  code lengths, 8 bits per symbol
//!      2176..      Huffman payload, then zeros up to a multiple of 64
//! ```
//!
//! All header fields are big-endian. Padding is never decoded; the payload
//! boundary comes from the header alone.

use thiserror::Error;

use crate::bits::Bitstream;
use crate::huffman::{self, HuffmanError, HuffmanTable, TABLE_BITS};

pub const FRAME_MAGIC: u16 = 0x5347;
pub const FRAME_VERSION: u8 = 1;
pub const HEADER_BITS: usize = 128;
/// Bits per embedding group; one group fills one coefficient block.
pub const GROUP_BITS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("secret is empty")]
    EmptyInput,
    #[error("secret has {len} bytes but dimensions {width}x{height}")]
    DimensionMismatch { width: u16, height: u16, len: usize },
    #[error("secret of {0} bytes is too large for the frame header")]
    SecretTooLarge(usize),
    #[error("bad frame magic {0:#06x} (not a stego payload)")]
    BadMagic(u16),
    #[error("unsupported frame version {0}")]
    UnsupportedVersion(u8),
    #[error("inconsistent frame header: {0}")]
    BadHeader(&'static str),
    #[error("frame truncated: header promises {needed} bits, {available} available")]
    TruncatedFrame { needed: usize, available: usize },
    #[error(transparent)]
    Huffman(#[from] HuffmanError),
}

/// What the secret bytes represent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecretKind {
    Bytes,
    Image { width: u16, height: u16 },
}

impl SecretKind {
    fn code(self) -> u8 {
        match self {
            SecretKind::Bytes => 0,
            SecretKind::Image { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PayloadHeader {
    pub version: u8,
    pub kind: SecretKind,
    pub symbol_count: u32,
    pub payload_bit_length: u32,
}

impl PayloadHeader {
    pub fn write(&self, out: &mut Bitstream) {
        let (w, h) = match self.kind {
            SecretKind::Bytes => (0, 0),
            SecretKind::Image { width, height } => (width, height),
        };
        out.push_bits(u64::from(FRAME_MAGIC), 16);
        out.push_bits(u64::from(self.version), 8);
        out.push_bits(u64::from(self.kind.code()), 8);
        out.push_bits(u64::from(w), 16);
        out.push_bits(u64::from(h), 16);
        out.push_bits(u64::from(self.symbol_count), 32);
        out.push_bits(u64::from(self.payload_bit_length), 32);
    }

    /// Parse and validate the first 128 bits of `bits`.
    pub fn read(bits: &Bitstream) -> Result<Self, FrameError> {
        if bits.len() < HEADER_BITS {
            // Still report a wrong magic first when there is enough to see it.
            if bits.len() >= 16 {
                let magic = bits.reader().read_bits(16).unwrap_or(0) as u16;
                if magic != FRAME_MAGIC {
                    return Err(FrameError::BadMagic(magic));
                }
            }
            return Err(FrameError::TruncatedFrame {
                needed: HEADER_BITS,
                available: bits.len(),
            });
        }
        let mut r = bits.reader();
        let mut field = |n| r.read_bits(n).expect("header length checked");
        let magic = field(16) as u16;
        if magic != FRAME_MAGIC {
            return Err(FrameError::BadMagic(magic));
        }
        let version = field(8) as u8;
        if version != FRAME_VERSION {
            return Err(FrameError::UnsupportedVersion(version));
        }
        let kind_code = field(8) as u8;
        let width = field(16) as u16;
        let height = field(16) as u16;
        let symbol_count = field(32) as u32;
        let payload_bit_length = field(32) as u32;
        let kind = match kind_code {
            0 => {
                if width != 0 || height != 0 {
                    return Err(FrameError::BadHeader("byte secret with dimensions"));
                }
                SecretKind::Bytes
            }
            1 => {
                if u64::from(width) * u64::from(height) != u64::from(symbol_count) {
                    return Err(FrameError::BadHeader(
                        "image dimensions disagree with symbol count",
                    ));
                }
                SecretKind::Image { width, height }
            }
            _ => return Err(FrameError::BadHeader("unknown secret kind")),
        };
        if symbol_count == 0 {
            return Err(FrameError::BadHeader("zero symbols"));
        }
        if payload_bit_length < symbol_count {
            return Err(FrameError::BadHeader(
                "payload shorter than one bit per symbol",
            ));
        }
        Ok(Self {
            version,
            kind,
            symbol_count,
            payload_bit_length,
        })
    }

    /// Unpadded frame length.
    pub fn content_bits(&self) -> usize {
        HEADER_BITS + TABLE_BITS + self.payload_bit_length as usize
    }

    /// Frame length including padding.
    pub fn frame_bits(&self) -> usize {
        self.content_bits().div_ceil(GROUP_BITS) * GROUP_BITS
    }
}

/// A complete, padded frame ready for embedding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadFrame {
    header: PayloadHeader,
    bits: Bitstream,
}

impl PayloadFrame {
    pub fn header(&self) -> &PayloadHeader {
        &self.header
    }

    pub fn bits(&self) -> &Bitstream {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// One 64-bit group per coefficient block; the first frame bit is the
    /// group's most significant bit.
    pub fn groups(&self) -> Vec<u64> {
        chunk_bits(&self.bits)
    }
}

/// Compress `secret` and lay out the frame.
pub fn build_frame(secret: &[u8], kind: SecretKind) -> Result<PayloadFrame, FrameError> {
    if secret.is_empty() {
        return Err(FrameError::EmptyInput);
    }
    if let SecretKind::Image { width, height } = kind {
        if usize::from(width) * usize::from(height) != secret.len() {
            return Err(FrameError::DimensionMismatch {
                width,
                height,
                len: secret.len(),
            });
        }
    }
    let symbol_count =
        u32::try_from(secret.len()).map_err(|_| FrameError::SecretTooLarge(secret.len()))?;
    let table = huffman::build_table(secret)?;
    let payload = huffman::encode(secret, &table)?;
    let payload_bit_length =
        u32::try_from(payload.len()).map_err(|_| FrameError::SecretTooLarge(secret.len()))?;
    let header = PayloadHeader {
        version: FRAME_VERSION,
        kind,
        symbol_count,
        payload_bit_length,
    };
    let mut bits = Bitstream::with_capacity(header.frame_bits());
    header.write(&mut bits);
    bits.extend_from(&huffman::serialize_table(&table));
    bits.extend_from(&payload);
    bits.pad_to_multiple(GROUP_BITS);
    debug_assert_eq!(bits.len(), header.frame_bits());
    Ok(PayloadFrame { header, bits })
}

/// A frame split back into its parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedFrame {
    pub header: PayloadHeader,
    pub table: HuffmanTable,
    pub payload: Bitstream,
}

impl ParsedFrame {
    /// Huffman-decode the payload into the secret bytes.
    pub fn decode_secret(&self) -> Result<Vec<u8>, FrameError> {
        Ok(huffman::decode(
            &self.payload,
            &self.table,
            self.header.symbol_count as usize,
        )?)
    }
}

/// Split a frame; anything after the payload is ignored.
pub fn parse_frame(bits: &Bitstream) -> Result<ParsedFrame, FrameError> {
    let header = PayloadHeader::read(bits)?;
    let needed = header.content_bits();
    if bits.len() < needed {
        return Err(FrameError::TruncatedFrame {
            needed,
            available: bits.len(),
        });
    }
    let table_end = HEADER_BITS + TABLE_BITS;
    let table = huffman::parse_table(&bits.slice(HEADER_BITS, table_end))?;
    let payload = bits.slice(table_end, needed);
    Ok(ParsedFrame {
        header,
        table,
        payload,
    })
}

/// Cut a bitstream into 64-bit groups (MSB = earliest bit). A trailing
/// partial group is zero-filled.
pub fn chunk_bits(bits: &Bitstream) -> Vec<u64> {
    let bytes = bits.as_bytes();
    bytes
        .chunks(8)
        .map(|c| {
            let mut word = [0u8; 8];
            word[..c.len()].copy_from_slice(c);
            u64::from_be_bytes(word)
        })
        .collect()
}

/// Inverse of [`chunk_bits`].
pub fn join_groups(groups: &[u64]) -> Bitstream {
    let bytes: Vec<u8> = groups.iter().flat_map(|g| g.to_be_bytes()).collect();
    Bitstream::from_bytes(&bytes, bytes.len() * 8).expect("exact length")
}
