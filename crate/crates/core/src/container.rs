//! Lossless stego container (`.dsc`): the modified integer coefficients.
//!
//! ```text
//! 0..4    magic "DST1" (0x44535431)
//! 4..6    width in pixels, u16 BE, multiple of 8
//! 6..8    height in pixels, u16 BE, multiple of 8
//! 8..     width*height coefficients, i16 BE two's complement,
//!         blocks row-major, coefficients row-major within a block
//! ```

use thiserror::Error;

use crate::dct::{BlockGrid, CoeffBlock, BLOCK_LEN, COEFF_MAX, COEFF_MIN};

pub const CONTAINER_MAGIC: u32 = 0x4453_5431;
pub const CONTAINER_HEADER_BYTES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContainerError {
    #[error("not a stego container (bad magic)")]
    BadMagic,
    #[error("container dimensions {0}x{1} are not positive multiples of 8")]
    BadDimensions(u32, u32),
    #[error("container truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} unexpected bytes after the coefficient data")]
    TrailingData(usize),
    #[error("coefficient {value} at index {index} is outside [-4096, 4095]")]
    CoefficientOutOfRange { index: usize, value: i16 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoContainer {
    width: u16,
    height: u16,
    grid: BlockGrid,
}

impl StegoContainer {
    /// Wrap a coefficient grid. Fails if the grid would not fit the format.
    pub fn new(grid: BlockGrid) -> Result<Self, ContainerError> {
        let (w, h) = (grid.blocks_w() * 8, grid.blocks_h() * 8);
        if w == 0 || h == 0 || w > u32::from(u16::MAX) || h > u32::from(u16::MAX) {
            return Err(ContainerError::BadDimensions(w, h));
        }
        for (i, v) in grid.blocks().iter().flat_map(|b| b.0).enumerate() {
            if !(COEFF_MIN..=COEFF_MAX).contains(&v) {
                return Err(ContainerError::CoefficientOutOfRange { index: i, value: v });
            }
        }
        Ok(Self {
            width: w as u16,
            height: h as u16,
            grid,
        })
    }

    pub fn width(&self) -> u32 {
        u32::from(self.width)
    }

    pub fn height(&self) -> u32 {
        u32::from(self.height)
    }

    pub fn grid(&self) -> &BlockGrid {
        &self.grid
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(CONTAINER_HEADER_BYTES + self.grid.len() * BLOCK_LEN * 2);
        out.extend_from_slice(&CONTAINER_MAGIC.to_be_bytes());
        out.extend_from_slice(&self.width.to_be_bytes());
        out.extend_from_slice(&self.height.to_be_bytes());
        for block in self.grid.blocks() {
            for c in block.0 {
                out.extend_from_slice(&c.to_be_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ContainerError> {
        if bytes.len() < 4 || bytes[..4] != CONTAINER_MAGIC.to_be_bytes() {
            return Err(ContainerError::BadMagic);
        }
        if bytes.len() < CONTAINER_HEADER_BYTES {
            return Err(ContainerError::Truncated {
                expected: CONTAINER_HEADER_BYTES,
                found: bytes.len(),
            });
        }
        let width = u16::from_be_bytes([bytes[4], bytes[5]]);
        let height = u16::from_be_bytes([bytes[6], bytes[7]]);
        if width == 0 || height == 0 || !width.is_multiple_of(8) || !height.is_multiple_of(8) {
            return Err(ContainerError::BadDimensions(width.into(), height.into()));
        }
        let (bw, bh) = (u32::from(width) / 8, u32::from(height) / 8);
        let expected = CONTAINER_HEADER_BYTES + usize::from(width) * usize::from(height) * 2;
        match bytes.len().cmp(&expected) {
            std::cmp::Ordering::Less => {
                return Err(ContainerError::Truncated {
                    expected,
                    found: bytes.len(),
                })
            }
            std::cmp::Ordering::Greater => {
                return Err(ContainerError::TrailingData(bytes.len() - expected))
            }
            std::cmp::Ordering::Equal => {}
        }
        let body = &bytes[CONTAINER_HEADER_BYTES..];
        let mut blocks = Vec::with_capacity(bw as usize * bh as usize);
        for (bi, chunk) in body.chunks_exact(BLOCK_LEN * 2).enumerate() {
            let mut block = CoeffBlock::ZERO;
            for (ci, pair) in chunk.chunks_exact(2).enumerate() {
                let v = i16::from_be_bytes([pair[0], pair[1]]);
                if !(COEFF_MIN..=COEFF_MAX).contains(&v) {
                    return Err(ContainerError::CoefficientOutOfRange {
                        index: bi * BLOCK_LEN + ci,
                        value: v,
                    });
                }
                block.0[ci] = v;
            }
            blocks.push(block);
        }
        let grid = BlockGrid::new(bw, bh, blocks).expect("block count matches dimensions");
        Ok(Self {
            width,
            height,
            grid,
        })
    }
}
