//! Embedding frames into coefficient LSBs and extracting them again.
//!
//! Every coefficient of every block carries one frame bit, DC included:
//! block `i` holds bits `64 i .. 64 i + 63`, coefficient `k` of the block
//! holding bit `64 i + k`. Blocks past the end of the frame are left as the
//! quantized cover coefficients.
//!
//! Two artifacts are supported:
//!
//! * **container** – the integer coefficients themselves, written as a
//!   [`StegoContainer`]. Extraction is exact by construction.
//! * **spatial8** – an ordinary 8-bit image. Each used block is rendered with
//!   [`verify_adjust_block`] so that re-transforming recovers the bits; blocks
//!   it could not fix are counted in the report.

use rayon::prelude::*;
use thiserror::Error;

use crate::adjust::verify_adjust_block;
use crate::bits::Bitstream;
use crate::container::{ContainerError, StegoContainer};
use crate::dct::{
    block_dims, dequantize, inverse_dct, put_block, BlockGrid, CoeffBlock, NotBlockAligned,
    BLOCK_LEN,
};
use crate::frame::{parse_frame, FrameError, PayloadFrame, PayloadHeader, HEADER_BITS};
use crate::huffman::TABLE_BITS;
use crate::image::Image8;
use crate::metrics::{self, Psnr};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    NotBlockAligned(#[from] NotBlockAligned),
    #[error("payload too large: frame needs {frame_bits} bits, cover has {raw_slots} slots")]
    PayloadTooLarge { frame_bits: usize, raw_slots: usize },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Container(#[from] ContainerError),
}

/// Replace the two's-complement bit 0 of `c`.
#[inline]
pub fn set_lsb(c: i16, bit: bool) -> i16 {
    (c & !1) | i16::from(bit)
}

#[inline]
pub fn get_lsb(c: i16) -> bool {
    c & 1 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    /// One slot per coefficient.
    pub raw_slots: u64,
    /// Slots left for the compressed secret after header and table.
    pub payload_bits: u64,
}

pub fn capacity(width: u32, height: u32) -> Result<Capacity, NotBlockAligned> {
    let (bw, bh) = block_dims(width, height)?;
    let raw_slots = u64::from(bw) * u64::from(bh) * BLOCK_LEN as u64;
    Ok(Capacity {
        raw_slots,
        payload_bits: raw_slots.saturating_sub((HEADER_BITS + TABLE_BITS) as u64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EmbedMode {
    #[default]
    Container,
    Spatial8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StegoArtifact {
    Container(StegoContainer),
    Image(Image8),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedReport {
    pub blocks_used: usize,
    /// Compressed secret length (header `payload_bit_length`).
    pub payload_bits: u64,
    /// Full frame length including header, table and padding.
    pub frame_bits: u64,
    /// Rendered stego image against the cover.
    pub psnr: Psnr,
    pub mse: f64,
    /// Embedded bits a spatial8 image fails to reproduce; always 0 for containers.
    pub spatial_mode_bit_errors: u64,
    /// Used blocks that still carry at least one wrong bit (spatial8 only).
    pub blocks_with_errors: usize,
}

/// Write `group` into the LSBs of `block`, first bit into coefficient 0.
pub fn embed_group(block: &mut CoeffBlock, group: u64) {
    for (k, c) in block.0.iter_mut().enumerate() {
        *c = set_lsb(*c, (group >> (63 - k)) & 1 == 1);
    }
}

/// Read a block's 64 LSBs back into a group.
pub fn read_group(block: &CoeffBlock) -> u64 {
    block
        .0
        .iter()
        .fold(0u64, |acc, &c| (acc << 1) | u64::from(get_lsb(c)))
}

pub fn embed(
    cover: &Image8,
    frame: &PayloadFrame,
    mode: EmbedMode,
) -> Result<(StegoArtifact, EmbedReport), EngineError> {
    let cap = capacity(cover.width(), cover.height())?;
    if frame.len() as u64 > cap.raw_slots {
        return Err(EngineError::PayloadTooLarge {
            frame_bits: frame.len(),
            raw_slots: cap.raw_slots as usize,
        });
    }
    let groups = frame.groups();
    let mut grid = BlockGrid::from_image(cover)?;
    for (block, &g) in grid.blocks_mut().iter_mut().zip(&groups) {
        embed_group(block, g);
    }
    let mut report = EmbedReport {
        blocks_used: groups.len(),
        payload_bits: u64::from(frame.header().payload_bit_length),
        frame_bits: frame.len() as u64,
        psnr: Psnr::Infinite,
        mse: 0.0,
        spatial_mode_bit_errors: 0,
        blocks_with_errors: 0,
    };

    let (artifact, rendered) = match mode {
        EmbedMode::Container => {
            let container = StegoContainer::new(grid)?;
            let rendered = render(&container);
            (StegoArtifact::Container(container), rendered)
        }
        EmbedMode::Spatial8 => {
            let outcomes: Vec<_> = grid.blocks()[..groups.len()]
                .par_iter()
                .zip(groups.par_iter())
                .map(|(block, &g)| verify_adjust_block(block, g))
                .collect();
            let mut image = cover.clone();
            for (i, out) in outcomes.iter().enumerate() {
                put_block(&mut image, i, &out.pixels);
                report.spatial_mode_bit_errors += u64::from(out.residual_errors);
                report.blocks_with_errors += usize::from(out.residual_errors > 0);
            }
            (StegoArtifact::Image(image.clone()), image)
        }
    };
    let score = metrics::psnr(cover, &rendered).expect("render keeps cover dimensions");
    report.psnr = score.psnr;
    report.mse = score.mse;
    Ok((artifact, report))
}

/// Dequantize, inverse-transform, round and clamp every block.
pub fn render(container: &StegoContainer) -> Image8 {
    render_grid(container.grid())
}

fn render_grid(grid: &BlockGrid) -> Image8 {
    let mut img = Image8::filled(grid.blocks_w() * 8, grid.blocks_h() * 8, 0);
    let blocks: Vec<[u8; BLOCK_LEN]> = grid
        .blocks()
        .par_iter()
        .map(|b| inverse_dct(&dequantize(b)).to_u8())
        .collect();
    for (i, b) in blocks.iter().enumerate() {
        put_block(&mut img, i, b);
    }
    img
}

/// Quantized coefficients of an 8-bit stego image, as the extractor sees them.
pub fn analyze_image(img: &Image8) -> Result<BlockGrid, NotBlockAligned> {
    BlockGrid::from_image(img)
}

/// Concatenate the LSB groups of `grid`.
pub fn collect_bits(grid: &BlockGrid) -> Bitstream {
    let groups: Vec<u64> = grid.blocks().iter().map(read_group).collect();
    crate::frame::join_groups(&groups)
}

/// Recover the secret bytes and header from coefficient LSBs.
pub fn extract_grid(grid: &BlockGrid) -> Result<(Vec<u8>, PayloadHeader), EngineError> {
    let parsed = parse_frame(&collect_bits(grid))?;
    let secret = parsed.decode_secret()?;
    Ok((secret, parsed.header))
}

pub fn extract(stego: &StegoArtifact) -> Result<(Vec<u8>, PayloadHeader), EngineError> {
    match stego {
        StegoArtifact::Container(c) => extract_grid(c.grid()),
        StegoArtifact::Image(img) => extract_grid(&analyze_image(img)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dct::block_samples;
    use crate::frame::{build_frame, SecretKind};
    use proptest::prelude::*;

    #[test]
    fn lsb_examples() {
        assert_eq!(set_lsb(13, false), 12);
        assert_eq!(set_lsb(-6, true), -5);
        assert_eq!(set_lsb(0, true), 1);
        assert_eq!(set_lsb(-1, false), -2);
        assert!(get_lsb(13));
        assert!(!get_lsb(-6));
        assert!(!get_lsb(0));
        assert!(get_lsb(-1));
    }

    #[test]
    fn lsb_exhaustive() {
        for c in crate::dct::COEFF_MIN..=crate::dct::COEFF_MAX {
            for b in [false, true] {
                let s = set_lsb(c, b);
                assert_eq!(get_lsb(s), b);
                assert!((i32::from(s) - i32::from(c)).abs() <= 1);
                assert_eq!(set_lsb(s, b), s);
            }
        }
    }

    #[test]
    fn capacity_arithmetic() {
        assert_eq!(
            capacity(512, 512).unwrap(),
            Capacity {
                raw_slots: 262_144,
                payload_bits: 259_968
            }
        );
        assert_eq!(capacity(64, 64).unwrap().payload_bits, 1_920);
        assert_eq!(
            capacity(8, 8).unwrap(),
            Capacity {
                raw_slots: 64,
                payload_bits: 0
            }
        );
        assert!(capacity(12, 8).is_err());
    }

    #[test]
    fn group_bit_order() {
        let mut b = CoeffBlock::ZERO;
        embed_group(&mut b, 1 << 63);
        assert_eq!(b.0[0], 1);
        assert!(b.0[1..].iter().all(|&c| c == 0));
        assert_eq!(read_group(&b), 1 << 63);
    }

    #[test]
    fn zero_frame_into_gray_cover() {
        let cover = Image8::filled(64, 64, 128);
        let frame = build_frame(b"x", SecretKind::Bytes).unwrap();
        let (art, _) = embed(&cover, &frame, EmbedMode::Container).unwrap();
        let StegoArtifact::Container(c) = &art else {
            panic!()
        };
        // Constant 128 blocks quantize to DC 1024 and zero AC.
        let block0 = c.grid().blocks()[0];
        assert_eq!(block0.0[0] & !1, 1024);
        let used = frame.groups().len();
        for (i, b) in c.grid().blocks().iter().enumerate() {
            if i < used {
                assert_eq!(read_group(b), frame.groups()[i]);
            } else {
                assert_eq!(b.0[0], 1024);
                assert!(b.0[1..].iter().all(|&v| v == 0));
            }
        }
        assert_eq!(extract(&art).unwrap().0, b"x");
    }

    #[test]
    fn all_zero_groups_leave_even_coefficients() {
        let cover = Image8::filled(64, 64, 128);
        let mut grid = BlockGrid::from_image(&cover).unwrap();
        for b in grid.blocks_mut().iter_mut().take(10) {
            embed_group(b, 0);
        }
        assert!(grid.blocks()[..10]
            .iter()
            .all(|b| b.0.iter().all(|c| c % 2 == 0)));
        assert_eq!(grid.blocks()[0].0[0], 1024);
    }

    #[test]
    fn too_small_cover() {
        let frame = build_frame(b"hi", SecretKind::Bytes).unwrap();
        let err = embed(&Image8::filled(8, 8, 0), &frame, EmbedMode::Container).unwrap_err();
        assert_eq!(
            err,
            EngineError::PayloadTooLarge {
                frame_bits: 2240,
                raw_slots: 64
            }
        );
        assert!(matches!(
            embed(&Image8::filled(10, 8, 0), &frame, EmbedMode::Container),
            Err(EngineError::NotBlockAligned(_))
        ));
    }

    #[test]
    fn render_trivial_grids() {
        let zero = BlockGrid::new(2, 1, vec![CoeffBlock::ZERO; 2]).unwrap();
        let c = StegoContainer::new(zero).unwrap();
        assert!(render(&c).pixels().iter().all(|&p| p == 0));
        let mut dc = CoeffBlock::ZERO;
        dc.0[0] = 1024;
        let c = StegoContainer::new(BlockGrid::new(1, 2, vec![dc; 2]).unwrap()).unwrap();
        assert!(render(&c).pixels().iter().all(|&p| p == 128));
    }

    #[test]
    fn plain_image_is_not_a_payload() {
        let cover = Image8::filled(64, 64, 90);
        assert!(matches!(
            extract(&StegoArtifact::Image(cover)),
            Err(EngineError::Frame(FrameError::BadMagic(_)))
        ));
    }

    #[test]
    fn spatial_round_trip_small() {
        let px: Vec<u8> = (0..64 * 64u32)
            .map(|i| (60 + (i * 7 + i / 64 * 3) % 120) as u8)
            .collect();
        let cover = Image8::new(64, 64, px).unwrap();
        let frame = build_frame(b"ab", SecretKind::Bytes).unwrap();
        let (art, report) = embed(&cover, &frame, EmbedMode::Spatial8).unwrap();
        assert_eq!(report.spatial_mode_bit_errors, 0);
        assert_eq!(report.blocks_used, 35);
        assert_eq!(extract(&art).unwrap().0, b"ab");
        // Blocks beyond the frame are the cover's own pixels.
        let StegoArtifact::Image(img) = &art else {
            panic!()
        };
        for i in report.blocks_used..64 {
            assert_eq!(block_samples(img, i), block_samples(&cover, i));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn container_round_trip(seed in any::<u64>(), len in 1usize..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let px: Vec<u8> = (0..64 * 64).map(|_| rng.gen()).collect();
            let cover = Image8::new(64, 64, px).unwrap();
            let secret: Vec<u8> = (0..len).map(|_| rng.gen_range(0..8)).collect();
            let frame = build_frame(&secret, SecretKind::Bytes).unwrap();
            let (art, report) = embed(&cover, &frame, EmbedMode::Container).unwrap();
            prop_assert_eq!(report.spatial_mode_bit_errors, 0);
            let (got, header) = extract(&art).unwrap();
            prop_assert_eq!(got, secret);
            prop_assert_eq!(header, *frame.header());
            // untouched blocks equal the cover's quantized DCT
            let StegoArtifact::Container(c) = &art else { unreachable!() };
            let original = BlockGrid::from_image(&cover).unwrap();
            for i in report.blocks_used..original.len() {
                prop_assert_eq!(c.grid().blocks()[i], original.blocks()[i]);
            }
            let bits = collect_bits(c.grid());
            prop_assert_eq!(bits.slice(0, frame.len()), frame.bits().clone());
        }

        #[test]
        fn capacity_is_monotone(w in 0u32..200, h in 0u32..200) {
            let (w, h) = (w * 8, h * 8);
            let c = capacity(w, h).unwrap();
            prop_assert!(capacity(w + 8, h).unwrap().payload_bits >= c.payload_bits);
            prop_assert!(capacity(w, h + 8).unwrap().payload_bits >= c.payload_bits);
        }
    }
}
