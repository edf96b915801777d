//! Hide Huffman-compressed secrets in the LSBs of 8×8 block-DCT
//! coefficients of grayscale images, and get them back.
//!
//! The pipeline, end to end:
//!
//! 1. [`frame::build_frame`] compresses the secret with a canonical Huffman
//!    code and lays out header, code-length table and payload.
//! 2. [`engine::embed`] splits the cover into 8×8 blocks, quantizes each
//!    block's DCT to integers and writes 64 frame bits into the LSBs of
//!    each block's coefficients.
//! 3. The result is either a lossless coefficient container or an 8-bit
//!    image rendered so that the bits survive re-transformation.
//! 4. [`engine::extract`] reads the LSBs back, parses the frame and decodes
//!    the secret.
//!
//! ```
//! use dctsteg::{embed, extract, build_frame, EmbedMode, Image8, SecretKind};
//!
//! let cover = Image8::filled(64, 64, 120);
//! let frame = build_frame(b"meet at dawn", SecretKind::Bytes).unwrap();
//! let (stego, report) = embed(&cover, &frame, EmbedMode::Container).unwrap();
//! assert_eq!(report.spatial_mode_bit_errors, 0);
//! let (secret, _header) = extract(&stego).unwrap();
//! assert_eq!(secret, b"meet at dawn");
//! ```

pub mod adjust;
pub mod bits;
pub mod cli;
pub mod container;
pub mod dct;
pub mod engine;
pub mod frame;
pub mod huffman;
pub mod image;
pub mod metrics;

pub use adjust::{verify_adjust_block, AdjustOutcome};
pub use bits::Bitstream;
pub use container::StegoContainer;
pub use engine::{
    capacity, embed, extract, render, Capacity, EmbedMode, EmbedReport, EngineError, StegoArtifact,
};
pub use frame::{build_frame, parse_frame, PayloadFrame, PayloadHeader, SecretKind};
pub use huffman::HuffmanTable;
pub use image::{read_pgm, write_pgm, Image16, Image8, PgmImage};
pub use metrics::{mse, psnr, Psnr, QualityScore};
