//! `dctsteg` command-line front end.
//!
//! stdout carries exactly one line of `key=value` pairs per successful
//! command; diagnostics go to stderr. Exit codes:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success                                   |
//! | 1    | usage error                               |
//! | 2    | payload does not fit the cover            |
//! | 3    | I/O error or malformed input file         |
//! | 4    | input is not a stego artifact / corrupt   |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::container::{StegoContainer, CONTAINER_MAGIC};
use crate::engine::{self, EmbedMode, EngineError, StegoArtifact};
use crate::frame::{self, parse_frame, SecretKind};
use crate::image::{read_pgm, write_pgm8, Image8, PgmImage};
use crate::metrics;

#[derive(Debug, Parser)]
#[command(
    name = "dctsteg",
    version,
    about = "Block-DCT LSB steganography for grayscale PGM images"
)]
pub struct CliConfig {
    /// Print progress and timing to stderr (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum ModeArg {
    #[default]
    Container,
    Spatial8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum KindArg {
    #[default]
    Bytes,
    Image,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hide a secret file in a cover image.
    Embed {
        #[arg(long)]
        cover: PathBuf,
        #[arg(long)]
        secret: PathBuf,
        /// `image` reads the secret as an 8-bit PGM and restores it as one.
        #[arg(long, value_enum, default_value_t)]
        secret_kind: KindArg,
        #[arg(long, value_enum, default_value_t)]
        mode: ModeArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the secret from a .dsc container or a spatial8 stego PGM.
    Extract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Report how many bits a cover can carry.
    Capacity {
        #[arg(long)]
        cover: PathBuf,
    },
    /// PSNR between two 8-bit PGM images.
    Psnr {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Describe the frame embedded in a stego artifact.
    Inspect {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug)]
enum Failure {
    TooLarge(String),
    Format(String),
    NotStego(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::TooLarge(_) => 2,
            Failure::Format(_) => 3,
            Failure::NotStego(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::TooLarge(m) | Failure::Format(m) | Failure::NotStego(m) => m,
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::PayloadTooLarge { .. } => Failure::TooLarge(e.to_string()),
            EngineError::Frame(
                frame::FrameError::EmptyInput
                | frame::FrameError::DimensionMismatch { .. }
                | frame::FrameError::SecretTooLarge(_),
            ) => Failure::Format(e.to_string()),
            EngineError::Frame(_) => Failure::NotStego(e.to_string()),
            EngineError::NotBlockAligned(_) | EngineError::Container(_) => {
                Failure::Format(e.to_string())
            }
        }
    }
}

type CmdResult = Result<String, Failure>;

/// Parse `args` (including the program name) and run the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let _ = writeln!(stderr, "{first}");
            return 1;
        }
    };
    match execute(&cfg, stderr) {
        Ok(line) => {
            let _ = writeln!(stdout, "{line}");
            0
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn execute(cfg: &CliConfig, stderr: &mut dyn Write) -> CmdResult {
    let started = Instant::now();
    let result = match &cfg.command {
        Command::Embed {
            cover,
            secret,
            secret_kind,
            mode,
            out,
        } => cmd_embed(cover, secret, *secret_kind, *mode, out, cfg.verbose, stderr),
        Command::Extract { input, out } => cmd_extract(input, out),
        Command::Capacity { cover } => cmd_capacity(cover),
        Command::Psnr { a, b } => cmd_psnr(a, b),
        Command::Inspect { input } => cmd_inspect(input),
    };
    if cfg.verbose > 0 {
        let _ = writeln!(
            stderr,
            "finished in {:.3}s",
            started.elapsed().as_secs_f64()
        );
    }
    result
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::Format(format!("{}: {e}", path.display())))
}

fn load_gray8(path: &Path) -> Result<Image8, Failure> {
    let bytes = read_file(path)?;
    match read_pgm(&bytes) {
        Ok(PgmImage::Gray8(img)) => Ok(img),
        Ok(PgmImage::Gray16(_)) => Err(Failure::Format(format!(
            "{}: 16-bit PGM not supported here",
            path.display()
        ))),
        Err(e) => Err(Failure::Format(format!("{}: {e}", path.display()))),
    }
}

/// Classify an input file as container or spatial stego image.
fn load_artifact(path: &Path) -> Result<StegoArtifact, Failure> {
    let bytes = read_file(path)?;
    if bytes.starts_with(&CONTAINER_MAGIC.to_be_bytes()) {
        let c = StegoContainer::from_bytes(&bytes)
            .map_err(|e| Failure::Format(format!("{}: {e}", path.display())))?;
        return Ok(StegoArtifact::Container(c));
    }
    if bytes.starts_with(b"P5") {
        return match read_pgm(&bytes) {
            Ok(PgmImage::Gray8(img)) => Ok(StegoArtifact::Image(img)),
            Ok(PgmImage::Gray16(_)) => Err(Failure::NotStego(format!(
                "{}: 16-bit PGM cannot carry a payload",
                path.display()
            ))),
            Err(e) => Err(Failure::Format(format!("{}: {e}", path.display()))),
        };
    }
    Err(Failure::NotStego(format!(
        "{}: neither a .dsc container nor a PGM image",
        path.display()
    )))
}

fn cmd_embed(
    cover: &Path,
    secret: &Path,
    kind: KindArg,
    mode: ModeArg,
    out: &Path,
    verbose: u8,
    stderr: &mut dyn Write,
) -> CmdResult {
    let cover_img = load_gray8(cover)?;
    let (secret_bytes, secret_kind) = match kind {
        KindArg::Bytes => (read_file(secret)?, SecretKind::Bytes),
        KindArg::Image => {
            let img = load_gray8(secret)?;
            let (w, h) = (img.width(), img.height());
            let dims = u16::try_from(w)
                .ok()
                .zip(u16::try_from(h).ok())
                .ok_or_else(|| {
                    Failure::Format(format!(
                        "secret image {w}x{h} exceeds 65535 pixels per side"
                    ))
                })?;
            (
                img.into_pixels(),
                SecretKind::Image {
                    width: dims.0,
                    height: dims.1,
                },
            )
        }
    };
    let frame = frame::build_frame(&secret_bytes, secret_kind).map_err(EngineError::from)?;
    let mode = match mode {
        ModeArg::Container => EmbedMode::Container,
        ModeArg::Spatial8 => EmbedMode::Spatial8,
    };
    let cap = engine::capacity(cover_img.width(), cover_img.height()).map_err(EngineError::from)?;
    if verbose > 0 {
        let _ = writeln!(
            stderr,
            "secret {} bytes -> {} payload bits, frame {} bits, cover {} slots",
            secret_bytes.len(),
            frame.header().payload_bit_length,
            frame.len(),
            cap.raw_slots
        );
    }
    let (artifact, report) = engine::embed(&cover_img, &frame, mode)?;
    let (bytes, mode_name) = match &artifact {
        StegoArtifact::Container(c) => (c.to_bytes(), "container"),
        StegoArtifact::Image(img) => (write_pgm8(img), "spatial8"),
    };
    write_file(out, &bytes)?;
    if report.spatial_mode_bit_errors > 0 {
        let _ = writeln!(
            stderr,
            "warning: {} bits in {} blocks could not be made to survive 8-bit rendering",
            report.spatial_mode_bit_errors, report.blocks_with_errors
        );
    }
    Ok(format!(
        "mode={mode_name} payload_bits={} frame_bits={} blocks_used={} raw_slots={} psnr_db={} mse={:.6} residual_bit_errors={} blocks_with_errors={}",
        report.payload_bits,
        report.frame_bits,
        report.blocks_used,
        cap.raw_slots,
        report.psnr,
        report.mse,
        report.spatial_mode_bit_errors,
        report.blocks_with_errors,
    ))
}

fn cmd_extract(input: &Path, out: &Path) -> CmdResult {
    let artifact = load_artifact(input)?;
    let (secret, header) = engine::extract(&artifact)?;
    let line = match header.kind {
        SecretKind::Bytes => {
            write_file(out, &secret)?;
            format!("secret_kind=bytes symbol_count={}", header.symbol_count)
        }
        SecretKind::Image { width, height } => {
            let img = Image8::new(width.into(), height.into(), secret)
                .map_err(|e| Failure::NotStego(e.to_string()))?;
            write_file(out, &write_pgm8(&img))?;
            format!(
                "secret_kind=image symbol_count={} width={width} height={height}",
                header.symbol_count
            )
        }
    };
    Ok(line)
}

fn cmd_capacity(cover: &Path) -> CmdResult {
    let img = load_gray8(cover)?;
    let cap = engine::capacity(img.width(), img.height()).map_err(EngineError::from)?;
    Ok(format!(
        "raw_slots={} payload_bits={}",
        cap.raw_slots, cap.payload_bits
    ))
}

fn cmd_psnr(a: &Path, b: &Path) -> CmdResult {
    let (a, b) = (load_gray8(a)?, load_gray8(b)?);
    let score = metrics::psnr(&a, &b).map_err(|e| Failure::Format(e.to_string()))?;
    Ok(format!("psnr_db={} mse={:.6}", score.psnr, score.mse))
}

fn cmd_inspect(input: &Path) -> CmdResult {
    let artifact = load_artifact(input)?;
    let (kind, grid) = match &artifact {
        StegoArtifact::Container(c) => ("container", c.grid().clone()),
        StegoArtifact::Image(img) => (
            "spatial8",
            engine::analyze_image(img).map_err(EngineError::from)?,
        ),
    };
    let parsed = parse_frame(&engine::collect_bits(&grid)).map_err(EngineError::from)?;
    // A frame whose payload does not decode is corrupt, not just unusual.
    parsed.decode_secret().map_err(EngineError::from)?;
    let h = parsed.header;
    let (secret_kind, sw, sh) = match h.kind {
        SecretKind::Bytes => ("bytes", 0, 0),
        SecretKind::Image { width, height } => ("image", width, height),
    };
    Ok(format!(
        "artifact={kind} width={} height={} version={} secret_kind={secret_kind} secret_width={sw} secret_height={sh} symbol_count={} payload_bits={} frame_bits={} blocks_used={} table_symbols={} max_code_length={}",
        grid.blocks_w() * 8,
        grid.blocks_h() * 8,
        h.version,
        h.symbol_count,
        h.payload_bit_length,
        h.frame_bits(),
        h.frame_bits() / frame::GROUP_BITS,
        parsed.table.used_symbols(),
        parsed.table.max_length(),
    ))
}
