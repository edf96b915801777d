//! Mean squared error and peak signal-to-noise ratio between 8-bit images.

use std::fmt;

use thiserror::Error;

use crate::image::Image8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("images differ in size: {a:?} vs {b:?}")]
pub struct DimensionMismatch {
    pub a: (u32, u32),
    pub b: (u32, u32),
}

/// PSNR in decibels; identical images have no finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Finite(f64),
    Infinite,
}

impl Psnr {
    pub fn from_mse(mse: f64) -> Self {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Finite(10.0 * (255.0f64 * 255.0 / mse).log10())
        }
    }

    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Psnr::Infinite)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.4}"),
            Psnr::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityScore {
    pub mse: f64,
    pub psnr: Psnr,
}

fn check_dims(f: &Image8, g: &Image8) -> Result<(), DimensionMismatch> {
    if (f.width(), f.height()) != (g.width(), g.height()) {
        return Err(DimensionMismatch {
            a: (f.width(), f.height()),
            b: (g.width(), g.height()),
        });
    }
    Ok(())
}

pub fn mse(f: &Image8, g: &Image8) -> Result<f64, DimensionMismatch> {
    check_dims(f, g)?;
    let n = f.pixels().len();
    if n == 0 {
        return Ok(0.0);
    }
    // Exact integer accumulation; 255² · 2³² still fits in u64.
    let sse: u64 = f
        .pixels()
        .iter()
        .zip(g.pixels())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum();
    Ok(sse as f64 / n as f64)
}

pub fn psnr(f: &Image8, g: &Image8) -> Result<QualityScore, DimensionMismatch> {
    let mse = mse(f, g)?;
    Ok(QualityScore {
        mse,
        psnr: Psnr::from_mse(mse),
    })
}
