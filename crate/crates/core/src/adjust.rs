//! Rendering a payload-carrying coefficient block to 8-bit pixels so that
//! re-transforming those pixels reproduces every embedded LSB.
//!
//! Rounding pixels to integers perturbs each coefficient by a few tenths,
//! which flips roughly one LSB in twelve, so a plain render almost never
//! survives. The block is instead searched for: starting from the plain
//! render, each round considers
//!
//! * re-rendering with one coefficient target moved by ±2 (LSB preserved), and
//! * nudging one pixel by ±1,
//!
//! scores every candidate by how far its coefficients sit outside their
//! parity-correct rounding intervals, and moves to the best candidate not
//! visited before. The visited set keeps the walk from cycling.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::dct::{basis, forward_raw, inverse_raw, quantize_one, CoeffBlock, BLOCK_LEN};

/// Upper bound on search rounds per block.
pub const MAX_ADJUST_ROUNDS: u32 = 256;

/// Candidates are scored against an interval this much narrower than ±0.5,
/// so accepted blocks are not balanced on a rounding edge.
const SCORE_MARGIN: f64 = 0.02;

/// Round budget for the search from the unshifted render.
pub const FIRST_PASS_ROUNDS: u32 = 128;

/// Pixel headroom kept from 0 and 255 before searching.
const HEADROOM: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjustOutcome {
    pub pixels: [u8; BLOCK_LEN],
    /// Embedded bits that the returned pixels still fail to reproduce.
    pub residual_errors: u32,
    /// Search rounds taken (0 when the plain render already works).
    pub rounds: u32,
}

/// `table()[k][i]`: weight of pixel `i` in coefficient `k`. The transform is
/// orthonormal, so the same table maps a unit coefficient back to pixels.
fn table() -> &'static [[f64; BLOCK_LEN]; BLOCK_LEN] {
    static TABLE: OnceLock<[[f64; BLOCK_LEN]; BLOCK_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m = basis();
        let mut t = [[0.0; BLOCK_LEN]; BLOCK_LEN];
        for (k, row) in t.iter_mut().enumerate() {
            let (u, v) = (k / 8, k % 8);
            for (i, w) in row.iter_mut().enumerate() {
                let (x, y) = (i / 8, i % 8);
                *w = m[u][x] * m[v][y];
            }
        }
        t
    })
}

#[inline]
fn wanted_bit(bits: u64, k: usize) -> i64 {
    ((bits >> (63 - k)) & 1) as i64
}

/// Number of coefficients of `pixels` whose quantized LSB differs from `bits`.
pub fn lsb_mismatches(pixels: &[u8; BLOCK_LEN], bits: u64) -> u32 {
    let coeffs = forward_raw(&pixels.map(f64::from));
    coeffs
        .iter()
        .enumerate()
        .filter(|&(k, &c)| i64::from(quantize_one(c) & 1) != wanted_bit(bits, k))
        .count() as u32
}

/// Nearest integer to `c` whose parity is `bit`.
#[inline]
fn parity_target(c: f64, bit: i64) -> f64 {
    2.0 * ((c - bit as f64) / 2.0).round() + bit as f64
}

fn score(coeffs: &[f64; BLOCK_LEN], bits: u64) -> f64 {
    let mut s = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let d = (c - parity_target(c, wanted_bit(bits, k))).abs() - (0.5 - SCORE_MARGIN);
        if d > 0.0 {
            s += d * d;
        }
    }
    s
}

fn round_clamp(z: &[f64; BLOCK_LEN]) -> [u8; BLOCK_LEN] {
    z.map(|v| v.round().clamp(0.0, 255.0) as u8)
}

/// Shift the DC target (by an even amount) so the rendered block keeps
/// [`HEADROOM`] away from the clamp limits on whichever side is pressed.
fn relieve_clamping(target: &mut [f64; BLOCK_LEN]) {
    let z = inverse_raw(target);
    let max = z.iter().copied().fold(f64::MIN, f64::max);
    let min = z.iter().copied().fold(f64::MAX, f64::min);
    let over = max - (255.0 - HEADROOM);
    let under = HEADROOM - min;
    // A unit DC step moves every pixel by 1/8.
    if over > 0.0 && under <= 0.0 {
        let steps = (over * 4.0).ceil().min((-under * 4.0).floor()).max(0.0);
        target[0] -= 2.0 * steps;
    } else if under > 0.0 && over <= 0.0 {
        let steps = (under * 4.0).ceil().min((-over * 4.0).floor()).max(0.0);
        target[0] += 2.0 * steps;
    }
}

/// Render `coeffs` (which already carry `bits` in their LSBs, first bit in
/// coefficient 0) to pixels whose forward transform reproduces `bits`.
///
/// The search first runs from the plain render with at most
/// [`FIRST_PASS_ROUNDS`] rounds; blocks pressed against 0 or 255 that do not
/// settle are retried with the DC shifted away from the limit.
pub fn verify_adjust_block(coeffs: &CoeffBlock, bits: u64) -> AdjustOutcome {
    let mut target = coeffs.0.map(f64::from);
    let plain = round_clamp(&inverse_raw(&target));
    let plain_errors = lsb_mismatches(&plain, bits);
    if plain_errors == 0 {
        return AdjustOutcome {
            pixels: plain,
            residual_errors: 0,
            rounds: 0,
        };
    }
    let mut best = AdjustOutcome {
        pixels: plain,
        residual_errors: plain_errors,
        rounds: 0,
    };
    let first = search(plain, bits, FIRST_PASS_ROUNDS, &mut best, 0);
    if best.residual_errors == 0 {
        return best;
    }
    relieve_clamping(&mut target);
    let start = round_clamp(&inverse_raw(&target));
    search(start, bits, MAX_ADJUST_ROUNDS - first, &mut best, first);
    best
}

/// Tabu walk from `pixels`; improves `best` in place and returns the rounds used.
fn search(
    mut pixels: [u8; BLOCK_LEN],
    bits: u64,
    max_rounds: u32,
    best: &mut AdjustOutcome,
    rounds_before: u32,
) -> u32 {
    let t = table();
    let mut visited: HashSet<[u8; BLOCK_LEN]> = HashSet::new();

    for round in 1..=max_rounds {
        let coeffs_now = forward_raw(&pixels.map(f64::from));
        let errors = lsb_mismatches(&pixels, bits);
        if errors < best.residual_errors {
            *best = AdjustOutcome {
                pixels,
                residual_errors: errors,
                rounds: rounds_before + round,
            };
        }
        if errors == 0 {
            return round;
        }
        visited.insert(pixels);

        let mut aim = [0.0; BLOCK_LEN];
        for (k, a) in aim.iter_mut().enumerate() {
            *a = parity_target(coeffs_now[k], wanted_bit(bits, k));
        }
        let base = inverse_raw(&aim);

        let mut chosen: Option<([u8; BLOCK_LEN], f64)> = None;
        let mut consider = |cand: [u8; BLOCK_LEN], s: f64| {
            if chosen.as_ref().is_none_or(|(_, bs)| s < *bs) && !visited.contains(&cand) {
                chosen = Some((cand, s));
            }
        };

        // Move one coefficient target by ±2 and re-render.
        for basis_k in t.iter() {
            for step in [2.0, -2.0] {
                let mut z = base;
                for (zi, &w) in z.iter_mut().zip(basis_k.iter()) {
                    *zi += step * w;
                }
                let cand = round_clamp(&z);
                let s = score(&forward_raw(&cand.map(f64::from)), bits);
                consider(cand, s);
            }
        }

        // Nudge one pixel by ±1; the coefficient change is one table column.
        for i in 0..BLOCK_LEN {
            for step in [1i16, -1] {
                let v = i16::from(pixels[i]) + step;
                if !(0..=255).contains(&v) {
                    continue;
                }
                let mut moved = coeffs_now;
                for (k, m) in moved.iter_mut().enumerate() {
                    *m += f64::from(step) * t[k][i];
                }
                let mut cand = pixels;
                cand[i] = v as u8;
                consider(cand, score(&moved, bits));
            }
        }

        match chosen {
            Some((next, _)) => pixels = next,
            None => return round,
        }
    }
    max_rounds
}
