//! Canonical Huffman coding over byte symbols.
//!
//! A table is fully described by its 256 code lengths. Codewords are
//! assigned in `(length, symbol)` order, so the lengths alone are enough to
//! rebuild the code on the decoding side. On the wire the table is 256
//! unsigned 8-bit lengths, symbol 0 first: 2048 bits.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::bits::Bitstream;

pub const ALPHABET: usize = 256;
/// Serialized table size in bits.
pub const TABLE_BITS: usize = ALPHABET * 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HuffmanError {
    #[error("cannot build a Huffman table from empty input")]
    EmptyInput,
    #[error("symbol {0:#04x} has no code in the table")]
    SymbolNotInTable(u8),
    #[error("invalid Huffman code ending at bit {0}")]
    InvalidCode(usize),
    #[error("Huffman stream ended after {decoded} of {expected} symbols")]
    TruncatedStream { decoded: usize, expected: usize },
    #[error("{0} bits left over after the last symbol")]
    TrailingBits(usize),
    #[error("serialized table must be {TABLE_BITS} bits, got {0}")]
    WrongLength(usize),
    #[error("code lengths do not form a prefix code (Kraft sum exceeds 1)")]
    KraftViolation,
}

#[derive(Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    lengths: [u8; ALPHABET],
    /// `counts[len]`: number of codewords of that length.
    counts: [u16; ALPHABET],
    /// Coded symbols ordered by `(length, symbol)`.
    sorted: Vec<u8>,
}

impl std::fmt::Debug for HuffmanTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let used: Vec<(u8, u8)> = self
            .sorted
            .iter()
            .map(|&s| (s, self.lengths[s as usize]))
            .collect();
        f.debug_struct("HuffmanTable")
            .field("codes", &used)
            .finish()
    }
}

impl HuffmanTable {
    /// Build from explicit code lengths (0 = symbol absent). Fails when two
    /// or more symbols are present and their lengths over-subscribe the code
    /// space.
    pub fn from_lengths(lengths: [u8; ALPHABET]) -> Result<Self, HuffmanError> {
        let mut counts = [0u16; ALPHABET];
        for &l in &lengths {
            if l > 0 {
                counts[l as usize] += 1;
            }
        }
        let used: usize = counts.iter().map(|&c| c as usize).sum();
        if used >= 2 {
            // Unused code points at the current depth. Once it reaches the
            // number of symbols still to place it can never go negative.
            let mut left: i64 = 1;
            let mut unplaced = used as i64;
            for &c in &counts[1..] {
                left = left * 2 - i64::from(c);
                unplaced -= i64::from(c);
                if left < 0 {
                    return Err(HuffmanError::KraftViolation);
                }
                if left >= unplaced {
                    break;
                }
            }
        }
        let mut sorted: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
        sorted.sort_by_key(|&s| (lengths[s as usize], s));
        Ok(Self {
            lengths,
            counts,
            sorted,
        })
    }

    /// Optimal code for the given symbol frequencies.
    pub fn from_frequencies(freqs: &[u64; ALPHABET]) -> Result<Self, HuffmanError> {
        let present: Vec<usize> = (0..ALPHABET).filter(|&s| freqs[s] > 0).collect();
        let mut lengths = [0u8; ALPHABET];
        match present.len() {
            0 => return Err(HuffmanError::EmptyInput),
            // A zero-length code could not be counted out of a stream.
            1 => lengths[present[0]] = 1,
            _ => {
                // Node ids: leaves are their symbol, internal nodes 256 + k.
                // Ties on weight go to the smaller id, so leaves merge first.
                let mut parent: Vec<usize> = vec![usize::MAX; ALPHABET];
                let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
                    present.iter().map(|&s| Reverse((freqs[s], s))).collect();
                while heap.len() > 1 {
                    let Reverse((wa, a)) = heap.pop().expect("heap has two nodes");
                    let Reverse((wb, b)) = heap.pop().expect("heap has two nodes");
                    let id = parent.len();
                    parent.push(usize::MAX);
                    parent[a] = id;
                    parent[b] = id;
                    heap.push(Reverse((wa.saturating_add(wb), id)));
                }
                // Parents are always created after their children, so walking
                // ids downwards resolves every depth in one pass.
                let mut depth = vec![0u32; parent.len()];
                for id in (0..parent.len()).rev() {
                    if parent[id] != usize::MAX {
                        depth[id] = depth[parent[id]] + 1;
                    }
                }
                for &s in &present {
                    // At most 256 leaves, so depth <= 255.
                    lengths[s] = depth[s] as u8;
                }
            }
        }
        Self::from_lengths(lengths)
    }

    pub fn code_lengths(&self) -> &[u8; ALPHABET] {
        &self.lengths
    }

    pub fn length(&self, symbol: u8) -> u8 {
        self.lengths[symbol as usize]
    }

    /// Number of symbols with a codeword.
    pub fn used_symbols(&self) -> usize {
        self.sorted.len()
    }

    pub fn max_length(&self) -> u8 {
        self.sorted
            .last()
            .map(|&s| self.lengths[s as usize])
            .unwrap_or(0)
    }

    /// Canonical codeword of every symbol, `None` for absent symbols.
    pub fn codewords(&self) -> Vec<Option<Bitstream>> {
        let mut out = vec![None; ALPHABET];
        // Current code as a big-endian bit vector; lengths can exceed 64.
        let mut code: Vec<bool> = Vec::new();
        for (i, &s) in self.sorted.iter().enumerate() {
            let len = self.lengths[s as usize] as usize;
            if i > 0 {
                // increment
                let mut pos = code.len();
                while pos > 0 {
                    pos -= 1;
                    if code[pos] {
                        code[pos] = false;
                    } else {
                        code[pos] = true;
                        break;
                    }
                }
            }
            code.resize(len, false);
            out[s as usize] = Some(code.iter().copied().collect());
        }
        out
    }
}

/// Optimal canonical table for `data`'s byte histogram.
pub fn build_table(data: &[u8]) -> Result<HuffmanTable, HuffmanError> {
    let mut freqs = [0u64; ALPHABET];
    for &b in data {
        freqs[b as usize] += 1;
    }
    HuffmanTable::from_frequencies(&freqs)
}

pub fn encode(data: &[u8], table: &HuffmanTable) -> Result<Bitstream, HuffmanError> {
    let codes = table.codewords();
    let total: usize = data
        .iter()
        .map(|&b| table.lengths[b as usize] as usize)
        .sum();
    let mut out = Bitstream::with_capacity(total);
    for &b in data {
        let code = codes[b as usize]
            .as_ref()
            .ok_or(HuffmanError::SymbolNotInTable(b))?;
        out.extend_from(code);
    }
    Ok(out)
}

/// Decode exactly `symbol_count` symbols, which must consume every bit.
pub fn decode(
    bits: &Bitstream,
    table: &HuffmanTable,
    symbol_count: usize,
) -> Result<Vec<u8>, HuffmanError> {
    let total = table.sorted.len() as u64;
    let mut reader = bits.reader();
    // Never trust symbol_count for allocation: each symbol costs >= 1 bit.
    let mut out = Vec::with_capacity(symbol_count.min(bits.len()));
    while out.len() < symbol_count {
        // `offset` is the code read so far minus the first canonical code of
        // the current length; `index` counts the symbols of shorter lengths.
        let mut offset: u64 = 0;
        let mut index: u64 = 0;
        let mut len = 1usize;
        loop {
            if len >= ALPHABET || offset >= total - index {
                return Err(HuffmanError::InvalidCode(reader.position()));
            }
            let bit = reader.read_bit().ok_or(HuffmanError::TruncatedStream {
                decoded: out.len(),
                expected: symbol_count,
            })?;
            offset += u64::from(bit);
            let count = u64::from(table.counts[len]);
            if offset < count {
                out.push(table.sorted[(index + offset) as usize]);
                break;
            }
            index += count;
            offset = (offset - count) * 2;
            len += 1;
        }
    }
    match reader.remaining() {
        0 => Ok(out),
        n => Err(HuffmanError::TrailingBits(n)),
    }
}

pub fn serialize_table(table: &HuffmanTable) -> Bitstream {
    let mut out = Bitstream::with_capacity(TABLE_BITS);
    for &l in &table.lengths {
        out.push_bits(u64::from(l), 8);
    }
    out
}

pub fn parse_table(bits: &Bitstream) -> Result<HuffmanTable, HuffmanError> {
    if bits.len() != TABLE_BITS {
        return Err(HuffmanError::WrongLength(bits.len()));
    }
    let lengths: [u8; ALPHABET] = bits
        .as_bytes()
        .try_into()
        .expect("2048 bits pack into 256 bytes");
    HuffmanTable::from_lengths(lengths)
}
