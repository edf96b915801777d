//! Growable bit sequence packed MSB-first into bytes.

use std::fmt;
use std::str::FromStr;

/// Ordered bits. Bit `i` is stored in byte `i / 8` at position `7 - i % 8`;
/// unused low bits of the final byte are always zero.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Bitstream {
    bytes: Vec<u8>,
    len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            bytes: Vec::with_capacity(bits.div_ceil(8)),
            len: 0,
        }
    }

    /// Take the first `bit_len` bits of `bytes`. Returns `None` if there
    /// are not enough bytes.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Option<Self> {
        let needed = bit_len.div_ceil(8);
        if bytes.len() < needed {
            return None;
        }
        let mut out = Self {
            bytes: bytes[..needed].to_vec(),
            len: bit_len,
        };
        out.clear_tail();
        Some(out)
    }

    /// `n` zero bits.
    pub fn zeros(n: usize) -> Self {
        Self {
            bytes: vec![0; n.div_ceil(8)],
            len: n,
        }
    }

    fn clear_tail(&mut self) {
        let rem = self.len % 8;
        if rem != 0 {
            if let Some(last) = self.bytes.last_mut() {
                *last &= 0xFFu8 << (8 - rem);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Packed bytes; the final byte is zero-padded.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Append the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count <= 64);
        for i in (0..count).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &Bitstream) {
        if self.len.is_multiple_of(8) {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
        } else {
            for bit in other.iter() {
                self.push(bit);
            }
        }
    }

    /// Pad with zeros up to the next multiple of `multiple` bits.
    pub fn pad_to_multiple(&mut self, multiple: usize) {
        let target = self.len.div_ceil(multiple) * multiple;
        self.bytes.resize(target.div_ceil(8), 0);
        self.len = target;
    }

    pub fn get(&self, index: usize) -> Option<bool> {
        (index < self.len).then(|| self.bytes[index / 8] & (0x80 >> (index % 8)) != 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.bytes[i / 8] & (0x80 >> (i % 8)) != 0)
    }

    /// Copy of bits `start..end`. Panics if the range is out of bounds.
    pub fn slice(&self, start: usize, end: usize) -> Bitstream {
        assert!(start <= end && end <= self.len, "bit range out of bounds");
        if start.is_multiple_of(8) {
            let mut out = Bitstream {
                bytes: self.bytes[start / 8..end.div_ceil(8)].to_vec(),
                len: end - start,
            };
            out.clear_tail();
            return out;
        }
        let mut out = Bitstream::with_capacity(end - start);
        for i in start..end {
            out.push(self.bytes[i / 8] & (0x80 >> (i % 8)) != 0);
        }
        out
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }
}

impl FromIterator<bool> for Bitstream {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut out = Bitstream::new();
        for b in iter {
            out.push(b);
        }
        out
    }
}

impl fmt::Display for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len <= 128 {
            write!(f, "Bitstream({self})")
        } else {
            write!(f, "Bitstream({} bits)", self.len)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParseBitsError(pub char);

impl fmt::Display for ParseBitsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid bit character {:?}", self.0)
    }
}

impl std::error::Error for ParseBitsError {}

/// Parses strings like `"0101"`; `_` and spaces are ignored.
impl FromStr for Bitstream {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Bitstream::new();
        for c in s.chars() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                '_' | ' ' => {}
                other => return Err(ParseBitsError(other)),
            }
        }
        Ok(out)
    }
}

/// Sequential reader over a [`Bitstream`].
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    bits: &'a Bitstream,
    pos: usize,
}

impl BitReader<'_> {
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.bits.len - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let bit = self.bits.get(self.pos)?;
        self.pos += 1;
        Some(bit)
    }

    /// Read `count <= 64` bits as a big-endian integer.
    pub fn read_bits(&mut self, count: u32) -> Option<u64> {
        debug_assert!(count <= 64);
        if self.remaining() < count as usize {
            return None;
        }
        let mut v = 0u64;
        for _ in 0..count {
            v = (v << 1) | u64::from(self.read_bit()?);
        }
        Some(v)
    }
}
