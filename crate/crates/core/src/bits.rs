//! MSB-first bit buffers.
//!
//! Entropy-coded JPEG data is a plain bit string once byte stuffing is
//! removed. [`BitBuf`] owns such a string (bit `0` is the most significant
//! bit of byte `0`) and [`BitReader`] walks one with an explicit cursor, so
//! callers can remember bit offsets and splice ranges verbatim.

use alloc::vec::Vec;

#[derive(Clone, Default, PartialEq, Eq)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl core::fmt::Debug for BitBuf {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("BitBuf(")?;
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitBuf { bytes: Vec::with_capacity(bits.div_ceil(8)), len: 0 }
    }

    /// Every bit of `bytes`, so `len() == 8 * bytes.len()`.
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let len = bytes.len() * 8;
        BitBuf { bytes, len }
    }

    /// Parses a string of `0`/`1`; any other character (spaces, commas) is skipped.
    pub fn from_bit_str(s: &str) -> Self {
        let mut buf = BitBuf::new();
        for c in s.chars() {
            match c {
                '0' => buf.push_bit(false),
                '1' => buf.push_bit(true),
                _ => {}
            }
        }
        buf
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes; the unused low bits of the last byte are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.bytes[i >> 3] & (0x80 >> (i & 7)) != 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.len & 7 == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.len() - 1;
            self.bytes[last] |= 0x80 >> (self.len & 7);
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u32, count: u8) {
        debug_assert!(count <= 32);
        for shift in (0..count).rev() {
            self.push_bit((value >> shift) & 1 != 0);
        }
    }

    /// Appends bits `start..end` of `other`.
    pub fn extend_range(&mut self, other: &BitBuf, start: usize, end: usize) {
        debug_assert!(start <= end && end <= other.len);
        let mut i = start;
        // bit-at-a-time until the destination is byte aligned, then whole bytes
        while i < end && self.len & 7 != 0 {
            self.push_bit(other.get(i));
            i += 1;
        }
        while end - i >= 8 {
            let byte = if i & 7 == 0 {
                other.bytes[i >> 3]
            } else {
                let sh = i & 7;
                (other.bytes[i >> 3] << sh) | (other.bytes[(i >> 3) + 1] >> (8 - sh))
            };
            self.bytes.push(byte);
            self.len += 8;
            i += 8;
        }
        while i < end {
            self.push_bit(other.get(i));
            i += 1;
        }
    }

    pub fn extend(&mut self, other: &BitBuf) {
        self.extend_range(other, 0, other.len);
    }

    /// Compares bits `start..end` of `self` with all of `other`.
    pub fn range_eq(&self, start: usize, end: usize, other: &BitBuf) -> bool {
        if end - start != other.len {
            return false;
        }
        (0..other.len).all(|k| self.get(start + k) == other.get(k))
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(self)
    }
}

/// Cursor over a [`BitBuf`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    buf: &'a BitBuf,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(buf: &'a BitBuf) -> Self {
        BitReader { buf, pos: 0 }
    }

    pub fn at(buf: &'a BitBuf, pos: usize) -> Self {
        BitReader { buf, pos }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        if self.pos >= self.buf.len {
            return None;
        }
        let bit = self.buf.get(self.pos);
        self.pos += 1;
        Some(bit)
    }

    /// Reads `count <= 32` bits as an unsigned integer, MSB first.
    /// On underflow the cursor is left unchanged.
    pub fn read_bits(&mut self, count: u8) -> Option<u32> {
        if self.remaining() < count as usize {
            return None;
        }
        let mut v = 0u32;
        for _ in 0..count {
            v = (v << 1) | self.read_bit()? as u32;
        }
        Some(v)
    }
}
