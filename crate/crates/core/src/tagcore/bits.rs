//! Growable bit queue backed by `u64` words.
//!
//! Bit `i` of the queue lives at absolute position `head + i`, stored in
//! word `pos / 64` at bit `pos % 64`, so the first bit of the queue is the
//! least significant live bit. Bits past the tail are always zero and there
//! is always at least one spare word after the tail word, which lets
//! [`BitDeque::peek_u64`] read two words without bounds juggling.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

const COMPACT_MIN_WORDS: usize = 16;

pub struct BitDeque {
    words: Vec<u64>,
    head: usize,
    len: usize,
}

impl BitDeque {
    pub fn new() -> Self {
        BitDeque { words: vec![0; 2], head: 0, len: 0 }
    }

    pub fn with_capacity(bits: usize) -> Self {
        let mut words = Vec::with_capacity(bits / 64 + 2);
        words.resize(2, 0);
        BitDeque { words, head: 0, len: 0 }
    }

    /// Builds a queue from a slice of 0/1 values. Any nonzero value counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut d = BitDeque::with_capacity(bits.len());
        for &b in bits {
            d.push(b != 0);
        }
        d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for length {}", self.len);
        let p = self.head + i;
        (self.words[p / 64] >> (p % 64)) & 1 == 1
    }

    #[inline]
    pub fn front(&self) -> Option<bool> {
        if self.len == 0 {
            None
        } else {
            Some(self.words[self.head / 64] >> (self.head % 64) & 1 == 1)
        }
    }

    #[inline]
    pub fn pop_front(&mut self) -> Option<bool> {
        let b = self.front()?;
        self.head += 1;
        self.len -= 1;
        if self.head % 64 == 0 {
            self.maybe_compact();
        }
        Some(b)
    }

    /// Drops `n` bits from the front. Panics if fewer than `n` bits are present.
    #[inline]
    pub fn advance(&mut self, n: usize) {
        assert!(n <= self.len);
        let before = self.head / 64;
        self.head += n;
        self.len -= n;
        if self.head / 64 != before {
            self.maybe_compact();
        }
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        self.push_bits(bit as u64, 1);
    }

    /// Appends the low `n` bits of `bits` (low bit first). `n` may be 0..=64.
    #[inline]
    pub fn push_bits(&mut self, bits: u64, n: u32) {
        if n == 0 {
            return;
        }
        let bits = if n == 64 { bits } else { bits & ((1u64 << n) - 1) };
        let tail = self.head + self.len;
        let w = tail / 64;
        let off = (tail % 64) as u32;
        if w + 2 >= self.words.len() {
            self.words.resize(w + 3, 0);
        }
        self.words[w] |= bits << off;
        if off + n > 64 {
            self.words[w + 1] |= bits >> (64 - off);
        }
        self.len += n as usize;
    }

    /// Returns the 64 bits starting at queue offset `offset`, first bit in the
    /// least significant position. Bits past the tail read as zero.
    #[inline]
    pub fn peek_u64(&self, offset: usize) -> u64 {
        let p = self.head + offset;
        let w = p / 64;
        let off = p % 64;
        let lo = self.words.get(w).copied().unwrap_or(0);
        if off == 0 {
            lo
        } else {
            let hi = self.words.get(w + 1).copied().unwrap_or(0);
            (lo >> off) | (hi << (64 - off))
        }
    }

    /// First eight bits, first bit in the least significant position.
    #[inline]
    pub fn peek_byte(&self) -> u8 {
        let w = self.head / 64;
        let off = self.head % 64;
        if off <= 56 {
            (self.words[w] >> off) as u8
        } else {
            ((self.words[w] >> off) | (self.words[w + 1] << (64 - off))) as u8
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    pub fn count_ones(&self) -> usize {
        let mut total = 0;
        let mut i = 0;
        while i < self.len {
            let take = (self.len - i).min(64);
            total += self.chunk(i, take).count_ones() as usize;
            i += take;
        }
        total
    }

    pub fn clear(&mut self) {
        self.words.clear();
        self.words.resize(2, 0);
        self.head = 0;
        self.len = 0;
    }

    /// `take` bits from `offset`, masked.
    #[inline]
    fn chunk(&self, offset: usize, take: usize) -> u64 {
        let v = self.peek_u64(offset);
        if take == 64 {
            v
        } else {
            v & ((1u64 << take) - 1)
        }
    }

    fn maybe_compact(&mut self) {
        let dead = self.head / 64;
        if dead < COMPACT_MIN_WORDS || dead * 2 < self.words.len() {
            return;
        }
        self.words.copy_within(dead.., 0);
        let keep = self.words.len() - dead;
        self.words.truncate(keep);
        self.head -= dead * 64;
    }
}

impl Default for BitDeque {
    fn default() -> Self {
        BitDeque::new()
    }
}

impl Clone for BitDeque {
    fn clone(&self) -> Self {
        let mut d = BitDeque { words: Vec::new(), head: 0, len: 0 };
        d.clone_from(self);
        d
    }

    fn clone_from(&mut self, src: &Self) {
        let first = src.head / 64;
        let last = (src.head + src.len) / 64;
        self.words.clear();
        self.words.extend_from_slice(&src.words[first..=last]);
        self.words.extend_from_slice(&[0, 0]);
        self.head = src.head % 64;
        self.len = src.len;
    }
}

impl PartialEq for BitDeque {
    fn eq(&self, other: &Self) -> bool {
        if self.len != other.len {
            return false;
        }
        let mut i = 0;
        while i < self.len {
            let take = (self.len - i).min(64);
            if self.chunk(i, take) != other.chunk(i, take) {
                return false;
            }
            i += take;
        }
        true
    }
}

impl Eq for BitDeque {}

impl Hash for BitDeque {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_usize(self.len);
        let mut i = 0;
        while i < self.len {
            let take = (self.len - i).min(64);
            state.write_u64(self.chunk(i, take));
            i += take;
        }
    }
}

impl Ord for BitDeque {
    /// Lexicographic on the bit sequence; a proper prefix sorts first.
    fn cmp(&self, other: &Self) -> Ordering {
        let common = self.len.min(other.len);
        let mut i = 0;
        while i < common {
            let take = (common - i).min(64);
            let a = self.chunk(i, take);
            let b = other.chunk(i, take);
            if a != b {
                let first = (a ^ b).trailing_zeros();
                return if (a >> first) & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
            i += take;
        }
        self.len.cmp(&other.len)
    }
}

impl PartialOrd for BitDeque {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitDeque {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}
