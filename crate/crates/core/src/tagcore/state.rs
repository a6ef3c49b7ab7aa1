use std::cmp::Ordering;
use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::bits::BitDeque;
use super::rule::{Symbol, TagRule};
use crate::error::{Error, Result};

/// Uncompressed length modulo 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
#[repr(u8)]
pub enum Phase {
    Zero = 0,
    One = 1,
    Two = 2,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Zero, Phase::One, Phase::Two];

    pub fn from_u8(v: u8) -> Option<Phase> {
        match v {
            0 => Some(Phase::Zero),
            1 => Some(Phase::One),
            2 => Some(Phase::Two),
            _ => None,
        }
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        self as u8
    }

    /// How far the uncompressed length falls short of `3m`.
    #[inline]
    pub fn shortfall(self) -> u64 {
        match self {
            Phase::Zero => 0,
            Phase::One => 2,
            Phase::Two => 1,
        }
    }
}

impl From<Phase> for u8 {
    fn from(p: Phase) -> u8 {
        p as u8
    }
}

impl TryFrom<u8> for Phase {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Phase, String> {
        Phase::from_u8(v).ok_or_else(|| format!("phase {v} is not 0, 1 or 2"))
    }
}

/// A plain symbol string.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UncompressedState {
    symbols: VecDeque<Symbol>,
}

impl UncompressedState {
    pub fn new(symbols: impl IntoIterator<Item = Symbol>) -> Self {
        UncompressedState { symbols: symbols.into_iter().collect() }
    }

    /// Parses a string of decimal digits, e.g. `"10010"` or `"202020"`.
    pub fn parse_digits(text: &str) -> Result<Self> {
        let symbols = text
            .chars()
            .map(|c| {
                c.to_digit(10).map(|d| d as Symbol).ok_or_else(|| Error::InvalidArgument(format!("not a digit string: {text:?}")))
            })
            .collect::<Result<VecDeque<_>>>()?;
        Ok(UncompressedState { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &VecDeque<Symbol> {
        &self.symbols
    }

    pub fn to_vec(&self) -> Vec<Symbol> {
        self.symbols.iter().copied().collect()
    }

    /// One step in place. Returns `Ok(false)` without touching the string if
    /// it is shorter than the deletion count.
    pub fn step_in_place(&mut self, rule: &TagRule) -> Result<bool> {
        let r = rule.deletion();
        if self.symbols.len() < r {
            return Ok(false);
        }
        let k = rule.alphabet_size();
        if let Some(&s) = self.symbols.iter().take(r).find(|&&s| s >= k) {
            return Err(Error::SymbolOutOfRange { symbol: s, alphabet: k });
        }
        let first = self.symbols[0];
        self.symbols.drain(..r);
        self.symbols.extend(rule.append_for(first).iter().copied());
        Ok(true)
    }
}

impl fmt::Display for UncompressedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// One step of a first-symbol tag rule. `Ok(None)` means the input was halted.
pub fn step_uncompressed(rule: &TagRule, s: &UncompressedState) -> Result<Option<UncompressedState>> {
    let mut next = s.clone();
    Ok(if next.step_in_place(rule)? { Some(next) } else { None })
}

/// Post-rule state reduced to every third symbol plus the length phase.
///
/// The word holds the symbols at positions 0, 3, 6, ... of the uncompressed
/// string. An empty word stands for the empty string whatever the phase.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CompressedState {
    phase: Phase,
    word: BitDeque,
}

impl CompressedState {
    pub fn new(phase: Phase, word: BitDeque) -> Self {
        CompressedState { phase, word }
    }

    pub fn empty() -> Self {
        CompressedState { phase: Phase::Zero, word: BitDeque::new() }
    }

    pub fn from_bits(phase: Phase, bits: &[u8]) -> Self {
        CompressedState { phase, word: BitDeque::from_bits(bits) }
    }

    /// Word of length `m` whose big-endian value is `value`.
    pub fn from_value(m: u32, value: u64, phase: Phase) -> Self {
        assert!(m <= 64 && (m == 64 || value >> m == 0), "value {value} does not fit in {m} bits");
        let mut word = BitDeque::with_capacity(m as usize);
        for j in (0..m).rev() {
            word.push((value >> j) & 1 == 1);
        }
        CompressedState { phase, word }
    }

    /// Parses `"bits:phase"`, e.g. `"111010:0"`.
    pub fn parse_bits(text: &str) -> Result<Self> {
        super::id::parse_state_id(text)
    }

    #[inline]
    pub fn phase(&self) -> Phase {
        self.phase
    }

    #[inline]
    pub fn word(&self) -> &BitDeque {
        &self.word
    }

    #[inline]
    pub fn word_len(&self) -> usize {
        self.word.len()
    }

    pub fn bits(&self) -> Vec<u8> {
        self.word.to_bits()
    }

    /// Big-endian value of the word; `None` when it has more than 64 bits.
    pub fn value(&self) -> Option<u64> {
        if self.word.len() > 64 {
            return None;
        }
        Some(self.word.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    #[inline]
    pub fn uncompressed_len(&self) -> u64 {
        let m = self.word.len() as u64;
        if m == 0 {
            0
        } else {
            3 * m - self.phase.shortfall()
        }
    }

    #[inline]
    pub fn is_halted(&self) -> bool {
        self.uncompressed_len() < 3
    }

    /// One compressed step in place; returns false (and leaves the state
    /// alone) when the state is halted.
    #[inline]
    pub fn step(&mut self) -> bool {
        if self.is_halted() {
            return false;
        }
        let s = self.word.pop_front().expect("non-halted state has a word");
        let (phase, bits, n) = compressed_rule(self.phase, s);
        self.word.push_bits(bits, n);
        self.phase = phase;
        true
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Phase, &mut BitDeque) {
        (&mut self.phase, &mut self.word)
    }

    /// Packed form: phase byte, LEB128 word length, then the word bits
    /// first-bit-lowest in bytes.
    pub fn write_packed(&self, out: &mut Vec<u8>) {
        out.push(self.phase.as_u8());
        write_varint(out, self.word.len() as u64);
        let m = self.word.len();
        let mut i = 0;
        while i < m {
            let take = (m - i).min(8);
            let byte = (self.word.peek_u64(i) & ((1u64 << take) - 1)) as u8;
            out.push(byte);
            i += take;
        }
    }

    pub fn to_packed(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_packed(&mut out);
        out
    }

    /// Reads a packed state; returns it with the number of bytes consumed.
    pub fn read_packed(buf: &[u8]) -> Result<(Self, usize)> {
        let (&p, rest) = buf.split_first().ok_or_else(|| Error::Decode("missing phase byte".into()))?;
        let phase = Phase::from_u8(p).ok_or_else(|| Error::Decode(format!("bad phase byte {p}")))?;
        let (m, used) = read_varint(rest)?;
        let m = usize::try_from(m).map_err(|_| Error::Decode("word length overflow".into()))?;
        let nbytes = m.div_ceil(8);
        let body = rest.get(used..used + nbytes).ok_or_else(|| Error::Decode("truncated word bits".into()))?;
        let mut word = BitDeque::with_capacity(m);
        for (k, &byte) in body.iter().enumerate() {
            let take = (m - 8 * k).min(8);
            if take < 8 && byte >> take != 0 {
                return Err(Error::Decode("nonzero padding bits".into()));
            }
            word.push_bits(byte as u64, take as u32);
        }
        Ok((CompressedState { phase, word }, 1 + used + nbytes))
    }
}

/// The six compressed rules: (new phase, appended bits low-first, count).
#[inline]
pub(crate) fn compressed_rule(phase: Phase, leading: bool) -> (Phase, u64, u32) {
    match (phase, leading) {
        (Phase::Zero, false) => (Phase::Two, 0b0, 1),
        (Phase::Zero, true) => (Phase::One, 0b11, 2),
        (Phase::One, false) => (Phase::Zero, 0, 0),
        (Phase::One, true) => (Phase::Two, 0b0, 1),
        (Phase::Two, false) => (Phase::One, 0b0, 1),
        (Phase::Two, true) => (Phase::Zero, 0b1, 1),
    }
}

impl Ord for CompressedState {
    /// Enumeration order: word length, then phase, then word bits.
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then(self.phase.cmp(&other.phase))
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for CompressedState {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CompressedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}:{}", self.word, self.phase.as_u8())
    }
}

impl fmt::Display for CompressedState {
    /// Canonical `len:value:phase` text.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::id::format_state_id(self))
    }
}

/// Keeps the symbols at positions 0, 3, 6, ... and records the length phase.
pub fn compress(s: &UncompressedState) -> Result<CompressedState> {
    let n = s.len();
    let phase = Phase::from_u8((n % 3) as u8).expect("n mod 3 < 3");
    if let Some(&sym) = s.symbols().iter().find(|&&x| x > 1) {
        return Err(Error::SymbolOutOfRange { symbol: sym, alphabet: 2 });
    }
    let mut word = BitDeque::with_capacity(n.div_ceil(3));
    for &sym in s.symbols().iter().step_by(3) {
        word.push(sym == 1);
    }
    Ok(CompressedState { phase, word })
}

/// Rebuilds an uncompressed string, filling the don't-care positions with `pad`.
pub fn uncompress(c: &CompressedState, pad: Symbol) -> UncompressedState {
    let m = c.word_len();
    if m == 0 {
        return UncompressedState::default();
    }
    let mut symbols = VecDeque::with_capacity(3 * m);
    for (i, b) in c.word().iter().enumerate() {
        if i > 0 {
            symbols.push_back(pad);
            symbols.push_back(pad);
        }
        symbols.push_back(b as Symbol);
    }
    let tail = match c.phase() {
        Phase::Zero => 2,
        Phase::One => 0,
        Phase::Two => 1,
    };
    symbols.extend(std::iter::repeat(pad).take(tail));
    UncompressedState { symbols }
}

/// One compressed step; `None` when the state is halted.
pub fn step_compressed(c: &CompressedState) -> Option<CompressedState> {
    let mut next = c.clone();
    next.step().then_some(next)
}

pub(crate) fn write_varint(out: &mut Vec<u8>, mut v: u64) {
    loop {
        let byte = (v & 0x7f) as u8;
        v >>= 7;
        if v == 0 {
            out.push(byte);
            return;
        }
        out.push(byte | 0x80);
    }
}

pub(crate) fn read_varint(buf: &[u8]) -> Result<(u64, usize)> {
    let mut v: u64 = 0;
    for (i, &byte) in buf.iter().enumerate().take(10) {
        v |= ((byte & 0x7f) as u64) << (7 * i);
        if byte & 0x80 == 0 {
            return Ok((v, i + 1));
        }
    }
    Err(Error::Decode("unterminated varint".into()))
}
