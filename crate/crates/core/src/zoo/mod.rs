//! Tag systems beyond Post's rule: first-symbol `(k, r)` rules with
//! arbitrary appends, block rules keyed on the whole deleted block, and
//! cyclic tag systems. All of them run on a plain symbol deque.

mod analysis;
mod engine;
mod survey;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analysis::{
    collatz_embedding_rule, collatz_embedding_trace, collatz_variant_rule, growth_analyzer, ones_run_sequence, GrowthClass, GrowthReport, OnesRuns,
    RunEnd, GROWTH_MIN_RATE,
};
pub use engine::{zoo_detect_halt, ZooHaltReport, ZooVerdict};
pub use survey::{balanced_rules, rule_survey, simple_rules, SurveyRow};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GeneralRule {
    /// Delete `r` symbols, append the block chosen by the first one. A
    /// `None` entry means the symbol has no rule and is an error when read.
    FirstElement { k: u8, r: usize, appends: Vec<Option<Vec<u8>>> },
    /// Delete `r` symbols, append the block chosen by all of them.
    /// `appends` is indexed by the base-`k` value of the deleted block.
    Block { k: u8, r: usize, appends: Vec<Vec<u8>> },
    /// Delete one binary symbol; if it was 1, append the block under the
    /// cursor. The cursor advances every step.
    Cyclic { blocks: Vec<Vec<u8>> },
}

/// A symbol string plus, for cyclic systems, the cursor position.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ZooState {
    pub symbols: VecDeque<u8>,
    pub cursor: usize,
}

impl ZooState {
    pub fn new(symbols: impl IntoIterator<Item = u8>) -> Self {
        ZooState { symbols: symbols.into_iter().collect(), cursor: 0 }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn digits(&self) -> String {
        self.symbols.iter().map(|&s| char::from_digit(s as u32, 36).unwrap()).collect()
    }
}

fn parse_block(text: &str, literal: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| {
            c.to_digit(10).map(|d| d as u8).ok_or_else(|| Error::ParseRule {
                text: literal.into(),
                reason: format!("{text:?} is not a digit block"),
            })
        })
        .collect()
}

fn write_block(f: &mut fmt::Formatter<'_>, block: &[u8]) -> fmt::Result {
    for s in block {
        write!(f, "{s}")?;
    }
    Ok(())
}

impl GeneralRule {
    /// Post's system as a general rule.
    pub fn post() -> Self {
        GeneralRule::FirstElement { k: 2, r: 3, appends: vec![Some(vec![0, 0]), Some(vec![1, 1, 0, 1])] }
    }

    pub fn alphabet_size(&self) -> u8 {
        match self {
            GeneralRule::FirstElement { k, .. } | GeneralRule::Block { k, .. } => *k,
            GeneralRule::Cyclic { .. } => 2,
        }
    }

    pub fn deletion(&self) -> usize {
        match self {
            GeneralRule::FirstElement { r, .. } | GeneralRule::Block { r, .. } => *r,
            GeneralRule::Cyclic { .. } => 1,
        }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, GeneralRule::Cyclic { .. })
    }

    /// Symbols that have a rule.
    pub fn defined_symbols(&self) -> Vec<u8> {
        match self {
            GeneralRule::FirstElement { appends, .. } => {
                (0..appends.len() as u8).filter(|&s| appends[s as usize].is_some()).collect()
            }
            _ => (0..self.alphabet_size()).collect(),
        }
    }

    /// Length of the longest append block.
    pub fn max_append(&self) -> usize {
        match self {
            GeneralRule::FirstElement { appends, .. } => appends.iter().flatten().map(Vec::len).max().unwrap_or(0),
            GeneralRule::Block { appends, .. } => appends.iter().map(Vec::len).max().unwrap_or(0),
            GeneralRule::Cyclic { blocks } => blocks.iter().map(Vec::len).max().unwrap_or(0),
        }
    }

    fn validate(self) -> Result<Self> {
        let k = self.alphabet_size();
        if k < 2 || k > 10 {
            return Err(Error::InvalidRule(format!("alphabet size {k} outside 2..=10")));
        }
        if self.deletion() == 0 {
            return Err(Error::InvalidRule("deletion count must be at least 1".into()));
        }
        let blocks: Vec<&Vec<u8>> = match &self {
            GeneralRule::FirstElement { appends, .. } => {
                if appends.len() != k as usize {
                    return Err(Error::InvalidRule(format!("expected {k} append entries, got {}", appends.len())));
                }
                appends.iter().flatten().collect()
            }
            GeneralRule::Block { r, appends, .. } => {
                if appends.len() as u128 != (k as u128).pow(*r as u32) {
                    return Err(Error::InvalidRule(format!("block rule needs all {k}^{r} blocks")));
                }
                appends.iter().collect()
            }
            GeneralRule::Cyclic { blocks } => {
                if blocks.is_empty() {
                    return Err(Error::InvalidRule("cyclic rule needs at least one block".into()));
                }
                blocks.iter().collect()
            }
        };
        for b in blocks {
            if let Some(&s) = b.iter().find(|&&s| s >= k) {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: k });
            }
        }
        Ok(self)
    }

    pub fn first_element(k: u8, r: usize, appends: Vec<Option<Vec<u8>>>) -> Result<Self> {
        GeneralRule::FirstElement { k, r, appends }.validate()
    }

    pub fn block(k: u8, r: usize, appends: Vec<Vec<u8>>) -> Result<Self> {
        GeneralRule::Block { k, r, appends }.validate()
    }

    pub fn cyclic(blocks: Vec<Vec<u8>>) -> Result<Self> {
        GeneralRule::Cyclic { blocks }.validate()
    }

    /// Parses a symbol string such as `"202020"`, checking the alphabet.
    pub fn parse_digits(&self, text: &str) -> Result<ZooState> {
        let k = self.alphabet_size();
        let symbols = text
            .chars()
            .map(|c| match c.to_digit(10) {
                Some(d) if (d as u8) < k => Ok(d as u8),
                Some(d) => Err(Error::SymbolOutOfRange { symbol: d as u8, alphabet: k }),
                None => Err(Error::InvalidArgument(format!("not a digit string: {text:?}"))),
            })
            .collect::<Result<VecDeque<u8>>>()?;
        Ok(ZooState { symbols, cursor: 0 })
    }

    /// `len:value`, the value being the string read in base `k`, with
    /// `:cursor` appended for cyclic rules.
    pub fn format_state(&self, s: &ZooState) -> String {
        let k = self.alphabet_size() as u32;
        let mut v = BigUint::zero();
        for &d in &s.symbols {
            v = v * k + d as u32;
        }
        if self.is_cyclic() {
            format!("{}:{}:{}", s.len(), v, s.cursor)
        } else {
            format!("{}:{}", s.len(), v)
        }
    }

    pub fn parse_state(&self, text: &str) -> Result<ZooState> {
        let err = |reason: &str| Error::ParseStateId { text: text.into(), reason: reason.into() };
        let parts: Vec<&str> = text.trim().split(':').collect();
        let want = if self.is_cyclic() { 3 } else { 2 };
        if parts.len() != want && !(self.is_cyclic() && parts.len() == 2) {
            return Err(err("wrong number of fields"));
        }
        let len: usize = parts[0].parse().map_err(|_| err("bad length"))?;
        let mut v: BigUint = parts[1].parse().map_err(|_| err("bad value"))?;
        let cursor = match parts.get(2) {
            Some(c) => c.parse().map_err(|_| err("bad cursor"))?,
            None => 0,
        };
        if let GeneralRule::Cyclic { blocks } = self {
            if cursor >= blocks.len() {
                return Err(err("cursor outside the block list"));
            }
        }
        let k = self.alphabet_size() as u32;
        let mut symbols = VecDeque::with_capacity(len);
        for _ in 0..len {
            let d = &v % k;
            symbols.push_front(u8::try_from(d).unwrap());
            v /= k;
        }
        if !v.is_zero() {
            return Err(err("value does not fit in the length"));
        }
        Ok(ZooState { symbols, cursor })
    }
}

impl fmt::Display for GeneralRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralRule::FirstElement { k, r, appends } => {
                write!(f, "k={k} r={r}")?;
                for (s, a) in appends.iter().enumerate() {
                    if let Some(a) = a {
                        write!(f, " {s}:")?;
                        write_block(f, a)?;
                    }
                }
                Ok(())
            }
            GeneralRule::Block { k, r, appends } => {
                if *k != 2 {
                    write!(f, "k={k} ")?;
                }
                write!(f, "r={r}")?;
                for (i, a) in appends.iter().enumerate() {
                    let mut key = vec![0u8; *r];
                    let mut v = i;
                    for slot in key.iter_mut().rev() {
                        *slot = (v % *k as usize) as u8;
                        v /= *k as usize;
                    }
                    write!(f, " ")?;
                    write_block(f, &key)?;
                    write!(f, ":")?;
                    write_block(f, a)?;
                }
                Ok(())
            }
            GeneralRule::Cyclic { blocks } => {
                write!(f, "cyclic ")?;
                for (i, b) in blocks.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write_block(f, b)?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for GeneralRule {
    type Err = Error;

    /// Accepts `"k=3 r=2 0:0 1:02 2:211"`, `"r=2 00:0 10:101 01:000 11:011"`
    /// and `"cyclic 01,0,011"`. A first-element rule may omit symbols.
    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::ParseRule { text: text.into(), reason };
        let text_t = text.trim();
        if let Some(rest) = text_t.strip_prefix("cyclic") {
            if rest.trim().is_empty() {
                return Err(bad("cyclic rule needs a block list".into()));
            }
            let blocks = rest
                .trim()
                .split(',')
                .map(|b| parse_block(b.trim(), text))
                .collect::<Result<Vec<_>>>()?;
            return GeneralRule::cyclic(blocks);
        }
        let (mut k, mut r) = (None, None);
        let mut entries = Vec::new();
        for tok in text_t.split_whitespace() {
            if let Some(v) = tok.strip_prefix("k=") {
                k = Some(v.parse::<u8>().map_err(|_| bad(format!("bad alphabet size {v:?}")))?);
            } else if let Some(v) = tok.strip_prefix("r=") {
                r = Some(v.parse::<usize>().map_err(|_| bad(format!("bad deletion count {v:?}")))?);
            } else {
                let (key, val) = tok.split_once(':').ok_or_else(|| bad(format!("expected key:block, got {tok:?}")))?;
                entries.push((parse_block(key, text)?, parse_block(val, text)?));
            }
        }
        let r = r.ok_or_else(|| bad("missing r=".into()))?;
        if entries.is_empty() {
            return Err(bad("no rule entries".into()));
        }
        let block_rule = entries.iter().all(|(key, _)| key.len() == r) && r > 1;
        let first_rule = entries.iter().all(|(key, _)| key.len() == 1);
        let inferred = entries.iter().flat_map(|(a, b)| a.iter().chain(b)).copied().max().unwrap_or(1) + 1;
        let k = k.unwrap_or(inferred.max(2));
        if block_rule {
            let mut appends: Vec<Option<Vec<u8>>> = vec![None; (k as usize).pow(r as u32)];
            for (key, val) in entries {
                if let Some(&s) = key.iter().find(|&&s| s >= k) {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: k });
                }
                let idx = key.iter().fold(0usize, |acc, &s| acc * k as usize + s as usize);
                if appends[idx].replace(val).is_some() {
                    return Err(bad("duplicate block".into()));
                }
            }
            let appends = appends.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| bad(format!("block rule needs all {k}^{r} blocks")))?;
            GeneralRule::block(k, r, appends)
        } else if first_rule {
            let mut appends = vec![None; k as usize];
            for (key, val) in entries {
                let s = key[0];
                if s >= k {
                    return Err(Error::SymbolOutOfRange { symbol: s, alphabet: k });
                }
                if appends[s as usize].replace(val).is_some() {
                    return Err(bad(format!("duplicate entry for {s}")));
                }
            }
            GeneralRule::first_element(k, r, appends)
        } else {
            Err(bad("keys must be single symbols or blocks of length r".into()))
        }
    }
}

impl Serialize for GeneralRule {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GeneralRule {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Applies one step in place. `Ok(false)` means the state was already
/// halted and is left untouched.
pub fn zoo_step(rule: &GeneralRule, s: &mut ZooState) -> Result<bool> {
    let k = rule.alphabet_size();
    match rule {
        GeneralRule::FirstElement { r, appends, .. } => {
            if s.symbols.len() < *r {
                return Ok(false);
            }
            if let Some(&x) = s.symbols.iter().take(*r).find(|&&x| x >= k) {
                return Err(Error::SymbolOutOfRange { symbol: x, alphabet: k });
            }
            let first = s.symbols[0];
            let block = appends[first as usize]
                .as_ref()
                .ok_or_else(|| Error::InvalidRule(format!("no append block for symbol {first}")))?;
            s.symbols.drain(..*r);
            s.symbols.extend(block.iter().copied());
        }
        GeneralRule::Block { r, appends, .. } => {
            if s.symbols.len() < *r {
                return Ok(false);
            }
            let mut idx = 0usize;
            for &x in s.symbols.iter().take(*r) {
                if x >= k {
                    return Err(Error::SymbolOutOfRange { symbol: x, alphabet: k });
                }
                idx = idx * k as usize + x as usize;
            }
            s.symbols.drain(..*r);
            s.symbols.extend(appends[idx].iter().copied());
        }
        GeneralRule::Cyclic { blocks } => {
            let Some(&x) = s.symbols.front() else {
                return Ok(false);
            };
            if x >= 2 {
                return Err(Error::SymbolOutOfRange { symbol: x, alphabet: 2 });
            }
            s.symbols.pop_front();
            if x == 1 {
                s.symbols.extend(blocks[s.cursor].iter().copied());
            }
            s.cursor = (s.cursor + 1) % blocks.len();
        }
    }
    Ok(true)
}
