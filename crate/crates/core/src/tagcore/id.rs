//! Text names for compressed states: `len:value:phase` with the word read
//! big-endian, so `1110:0` and `4:14:0` name the same state.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::Zero;

use super::bits::BitDeque;
use super::state::{CompressedState, Phase};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StateId {
    pub len: usize,
    pub value: BigUint,
    pub phase: Phase,
}

impl StateId {
    pub fn of(c: &CompressedState) -> Self {
        let mut value = BigUint::zero();
        for b in c.word().iter() {
            value <<= 1u32;
            if b {
                value += 1u32;
            }
        }
        StateId { len: c.word_len(), value, phase: c.phase() }
    }

    pub fn to_state(&self) -> CompressedState {
        let mut word = BitDeque::with_capacity(self.len);
        for j in (0..self.len as u64).rev() {
            word.push(self.value.bit(j));
        }
        CompressedState::new(self.phase, word)
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.len, self.value, self.phase.as_u8())
    }
}

impl FromStr for StateId {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |reason: &str| Error::ParseStateId { text: text.to_string(), reason: reason.to_string() };
        let parts: Vec<&str> = text.split(':').collect();
        let phase_text = *parts.last().unwrap();
        let phase = phase_text
            .parse::<u8>()
            .ok()
            .and_then(Phase::from_u8)
            .ok_or_else(|| bad("phase must be 0, 1 or 2"))?;
        match parts.len() {
            2 => {
                let bits = parts[0];
                if !bits.bytes().all(|b| b == b'0' || b == b'1') {
                    return Err(bad("word must be a 0/1 string"));
                }
                let value = if bits.is_empty() {
                    BigUint::zero()
                } else {
                    BigUint::parse_bytes(bits.as_bytes(), 2).ok_or_else(|| bad("word must be a 0/1 string"))?
                };
                Ok(StateId { len: bits.len(), value, phase })
            }
            3 => {
                let len: usize = parts[0].parse().map_err(|_| bad("length must be a decimal integer"))?;
                if parts[1].is_empty() || !parts[1].bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("value must be a decimal integer"));
                }
                let value = BigUint::parse_bytes(parts[1].as_bytes(), 10).ok_or_else(|| bad("value must be a decimal integer"))?;
                if value.bits() > len as u64 {
                    return Err(bad("value does not fit in the given length"));
                }
                Ok(StateId { len, value, phase })
            }
            _ => Err(bad("expected len:value:phase or bits:phase")),
        }
    }
}

pub fn parse_state_id(text: &str) -> Result<CompressedState> {
    Ok(text.parse::<StateId>()?.to_state())
}

pub fn format_state_id(c: &CompressedState) -> String {
    StateId::of(c).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let c = parse_state_id("9:506:0").unwrap();
        assert_eq!(c.bits(), vec![1, 1, 1, 1, 1, 1, 0, 1, 0]);
        assert_eq!(c.phase(), Phase::Zero);
        assert_eq!(parse_state_id("0:0:0").unwrap(), CompressedState::empty());
        assert_eq!(parse_state_id("1110:0").unwrap(), parse_state_id("4:14:0").unwrap());
        assert_eq!(format_state_id(&parse_state_id("1110:0").unwrap()), "4:14:0");
        assert_eq!(format_state_id(&parse_state_id("0011:2").unwrap()), "4:3:2");
    }

    #[test]
    fn errors() {
        for bad in ["3:8:0", "3:5:3", "abc", "3:5", "1:2:0:0", "12:0", "3:-1:0", ":"] {
            assert!(parse_state_id(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn long_words() {
        let text = "100:1267650600228229401496703205375:1";
        let c = parse_state_id(text).unwrap();
        assert_eq!(c.word_len(), 100);
        assert_eq!(format_state_id(&c), text);
    }
}
