use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::state::UncompressedState;
use crate::error::{Error, Result};

/// A binary string of length `n` read as the big-endian integer `i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerPairState {
    pub n: u64,
    pub i: BigUint,
}

impl IntegerPairState {
    pub fn new(n: u64, i: impl Into<BigUint>) -> Self {
        IntegerPairState { n, i: i.into() }
    }

    pub fn from_uncompressed(s: &UncompressedState) -> Result<Self> {
        let mut i = BigUint::zero();
        for &sym in s.symbols() {
            if sym > 1 {
                return Err(Error::SymbolOutOfRange { symbol: sym, alphabet: 2 });
            }
            i <<= 1u32;
            if sym == 1 {
                i += 1u32;
            }
        }
        Ok(IntegerPairState { n: s.len() as u64, i })
    }

    pub fn to_uncompressed(&self) -> UncompressedState {
        UncompressedState::new((0..self.n).rev().map(|j| self.i.bit(j) as u8))
    }
}

/// One Post step on the integer encoding: with `j` the low `n - 3` digits
/// shifted up by two, a leading 0 gives `{n - 1, j}` and a leading 1 gives
/// `{n + 1, 4j + 13}`.
pub fn integer_pair_step(s: &IntegerPairState) -> Result<IntegerPairState> {
    if s.n < 3 {
        return Err(Error::Halted);
    }
    let low = &s.i & ((BigUint::one() << (s.n - 3)) - 1u32);
    let j = low << 2u32;
    if s.i.bit(s.n - 1) {
        Ok(IntegerPairState { n: s.n + 1, i: (j << 2u32) + 13u32 })
    } else {
        Ok(IntegerPairState { n: s.n - 1, i: j })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listing_values() {
        let s = IntegerPairState::new(12, 2336u32);
        let t = integer_pair_step(&s).unwrap();
        assert_eq!(t, IntegerPairState::new(13, 4621u32));
        assert_eq!(integer_pair_step(&t).unwrap(), IntegerPairState::new(14, 8413u32));
        assert_eq!(integer_pair_step(&IntegerPairState::new(3, 0u32)).unwrap(), IntegerPairState::new(2, 0u32));
        assert_eq!(integer_pair_step(&IntegerPairState::new(2, 1u32)), Err(Error::Halted));
    }

    #[test]
    fn digit_roundtrip_small() {
        for n in 0..=12u64 {
            for i in 0..(1u32 << n) {
                let s = IntegerPairState::new(n, i);
                assert_eq!(IntegerPairState::from_uncompressed(&s.to_uncompressed()).unwrap(), s);
            }
        }
    }
}
