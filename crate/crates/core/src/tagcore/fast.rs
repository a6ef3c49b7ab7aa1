//! Eight compressed steps per table lookup.
//!
//! The table is indexed by phase and the next eight word bits. Each entry
//! stores the phase after eight steps, the bits appended along the way and
//! the running change in uncompressed length. A lookup is only valid when
//! the word holds at least eight bits: then none of the eight steps can
//! halt and every consumed bit was present before the chunk started.

use std::sync::OnceLock;

use super::state::{compressed_rule, CompressedState, Phase};

#[derive(Clone, Copy, Debug)]
pub(crate) struct Chunk {
    pub phase: Phase,
    pub nbits: u8,
    pub bits: u16,
    /// Highest uncompressed-length change reached during the eight steps.
    pub peak: i8,
}

pub(crate) fn table() -> &'static [[Chunk; 256]; 3] {
    static TABLE: OnceLock<Box<[[Chunk; 256]; 3]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let blank = Chunk { phase: Phase::Zero, nbits: 0, bits: 0, peak: 0 };
        let mut t = Box::new([[blank; 256]; 3]);
        for phase in Phase::ALL {
            for byte in 0..256usize {
                let mut p = phase;
                let (mut bits, mut nbits) = (0u64, 0u32);
                let (mut delta, mut peak) = (0i8, i8::MIN);
                for i in 0..8 {
                    let lead = (byte >> i) & 1 == 1;
                    let (np, app, n) = compressed_rule(p, lead);
                    bits |= app << nbits;
                    nbits += n;
                    delta += if lead { 1 } else { -1 };
                    peak = peak.max(delta);
                    p = np;
                }
                t[phase as usize][byte] = Chunk { phase: p, nbits: nbits as u8, bits: bits as u16, peak };
            }
        }
        t
    })
}

/// Outcome of a bounded evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Evolution {
    pub steps: u64,
    pub halted: bool,
}

/// Advances `c` by up to `max_steps` steps. Stops early, with `halted` set,
/// when the state can no longer step.
pub fn evolve_fast(c: &mut CompressedState, max_steps: u64) -> Evolution {
    evolve::<false>(c, max_steps, &mut 0)
}

/// As [`evolve_fast`], also raising `max_len` to the largest uncompressed
/// length seen, including the starting state.
pub fn evolve_fast_tracked(c: &mut CompressedState, max_steps: u64, max_len: &mut u64) -> Evolution {
    evolve::<true>(c, max_steps, max_len)
}

#[inline(always)]
fn evolve<const TRACK: bool>(c: &mut CompressedState, max_steps: u64, max_len: &mut u64) -> Evolution {
    let t = table();
    if TRACK {
        *max_len = (*max_len).max(c.uncompressed_len());
    }
    let mut taken = 0u64;
    loop {
        if max_steps - taken >= 8 && c.word_len() >= 8 {
            let (phase, word) = c.parts_mut();
            let e = t[*phase as usize][word.peek_byte() as usize];
            if TRACK {
                let len = 3 * word.len() as i64 - phase.shortfall() as i64;
                *max_len = (*max_len).max((len + e.peak as i64) as u64);
            }
            word.advance(8);
            word.push_bits(e.bits as u64, e.nbits as u32);
            *phase = e.phase;
            taken += 8;
        } else if taken < max_steps {
            if !c.step() {
                return Evolution { steps: taken, halted: true };
            }
            taken += 1;
            if TRACK {
                *max_len = (*max_len).max(c.uncompressed_len());
            }
        } else {
            return Evolution { steps: taken, halted: c.is_halted() };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagcore::parse_state_id;

    #[test]
    fn zero_budget_is_identity() {
        let mut c = parse_state_id("9:506:0").unwrap();
        let before = c.clone();
        assert_eq!(evolve_fast(&mut c, 0), Evolution { steps: 0, halted: false });
        assert_eq!(c, before);
    }

    #[test]
    fn matches_single_steps() {
        let start = parse_state_id("6:58:0").unwrap();
        let mut fast = start.clone();
        let mut slow = start;
        for chunk in [1u64, 7, 8, 9, 100, 1000, 3] {
            evolve_fast(&mut fast, chunk);
            for _ in 0..chunk {
                slow.step();
            }
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn winner_four_halts() {
        let mut c = parse_state_id("4:14:0").unwrap();
        let e = evolve_fast(&mut c, 1_000_000);
        assert!(e.halted);
        assert_eq!(e.steps, 418);
    }
}
