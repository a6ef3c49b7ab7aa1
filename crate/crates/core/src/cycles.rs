//! Cycle families, cycle counting and cycle membership.
//!
//! Any phase-0 word built from the blocks `01` and `1100` lies on a cycle,
//! whose period is 2 per `01` and 4 per `1100` in its primitive block
//! pattern. Cycles are identified by their least state under the
//! enumeration order.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::enumerate_initial;
use crate::halting::detect_halt;
use crate::tagcore::{evolve_fast, format_state_id, BitDeque, CompressedState, Phase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CycleFamily {
    #[serde(rename = "block-01-1100")]
    Block,
    #[serde(rename = "period6-family")]
    Period6,
    #[serde(rename = "sporadic")]
    Sporadic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CycleDescriptor {
    /// Least state on the cycle.
    pub seed: CompressedState,
    pub period: u64,
    pub family: CycleFamily,
    pub min_len: u64,
    pub max_len: u64,
}

/// Catalog row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub seed: String,
    pub period: u64,
    pub family: CycleFamily,
    pub min_len: u64,
    pub max_len: u64,
}

impl CycleDescriptor {
    /// Describes the cycle through `state`, which must satisfy
    /// `T^period(state) = state` with `period` minimal.
    pub fn from_cycle_state(state: &CompressedState, period: u64) -> Self {
        let mut s = state.clone();
        let mut seed = state.clone();
        let (mut min_len, mut max_len) = (u64::MAX, 0);
        let mut family = CycleFamily::Sporadic;
        for _ in 0..period {
            min_len = min_len.min(s.uncompressed_len());
            max_len = max_len.max(s.uncompressed_len());
            if is_block_word(&s) {
                family = CycleFamily::Block;
            }
            if s < seed {
                seed = s.clone();
            }
            s.step();
        }
        if family == CycleFamily::Sporadic && period == 6 {
            family = CycleFamily::Period6;
        }
        CycleDescriptor { seed, period, family, min_len, max_len }
    }

    pub fn record(&self) -> CycleRecord {
        CycleRecord {
            seed: format_state_id(&self.seed),
            period: self.period,
            family: self.family,
            min_len: self.min_len,
            max_len: self.max_len,
        }
    }
}

/// Phase 0 and the word splits into `01` and `1100` blocks.
fn is_block_word(c: &CompressedState) -> bool {
    if c.phase() != Phase::Zero || c.word_len() == 0 {
        return false;
    }
    let w = c.word();
    let mut i = 0;
    while i < w.len() {
        let rest = w.len() - i;
        if rest >= 2 && !w.get(i) && w.get(i + 1) {
            i += 2;
        } else if rest >= 4 && w.get(i) && w.get(i + 1) && !w.get(i + 2) && !w.get(i + 3) {
            i += 4;
        } else {
            return false;
        }
    }
    true
}

/// Smallest `p <= max_period` with `T^p(c) = c`.
pub fn is_on_cycle(c: &CompressedState, max_period: u64) -> Option<u64> {
    let mut s = c.clone();
    for p in 1..=max_period {
        if !s.step() {
            return None;
        }
        if s == *c {
            return Some(p);
        }
    }
    None
}

/// Phase-0 seed spelled by a block pattern: bit `i` of `pattern` picks
/// `1100` (set) or `01` (clear) for block `i`.
pub fn block_seed(b: u32, pattern: u64) -> CompressedState {
    let mut word = BitDeque::new();
    for i in 0..b {
        if (pattern >> i) & 1 == 1 {
            for bit in [1, 1, 0, 0] {
                word.push(bit == 1);
            }
        } else {
            word.push(false);
            word.push(true);
        }
    }
    CompressedState::new(Phase::Zero, word)
}

/// Phase-0 seed `00111(000111)^m` of the period-6 family. Its largest
/// uncompressed length on the cycle is `16 + 18m`.
pub fn period6_seed(m: u32) -> CompressedState {
    let mut word = BitDeque::new();
    for bit in [0, 0, 1, 1, 1].into_iter().chain((0..m).flat_map(|_| [0, 0, 0, 1, 1, 1])) {
        word.push(bit == 1);
    }
    CompressedState::new(Phase::Zero, word)
}

/// Distinct cycles seeded by the `2^b` sequences of `b` blocks, ordered by
/// period and then seed.
pub fn family_cycles(b: u32) -> Vec<CycleDescriptor> {
    assert!((1..64).contains(&b), "block count must be in 1..64");
    let mut found: Vec<CycleDescriptor> = (0..1u64 << b)
        .into_par_iter()
        .map(|pattern| {
            let seed = block_seed(b, pattern);
            let p = is_on_cycle(&seed, 4 * b as u64).expect("block words lie on cycles");
            CycleDescriptor::from_cycle_state(&seed, p)
        })
        .collect();
    found.sort_by(|a, b| (a.period, &a.seed).cmp(&(b.period, &b.seed)));
    found.dedup();
    found
}

/// Sum over divisors `d` of `n` of `f(d)`.
fn divisor_sum(n: u64, f: impl Fn(u64) -> BigUint) -> BigUint {
    (1..=n).filter(|d| n % d == 0).map(f).sum()
}

fn euler_phi(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

fn lucas(k: u64) -> BigUint {
    let (mut a, mut b) = (BigUint::from(2u32), BigUint::one());
    for _ in 0..k {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// Number of binary necklaces of length `n`: one cycle per necklace of `n`
/// blocks.
pub fn count_distinct_cycles(n: u64) -> BigUint {
    assert!(n >= 1);
    divisor_sum(n, |k| BigUint::from(euler_phi(k)) * (BigUint::one() << (n / k))) / n
}

/// Number of binary necklaces of length `n` with no two adjacent zeros
/// (cyclically).
pub fn count_on_cycle_strings(n: u64) -> BigUint {
    assert!(n >= 1);
    divisor_sum(n, |k| BigUint::from(euler_phi(n / k)) * lucas(k)) / n
}

/// Cycles reached from every initial condition whose word length lies in
/// `word_lengths`, keeping those outside the block family with period at
/// most `period_cap`. Initial conditions are capped at `step_cap` steps.
pub fn sporadic_search(word_lengths: RangeInclusive<u32>, period_cap: u64, step_cap: u64) -> Vec<CycleDescriptor> {
    let mut catalog: BTreeMap<CompressedState, CycleDescriptor> = BTreeMap::new();
    for m in word_lengths {
        let states: Vec<CompressedState> = enumerate_initial(m, &Phase::ALL).collect();
        let found: Vec<CycleDescriptor> = states
            .par_iter()
            .filter_map(|c| {
                let r = detect_halt(c, step_cap).into_report()?;
                (r.period > 0 && r.period <= period_cap).then(|| CycleDescriptor::from_cycle_state(&r.final_state, r.period))
            })
            .filter(|d| d.family != CycleFamily::Block)
            .collect();
        for d in found {
            catalog.entry(d.seed.clone()).or_insert(d);
        }
    }
    let mut out: Vec<CycleDescriptor> = catalog.into_values().collect();
    out.sort_by(|a, b| (a.period, &a.seed).cmp(&(b.period, &b.seed)));
    out
}

/// Number of phase-0 words of length `n` that split into `01` and `1100`
/// blocks. Every such word lies on a cycle.
pub fn count_block_words(n: u64) -> BigUint {
    if n % 2 == 1 {
        return BigUint::zero();
    }
    // Compositions of n/2 into parts 1 and 2.
    let (mut a, mut b) = (BigUint::one(), BigUint::one());
    for _ in 0..n / 2 {
        let next = &a + &b;
        a = b;
        b = next;
    }
    a
}

/// `count_block_words(n) / 2^n`, which decays like `0.636^n`.
pub fn on_cycle_fraction(n: u64) -> f64 {
    let c: f64 = count_block_words(n).to_string().parse().unwrap();
    c / 2f64.powi(n as i32)
}

/// Advances `c` by `period` steps and compares.
pub fn verify_cycle(c: &CompressedState, period: u64) -> bool {
    if period == 0 {
        return c.is_halted();
    }
    let mut d = c.clone();
    evolve_fast(&mut d, period);
    d == *c && is_on_cycle(c, period) == Some(period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagcore::{compress, parse_state_id, UncompressedState};

    fn periods(b: u32) -> Vec<u64> {
        family_cycles(b).iter().map(|d| d.period).collect()
    }

    #[test]
    fn family_examples() {
        assert_eq!(periods(1), vec![2, 4]);
        assert_eq!(periods(3), vec![2, 4, 8, 10]);
        assert_eq!(periods(6), vec![2, 4, 6, 8, 10, 14, 16, 16, 18, 18, 18, 20, 20, 22]);
    }

    #[test]
    fn counting_examples() {
        let d: Vec<u64> = (1..=6).map(|n| count_distinct_cycles(n).try_into().unwrap()).collect();
        assert_eq!(d, vec![2, 3, 4, 6, 8, 14]);
        let c: Vec<u64> = (1..=8).map(|n| count_on_cycle_strings(n).try_into().unwrap()).collect();
        assert_eq!(c, vec![1, 2, 2, 3, 3, 5, 5, 8]);
        assert_eq!(count_on_cycle_strings(20), BigUint::from(766u32));
    }

    #[test]
    fn membership_examples() {
        assert_eq!(is_on_cycle(&parse_state_id("01:0").unwrap(), 100), Some(2));
        assert_eq!(is_on_cycle(&CompressedState::empty(), 100), None);
        let u = UncompressedState::parse_digits("001101110111010000").unwrap();
        assert!(is_on_cycle(&compress(&u).unwrap(), 1000).is_some());
    }

    #[test]
    fn period6_family() {
        for m in 0..=4 {
            let seed = period6_seed(m);
            assert_eq!(is_on_cycle(&seed, 100), Some(6), "m={m}");
            let d = CycleDescriptor::from_cycle_state(&seed, 6);
            assert_eq!(d.family, CycleFamily::Period6);
            assert_eq!(d.max_len, 16 + 18 * m as u64);
        }
    }

    #[test]
    fn sporadic_seeds() {
        for (id, period, lens) in [("13:2036:0", 40, (37, 44)), ("23:3611843:0", 66, (68, 76)), ("24:7682044:0", 282, (71, 84))] {
            let c = parse_state_id(id).unwrap();
            assert_eq!(is_on_cycle(&c, 1000), Some(period), "{id}");
            let d = CycleDescriptor::from_cycle_state(&c, period);
            assert_eq!((d.family, d.seed.clone(), d.min_len, d.max_len), (CycleFamily::Sporadic, c, lens.0, lens.1));
            assert!(verify_cycle(&d.seed, period));
        }
    }

    #[test]
    fn length_13_search_finds_period_40() {
        let found = sporadic_search(13..=13, 512, 1 << 24);
        let forty: Vec<_> = found.iter().filter(|d| d.period == 40).collect();
        assert_eq!(forty.len(), 1);
        assert_eq!((forty[0].min_len, forty[0].max_len), (37, 44));
        assert!(found.iter().all(|d| d.period == 6 || d.period == 40));
    }

    #[test]
    fn on_cycle_fraction_decay() {
        for n in 1..=16u64 {
            let brute = (0..1u64 << n).filter(|&v| is_block_word(&CompressedState::from_value(n as u32, v, Phase::Zero))).count();
            assert_eq!(BigUint::from(brute), count_block_words(n), "n={n}");
        }
        let per_symbol = (on_cycle_fraction(62) / on_cycle_fraction(60)).sqrt();
        assert!((per_symbol - 0.636).abs() < 0.001, "{per_symbol}");
    }

    #[test]
    fn block_word_parser() {
        assert!(is_block_word(&parse_state_id("0111000101:0").unwrap()));
        assert!(!is_block_word(&parse_state_id("0111:0").unwrap()));
        assert!(!is_block_word(&parse_state_id("01:1").unwrap()));
    }
}
