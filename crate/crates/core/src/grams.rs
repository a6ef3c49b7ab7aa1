//! m-gram statistics of the language of block concatenations.
//!
//! Once the initial symbols are used up, a tag string is a concatenation of
//! appended blocks, so its factors are factors of the block language. For
//! the POST rule that is `{00, 1101}*`, recognized by a 6-state automaton
//! (a position inside `00` or `1101`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tagcore::{uncompress, CompressedState, UncompressedState};

/// Largest m-gram length the factor routines accept.
pub const MAX_GRAM: usize = 40;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockAutomaton {
    blocks: Vec<Vec<u8>>,
}

impl BlockAutomaton {
    pub fn new(blocks: Vec<Vec<u8>>) -> Result<Self> {
        if blocks.is_empty() || blocks.iter().any(|b| b.is_empty() || b.iter().any(|&s| s > 1)) {
            return Err(Error::InvalidArgument("blocks must be non-empty binary words".into()));
        }
        Ok(BlockAutomaton { blocks })
    }

    /// `{00, 1101}`.
    pub fn post() -> Self {
        BlockAutomaton { blocks: vec![vec![0, 0], vec![1, 1, 0, 1]] }
    }

    pub fn blocks(&self) -> &[Vec<u8>] {
        &self.blocks
    }

    /// `(block, position)` pairs.
    pub fn states(&self) -> Vec<(usize, usize)> {
        self.blocks.iter().enumerate().flat_map(|(b, w)| (0..w.len()).map(move |p| (b, p))).collect()
    }

    /// Every length-`m` factor with its weight: the number of ways to read
    /// it starting inside the first of `m + 1` blocks, summed over all
    /// `|blocks|^(m+1)` block sequences.
    pub fn factor_weights(&self, m: usize) -> BTreeMap<String, u128> {
        assert!((1..=MAX_GRAM).contains(&m), "m-gram length out of range");
        let base = self.blocks.len() as u128;
        let free = m + 1;
        let mut out = BTreeMap::new();
        let mut label = String::with_capacity(m);
        for (b, w) in self.blocks.iter().enumerate() {
            for p in 0..w.len() {
                self.walk(b, p, 1, m, free, base, &mut label, &mut out);
            }
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(&self, b: usize, p: usize, used: usize, m: usize, free: usize, base: u128, label: &mut String, out: &mut BTreeMap<String, u128>) {
        let w = &self.blocks[b];
        let take = (w.len() - p).min(m - label.len());
        let mark = label.len();
        for &s in &w[p..p + take] {
            label.push(if s == 1 { '1' } else { '0' });
        }
        if label.len() == m {
            *out.entry(label.clone()).or_insert(0) += base.pow((free - used) as u32);
        } else {
            for next in 0..self.blocks.len() {
                self.walk(next, 0, used + 1, m, free, base, label, out);
            }
        }
        label.truncate(mark);
    }

    pub fn factors(&self, m: usize) -> BTreeSet<String> {
        self.factor_weights(m).into_keys().collect()
    }

    /// Frequencies of the length-`m` factors when every block is equally
    /// likely.
    pub fn factor_frequencies(&self, m: usize) -> BTreeMap<String, f64> {
        let w = self.factor_weights(m);
        let total: u128 = w.values().sum();
        w.into_iter().map(|(k, v)| (k, v as f64 / total as f64)).collect()
    }
}

/// Number of distinct length-`m` factors of `{00, 1101}*`.
pub fn mgram_count(m: usize) -> u64 {
    BlockAutomaton::post().factor_weights(m).len() as u64
}

fn fib(n: u64) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}

/// `If[EvenQ[m], 2 Fib(m/2 + 4), Fib((m + 11)/2)] - 1`. This equals
/// `mgram_count(m + 1)`, not `mgram_count(m)`; see `mgram_count_closed`.
pub fn fib_closed_form(m: u64) -> u64 {
    if m % 2 == 0 {
        2 * fib(m / 2 + 4) - 1
    } else {
        fib((m + 11) / 2) - 1
    }
}

/// Closed form of `mgram_count(m)`, valid for `m >= 4`.
pub fn mgram_count_closed(m: u64) -> u64 {
    assert!(m >= 4);
    fib_closed_form(m - 1)
}

/// Length-`m` binary words that never occur.
pub fn forbidden_blocks(m: usize) -> Vec<String> {
    let seen = BlockAutomaton::post().factors(m);
    (0..1u64 << m).map(|v| format!("{v:0m$b}")).filter(|w| !seen.contains(w)).collect()
}

/// Multiplicity (weight divided by the gcd of all weights) to the number of
/// m-grams with that multiplicity.
pub fn mgram_multiplicity_table(m: usize) -> BTreeMap<u128, u64> {
    let w = BlockAutomaton::post().factor_weights(m);
    let g = w.values().fold(0u128, |g, &v| g.gcd(&v));
    let mut table = BTreeMap::new();
    for v in w.values() {
        *table.entry(v / g).or_insert(0) += 1;
    }
    table
}

/// Rows are multiplicities, columns `m = 1..=max_m`.
pub fn multiplicity_table_csv(max_m: usize) -> String {
    let tables: Vec<BTreeMap<u128, u64>> = (1..=max_m).map(mgram_multiplicity_table).collect();
    let mults: BTreeSet<u128> = tables.iter().flat_map(|t| t.keys().copied()).collect();
    let mut out = String::from("# tagforge-grams v1\nmultiplicity");
    for m in 1..=max_m {
        write!(out, ",m={m}").unwrap();
    }
    out.push('\n');
    for k in &mults {
        write!(out, "{k}").unwrap();
        for t in &tables {
            write!(out, ",{}", t.get(k).copied().unwrap_or(0)).unwrap();
        }
        out.push('\n');
    }
    out.push_str("all");
    for t in &tables {
        write!(out, ",{}", t.values().sum::<u64>()).unwrap();
    }
    out.push('\n');
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    /// Bits per symbol from the growth of the factor count.
    pub set_entropy: f64,
    /// Conditional `p log p` entropy per symbol under equiprobable blocks.
    pub measure_entropy: f64,
    pub set_redundancy: f64,
    pub measure_redundancy: f64,
}

fn shannon(freqs: &BTreeMap<String, f64>) -> f64 {
    freqs.values().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

impl BlockAutomaton {
    /// `log2(count(m + 2) / count(m)) / 2`.
    pub fn set_entropy(&self, m: usize) -> f64 {
        let a = self.factor_weights(m).len() as f64;
        let b = self.factor_weights(m + 2).len() as f64;
        (b / a).log2() / 2.0
    }

    /// `H(m + 1) - H(m)` over the factor frequencies.
    pub fn measure_entropy(&self, m: usize) -> f64 {
        shannon(&self.factor_frequencies(m + 1)) - shannon(&self.factor_frequencies(m))
    }
}

/// Both entropies at m-gram length `m`.
pub fn entropies(m: usize) -> Entropies {
    let a = BlockAutomaton::post();
    let set_entropy = a.set_entropy(m);
    let measure_entropy = a.measure_entropy(m);
    Entropies { set_entropy, measure_entropy, set_redundancy: 1.0 - set_entropy, measure_redundancy: 1.0 - measure_entropy }
}

/// Observed statistics of the symbol stream of a run: the initial string
/// followed by every appended block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockFrequencyReport {
    pub steps: u64,
    pub blocks_00: u64,
    pub blocks_1101: u64,
    pub ones: u64,
    pub zeros: u64,
    /// Observed 3-gram counts over the appended part.
    pub trigrams: BTreeMap<String, u64>,
    /// Observed over predicted 3-gram frequency, equiprobable blocks.
    pub trigram_ratio: BTreeMap<String, f64>,
}

impl BlockFrequencyReport {
    /// `|n00 - n1101| / mean`.
    pub fn block_imbalance(&self) -> f64 {
        let mean = (self.blocks_00 + self.blocks_1101) as f64 / 2.0;
        (self.blocks_00 as f64 - self.blocks_1101 as f64).abs() / mean
    }
}

/// Runs the POST rule from `c` (padded with 0) for at most `max_steps`
/// steps and tallies the stream. Needs at least `min_blocks` appended
/// blocks.
pub fn block_frequency_check(c: &CompressedState, max_steps: u64, min_blocks: u64) -> Result<BlockFrequencyReport> {
    block_frequency_check_uncompressed(&uncompress(c, 0), max_steps, min_blocks)
}

pub fn block_frequency_check_uncompressed(u: &UncompressedState, max_steps: u64, min_blocks: u64) -> Result<BlockFrequencyReport> {
    let mut q: std::collections::VecDeque<u8> = u.symbols().iter().copied().collect();
    let mut stream: Vec<u8> = Vec::new();
    let (mut b0, mut b1, mut steps) = (0u64, 0u64, 0u64);
    while q.len() >= 3 && steps < max_steps {
        let lead = q[0];
        q.drain(..3);
        let block: &[u8] = if lead == 0 { &[0, 0] } else { &[1, 1, 0, 1] };
        if lead == 0 {
            b0 += 1;
        } else {
            b1 += 1;
        }
        q.extend(block);
        stream.extend(block);
        steps += 1;
    }
    if b0 + b1 < min_blocks.max(1) {
        return Err(Error::InsufficientData(format!("run appended {} blocks, need {}", b0 + b1, min_blocks.max(1))));
    }
    let ones = u.symbols().iter().chain(&stream).filter(|&&s| s == 1).count() as u64;
    let zeros = (u.len() + stream.len()) as u64 - ones;
    let mut trigrams: BTreeMap<String, u64> = BTreeMap::new();
    for w in stream.windows(3) {
        let key: String = w.iter().map(|&s| if s == 1 { '1' } else { '0' }).collect();
        *trigrams.entry(key).or_insert(0) += 1;
    }
    let total: u64 = trigrams.values().sum();
    let predicted = BlockAutomaton::post().factor_frequencies(3);
    let trigram_ratio = predicted
        .iter()
        .map(|(k, p)| (k.clone(), trigrams.get(k).copied().unwrap_or(0) as f64 / total.max(1) as f64 / p))
        .collect();
    Ok(BlockFrequencyReport { steps, blocks_00: b0, blocks_1101: b1, ones, zeros, trigrams, trigram_ratio })
}
