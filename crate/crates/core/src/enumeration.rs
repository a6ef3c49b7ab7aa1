//! Exhaustive scans over compressed initial conditions.
//!
//! Initial conditions of word length `m` are visited phase-major, then by
//! big-endian word value. Scans are cut into [`WorkShard`]s that run
//! independently; winner candidates from each shard are merged in
//! enumeration order afterwards.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halting::detect_halt;
use crate::tagcore::{format_state_id, parse_state_id, CompressedState, Phase};

/// Default per-IC step cap.
pub const DEFAULT_STEP_CAP: u64 = 1 << 34;

const SHARD_WIDTH: u64 = 1 << 10;

pub fn enumerate_initial(m: u32, phases: &[Phase]) -> impl Iterator<Item = CompressedState> + '_ {
    assert!(m < 64, "word length {m} is too large to enumerate");
    let mut phases = phases.to_vec();
    phases.sort();
    phases.dedup();
    phases.into_iter().flat_map(move |p| (0..1u64 << m).map(move |v| CompressedState::from_value(m, v, p)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkShard {
    pub word_length: u32,
    pub phases: Vec<Phase>,
    /// Word values `lo..hi`, visited for each phase in turn.
    pub lo: u64,
    pub hi: u64,
    pub step_cap: u64,
    /// Index of the next initial condition to process, counted phase-major
    /// within the shard.
    pub cursor: u64,
}

impl WorkShard {
    pub fn new(word_length: u32, phases: &[Phase], lo: u64, hi: u64, step_cap: u64) -> Self {
        let mut phases = phases.to_vec();
        phases.sort();
        phases.dedup();
        WorkShard { word_length, phases, lo, hi, step_cap, cursor: 0 }
    }

    /// Splits all `|phases|·2^m` initial conditions into shards of at most
    /// `width` values per phase, one phase per shard, in enumeration order.
    pub fn partition(word_length: u32, phases: &[Phase], step_cap: u64, width: u64) -> Vec<WorkShard> {
        let total = 1u64 << word_length;
        let width = width.max(1);
        let mut phases = phases.to_vec();
        phases.sort();
        phases.dedup();
        let mut out = Vec::new();
        for p in phases {
            let mut lo = 0;
            while lo < total {
                let hi = (lo + width).min(total);
                out.push(WorkShard::new(word_length, &[p], lo, hi, step_cap));
                lo = hi;
            }
        }
        out
    }

    pub fn len(&self) -> u64 {
        self.phases.len() as u64 * (self.hi - self.lo)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_done(&self) -> bool {
        self.cursor >= self.len()
    }

    fn state_at(&self, index: u64) -> CompressedState {
        let width = self.hi - self.lo;
        let phase = self.phases[(index / width) as usize];
        CompressedState::from_value(self.word_length, self.lo + index % width, phase)
    }

    /// Remaining initial conditions, in order.
    pub fn remaining(&self) -> impl Iterator<Item = CompressedState> + '_ {
        (self.cursor..self.len()).map(move |i| self.state_at(i))
    }

    /// Processes up to `limit` further initial conditions, appending
    /// outcomes to `result`.
    pub fn run(&mut self, limit: u64, result: &mut ShardResult) {
        let end = self.len().min(self.cursor.saturating_add(limit));
        while self.cursor < end {
            let c = self.state_at(self.cursor);
            self.cursor += 1;
            match detect_halt(&c, self.step_cap).into_report() {
                Some(r) => {
                    if result.winners.last().map_or(true, |w| r.halting_step > w.halting_step) {
                        result.winners.push(WinnerRecord { state_id: format_state_id(&c), halting_step: r.halting_step, period: r.period });
                    }
                }
                None => result.undecided.push(format_state_id(&c)),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerRecord {
    #[serde(rename = "id")]
    pub state_id: String,
    #[serde(rename = "steps")]
    pub halting_step: u64,
    pub period: u64,
}

/// Shard outcome: local longest-so-far candidates plus undecided ICs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShardResult {
    pub winners: Vec<WinnerRecord>,
    pub undecided: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WinnerSearch {
    pub winners: Vec<WinnerRecord>,
    pub undecided: Vec<String>,
}

/// Combines shard candidates into the global winners list. Candidates may
/// arrive in any order; they are sorted into enumeration order first.
pub fn merge_winners(candidates: impl IntoIterator<Item = WinnerRecord>) -> Result<Vec<WinnerRecord>> {
    let mut keyed = candidates
        .into_iter()
        .map(|w| Ok((parse_state_id(&w.state_id)?, w)))
        .collect::<Result<Vec<_>>>()?;
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    let mut out: Vec<WinnerRecord> = Vec::new();
    for (_, w) in keyed {
        if out.last().map_or(true, |last| w.halting_step > last.halting_step) {
            out.push(w);
        }
    }
    Ok(out)
}

/// All shards for word lengths `0..=max_m`, in enumeration order.
pub fn search_shards(max_m: u32, step_cap: u64) -> Vec<WorkShard> {
    (0..=max_m).flat_map(|m| WorkShard::partition(m, &Phase::ALL, step_cap, SHARD_WIDTH)).collect()
}

pub fn run_shards(shards: Vec<WorkShard>) -> Vec<ShardResult> {
    shards
        .into_par_iter()
        .map(|mut s| {
            let mut r = ShardResult::default();
            s.run(u64::MAX, &mut r);
            r
        })
        .collect()
}

/// Longest-so-far search over every initial condition with word length up
/// to `max_m`.
pub fn search_winners(max_m: u32, step_cap: u64) -> WinnerSearch {
    let results = run_shards(search_shards(max_m, step_cap));
    let mut undecided = Vec::new();
    let mut candidates = Vec::new();
    for r in results {
        candidates.extend(r.winners);
        undecided.extend(r.undecided);
    }
    let winners = merge_winners(candidates).expect("ids produced by the scan parse");
    WinnerSearch { winners, undecided }
}

/// Halting step of every IC of word length `m` (all phases) in enumeration
/// order; `None` for undecided ones.
pub fn halting_times(m: u32, step_cap: u64) -> Vec<Option<u64>> {
    let states: Vec<CompressedState> = enumerate_initial(m, &Phase::ALL).collect();
    states.par_iter().map(|c| detect_halt(c, step_cap).into_report().map(|r| r.halting_step)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HaltingHistogram {
    /// Bin `i` covers `edges[i]..edges[i + 1]`.
    pub edges: Vec<u64>,
    pub counts: Vec<u64>,
    /// Samples outside every bin.
    pub outside: u64,
    pub undecided: u64,
    pub total: u64,
    /// Log-log slope of the survival function's tail.
    pub tail_slope: Option<f64>,
}

impl HaltingHistogram {
    pub fn from_times(times: &[Option<u64>], edges: &[u64]) -> Self {
        let mut edges = edges.to_vec();
        edges.sort_unstable();
        edges.dedup();
        let bins = edges.len().saturating_sub(1);
        let mut counts = vec![0u64; bins];
        let mut outside = 0;
        let mut decided = Vec::with_capacity(times.len());
        for t in times.iter().flatten() {
            decided.push(*t);
            match edges.partition_point(|&e| e <= *t) {
                i if i >= 1 && i <= bins => counts[i - 1] += 1,
                _ => outside += 1,
            }
        }
        HaltingHistogram {
            edges,
            counts,
            outside,
            undecided: (times.len() - decided.len()) as u64,
            total: times.len() as u64,
            tail_slope: survival_tail_slope(&decided),
        }
    }

    /// `bin_lo,bin_hi,count` rows after a version line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# tagforge-histogram v1\nbin_lo,bin_hi,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.edges[i], self.edges[i + 1], c));
        }
        out
    }
}

/// Bin edges 0, 1, 2, 4, ..., up to the first power of two above `max`.
pub fn log2_edges(max: u64) -> Vec<u64> {
    let mut edges = vec![0, 1];
    let mut e = 1u64;
    while e <= max {
        e = e.saturating_mul(2);
        edges.push(e);
    }
    edges
}

pub fn halting_histogram(m: u32, step_cap: u64, edges: &[u64]) -> HaltingHistogram {
    HaltingHistogram::from_times(&halting_times(m, step_cap), edges)
}

/// Slope of log S(t) against log t, where S(t) is the fraction of samples
/// exceeding t. The fit uses t at quarter-octave spacing from the median
/// up to the point where fewer than 20 samples survive.
pub fn survival_tail_slope(times: &[u64]) -> Option<f64> {
    const MIN_SURVIVORS: usize = 20;
    let mut sorted = times.to_vec();
    sorted.sort_unstable();
    let n = sorted.len();
    if n < 2 * MIN_SURVIVORS {
        return None;
    }
    let start = (sorted[n / 2] as f64).max(1.0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    let mut k = 0;
    loop {
        let t = start * 2f64.powf(k as f64 / 4.0);
        let survivors = n - sorted.partition_point(|&v| (v as f64) <= t);
        if survivors < MIN_SURVIVORS {
            break;
        }
        xs.push(t.ln());
        ys.push((survivors as f64 / n as f64).ln());
        k += 1;
    }
    least_squares_slope(&xs, &ys)
}

pub(crate) fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len() as f64;
    if xs.len() < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnesGroup {
    pub ones: u32,
    pub count: u64,
    pub min: u64,
    pub median: u64,
    pub mean: f64,
    pub max: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnesCorrelation {
    pub groups: Vec<OnesGroup>,
    /// Spearman rank correlation between ones count and halting step.
    pub spearman: f64,
    pub undecided: u64,
}

/// Halting times grouped by the number of 1s in the compressed word.
pub fn ones_correlation(m: u32, step_cap: u64) -> Result<OnesCorrelation> {
    if m == 0 {
        return Err(Error::InvalidArgument("word length must be at least 1".into()));
    }
    let states: Vec<CompressedState> = enumerate_initial(m, &Phase::ALL).collect();
    let times = halting_times(m, step_cap);
    let mut pairs: Vec<(u32, u64)> = Vec::new();
    for (c, t) in states.iter().zip(&times) {
        if let Some(t) = t {
            pairs.push((c.word().count_ones() as u32, *t));
        }
    }
    let mut groups = Vec::new();
    for ones in 0..=m {
        let mut ts: Vec<u64> = pairs.iter().filter(|p| p.0 == ones).map(|p| p.1).collect();
        if ts.is_empty() {
            continue;
        }
        ts.sort_unstable();
        groups.push(OnesGroup {
            ones,
            count: ts.len() as u64,
            min: ts[0],
            median: ts[ts.len() / 2],
            mean: ts.iter().map(|&t| t as f64).sum::<f64>() / ts.len() as f64,
            max: *ts.last().unwrap(),
        });
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
    Ok(OnesCorrelation { groups, spearman: spearman(&xs, &ys), undecided: (times.len() - pairs.len()) as u64 })
}

/// Ranks with ties sharing their average rank.
fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: Pearson correlation of average ranks. NaN when either
/// side is constant.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (average_ranks(xs), average_ranks(ys));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}
