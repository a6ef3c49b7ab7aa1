//! Termination and cycle detection for Post's system.
//!
//! Detection runs in three passes:
//!
//! 1. Brent's algorithm over the eight-step map `T^8`, using the table-driven
//!    stepper. Termination is seen directly. Once the chunked sequence
//!    repeats, the hare sits on the cycle and single steps from there give
//!    the exact period `p`.
//! 2. Two pointers `p` steps apart walk forward from the start in eight-step
//!    chunks. The first chunk boundary where they agree is refined with
//!    single steps, which yields the compressed transient: the first step
//!    whose compressed state lies on the cycle.
//! 3. The uncompressed transient can be a few steps later, because
//!    positions the compressed word ignores may still differ. Every
//!    uncompressed string is a window `[3t, 3t + L_t)` of the stream formed
//!    by the initial string followed by all appended blocks, so comparing
//!    that stream with itself shifted by `3p` locates the last disagreement.
//!
//! Reports count steps as follows. A terminating run counts the steps applied
//! plus one final step that deletes a non-empty residue shorter than three
//! symbols. A cycling run counts the uncompressed transient, taking zeros in
//! the positions a compressed start leaves unspecified. The compressed
//! transient is reported alongside.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tagcore::{
    compress, evolve_fast, evolve_fast_tracked, format_state_id, read_varint, uncompress, write_varint,
    CompressedState, UncompressedState,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaltReport {
    pub halting_step: u64,
    /// Cycle length, 0 for termination.
    pub period: u64,
    /// Same count as `halting_step`.
    pub transient: u64,
    /// First step whose compressed state is on the cycle; for terminating
    /// runs, the steps applied before the residue is reached.
    pub compressed_transient: u64,
    /// The residue for terminating runs, the first cycle state otherwise.
    pub final_state: CompressedState,
    pub max_length_seen: u64,
}

impl HaltReport {
    pub fn terminated(&self) -> bool {
        self.period == 0
    }

    pub fn record(&self, id: impl Into<String>) -> HaltRecord {
        HaltRecord {
            id: id.into(),
            steps: self.halting_step,
            period: self.period,
            transient: self.transient,
            maxlen: self.max_length_seen,
        }
    }
}

/// One JSON-lines row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HaltRecord {
    pub id: String,
    pub steps: u64,
    pub period: u64,
    pub transient: u64,
    pub maxlen: u64,
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Decided(HaltReport),
    /// Step budget ran out; the detector can be resumed.
    Undecided(Box<Detector>),
}

impl Verdict {
    pub fn report(&self) -> Option<&HaltReport> {
        match self {
            Verdict::Decided(r) => Some(r),
            Verdict::Undecided(_) => None,
        }
    }

    pub fn into_report(self) -> Option<HaltReport> {
        match self {
            Verdict::Decided(r) => Some(r),
            Verdict::Undecided(_) => None,
        }
    }
}

/// Resumable detector state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Detector {
    initial: CompressedState,
    /// The exact starting string, when the run began from one.
    origin: Option<Vec<u8>>,
    hare: CompressedState,
    tortoise: CompressedState,
    power: u64,
    lam: u64,
    steps: u64,
    max_len: u64,
    /// States of the leading pointer at multiples of `snap_stride`, starting
    /// with step 0. Thinned by half whenever it grows past `MAX_SNAPSHOTS`.
    snapshots: Vec<(u64, CompressedState)>,
    snap_stride: u64,
}

/// Brent moves in units of this many steps.
const CHUNK: u64 = 64;
const MAX_SNAPSHOTS: usize = 64;
const ENCODING_VERSION: u8 = 2;

impl Detector {
    pub fn new(initial: &CompressedState) -> Self {
        Detector {
            initial: initial.clone(),
            origin: None,
            hare: initial.clone(),
            tortoise: initial.clone(),
            power: 1,
            lam: 0,
            steps: 0,
            max_len: initial.uncompressed_len(),
            snapshots: vec![(0, initial.clone())],
            snap_stride: CHUNK,
        }
    }

    /// Starts from an explicit binary string, so the uncompressed transient
    /// uses its real don't-care symbols.
    pub fn from_uncompressed(u: &UncompressedState) -> Result<Self> {
        let mut d = Detector::new(&compress(u)?);
        d.origin = Some(u.to_vec());
        Ok(d)
    }

    pub fn initial(&self) -> &CompressedState {
        &self.initial
    }

    /// Steps applied to the leading pointer so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn current(&self) -> &CompressedState {
        &self.hare
    }

    /// Runs at most `budget` further steps. Returns the report once the
    /// outcome is known.
    pub fn advance(&mut self, budget: u64) -> Option<HaltReport> {
        if self.hare.is_halted() {
            return Some(self.termination());
        }
        let limit = self.steps.saturating_add(budget);
        while limit - self.steps >= CHUNK {
            let e = evolve_fast_tracked(&mut self.hare, CHUNK, &mut self.max_len);
            self.steps += e.steps;
            if e.halted {
                return Some(self.termination());
            }
            self.lam += 1;
            if self.hare == self.tortoise {
                return Some(self.finish_cycle());
            }
            if self.lam == self.power {
                self.tortoise.clone_from(&self.hare);
                self.power *= 2;
                self.lam = 0;
            }
            if self.steps % self.snap_stride == 0 {
                self.snapshots.push((self.steps, self.hare.clone()));
                if self.snapshots.len() > MAX_SNAPSHOTS {
                    self.snap_stride *= 2;
                    let stride = self.snap_stride;
                    self.snapshots.retain(|(t, _)| t % stride == 0);
                }
            }
        }
        let rest = limit - self.steps;
        if rest > 0 {
            let mut probe = self.hare.clone();
            let mut max_len = self.max_len;
            let e = evolve_fast_tracked(&mut probe, rest, &mut max_len);
            if e.halted {
                self.hare = probe;
                self.steps += e.steps;
                self.max_len = max_len;
                return Some(self.termination());
            }
        }
        None
    }

    fn termination(&self) -> HaltReport {
        let residue = (self.hare.uncompressed_len() > 0) as u64;
        HaltReport {
            halting_step: self.steps + residue,
            period: 0,
            transient: self.steps + residue,
            compressed_transient: self.steps,
            final_state: self.hare.clone(),
            max_length_seen: self.max_len,
        }
    }

    fn finish_cycle(&mut self) -> HaltReport {
        let mut probe = self.hare.clone();
        let mut period = 0u64;
        loop {
            probe.step();
            period += 1;
            self.max_len = self.max_len.max(probe.uncompressed_len());
            if probe == self.hare {
                break;
            }
        }
        // The first snapshot already on the cycle bounds the transient from
        // above; the one before it (if any) is the place to start refining.
        let on_cycle = |c: &CompressedState| {
            let mut d = c.clone();
            evolve_fast(&mut d, period);
            d == *c
        };
        let (mut lo, mut hi) = (0usize, self.snapshots.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if on_cycle(&self.snapshots[mid].1) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let (entry_step, entry) = if lo == 0 {
            (0, self.initial.clone())
        } else {
            let (t0, ref s) = self.snapshots[lo - 1];
            let (dt, entry) = compressed_transient(s, period);
            (t0 + dt, entry)
        };
        let ic = match &self.origin {
            Some(symbols) => symbols.clone(),
            None => uncompress(&self.initial, 0).to_vec(),
        };
        let halting_step = uncompressed_transient(&ic, &self.initial, entry_step, period, self.max_len);
        HaltReport {
            halting_step,
            period,
            transient: halting_step,
            compressed_transient: entry_step,
            final_state: entry,
            max_length_seen: self.max_len,
        }
    }

    /// Serializes the full detector state.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = vec![ENCODING_VERSION, self.origin.is_some() as u8];
        self.initial.write_packed(&mut out);
        if let Some(symbols) = &self.origin {
            write_varint(&mut out, symbols.len() as u64);
            for chunk in symbols.chunks(8) {
                out.push(chunk.iter().enumerate().fold(0u8, |acc, (i, &s)| acc | (s << i)));
            }
        }
        self.hare.write_packed(&mut out);
        self.tortoise.write_packed(&mut out);
        for v in [self.power, self.lam, self.steps, self.max_len, self.snap_stride] {
            write_varint(&mut out, v);
        }
        write_varint(&mut out, self.snapshots.len() as u64);
        for (t, c) in &self.snapshots {
            write_varint(&mut out, *t);
            c.write_packed(&mut out);
        }
        out
    }

    pub fn decode(buf: &[u8]) -> Result<Self> {
        let corrupt = |what: &str| Error::Decode(format!("detector state: {what}"));
        if buf.len() < 2 || buf[0] != ENCODING_VERSION {
            return Err(corrupt("unknown version"));
        }
        let has_origin = match buf[1] {
            0 => false,
            1 => true,
            _ => return Err(corrupt("bad flags")),
        };
        let mut pos = 2;
        let state = |pos: &mut usize| -> Result<CompressedState> {
            let (c, used) = CompressedState::read_packed(buf.get(*pos..).unwrap_or(&[]))?;
            *pos += used;
            Ok(c)
        };
        let initial = state(&mut pos)?;
        let origin = if has_origin {
            let (n, used) = read_varint(&buf[pos..])?;
            pos += used;
            let n = n as usize;
            let bytes = buf.get(pos..pos + n.div_ceil(8)).ok_or_else(|| corrupt("truncated origin"))?;
            pos += bytes.len();
            Some((0..n).map(|i| (bytes[i / 8] >> (i % 8)) & 1).collect::<Vec<u8>>())
        } else {
            None
        };
        let hare = state(&mut pos)?;
        let tortoise = state(&mut pos)?;
        let int = |pos: &mut usize| -> Result<u64> {
            let (v, used) = read_varint(buf.get(*pos..).unwrap_or(&[]))?;
            *pos += used;
            Ok(v)
        };
        let (power, lam, steps, max_len, snap_stride) =
            (int(&mut pos)?, int(&mut pos)?, int(&mut pos)?, int(&mut pos)?, int(&mut pos)?);
        let count = int(&mut pos)?;
        if count as usize > MAX_SNAPSHOTS || count == 0 {
            return Err(corrupt("bad snapshot count"));
        }
        let mut snapshots = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let t = int(&mut pos)?;
            let (c, used) = CompressedState::read_packed(buf.get(pos..).unwrap_or(&[]))?;
            pos += used;
            snapshots.push((t, c));
        }
        if pos != buf.len() {
            return Err(corrupt("trailing bytes"));
        }
        if power == 0 || snap_stride == 0 || snap_stride % CHUNK != 0 {
            return Err(corrupt("bad counters"));
        }
        if snapshots[0] != (0, initial.clone()) {
            return Err(corrupt("first snapshot is not the initial state"));
        }
        if let Some(symbols) = &origin {
            if compress(&UncompressedState::new(symbols.iter().copied()))? != initial {
                return Err(corrupt("origin does not match initial state"));
            }
        }
        Ok(Detector { initial, origin, hare, tortoise, power, lam, steps, max_len, snapshots, snap_stride })
    }
}

/// Steps from `start` until its compressed state recurs `period` steps
/// later, together with that state.
fn compressed_transient(start: &CompressedState, period: u64) -> (u64, CompressedState) {
    const REFINE: u64 = 8;
    let mut a = start.clone();
    let mut b = start.clone();
    evolve_fast(&mut b, period);
    let mut t = 0u64;
    let mut prev = (0u64, a.clone(), b.clone());
    while a != b {
        prev.0 = t;
        prev.1.clone_from(&a);
        prev.2.clone_from(&b);
        evolve_fast(&mut a, REFINE);
        evolve_fast(&mut b, REFINE);
        t += REFINE;
    }
    let (mut t, mut a, mut b) = prev;
    while a != b {
        a.step();
        b.step();
        t += 1;
    }
    (t, a)
}

/// First step `t` at which the uncompressed string equals the one `period`
/// steps later. `ic` is the starting string, consistent with `initial`.
fn uncompressed_transient(ic: &[u8], initial: &CompressedState, transient: u64, period: u64, max_len: u64) -> u64 {
    let lookback = max_len.div_ceil(3) + 1;
    let s0 = transient.saturating_sub(lookback);
    let mut c = initial.clone();
    evolve_fast(&mut c, s0);
    let (base, mut stream) = if s0 == 0 { (0, ic.to_vec()) } else { (3 * s0 + c.uncompressed_len(), Vec::new()) };
    let mut len_at_entry = 0;
    for s in s0..transient + period {
        if s == transient {
            len_at_entry = c.uncompressed_len();
        }
        let lead = c.word().front().expect("cycling run never empties");
        stream.extend_from_slice(if lead { &[1, 1, 0, 1] } else { &[0, 0] });
        c.step();
    }
    let first = (3 * transient - base) as usize;
    let second = first + 3 * period as usize;
    let last_mismatch = (0..len_at_entry as usize).rev().find(|&j| stream[first + j] != stream[second + j]);
    match last_mismatch {
        None => transient,
        Some(j) => transient + j as u64 / 3 + 1,
    }
}

/// Decides whether `c` terminates or cycles within `max_steps` steps.
pub fn detect_halt(c: &CompressedState, max_steps: u64) -> Verdict {
    let mut d = Detector::new(c);
    match d.advance(max_steps) {
        Some(r) => Verdict::Decided(r),
        None => Verdict::Undecided(Box::new(d)),
    }
}

/// As [`detect_halt`], for an explicit binary starting string.
pub fn detect_halt_uncompressed(u: &UncompressedState, max_steps: u64) -> Result<Verdict> {
    let mut d = Detector::from_uncompressed(u)?;
    Ok(match d.advance(max_steps) {
        Some(r) => Verdict::Decided(r),
        None => Verdict::Undecided(Box::new(d)),
    })
}

/// Uncompressed lengths sampled every `stride` steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LengthTrace {
    pub stride: u64,
    /// Length at steps 0, stride, 2*stride, ...
    pub lengths: Vec<u64>,
    /// Steps applied.
    pub steps: u64,
    pub halted: bool,
}

pub const DEFAULT_TRACE_POINTS: usize = 1 << 20;

pub fn length_trace(c: &CompressedState, max_steps: u64) -> LengthTrace {
    length_trace_thinned(c, max_steps, DEFAULT_TRACE_POINTS)
}

/// Trace that keeps at most `max_points` entries by doubling the stride
/// whenever it fills up.
pub fn length_trace_thinned(c: &CompressedState, max_steps: u64, max_points: usize) -> LengthTrace {
    let max_points = max_points.max(2);
    let mut s = c.clone();
    let mut trace = LengthTrace { stride: 1, lengths: vec![s.uncompressed_len()], steps: 0, halted: false };
    while trace.steps < max_steps {
        if !s.step() {
            trace.halted = true;
            break;
        }
        trace.steps += 1;
        if trace.steps % trace.stride == 0 {
            trace.lengths.push(s.uncompressed_len());
            if trace.lengths.len() > max_points {
                let kept: Vec<u64> = trace.lengths.iter().copied().step_by(2).collect();
                trace.lengths = kept;
                trace.stride *= 2;
            }
        }
    }
    trace.halted |= s.is_halted();
    trace
}

/// States at generation boundaries. A generation consumes every complete
/// 3-symbol block present at its start, so it lasts `floor(L/3)` steps for
/// uncompressed length `L`; leftover symbols carry into the next one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationTrace {
    pub boundaries: Vec<u64>,
    pub states: Vec<CompressedState>,
    pub halted: bool,
}

impl GenerationTrace {
    /// Period of the boundary sequence once it starts repeating.
    pub fn eventual_period(&self) -> Option<usize> {
        let mut seen: HashMap<&CompressedState, usize> = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if let Some(&j) = seen.get(s) {
                return Some(i - j);
            }
            seen.insert(s, i);
        }
        None
    }
}

pub fn generation_trace(c: &CompressedState, max_generations: usize) -> GenerationTrace {
    let mut s = c.clone();
    let mut step = 0u64;
    let mut trace = GenerationTrace { boundaries: vec![0], states: vec![s.clone()], halted: false };
    for _ in 0..max_generations {
        if s.is_halted() {
            trace.halted = true;
            break;
        }
        let k = s.uncompressed_len() / 3;
        let e = evolve_fast(&mut s, k);
        step += e.steps;
        trace.boundaries.push(step);
        trace.states.push(s.clone());
    }
    trace.halted |= s.is_halted();
    trace
}

/// `len:value:phase` of the starting state, for records.
pub fn id_of(c: &CompressedState) -> String {
    format_state_id(c)
}
