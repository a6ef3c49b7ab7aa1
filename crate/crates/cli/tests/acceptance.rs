//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if a hard criterion fails. Every tolerance is a named constant
//! below.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tagforge::cycles::{count_distinct_cycles, count_on_cycle_strings, family_cycles};
use tagforge::enumeration::{enumerate_initial, halting_times, search_winners, survival_tail_slope, WinnerRecord};
use tagforge::grams::{entropies, forbidden_blocks, mgram_count, mgram_multiplicity_table};
use tagforge::halting::detect_halt_uncompressed;
use tagforge::numiter::{bias, collatz_run, residue_run, riemann_quantity, ResidueRule};
use tagforge::walkstats::{first_passage_pdf, winner_growth_fit};
use tagforge::zoo::{
    collatz_embedding_rule, collatz_embedding_trace, ones_run_sequence, zoo_detect_halt, GeneralRule, RunEnd, ZooState,
};
use tagforge::tagcore::{integer_pair_step, IntegerPairState};
use tagforge::{
    compress, detect_halt, evolve_fast, parse_state_id, step_compressed, uncompress, CompressedState, Phase, TagRule,
    UncompressedState,
};
use tagforge_cli::run_cli;

const SEARCH_CAP: u64 = 1 << 34;
const DESK_STEP_CAP: u64 = 30_000;
const DESK_SECONDS: u64 = 60;
const ALLOWED_PERIODS: [u64; 6] = [0, 2, 6, 10, 28, 40];
const ORACLE_MAX_M: u32 = 8;
const REPR_STEPS: u64 = 200;
const REPR_MAX_M: u32 = 6;
const SET_ENTROPY: f64 = 0.347;
const SET_ENTROPY_TOL: f64 = 0.005;
const SET_ENTROPY_M: usize = 24;
const TAIL_M: u32 = 15;
const TAIL_SLOPE: f64 = -0.5;
const TAIL_SLOPE_TOL: f64 = 0.15;
const GROWTH_BASE: (f64, f64) = (2.2, 3.5);
const MC_START: u64 = 20;
const MC_SAMPLES: usize = 200_000;
const MC_SEED: u64 = 0x7a6f_6f31;
const MC_EDGES: [u64; 8] = [51, 101, 201, 401, 801, 1601, 3201, 6401];
const MC_SIGMAS: f64 = 3.0;
const BIAS_TOL: f64 = 0.01;
const COLLATZ_BIAS: f64 = -0.1383;
const FIVE_N_BIAS: f64 = 0.11;
const MOD3_BIAS: f64 = 0.0531;
const PERF_ID: &str = "15:30074:0";
const PERF_STEPS: u64 = 1_000_000_000;
const PERF_FLOOR: f64 = 1e8;
const RESUME_POINTS: usize = 10;
const RESUME_SEED: u64 = 12;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn state(id: &str) -> CompressedState {
    parse_state_id(id).unwrap()
}

// ---- 1 ----

fn winners_table() -> Outcome {
    let expect: [(&str, u64, u64); 5] =
        [("4:14:0", 419, 0), ("6:58:0", 2141, 28), ("9:506:0", 24_552, 6), ("12:3962:0", 253_456, 6), ("13:5854:0", 341_992, 6)];
    let search = search_winners(13, SEARCH_CAP);
    let mut bad = Vec::new();
    let mut lines = Vec::new();
    for (id, steps, period) in expect {
        match search.winners.iter().find(|w| w.state_id == id) {
            Some(w) if w.halting_step == steps && w.period == period => lines.push(format!("{id}={steps}/{period}")),
            Some(w) => bad.push(format!("{id}: got {}/{} want {steps}/{period}", w.halting_step, w.period)),
            None => bad.push(format!("{id}: not a winner")),
        }
    }
    if !search.undecided.is_empty() {
        bad.push(format!("{} undecided", search.undecided.len()));
    }
    let long = detect_halt(&state("15:16346:0"), SEARCH_CAP).into_report().map(|r| r.halting_step);
    let info = format!("15:16346:0 -> {long:?} (reference 20858069 or 20858103)");
    if bad.is_empty() {
        Ok(format!("{}; {info}", lines.join(", ")))
    } else {
        Err(format!("{}; matched {}; {info}", bad.join("; "), lines.join(", ")))
    }
}

// ---- 2 ----

fn small_states() -> Outcome {
    let a = detect_halt_uncompressed(&UncompressedState::parse_digits("10010").unwrap(), 1 << 20).unwrap().into_report().unwrap();
    let b = detect_halt_uncompressed(&UncompressedState::parse_digits("100100100100100100").unwrap(), 1 << 20)
        .unwrap()
        .into_report()
        .unwrap();
    check(
        (a.transient, a.period) == (16, 6) && (b.transient, b.period) == (47, 10),
        format!("10010 -> {}/{}, 100100100100100100 -> {}/{}", a.transient, a.period, b.transient, b.period),
    )
}

// ---- 3 ----

fn desk_scale() -> Outcome {
    let started = Instant::now();
    let mut periods = BTreeSet::new();
    let mut count = 0u64;
    let mut failures = Vec::new();
    for m in 0..=9 {
        for c in enumerate_initial(m, &Phase::ALL) {
            count += 1;
            // Detection may overshoot the halting step, so only the
            // reported step is held to the cap.
            match detect_halt(&c, 4 * DESK_STEP_CAP).into_report() {
                Some(r) if r.halting_step <= DESK_STEP_CAP => {
                    periods.insert(r.period);
                }
                _ => failures.push(tagforge::format_state_id(&c)),
            }
        }
    }
    let elapsed = started.elapsed();
    let subset = periods.iter().all(|p| ALLOWED_PERIODS.contains(p));
    check(
        failures.is_empty() && subset && elapsed < Duration::from_secs(DESK_SECONDS),
        format!("{count} ICs, periods {periods:?}, beyond {DESK_STEP_CAP} steps {failures:?}, {:.2}s", elapsed.as_secs_f64()),
    )
}

// ---- 4 ----

/// (halting step, period) by storing every uncompressed state.
fn brute_uncompressed(u: &UncompressedState) -> (u64, u64) {
    let rule = TagRule::post();
    let mut seen: HashMap<Vec<u8>, u64> = HashMap::new();
    let mut s = u.to_vec();
    let mut t = 0u64;
    loop {
        if s.len() < 3 {
            return (t + u64::from(!s.is_empty()), 0);
        }
        if let Some(&first) = seen.get(&s) {
            return (first, t - first);
        }
        seen.insert(s.clone(), t);
        let head = s[0];
        s.drain(..3);
        s.extend_from_slice(rule.append_for(head));
        t += 1;
    }
}

/// (first on-cycle step, period) over compressed states; period 0 when the
/// run halts, with the step count at the halted state.
fn brute_compressed(c: &CompressedState) -> (u64, u64) {
    let mut seen: HashMap<CompressedState, u64> = HashMap::new();
    let mut s = c.clone();
    let mut t = 0u64;
    loop {
        if let Some(&first) = seen.get(&s) {
            return (first, t - first);
        }
        seen.insert(s.clone(), t);
        match step_compressed(&s) {
            Some(n) => s = n,
            None => return (t, 0),
        }
        t += 1;
    }
}

/// Empty words are equal whatever their phase.
fn same(a: &CompressedState, b: &CompressedState) -> bool {
    a == b || (a.word_len() == 0 && b.word_len() == 0)
}

fn oracle_equivalence() -> Outcome {
    let mut checked = 0u64;
    for m in 0..=ORACLE_MAX_M {
        for c in enumerate_initial(m, &Phase::ALL) {
            let r = detect_halt(&c, 1 << 30).into_report().ok_or_else(|| format!("{c:?} undecided"))?;
            let u = uncompress(&c, 0);
            let (steps, period) = brute_uncompressed(&u);
            let (ct, cp) = brute_compressed(&c);
            if (r.halting_step, r.period) != (steps, period) || (r.compressed_transient, r.period) != (ct, cp) {
                return Err(format!(
                    "{}: brent {}/{}/{} brute {steps}/{period}/{ct}",
                    tagforge::format_state_id(&c),
                    r.halting_step,
                    r.period,
                    r.compressed_transient
                ));
            }
            checked += 1;
        }
    }
    let rule = TagRule::post();
    let mut repr = 0u64;
    for m in 0..=REPR_MAX_M {
        for c0 in enumerate_initial(m, &Phase::ALL) {
            let mut u = uncompress(&c0, 0);
            let mut c = c0.clone();
            let mut fast = c0.clone();
            let mut pair = IntegerPairState::from_uncompressed(&u).unwrap();
            for t in 0..REPR_STEPS {
                let agree = same(&compress(&u).unwrap(), &c) && fast == c && pair.to_uncompressed() == u;
                if !agree {
                    return Err(format!("{} disagrees at step {t}", tagforge::format_state_id(&c0)));
                }
                if !u.step_in_place(&rule).unwrap() {
                    if step_compressed(&c).is_some() || !evolve_fast(&mut fast, 1).halted || integer_pair_step(&pair).is_ok() {
                        return Err(format!("{} halts unevenly at step {t}", tagforge::format_state_id(&c0)));
                    }
                    break;
                }
                c = step_compressed(&c).ok_or_else(|| format!("compressed halted early at {t}"))?;
                evolve_fast(&mut fast, 1);
                pair = integer_pair_step(&pair).map_err(|e| e.to_string())?;
            }
            repr += 1;
        }
    }
    Ok(format!("{checked} ICs match brute force; {repr} ICs agree in 4 representations for {REPR_STEPS} steps"))
}

// ---- 5 ----

fn canonical_on_cycle(c: &CompressedState) -> (u64, CompressedState) {
    let (first, period) = brute_compressed(c);
    let mut s = c.clone();
    for _ in 0..first {
        s = step_compressed(&s).unwrap();
    }
    let mut least = s.clone();
    for _ in 0..period {
        s = step_compressed(&s).unwrap();
        least = least.min(s.clone());
    }
    (period, least)
}

fn block_word(n: u32, pattern: u64) -> CompressedState {
    let mut bits = Vec::new();
    for i in 0..n {
        bits.extend_from_slice(if (pattern >> i) & 1 == 1 { &[1, 1, 0, 0][..] } else { &[0, 1][..] });
    }
    CompressedState::from_bits(Phase::Zero, &bits)
}

fn necklaces_without_adjacent_zeros(n: u32) -> u64 {
    let mut reps = BTreeSet::new();
    for w in 0..1u64 << n {
        let rot = |w: u64, k: u32| ((w >> k) | (w << (n - k))) & ((1 << n) - 1);
        if (0..n).any(|i| (w >> i) & 1 == 0 && (w >> ((i + 1) % n)) & 1 == 0) {
            continue;
        }
        reps.insert((0..n).map(|k| rot(w, k)).min().unwrap());
    }
    reps.len() as u64
}

fn cycle_combinatorics() -> Outcome {
    let want: [u64; 15] = [2, 3, 4, 6, 8, 14, 20, 36, 60, 108, 188, 352, 632, 1182, 2192];
    let got: Vec<u64> = (1..=15).map(|n| count_distinct_cycles(n).try_into().unwrap()).collect();
    let on20 = count_on_cycle_strings(20);
    let table: [&[u64]; 6] = [
        &[2, 4],
        &[2, 4, 6],
        &[2, 4, 8, 10],
        &[2, 4, 6, 10, 12, 14],
        &[2, 4, 12, 14, 14, 16, 16, 18],
        &[2, 4, 6, 8, 10, 14, 16, 16, 18, 18, 18, 20, 20, 22],
    ];
    let mut bad = Vec::new();
    if got != want {
        bad.push(format!("count_distinct_cycles {got:?}"));
    }
    if on20 != BigUint::from(766u32) {
        bad.push(format!("count_on_cycle_strings(20) = {on20}"));
    }
    for (b, periods) in (1..=6).zip(table) {
        let mut p: Vec<u64> = family_cycles(b).iter().map(|d| d.period).collect();
        p.sort_unstable();
        if p != periods {
            bad.push(format!("b={b}: {p:?}"));
        }
    }
    for n in 1..=8u32 {
        let cycles: BTreeSet<_> = (0..1u64 << n).map(|pat| canonical_on_cycle(&block_word(n, pat))).collect();
        if BigUint::from(cycles.len()) != count_distinct_cycles(n as u64) {
            bad.push(format!("n={n}: {} cycles enumerated", cycles.len()));
        }
        if BigUint::from(necklaces_without_adjacent_zeros(n)) != count_on_cycle_strings(n as u64) {
            bad.push(format!("n={n}: on-cycle strings"));
        }
    }
    check(bad.is_empty(), if bad.is_empty() { "all counts and b=1..6 period multisets match; formulas agree for n<=8".into() } else { bad.join("; ") })
}

// ---- 6 ----

fn gram_census() -> Outcome {
    let want: [u64; 19] = [2, 4, 8, 12, 15, 20, 25, 33, 41, 54, 67, 88, 109, 143, 177, 232, 287, 376, 465];
    let got: Vec<u64> = (1..=19).map(mgram_count).collect();
    let t4: Vec<(u128, u64)> = mgram_multiplicity_table(4).into_iter().collect();
    let t8: Vec<(u128, u64)> = mgram_multiplicity_table(8).into_iter().collect();
    let h = entropies(SET_ENTROPY_M).set_entropy;
    let forbidden = forbidden_blocks(4);
    let ok = got == want
        && forbidden == ["0010", "0101", "1100", "1111"]
        && t4 == [(1, 3), (2, 7), (3, 1), (4, 1)]
        && t8 == [(1, 3), (2, 15), (3, 1), (4, 13), (8, 1)]
        && (h - SET_ENTROPY).abs() <= SET_ENTROPY_TOL;
    check(ok, format!("counts {}, forbidden {forbidden:?}, m=4 {t4:?}, m=8 {t8:?}, set entropy {h:.4}", if got == want { "match" } else { "differ" }))
}

// ---- 7 ----

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn walk_statistics() -> Outcome {
    let times: Vec<u64> = halting_times(TAIL_M, SEARCH_CAP).into_iter().map(|t| t.expect("m=15 ICs are decided")).collect();
    let slope = survival_tail_slope(&times).unwrap();
    let slope_ok = (slope - TAIL_SLOPE).abs() <= TAIL_SLOPE_TOL;

    let search = search_winners(13, SEARCH_CAP);
    let mut per_length: Vec<(u32, u64)> = Vec::new();
    for WinnerRecord { state_id, halting_step, .. } in search.winners.iter().filter(|w| w.halting_step > 0) {
        let m = state(state_id).word_len() as u32;
        match per_length.last_mut() {
            Some(last) if last.0 == m => last.1 = *halting_step,
            _ => per_length.push((m, *halting_step)),
        }
    }
    let base = winner_growth_fit(&per_length).unwrap();
    let base_ok = (GROWTH_BASE.0..=GROWTH_BASE.1).contains(&base);

    // Independent +-1 walk: first passage counts per bin against the
    // integrated continuum density.
    let horizon = *MC_EDGES.last().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(MC_SEED);
    let mut counts = vec![0u64; MC_EDGES.len() - 1];
    for _ in 0..MC_SAMPLES {
        let mut h = MC_START as i64;
        let mut t = 0u64;
        while h > 0 && t < horizon {
            h += if rng.random::<bool>() { 1 } else { -1 };
            t += 1;
        }
        if h == 0 {
            if let Some(bin) = MC_EDGES.windows(2).position(|w| w[0] < t && t <= w[1]) {
                counts[bin] += 1;
            }
        }
    }
    let x = MC_START as f64;
    let mut worst: f64 = 0.0;
    for (bin, w) in MC_EDGES.windows(2).enumerate() {
        let p = simpson(|t| first_passage_pdf(x, t).unwrap(), w[0] as f64, w[1] as f64, 2000);
        let sigma = (p * (1.0 - p) / MC_SAMPLES as f64).sqrt();
        let observed = counts[bin] as f64 / MC_SAMPLES as f64;
        worst = worst.max((observed - p).abs() / sigma);
    }
    let mc_ok = worst <= MC_SIGMAS;
    check(
        slope_ok && base_ok && mc_ok,
        format!(
            "tail slope {slope:.3} (want {TAIL_SLOPE}±{TAIL_SLOPE_TOL}) {}; growth base {base:.3} {}; first passage worst {worst:.2}σ {}",
            verdict(slope_ok),
            verdict(base_ok),
            verdict(mc_ok)
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "MISS"
    }
}

// ---- 8 ----

/// Store-everything interpreter for the zoo rules used below. Returns
/// (halting step, period).
fn zoo_oracle(rule: &str, start: &str) -> (u64, u64) {
    let digits: Vec<u8> = start.bytes().map(|b| b - b'0').collect();
    let cyclic: Option<Vec<Vec<u8>>> = rule.strip_prefix("cyclic ").map(|rest| {
        rest.split(',').map(|b| b.bytes().map(|x| x - b'0').collect()).collect()
    });
    // "k=.. r=.. sym:append" or "r=.. block:append".
    let mut r = 0usize;
    let mut table: HashMap<Vec<u8>, Vec<u8>> = HashMap::new();
    let mut by_block = false;
    if cyclic.is_none() {
        for tok in rule.split_whitespace() {
            if let Some(v) = tok.strip_prefix("r=") {
                r = v.parse().unwrap();
            } else if let Some((lhs, rhs)) = tok.split_once(':') {
                by_block |= lhs.len() > 1;
                table.insert(lhs.bytes().map(|b| b - b'0').collect(), rhs.bytes().map(|b| b - b'0').collect());
            }
        }
    }
    let mut seen: HashMap<(Vec<u8>, usize), u64> = HashMap::new();
    let mut s = digits;
    let mut cursor = 0usize;
    let mut t = 0u64;
    loop {
        let halted = match &cyclic {
            Some(_) => s.is_empty(),
            None => s.len() < r,
        };
        if halted {
            return (t + u64::from(!s.is_empty()), 0);
        }
        let key = (s.clone(), cursor);
        if let Some(&first) = seen.get(&key) {
            return (first, t - first);
        }
        seen.insert(key, t);
        match &cyclic {
            Some(blocks) => {
                let x = s.remove(0);
                if x == 1 {
                    s.extend_from_slice(&blocks[cursor]);
                }
                cursor = (cursor + 1) % blocks.len();
            }
            None => {
                let head: Vec<u8> = if by_block { s[..r].to_vec() } else { vec![s[0]] };
                s.drain(..r);
                s.extend_from_slice(&table[&head]);
            }
        }
        t += 1;
    }
}

fn zoo_golden() -> Outcome {
    // rule, start, reference value
    let rows: [(&str, &str, &str); 9] = [
        ("r=2 00:0 10:101 01:000 11:011", "11", "288 / 289"),
        ("r=2 00:0 10:101 01:000 11:011", "01100", "706/8"),
        ("k=3 r=2 0:0 1:02 2:211", "101", "74"),
        ("k=3 r=2 0:0 1:02 2:211", "202020", "6627"),
        ("k=3 r=2 0:0 1:02 2:112", "20", "period 18255"),
        ("cyclic 01,0,011", "0111", "169"),
        ("cyclic 01,0,011", "10101", "1259"),
        ("cyclic 01,0,011", "1111110", "6470"),
        ("cyclic 01,0,011", "001111", "-"),
    ];
    let mut lines = Vec::new();
    let mut bad = Vec::new();
    for (lit, start, reference) in rows {
        let rule: GeneralRule = lit.parse().unwrap();
        let s: ZooState = rule.parse_digits(start).unwrap();
        let r = zoo_detect_halt(&rule, &s, 1 << 24).unwrap().into_report().unwrap();
        let want = zoo_oracle(lit, start);
        let id = rule.format_state(&s);
        if (r.halting_step, r.period) != want {
            bad.push(format!("[{lit}] {id}: engine {}/{} oracle {}/{}", r.halting_step, r.period, want.0, want.1));
        }
        lines.push(format!("{id}={}/{} (reference {reference})", r.halting_step, r.period));
    }
    check(bad.is_empty(), if bad.is_empty() { lines.join(", ") } else { bad.join("; ") })
}

// ---- 9 ----

fn interpretable() -> Outcome {
    let mut bad = Vec::new();
    let doubling: GeneralRule = "k=3 r=2 1:22 2:1111".parse().unwrap();
    let runs = ones_run_sequence(&doubling, 2, 1 << 22).unwrap();
    let want: Vec<u64> = (1..=9).map(|e| 1 << e).collect();
    if runs.values.get(..want.len()) != Some(&want[..]) {
        bad.push(format!("doubling {:?}", &runs.values[..runs.values.len().min(12)]));
    }
    let three_halves: GeneralRule = "k=3 r=2 1:22 2:111".parse().unwrap();
    let runs = ones_run_sequence(&three_halves, 2, 1 << 24).unwrap();
    let mut want = vec![2u64];
    while *want.last().unwrap() < 3596 {
        let n = *want.last().unwrap();
        want.push((3 * n).div_ceil(2));
    }
    if runs.values.get(..want.len()) != Some(&want[..]) {
        bad.push("ceiling(3n/2) sequence".into());
    }
    let closed: GeneralRule = "k=3 r=2 1:12 2:111".parse().unwrap();
    for n in 2..=64u64 {
        let runs = ones_run_sequence(&closed, n, 1 << 22).unwrap();
        let e = (n + 1).trailing_zeros();
        let f = 3u64.pow(e) * ((n + 1) >> e) - 1;
        if runs.end != RunEnd::Cycled || runs.values.last() != Some(&f) {
            bad.push(format!("closed form n={n}"));
        }
    }
    let emb = collatz_embedding_trace(&collatz_embedding_rule(), 5, 1 << 20).unwrap();
    if (emb.values.as_slice(), emb.steps, emb.end) != (&[5u64, 8, 4, 2, 1][..], 21, RunEnd::Halted) {
        bad.push(format!("embedding from 5: {:?} in {}", emb.values, emb.steps));
    }
    check(
        bad.is_empty(),
        if bad.is_empty() { "powers of 2 to 512, ceiling(3n/2) to 3596, closed form n=2..64, 5,8,4,2,1 in 21 steps".into() } else { bad.join("; ") },
    )
}

// ---- 10 ----

fn number_iterations() -> Outcome {
    let mut bad = Vec::new();
    let r27 = collatz_run(&BigUint::from(27u32), 1 << 20).unwrap().cycle.unwrap();
    if r27.steps_to_minimum != 110 {
        bad.push(format!("27 -> {} steps to 1 (first on-cycle step {})", r27.steps_to_minimum, r27.transient));
    }
    let big = collatz_run(&BigUint::from(670_617_279u32), 1 << 20).unwrap().cycle.unwrap();
    if big.steps_to_minimum != 986 {
        bad.push(format!("670617279 -> {}", big.steps_to_minimum));
    }
    let res = residue_run(&ResidueRule::mod3_example(), &BigInt::from(101), 1 << 20).cycle.unwrap();
    if (res.transient, res.period) != (2604, 20) {
        bad.push(format!("IC 101 -> {}/{}", res.transient, res.period));
    }
    let b3 = bias(&ResidueRule::collatz());
    let b5 = bias(&ResidueRule::five_n_plus_one());
    // The mod-3 rule advances three residue steps per bit of drift; compare
    // the three-step value.
    let bm = 3.0 * bias(&ResidueRule::mod3_example());
    for (name, got, want) in [("3n+1", b3, COLLATZ_BIAS), ("5n+1", b5, FIVE_N_BIAS), ("mod3", bm, MOD3_BIAS)] {
        if (got - want).abs() > BIAS_TOL {
            bad.push(format!("bias {name} {got:.4}"));
        }
    }
    let want: [u64; 10] = [1, 9, 127, 981, 16209, 207135, 3821007, 55666269, 1250264481, 26427261303];
    for (n, w) in (1..=10).zip(want) {
        if riemann_quantity(n).unwrap() != BigInt::from(w) {
            bad.push(format!("riemann_quantity({n})"));
        }
    }
    let detail = format!(
        "27 -> {}, 670617279 -> {}, IC 101 -> {}/{}, bias {b3:.4}/{b5:.4}/{bm:.4}",
        r27.steps_to_minimum, big.steps_to_minimum, res.transient, res.period
    );
    check(bad.is_empty(), if bad.is_empty() { detail } else { format!("{}; {detail}", bad.join("; ")) })
}

// ---- 11 ----

fn performance() -> Outcome {
    let mut c = state(PERF_ID);
    // Skip the start-up so the segment runs on long strings.
    evolve_fast(&mut c, 1 << 20);
    let started = Instant::now();
    let e = evolve_fast(&mut c, PERF_STEPS);
    let secs = started.elapsed().as_secs_f64();
    let rate = e.steps as f64 / secs;
    check(!e.halted && rate >= PERF_FLOOR, format!("{:.3e} steps/s over {} steps ({secs:.2}s)", rate, e.steps))
}

// ---- 12 ----

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("tagforge").chain(args.iter().copied()), &mut out, &mut err);
    (code, out)
}

fn checkpoint_integrity() -> Outcome {
    let id = "12:3962:0";
    let (code, reference) = cli(&["run", id]);
    if code != 0 {
        return Err(format!("uninterrupted run exited {code}"));
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(RESUME_SEED);
    let mut points = Vec::new();
    for i in 0..RESUME_POINTS {
        let stop: u64 = rng.random_range(64..253_000);
        let path = dir.path().join(format!("ck{i}"));
        let p = path.to_str().unwrap();
        let (code, _) = cli(&["run", id, "--max-steps", &stop.to_string(), "--checkpoint", p]);
        if code != 2 {
            return Err(format!("interrupted run at {stop} exited {code}"));
        }
        let (code, resumed) = cli(&["run", "--resume", p]);
        if code != 0 || resumed != reference {
            return Err(format!("resume from {stop} gave exit {code}: {}", String::from_utf8_lossy(&resumed)));
        }
        points.push(stop);
    }
    Ok(format!("{RESUME_POINTS} resumes byte-identical (stops {points:?})"))
}

fn main() {
    let criteria: [(u32, &str, bool, fn() -> Outcome); 12] = [
        (1, "winners table", true, winners_table),
        (2, "small-state ground truth", true, small_states),
        (3, "exhaustive halting m<=9", true, desk_scale),
        (4, "oracle equivalence", true, oracle_equivalence),
        (5, "cycle combinatorics", true, cycle_combinatorics),
        (6, "gram census", true, gram_census),
        (7, "walk statistics", true, walk_statistics),
        (8, "zoo golden values", true, zoo_golden),
        (9, "interpretable functions", true, interpretable),
        (10, "number iterations", true, number_iterations),
        (11, "fast path throughput (soft)", false, performance),
        (12, "checkpoint integrity", true, checkpoint_integrity),
    ];
    let mut hard_failures = 0;
    for (n, name, hard, f) in criteria {
        let started = Instant::now();
        let outcome = f();
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name} [{secs:.1}s]: {detail}"),
            Err(detail) => {
                let tag = if hard { "FAIL" } else { "FAIL (soft, not fatal)" };
                println!("criterion {n:>2} {tag}  {name} [{secs:.1}s]: {detail}");
                hard_failures += usize::from(hard);
            }
        }
    }
    println!("{hard_failures} hard criteria failed");
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
