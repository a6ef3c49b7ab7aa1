use serde::{Deserialize, Serialize};

use super::{zoo_detect_halt, zoo_step, GeneralRule, ZooHaltReport, ZooState, ZooVerdict};
use crate::enumeration::least_squares_slope;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthClass {
    Halts,
    Cycles,
    LinearGrowth,
    SqrtGrowth,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub class: GrowthClass,
    /// Slope of the winning model: symbols per step, or per sqrt(step).
    pub rate: Option<f64>,
    pub steps: u64,
    /// Count of 1s over count of 0s in the final string.
    pub ones_to_zeros: Option<f64>,
    pub halt: Option<ZooHaltReport>,
}

/// Fitted slopes below this count as no growth.
pub const GROWTH_MIN_RATE: f64 = 1e-3;
const GROWTH_SAMPLES: u64 = 4096;

fn fit_rss(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let slope = least_squares_slope(xs, ys)?;
    let n = xs.len() as f64;
    let icept = (ys.iter().sum::<f64>() - slope * xs.iter().sum::<f64>()) / n;
    let rss = xs.iter().zip(ys).map(|(x, y)| (y - icept - slope * x).powi(2)).sum();
    Some((slope, rss))
}

/// Runs the detector for `cap` steps; if nothing is decided, fits the
/// length trace over the last 75% of the run to `a + c t` and `a + c sqrt(t)`
/// and keeps the model with the smaller residual sum of squares. Both models
/// have two parameters, so this is the AIC comparison too. A winning slope
/// under [`GROWTH_MIN_RATE`] leaves the run undecided.
pub fn growth_analyzer(rule: &GeneralRule, start: &ZooState, cap: u64) -> Result<GrowthReport> {
    if let ZooVerdict::Decided(r) = zoo_detect_halt(rule, start, cap)? {
        return Ok(GrowthReport {
            class: if r.terminated() { GrowthClass::Halts } else { GrowthClass::Cycles },
            rate: None,
            steps: r.halting_step,
            ones_to_zeros: None,
            halt: Some(r),
        });
    }
    let every = (cap / GROWTH_SAMPLES).max(1);
    let mut s = start.clone();
    let (mut ts, mut lens) = (Vec::new(), Vec::new());
    for t in 1..=cap {
        zoo_step(rule, &mut s)?;
        if t % every == 0 && t * 4 > cap {
            ts.push(t as f64);
            lens.push(s.len() as f64);
        }
    }
    let ones = s.symbols.iter().filter(|&&x| x == 1).count() as f64;
    let zeros = s.symbols.iter().filter(|&&x| x == 0).count() as f64;
    let roots: Vec<f64> = ts.iter().map(|t| t.sqrt()).collect();
    let (class, rate) = match (fit_rss(&ts, &lens), fit_rss(&roots, &lens)) {
        (Some((lin, lin_rss)), Some((sq, sq_rss))) => {
            if lin_rss <= sq_rss && lin > GROWTH_MIN_RATE {
                (GrowthClass::LinearGrowth, Some(lin))
            } else if sq_rss < lin_rss && sq > GROWTH_MIN_RATE {
                (GrowthClass::SqrtGrowth, Some(sq))
            } else {
                (GrowthClass::Undecided, None)
            }
        }
        _ => (GrowthClass::Undecided, None),
    };
    Ok(GrowthReport {
        class,
        rate,
        steps: cap,
        ones_to_zeros: (zeros > 0.0).then_some(ones / zeros),
        halt: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunEnd {
    Halted,
    Cycled,
    /// The step budget ran out; more values may follow.
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OnesRuns {
    pub values: Vec<u64>,
    pub end: RunEnd,
    /// Steps simulated, or the halting step for terminating runs.
    pub steps: u64,
}

/// Lengths of the successive all-1 strings seen from `n` ones, the initial
/// string included. Values stop once the run halts or has gone once round
/// its cycle.
pub fn ones_run_sequence(rule: &GeneralRule, n: u64, cap: u64) -> Result<OnesRuns> {
    if !matches!(rule, GeneralRule::FirstElement { .. }) {
        return Err(Error::InvalidArgument("ones runs need a first-element rule".into()));
    }
    if rule.alphabet_size() < 2 {
        return Err(Error::InvalidArgument("alphabet has no symbol 1".into()));
    }
    let start = ZooState::new(std::iter::repeat(1u8).take(n as usize));
    let (limit, end, steps) = match zoo_detect_halt(rule, &start, cap)? {
        ZooVerdict::Decided(r) if r.terminated() => (r.halting_step, RunEnd::Halted, r.halting_step),
        ZooVerdict::Decided(r) => (r.transient + r.period, RunEnd::Cycled, r.transient + r.period),
        ZooVerdict::Undecided { .. } => (cap, RunEnd::Truncated, cap),
    };
    let mut s = start;
    let mut others = 0usize;
    let mut values = vec![n];
    for _ in 0..limit {
        let r = rule.deletion();
        if s.len() < r {
            break;
        }
        others -= s.symbols.iter().take(r).filter(|&&x| x != 1).count();
        let before = s.len() - r;
        zoo_step(rule, &mut s)?;
        others += s.symbols.iter().skip(before).filter(|&&x| x != 1).count();
        if others == 0 && !s.is_empty() {
            values.push(s.len() as u64);
        }
    }
    Ok(OnesRuns { values, end, steps })
}

/// The 3n+1 embedding `{1 -> 23, 2 -> 1, 3 -> 111}` with `r = 2`.
pub fn collatz_embedding_rule() -> GeneralRule {
    "k=4 r=2 1:23 2:1 3:111".parse().unwrap()
}

/// The variant `{1 -> 23, 2 -> 111, 3 -> 1}`.
pub fn collatz_variant_rule() -> GeneralRule {
    "k=4 r=2 1:23 2:111 3:1".parse().unwrap()
}

/// Ones-run lengths of one of the two Collatz-style embeddings. For the
/// 3n+1 embedding these follow `n -> n/2`, `n -> (3n+1)/2` down to 1, where
/// the tag system stops.
pub fn collatz_embedding_trace(rule: &GeneralRule, n: u64, cap: u64) -> Result<OnesRuns> {
    if *rule != collatz_embedding_rule() && *rule != collatz_variant_rule() {
        return Err(Error::InvalidArgument(format!("{rule} is not a Collatz embedding")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let runs = ones_run_sequence(rule, n, cap)?;
    if runs.end == RunEnd::Truncated {
        return Err(Error::InsufficientData(format!("no halt within {cap} steps from {n}")));
    }
    Ok(runs)
}
