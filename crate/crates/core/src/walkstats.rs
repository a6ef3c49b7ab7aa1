//! Random-walk reference laws and the machinery used to compare tag-system
//! length traces against them.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumeration::least_squares_slope;
use crate::error::{Error, Result};
use crate::halting::{detect_halt, length_trace};
use crate::tagcore::{format_state_id, CompressedState};

fn check_positive(x: f64, t: f64) -> Result<()> {
    if x > 0.0 && t > 0.0 && x.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("need x > 0 and t > 0, got x={x}, t={t}")))
    }
}

/// Density of the first time a unit-variance Brownian motion started at
/// height `x` reaches 0.
pub fn first_passage_pdf(x: f64, t: f64) -> Result<f64> {
    check_positive(x, t)?;
    Ok(x * (-x * x / (2.0 * t)).exp() / (2.0 * std::f64::consts::PI * t.powi(3)).sqrt())
}

/// Where `first_passage_pdf(x, .)` peaks.
pub fn first_passage_mode(x: f64) -> f64 {
    x * x / 3.0
}

/// Probability that the walk from `x` has not reached 0 by time `t`.
pub fn survival_probability(x: f64, t: f64) -> Result<f64> {
    check_positive(x, t)?;
    Ok(libm::erf(x / (2.0 * t).sqrt()))
}

/// Small `x / sqrt(t)` form of `survival_probability`.
pub fn survival_asymptote(x: f64, t: f64) -> Result<f64> {
    check_positive(x, t)?;
    Ok((2.0 / (std::f64::consts::PI * t)).sqrt() * x)
}

/// Heuristic lifetime of the longest survivor among the `3 * 2^n` initial
/// conditions with compressed length `n`: `18 n^2 / pi`.
pub fn max_survivor_estimate(n: u32) -> f64 {
    18.0 * (n as f64).powi(2) / std::f64::consts::PI
}

/// First-passage times of simple ±1 walks from `x`.
pub fn simple_walk_first_passage(x: u64, max_steps: u64, samples: usize, seed: u64) -> Vec<Option<u64>> {
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut h = x as i64;
            let mut t = 0u64;
            while t < max_steps {
                let mut word: u64 = rng.random();
                for _ in 0..64.min(max_steps - t) {
                    h += if word & 1 == 1 { 1 } else { -1 };
                    word >>= 1;
                    t += 1;
                    if h <= 0 {
                        return Some(t);
                    }
                }
            }
            None
        })
        .collect()
}

/// `trace[t] - slope * t`.
pub fn detrend(trace: &[f64], slope: f64) -> Vec<f64> {
    trace.iter().enumerate().map(|(t, &v)| v - slope * t as f64).collect()
}

pub fn detrend_lengths(trace: &[u64], slope: f64) -> Vec<f64> {
    trace.iter().enumerate().map(|(t, &v)| v as f64 - slope * t as f64).collect()
}

/// Base `b` of the least-squares fit `steps ~ c * b^m` over
/// `(word_length, halting_step)` pairs.
pub fn winner_growth_fit(winners: &[(u32, u64)]) -> Result<f64> {
    if winners.len() < 4 {
        return Err(Error::InsufficientData(format!("growth fit needs at least 4 winners, got {}", winners.len())));
    }
    if winners.iter().any(|&(_, s)| s == 0) {
        return Err(Error::InvalidArgument("halting steps must be positive".into()));
    }
    let xs: Vec<f64> = winners.iter().map(|&(m, _)| m as f64).collect();
    let ys: Vec<f64> = winners.iter().map(|&(_, s)| (s as f64).ln()).collect();
    least_squares_slope(&xs, &ys)
        .map(f64::exp)
        .ok_or_else(|| Error::InvalidArgument("all winners share one word length".into()))
}

/// One walk of an ensemble.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkRecord {
    pub id: String,
    /// Halting step, or `None` for cycles and undecided runs.
    pub halting_step: Option<u64>,
    pub start_height: u64,
    pub trace: Vec<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WalkEnsemble {
    pub walks: Vec<WalkRecord>,
}

impl WalkEnsemble {
    /// Length traces of each state, each capped at `max_steps` steps.
    pub fn from_states(states: &[CompressedState], max_steps: u64) -> Self {
        let walks = states
            .par_iter()
            .map(|c| {
                let trace = length_trace(c, max_steps);
                let halting_step = detect_halt(c, max_steps).into_report().filter(|r| r.terminated()).map(|r| r.halting_step);
                WalkRecord { id: format_state_id(c), halting_step, start_height: c.uncompressed_len(), trace: trace.lengths }
            })
            .collect();
        WalkEnsemble { walks }
    }

    /// Every consecutive pair of every trace differs by exactly one.
    pub fn is_unit_walk(&self) -> bool {
        self.walks.iter().all(|w| is_unit_walk(&w.trace))
    }

    /// Fraction of the walks still alive (trace longer than `t`).
    pub fn survival_at(&self, t: usize) -> f64 {
        if self.walks.is_empty() {
            return 0.0;
        }
        self.walks.iter().filter(|w| w.trace.len() > t + 1 || w.halting_step.is_none()).count() as f64 / self.walks.len() as f64
    }
}

pub fn is_unit_walk(trace: &[u64]) -> bool {
    trace.windows(2).all(|w| w[0].abs_diff(w[1]) == 1)
}

/// Fraction of the steps of `trace` that go up.
pub fn up_fraction(trace: &[u64]) -> Option<f64> {
    if trace.len() < 2 {
        return None;
    }
    let ups = trace.windows(2).filter(|w| w[1] > w[0]).count();
    Some(ups as f64 / (trace.len() - 1) as f64)
}

pub fn trace_csv(trace: &[f64]) -> String {
    let mut out = String::from("# tagforge-trace v1\nstep,value\n");
    for (t, v) in trace.iter().enumerate() {
        writeln!(out, "{t},{v}").unwrap();
    }
    out
}

/// Parses the output of `trace_csv`.
pub fn parse_trace_csv(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.is_empty()).skip(1) {
        let v = line.split(',').nth(1).ok_or_else(|| Error::Decode(format!("bad trace row {line:?}")))?;
        out.push(v.trim().parse().map_err(|_| Error::Decode(format!("bad trace value {v:?}")))?);
    }
    Ok(out)
}

/// Minimal SVG line plot: one polyline per series over shared axes.
pub fn svg_line_plot(series: &[(&str, &[f64])], width: u32, height: u32) -> String {
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];
    let pad = 40.0;
    let max_len = series.iter().map(|(_, s)| s.len()).max().unwrap_or(0).max(2);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in series.iter().flat_map(|(_, s)| s.iter()).filter(|v| v.is_finite()) {
        lo = lo.min(*v);
        hi = hi.max(*v);
    }
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    if hi == lo {
        hi = lo + 1.0;
    }
    let (w, h) = (width as f64, height as f64);
    let sx = (w - 2.0 * pad) / (max_len - 1) as f64;
    let sy = (h - 2.0 * pad) / (hi - lo);
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#).unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        out,
        r#"<path d="M{pad} {pad} V{} H{}" fill="none" stroke="black" stroke-width="1"/>"#,
        h - pad,
        w - pad
    )
    .unwrap();
    writeln!(out, r#"<text x="{pad}" y="{}" font-size="10">{lo:.3}</text>"#, h - pad + 12.0).unwrap();
    writeln!(out, r#"<text x="{pad}" y="{}" font-size="10">{hi:.3}</text>"#, pad - 4.0).unwrap();
    writeln!(out, r#"<text x="{}" y="{}" font-size="10" text-anchor="end">{}</text>"#, w - pad, h - pad + 12.0, max_len - 1).unwrap();
    for (k, (name, s)) in series.iter().enumerate() {
        let mut points = String::new();
        for (i, v) in s.iter().enumerate().filter(|(_, v)| v.is_finite()) {
            write!(points, "{:.2},{:.2} ", pad + i as f64 * sx, h - pad - (v - lo) * sy).unwrap();
        }
        writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1" points="{}"><title>{}</title></polyline>"#,
            COLORS[k % COLORS.len()],
            points.trim_end(),
            name
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pdf_values() {
        let v = first_passage_pdf(1.0, 1.0).unwrap();
        assert!((v - (-0.5f64).exp() / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert!((v - 0.2420).abs() < 1e-4);
        assert!(first_passage_pdf(1e-9, 1.0).unwrap() < 1e-8);
        assert!(first_passage_pdf(0.0, 1.0).is_err());
        assert!(survival_probability(1.0, -1.0).is_err());
    }

    #[test]
    fn mode_is_x_squared_over_three() {
        let x = 6.0;
        let mut best = (0.0, 0.0);
        let mut t = 0.01;
        while t < 100.0 {
            let p = first_passage_pdf(x, t).unwrap();
            if p > best.1 {
                best = (t, p);
            }
            t += 0.01;
        }
        assert!((best.0 - 12.0).abs() < 0.02);
        assert_eq!(first_passage_mode(x), 12.0);
    }

    #[test]
    fn survival_limits() {
        assert!(survival_probability(10.0, 1e12).unwrap() < 1e-4);
        let (x, t) = (1.0, 1e6);
        let rel = survival_asymptote(x, t).unwrap() / survival_probability(x, t).unwrap();
        assert!((rel - 1.0).abs() < 1e-6);
        assert!((max_survivor_estimate(9) - 464.0).abs() < 1.0);
    }

    #[test]
    fn detrend_examples() {
        let ramp: Vec<f64> = (0..10).map(|t| t as f64 + 3.0).collect();
        assert!(detrend(&ramp, 1.0).iter().all(|&v| v == 3.0));
        assert_eq!(detrend(&ramp, 0.0), ramp);
    }

    #[test]
    fn growth_fit_examples() {
        let geo: Vec<(u32, u64)> = (4..20).map(|m| (m, 1u64 << m)).collect();
        assert!((winner_growth_fit(&geo).unwrap() - 2.0).abs() < 1e-9);
        let flat: Vec<(u32, u64)> = (4..10).map(|m| (m, 77)).collect();
        assert!((winner_growth_fit(&flat).unwrap() - 1.0).abs() < 1e-12);
        assert!(winner_growth_fit(&geo[..3]).is_err());
        assert!(winner_growth_fit(&[(5, 1), (5, 2), (5, 3), (5, 4)]).is_err());
    }

    #[test]
    fn csv_roundtrip() {
        let t = vec![1.0, 2.5, -3.0];
        assert_eq!(parse_trace_csv(&trace_csv(&t)).unwrap(), t);
        let svg = svg_line_plot(&[("a", &t)], 200, 100);
        assert!(svg.starts_with("<svg") && svg.contains("<polyline"));
    }
}
