use std::io::Write;

use num_bigint::{BigInt, BigUint};
use serde_json::{json, Value};
use tagforge::cycles::{count_distinct_cycles, count_on_cycle_strings, family_cycles};
use tagforge::enumeration::{halting_histogram, log2_edges};
use tagforge::grams::{entropies, forbidden_blocks, mgram_count, multiplicity_table_csv, MAX_GRAM};
use tagforge::graphs::state_transition_graph;
use tagforge::numiter::{collatz_run, residue_run, ResidueRule};
use tagforge::walkstats::{first_passage_mode, simple_walk_first_passage, survival_probability};
use tagforge::zoo::{
    balanced_rules, growth_analyzer, ones_run_sequence, rule_survey, simple_rules, zoo_detect_halt, GeneralRule, GrowthClass,
    RunEnd, ZooVerdict,
};

use super::{print_json, write_file};
use crate::{exit, CliError, CollatzArgs, CyclesArgs, GramsArgs, GraphArgs, WalkArgs, ZooArgs};

pub(crate) fn cmd_graph(a: GraphArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.max_len > 20 {
        return Err(CliError::Usage("--max-len above 20 would not fit in memory".into()));
    }
    let g = state_transition_graph(a.max_len, a.cap);
    if let Some(p) = &a.dot {
        write_file(p, &g.to_dot(a.collapse))?;
    }
    if let Some(p) = &a.json {
        write_file(p, &serde_json::to_string_pretty(&g.to_json())?)?;
    }
    print_json(
        out,
        &json!({
            "states": g.len(),
            "components": g.component_count(),
            "cycle_periods": g.cycle_periods(),
            "longest_highway": g.longest_highway(),
            "partial": g.partial,
        }),
    )?;
    Ok(if g.partial { exit::UNDECIDED } else { exit::OK })
}

pub(crate) fn cmd_grams(a: GramsArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.m == 0 || a.m + 2 > MAX_GRAM {
        return Err(CliError::Usage(format!("--m must be in 1..={}", MAX_GRAM - 2)));
    }
    if let Some(p) = &a.csv {
        write_file(p, &multiplicity_table_csv(a.m))?;
    }
    let e = entropies(a.m);
    print_json(
        out,
        &json!({
            "m": a.m,
            "count": mgram_count(a.m),
            "forbidden": forbidden_blocks(a.m),
            "set_entropy": e.set_entropy,
            "measure_entropy": e.measure_entropy,
        }),
    )?;
    Ok(exit::OK)
}

fn big(n: BigUint) -> Value {
    match u64::try_from(&n) {
        Ok(v) => json!(v),
        Err(_) => json!(n.to_string()),
    }
}

pub(crate) fn cmd_cycles(a: CyclesArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    match (a.n, a.blocks) {
        (Some(n), None) => {
            if n == 0 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            print_json(out, &json!({"n": n, "cycles": big(count_distinct_cycles(n)), "on_cycle_strings": big(count_on_cycle_strings(n))}))?;
        }
        (None, Some(b)) => {
            if !(1..=24).contains(&b) {
                return Err(CliError::Usage("--blocks must be in 1..=24".into()));
            }
            for d in family_cycles(b) {
                print_json(out, &d.record())?;
            }
        }
        _ => return Err(CliError::Usage("give exactly one of --n and --blocks".into())),
    }
    Ok(exit::OK)
}

pub(crate) fn cmd_walk(a: WalkArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    match (a.ensemble, a.first_passage) {
        (Some(m), None) => {
            if m > 24 {
                return Err(CliError::Usage("--ensemble above 24 is not supported".into()));
            }
            let h = halting_histogram(m, a.cap, &log2_edges(a.cap));
            if let Some(p) = &a.csv {
                write_file(p, &h.to_csv())?;
            }
            print_json(out, &h)?;
            Ok(if h.undecided > 0 { exit::UNDECIDED } else { exit::OK })
        }
        (None, Some(x)) => {
            if x == 0 || a.samples == 0 || a.horizon == 0 {
                return Err(CliError::Usage("--first-passage, --samples and --horizon must be positive".into()));
            }
            let times = simple_walk_first_passage(x, a.horizon, a.samples, a.seed);
            let alive = times.iter().filter(|t| t.is_none()).count() as f64 / a.samples as f64;
            let expected = survival_probability(x as f64, a.horizon as f64)?;
            let sigma = (expected * (1.0 - expected) / a.samples as f64).sqrt();
            print_json(
                out,
                &json!({
                    "x": x,
                    "horizon": a.horizon,
                    "samples": a.samples,
                    "seed": a.seed,
                    "survival": alive,
                    "survival_continuum": expected,
                    "sigma": sigma,
                    "pdf_mode": first_passage_mode(x as f64),
                }),
            )?;
            Ok(exit::OK)
        }
        _ => Err(CliError::Usage("give exactly one of --ensemble and --first-passage".into())),
    }
}

pub(crate) fn cmd_zoo(a: ZooArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(family) = &a.survey {
        let rules = match family.as_str() {
            "balanced" => balanced_rules(),
            "simple" => simple_rules(),
            other => return Err(CliError::Usage(format!("unknown family {other:?}; use balanced or simple"))),
        };
        let rows = rule_survey(&rules, a.max_ic_len, a.max_steps)?;
        for row in &rows {
            print_json(out, row)?;
        }
        return Ok(if rows.iter().any(|r| r.undecided > 0) { exit::UNDECIDED } else { exit::OK });
    }
    let rule: GeneralRule = a.rule.as_deref().ok_or_else(|| CliError::Usage("--rule is required".into()))?.parse()?;
    if let Some(n) = a.ones {
        let runs = ones_run_sequence(&rule, n, a.max_steps)?;
        print_json(out, &runs)?;
        return Ok(if runs.end == RunEnd::Truncated { exit::UNDECIDED } else { exit::OK });
    }
    let text = a.state.ok_or_else(|| CliError::Usage("missing initial state".into()))?;
    let s = if text.contains(':') { rule.parse_state(&text)? } else { rule.parse_digits(&text)? };
    let id = rule.format_state(&s);
    if a.growth {
        let g = growth_analyzer(&rule, &s, a.max_steps)?;
        print_json(out, &json!({"id": id, "rule": rule, "growth": g}))?;
        return Ok(if g.class == GrowthClass::Undecided { exit::UNDECIDED } else { exit::OK });
    }
    match zoo_detect_halt(&rule, &s, a.max_steps)? {
        ZooVerdict::Decided(r) => {
            print_json(out, &json!({"id": id, "rule": rule, "steps": r.halting_step, "period": r.period, "transient": r.transient, "maxlen": r.max_length_seen}))?;
            Ok(exit::OK)
        }
        ZooVerdict::Undecided { steps, .. } => {
            print_json(out, &json!({"id": id, "rule": rule, "undecided": true, "steps": steps}))?;
            Ok(exit::UNDECIDED)
        }
    }
}

/// `collatz`, `5n+1`, `mod3`, or `m:a,b;a,b;...`.
fn parse_residue_rule(text: &str) -> Result<ResidueRule, CliError> {
    match text {
        "collatz" | "3n+1" => return Ok(ResidueRule::collatz()),
        "5n+1" => return Ok(ResidueRule::five_n_plus_one()),
        "mod3" => return Ok(ResidueRule::mod3_example()),
        _ => {}
    }
    let bad = || CliError::Usage(format!("cannot parse residue rule {text:?}"));
    let (m, maps) = text.split_once(':').ok_or_else(bad)?;
    let m: u32 = m.trim().parse().map_err(|_| bad())?;
    let maps = maps
        .split(';')
        .map(|pair| {
            let (a, b) = pair.split_once(',').ok_or_else(bad)?;
            Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
        })
        .collect::<Result<Vec<(i64, i64)>, CliError>>()?;
    Ok(ResidueRule::new(m, maps)?)
}

pub(crate) fn cmd_collatz(a: CollatzArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let n: BigInt = a.n.trim().parse().map_err(|_| CliError::Usage(format!("--n {:?} is not an integer", a.n)))?;
    let report = if a.rule == "collatz" || a.rule == "3n+1" {
        let n = n.to_biguint().ok_or_else(|| CliError::Usage("--n must be positive".into()))?;
        collatz_run(&n, a.cap)?
    } else {
        residue_run(&parse_residue_rule(&a.rule)?, &n, a.cap)
    };
    let mut v = json!({
        "n": a.n.trim(),
        "rule": a.rule,
        "steps": report.steps,
        "cycle": report.cycle,
        "max_bits": report.bit_lengths.iter().max(),
    });
    if a.bits {
        v["bit_lengths"] = json!(report.bit_lengths);
    }
    print_json(out, &v)
}
