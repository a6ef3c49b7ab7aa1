use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use serde_json::json;
use tagforge::halting::{length_trace_thinned, Detector, DEFAULT_TRACE_POINTS};
use tagforge::zoo::{zoo_detect_halt, GeneralRule, ZooVerdict};
use tagforge::{parse_state_id, HaltReport, UncompressedState};

use super::{print_json, write_file};
use crate::checkpoint::Checkpoint;
use crate::{exit, CliError, RunArgs};

const POST_LITERAL: &str = "k=2 r=3 0:00 1:1101";
/// Steps per detector call between checkpoint and clock checks.
const SLICE: u64 = 1 << 26;

/// What `run` printed, for callers that drive it in-process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    Decided(HaltReport),
    Undecided { steps: u64 },
}

pub struct RunRequest<'a> {
    pub id: String,
    pub detector: Detector,
    pub max_steps: u64,
    pub checkpoint: Option<&'a Path>,
    pub checkpoint_every: u64,
    pub checkpoint_secs: u64,
}

impl RunRequest<'_> {
    fn save(&self) -> Result<(), CliError> {
        match self.checkpoint {
            Some(path) => Checkpoint { rule: POST_LITERAL.into(), id: self.id.clone(), detector: self.detector.clone() }.save(path),
            None => Ok(()),
        }
    }

    /// Advances until decided or out of budget, writing checkpoints on the
    /// way and once more if the budget runs out.
    pub fn drive(&mut self) -> Result<RunOutcome, CliError> {
        let mut last_save_steps = self.detector.steps();
        let mut last_save_time = Instant::now();
        let interval = Duration::from_secs(self.checkpoint_secs);
        loop {
            let steps = self.detector.steps();
            if steps >= self.max_steps {
                break;
            }
            // The detector moves in 64-step chunks, so smaller budgets only probe.
            let until_save = (last_save_steps + self.checkpoint_every).saturating_sub(steps).max(64);
            let budget = (self.max_steps - steps).min(SLICE).min(until_save);
            if let Some(r) = self.detector.advance(budget) {
                return Ok(RunOutcome::Decided(r));
            }
            if self.detector.steps() == steps {
                // Less than one chunk of budget left.
                break;
            }
            let now = self.detector.steps();
            if self.checkpoint.is_some() && (now - last_save_steps >= self.checkpoint_every || last_save_time.elapsed() >= interval) {
                self.save()?;
                last_save_steps = now;
                last_save_time = Instant::now();
            }
        }
        self.save()?;
        Ok(RunOutcome::Undecided { steps: self.detector.steps() })
    }
}

fn parse_rule(lit: Option<&str>) -> Result<Option<GeneralRule>, CliError> {
    let Some(lit) = lit else {
        return Ok(None);
    };
    let rule: GeneralRule = lit.parse()?;
    Ok(if rule == GeneralRule::post() { None } else { Some(rule) })
}

fn post_detector(state: &str) -> Result<Detector, CliError> {
    if state.contains(':') {
        Ok(Detector::new(&parse_state_id(state)?))
    } else {
        Ok(Detector::from_uncompressed(&UncompressedState::parse_digits(state)?)?)
    }
}

fn trace_csv(detector_start: &tagforge::CompressedState, steps: u64) -> String {
    let trace = length_trace_thinned(detector_start, steps, DEFAULT_TRACE_POINTS);
    let mut out = String::from("# tagforge-trace v1\nstep,length\n");
    for (i, l) in trace.lengths.iter().enumerate() {
        writeln!(out, "{},{}", i as u64 * trace.stride, l).unwrap();
    }
    out
}

pub(crate) fn cmd_run(a: RunArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if let Some(rule) = parse_rule(a.rule.as_deref())? {
        if a.checkpoint.is_some() || a.resume.is_some() || a.trace.is_some() {
            return Err(CliError::Usage("--checkpoint, --resume and --trace need Post's rule".into()));
        }
        let text = a.state.ok_or_else(|| CliError::Usage("missing initial state".into()))?;
        let s = if text.contains(':') { rule.parse_state(&text)? } else { rule.parse_digits(&text)? };
        return match zoo_detect_halt(&rule, &s, a.max_steps)? {
            ZooVerdict::Decided(r) => {
                print_json(
                    out,
                    &json!({"id": rule.format_state(&s), "steps": r.halting_step, "period": r.period, "transient": r.transient, "maxlen": r.max_length_seen}),
                )?;
                Ok(exit::OK)
            }
            ZooVerdict::Undecided { steps, .. } => {
                print_json(out, &json!({"id": rule.format_state(&s), "undecided": true, "steps": steps}))?;
                Ok(exit::UNDECIDED)
            }
        };
    }

    let (id, detector) = match &a.resume {
        Some(path) => {
            let ck = Checkpoint::load(path)?;
            if parse_rule(Some(&ck.rule))?.is_some() {
                return Err(CliError::Data(format!("checkpoint rule {:?} is not supported", ck.rule)));
            }
            if let Some(s) = &a.state {
                if *s != ck.id {
                    return Err(CliError::Usage(format!("checkpoint is for {}, not {s}", ck.id)));
                }
            }
            (ck.id, ck.detector)
        }
        None => {
            let s = a.state.clone().ok_or_else(|| CliError::Usage("missing initial state".into()))?;
            let d = post_detector(&s)?;
            (s, d)
        }
    };
    let initial = detector.initial().clone();
    let mut req = RunRequest {
        id,
        detector,
        max_steps: a.max_steps,
        checkpoint: a.checkpoint.as_deref(),
        checkpoint_every: a.checkpoint_every,
        checkpoint_secs: a.checkpoint_secs,
    };
    let outcome = req.drive()?;
    let traced = match &outcome {
        RunOutcome::Decided(r) => r.halting_step.max(r.compressed_transient + r.period),
        RunOutcome::Undecided { steps } => *steps,
    };
    if let Some(path) = &a.trace {
        write_file(path, &trace_csv(&initial, traced))?;
    }
    match outcome {
        RunOutcome::Decided(r) => {
            print_json(out, &r.record(req.id.clone()))?;
            Ok(exit::OK)
        }
        RunOutcome::Undecided { steps } => {
            print_json(out, &json!({"id": req.id, "undecided": true, "steps": steps}))?;
            Ok(exit::UNDECIDED)
        }
    }
}
