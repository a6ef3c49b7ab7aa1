use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{zoo_detect_halt, GeneralRule, ZooState, ZooVerdict};
use crate::error::Result;

/// The 90 `k = 3, r = 2` rules whose appends have lengths 1, 2 and 3 for
/// symbols 0, 1 and 2 and together hold two copies of each symbol.
pub fn balanced_rules() -> Vec<GeneralRule> {
    let mut out = Vec::new();
    let mut word = [0u8; 6];
    fill(&mut word, 0, [2, 2, 2], &mut out);
    out
}

fn fill(word: &mut [u8; 6], at: usize, left: [u8; 3], out: &mut Vec<GeneralRule>) {
    if at == 6 {
        let appends = vec![Some(word[..1].to_vec()), Some(word[1..3].to_vec()), Some(word[3..].to_vec())];
        out.push(GeneralRule::first_element(3, 2, appends).unwrap());
        return;
    }
    for s in 0..3u8 {
        if left[s as usize] > 0 {
            let mut rest = left;
            rest[s as usize] -= 1;
            word[at] = s;
            fill(word, at + 1, rest, out);
        }
    }
}

/// The 32 rules `1 -> ab`, `2 -> cde` over the symbols 1 and 2, with
/// `r = 2`.
pub fn simple_rules() -> Vec<GeneralRule> {
    let blocks = |len: u32| -> Vec<Vec<u8>> {
        (0..1u32 << len).map(|v| (0..len).rev().map(|i| 1 + ((v >> i) & 1) as u8).collect()).collect()
    };
    let mut out = Vec::new();
    for one in blocks(2) {
        for two in blocks(3) {
            out.push(GeneralRule::first_element(3, 2, vec![None, Some(one.clone()), Some(two)]).unwrap());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub rule: GeneralRule,
    pub halting: u64,
    pub cycling: u64,
    pub undecided: u64,
    /// Longest terminating run: state id and halting step.
    pub longest: Option<(String, u64)>,
}

/// Runs every initial string of length `1..=max_ic_len` over each rule's
/// defined symbols.
pub fn rule_survey(rules: &[GeneralRule], max_ic_len: usize, cap: u64) -> Result<Vec<SurveyRow>> {
    rules
        .par_iter()
        .map(|rule| {
            let alphabet = rule.defined_symbols();
            let mut row = SurveyRow { rule: rule.clone(), halting: 0, cycling: 0, undecided: 0, longest: None };
            for len in 1..=max_ic_len {
                let mut digits = vec![0usize; len];
                loop {
                    let s = ZooState::new(digits.iter().map(|&d| alphabet[d]));
                    match zoo_detect_halt(rule, &s, cap)? {
                        ZooVerdict::Decided(r) if r.terminated() => {
                            row.halting += 1;
                            if row.longest.as_ref().map_or(true, |(_, best)| r.halting_step > *best) {
                                row.longest = Some((rule.format_state(&s), r.halting_step));
                            }
                        }
                        ZooVerdict::Decided(_) => row.cycling += 1,
                        ZooVerdict::Undecided { .. } => row.undecided += 1,
                    }
                    // Odometer over the alphabet, last digit fastest.
                    let mut i = len;
                    loop {
                        if i == 0 {
                            break;
                        }
                        i -= 1;
                        digits[i] += 1;
                        if digits[i] < alphabet.len() {
                            break;
                        }
                        digits[i] = 0;
                    }
                    if digits.iter().all(|&d| d == 0) {
                        break;
                    }
                }
            }
            Ok(row)
        })
        .collect()
}
