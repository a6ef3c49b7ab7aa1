use serde::{Deserialize, Serialize};

use super::{zoo_step, GeneralRule, ZooState};
use crate::error::Result;

/// Outcome of a decided run. Step counts follow the Post-system
/// convention: a terminating run counts one extra step for deleting a
/// non-empty residue shorter than `r`; a cycling run reports the first step
/// on the cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZooHaltReport {
    pub halting_step: u64,
    /// 0 for termination.
    pub period: u64,
    pub transient: u64,
    #[serde(skip)]
    pub final_state: ZooState,
    pub max_length_seen: u64,
}

impl ZooHaltReport {
    pub fn terminated(&self) -> bool {
        self.period == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZooVerdict {
    Decided(ZooHaltReport),
    /// No decision within the budget. `state` is where the fast pointer
    /// stopped after `steps` steps.
    Undecided { steps: u64, state: ZooState },
}

impl ZooVerdict {
    pub fn report(&self) -> Option<&ZooHaltReport> {
        match self {
            ZooVerdict::Decided(r) => Some(r),
            ZooVerdict::Undecided { .. } => None,
        }
    }

    pub fn into_report(self) -> Option<ZooHaltReport> {
        match self {
            ZooVerdict::Decided(r) => Some(r),
            ZooVerdict::Undecided { .. } => None,
        }
    }
}

fn terminated(steps: u64, residue: ZooState, max_len: u64) -> ZooHaltReport {
    let extra = u64::from(!residue.is_empty());
    ZooHaltReport {
        halting_step: steps + extra,
        period: 0,
        transient: steps + extra,
        final_state: residue,
        max_length_seen: max_len,
    }
}

/// Brent's cycle detection on whole states (cursor included). At most
/// `cap` steps are spent finding the period; locating the transient costs
/// up to that much again.
pub fn zoo_detect_halt(rule: &GeneralRule, start: &ZooState, cap: u64) -> Result<ZooVerdict> {
    let mut max_len = start.len() as u64;
    let mut tortoise = start.clone();
    let mut hare = start.clone();
    let mut steps = 0u64;
    let mut power = 1u64;
    let mut lam = 0u64;
    loop {
        if steps >= cap {
            return Ok(ZooVerdict::Undecided { steps, state: hare });
        }
        if !zoo_step(rule, &mut hare)? {
            return Ok(ZooVerdict::Decided(terminated(steps, hare, max_len)));
        }
        steps += 1;
        lam += 1;
        max_len = max_len.max(hare.len() as u64);
        if hare == tortoise {
            break;
        }
        if lam == power {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
    }

    let mut a = start.clone();
    let mut b = start.clone();
    for _ in 0..lam {
        zoo_step(rule, &mut b)?;
    }
    let mut mu = 0u64;
    while a != b {
        zoo_step(rule, &mut a)?;
        zoo_step(rule, &mut b)?;
        mu += 1;
    }
    Ok(ZooVerdict::Decided(ZooHaltReport {
        halting_step: mu,
        period: lam,
        transient: mu,
        final_state: a,
        max_length_seen: max_len,
    }))
}
