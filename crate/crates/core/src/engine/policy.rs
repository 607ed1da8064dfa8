//! Loop policies: pure functions from observables to the next action.

use std::fmt;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Action {
    StepFail,
    StepFree,
    CheckFails,
    Done,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::StepFail => "step-fail",
            Action::StepFree => "step-free",
            Action::CheckFails => "check-fails",
            Action::Done => "done",
        })
    }
}

/// Everything a policy may look at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Observables {
    pub live_clauses: usize,
    pub t_min: i64,
    /// Latest encoded fail cycle; `start - 1` before the first step-fail.
    pub t_max: i64,
    pub pending: usize,
    pub max_cycle: i64,
    pub clause_hi: usize,
    pub clause_lo: usize,
    pub check_period: usize,
}

impl fmt::Display for Observables {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "live={} t_min={} t_max={} pending={} max_cycle={}",
            self.live_clauses, self.t_min, self.t_max, self.pending, self.max_cycle
        )
    }
}

pub type Policy = fn(&Observables) -> Action;

/// Grows the window until the live clause count passes `clause_hi`, then
/// retires the oldest free frame; checks every `check_period` fail frames.
///
/// Pending fail frames are always checked before a frame is retired, so a
/// verdict depends on the window the fail was encoded in and not on when
/// the check happened to run.
pub fn default_policy(o: &Observables) -> Action {
    if o.t_max == o.max_cycle && o.pending == 0 {
        Action::Done
    } else if o.pending >= o.check_period || o.t_max == o.max_cycle {
        Action::CheckFails
    } else if o.live_clauses <= o.clause_hi {
        Action::StepFail
    } else if o.pending > 0 {
        Action::CheckFails
    } else if o.t_min <= o.t_max {
        Action::StepFree
    } else {
        // Nothing left to retire.
        Action::StepFail
    }
}

/// The same thresholds, but a frame is retired as soon as the clause count
/// passes `clause_hi`, even while fail frames that depend on it are still
/// waiting for their check.
pub fn eager_free_policy(o: &Observables) -> Action {
    if o.t_max == o.max_cycle && o.pending == 0 {
        Action::Done
    } else if o.pending >= o.check_period || o.t_max == o.max_cycle {
        Action::CheckFails
    } else if o.live_clauses > o.clause_hi && o.t_min <= o.t_max {
        Action::StepFree
    } else if o.live_clauses <= o.clause_hi {
        Action::StepFail
    } else if o.pending > 0 {
        Action::CheckFails
    } else {
        Action::StepFail
    }
}

/// Never retires free frames, so every check sees all free inputs since the
/// start cycle: plain bounded model checking from the recorded state.
pub fn no_free_policy(o: &Observables) -> Action {
    if o.t_max == o.max_cycle && o.pending == 0 {
        Action::Done
    } else if o.pending >= o.check_period || o.t_max == o.max_cycle {
        Action::CheckFails
    } else {
        Action::StepFail
    }
}

pub const POLICIES: &[(&str, Policy)] = &[
    ("default", default_policy),
    ("eager-free", eager_free_policy),
    ("no-free", no_free_policy),
];

pub fn lookup_policy(name: &str) -> Option<Policy> {
    POLICIES.iter().find(|(n, _)| *n == name).map(|&(_, p)| p)
}
