use std::fmt::Write as _;

use serde::Serialize;

use super::RunConfig;
use crate::sat::SolveStatus;

/// Bumped whenever a field of the JSON report changes meaning or shape.
pub const SCHEMA_VERSION: u32 = 1;

/// One free input bit of a counterexample.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CexBit {
    pub signal: String,
    pub bit: usize,
    pub cycle: u32,
    pub value: bool,
    /// True when the bit had already been retired (bound) before the check.
    pub bound: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailReport {
    pub signal: String,
    pub bit: usize,
    pub cycle: u32,
    pub status: SolveStatus,
    /// Earliest cycle whose free inputs were still symbolic at check time.
    pub window_start: u32,
    pub counterexample: Option<Vec<CexBit>>,
    pub replay_validated: bool,
    pub trace: Option<String>,
}

impl FailReport {
    pub fn line(&self) -> String {
        let status = match self.status {
            SolveStatus::Sat => "SAT",
            SolveStatus::Unsat => "UNSAT",
        };
        format!(
            "CHECK {}[{}] @cycle {} : {status}",
            self.signal, self.bit, self.cycle
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TagSummary {
    pub wave: Vec<String>,
    pub rand: Vec<String>,
    pub free: Vec<String>,
    pub fail: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RunStats {
    pub frames_encoded: u32,
    pub variables: usize,
    pub clauses_added: u64,
    pub learned: u64,
    pub solves: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub step_fail: u64,
    pub step_free: u64,
    pub check_fails: u64,
    pub free_bits_bound: u64,
    pub live_clauses_final: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub config: RunConfig,
    pub tags: TagSummary,
    pub checks: Vec<FailReport>,
    /// `signal[bit]@cycle` entries encoded but never checked (only after a
    /// stop on the first failure).
    pub unchecked: Vec<String>,
    pub stopped_on_fail: bool,
    pub stats: RunStats,
}

impl RunReport {
    pub fn sat_count(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == SolveStatus::Sat)
            .count()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }

    /// The `CHECK` lines followed by a one-line summary.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(out, "{}", c.line());
        }
        let _ = writeln!(
            out,
            "SUMMARY checks={} sat={} frames={} clauses={} solves={} conflicts={}",
            self.checks.len(),
            self.sat_count(),
            self.stats.frames_encoded,
            self.stats.clauses_added,
            self.stats.solves,
            self.stats.conflicts
        );
        out
    }
}
