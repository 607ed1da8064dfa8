//! The checking loop.
//!
//! The engine keeps one incremental solver for the whole run. The window
//! `[t_min, t_max]` spans the fail cycles encoded so far (up to `t_max`) and
//! the oldest cycle whose free inputs are still symbolic (`t_min`). Three
//! actions move it: step-fail encodes every fail target one cycle further,
//! step-free binds the free inputs of cycle `t_min` with unit clauses, and
//! check-fails solves each pending fail literal under an assumption. A
//! policy picks the next action from a handful of observables.
//!
//! Registers are seeded from the waveform at the start cycle, so every
//! frame before `t_min` is concrete and the clauses that only mattered for
//! the retired free inputs become satisfied at the root.

mod policy;
mod report;
mod tags;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use policy::{
    default_policy, eager_free_policy, lookup_policy, no_free_policy, Action, Observables, Policy,
    POLICIES,
};
pub use report::{CexBit, FailReport, RunReport, RunStats, TagSummary, SCHEMA_VERSION};
pub use tags::{default_tagging, FailTarget, Overrides, Selector, Tag, TagMap};

use crate::aig::{lit_value, AigLit, Aignet, SimState};
use crate::encode::{encode_cone, EncodeError, FrameMap, LeafRule};
use crate::sat::{export_dimacs, solve_external, Lit, SolveStatus, Solver, Var};
use crate::vcd::{write_vcd, WaveDb};

/// Name of the environment variable that points at an external DIMACS
/// solver used to cross-check every verdict.
pub const EXTERNAL_SOLVER_ENV: &str = "WAVECHECK_EXTERNAL_SOLVER";

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("signal `{0}` does not exist in the design")]
    UnknownSignal(String),
    #[error("no fail targets: name them explicitly or call them `fail_*`")]
    NoFailTargets,
    #[error("unknown policy `{0}`")]
    UnknownPolicy(String),
    #[error("start cycle {start} is past the end of the waveform ({cycles} cycles)")]
    StartPastEnd { start: u32, cycles: usize },
    #[error("register {name} has no known value in the waveform at cycle {cycle}")]
    InitRegister { name: String, cycle: u32 },
    #[error("wave input {name} is x at cycle {cycle}; tag it rand or free")]
    WaveX { name: String, cycle: u32 },
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("policy chose {action}, which does not apply ({observables})")]
    Inapplicable {
        action: Action,
        observables: Observables,
    },
    #[error("replay mismatch: {target} is 0 at cycle {cycle} under the counterexample")]
    ReplayMismatch { target: String, cycle: u32 },
    #[error(
        "external solver says {external:?}, internal solver says {internal:?} (check {index})"
    )]
    SolverDisagreement {
        index: u64,
        internal: SolveStatus,
        external: SolveStatus,
    },
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl EngineError {
    /// Errors that indicate a bug in the checker rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            EngineError::ReplayMismatch { .. } | EngineError::SolverDisagreement { .. }
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub start_cycle: u32,
    /// Last fail cycle to encode; defaults to the last waveform cycle.
    pub max_cycle: Option<u32>,
    pub clause_hi: usize,
    /// Reserved for policies with hysteresis; the built-in ones ignore it.
    pub clause_lo: usize,
    /// Pending fail frames that trigger a check.
    pub check_period: usize,
    pub seed: u64,
    pub policy: String,
    pub stop_on_first_fail: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            start_cycle: 0,
            max_cycle: None,
            clause_hi: 1000,
            clause_lo: 500,
            check_period: 1,
            seed: 0,
            policy: "default".into(),
            stop_on_first_fail: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.clause_lo >= self.clause_hi {
            return Err(EngineError::Config(format!(
                "clause-lo ({}) must be below clause-hi ({})",
                self.clause_lo, self.clause_hi
            )));
        }
        if self.check_period == 0 {
            return Err(EngineError::Config(
                "check-period must be at least 1".into(),
            ));
        }
        if let Some(max) = self.max_cycle {
            if max < self.start_cycle {
                return Err(EngineError::Config(format!(
                    "max-cycle ({max}) is before start-cycle ({})",
                    self.start_cycle
                )));
            }
        }
        if lookup_policy(&self.policy).is_none() {
            return Err(EngineError::UnknownPolicy(self.policy.clone()));
        }
        Ok(())
    }
}

/// Where run artifacts go.
#[derive(Clone, Debug)]
pub struct OutputOptions {
    /// Directory for counterexample waveforms.
    pub cex_dir: Option<PathBuf>,
    /// Directory receiving one DIMACS file per solve.
    pub dimacs_dir: Option<PathBuf>,
    /// External solver cross-checking every verdict.
    pub external_solver: Option<PathBuf>,
    /// Scope wrapped around design signals in counterexample waveforms.
    pub trace_scope: String,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            cex_dir: None,
            dimacs_dir: None,
            external_solver: None,
            trace_scope: "top".into(),
        }
    }
}

impl OutputOptions {
    /// Defaults, plus the external solver named by [`EXTERNAL_SOLVER_ENV`].
    pub fn from_env() -> Self {
        OutputOptions {
            external_solver: std::env::var_os(EXTERNAL_SOLVER_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from),
            ..OutputOptions::default()
        }
    }
}

/// Deterministic bit for `(seed, input, cycle)`, independent of the order
/// in which frames are encoded.
pub fn rand_bit(seed: u64, ordinal: usize, cycle: u32) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ordinal as u64);
    rng.set_word_pos(cycle as u128);
    rng.next_u32() & 1 == 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pending {
    fail: usize,
    cycle: u32,
    lit: Lit,
}

/// One executed action with the numbers around it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub action: Action,
    pub before: Observables,
    pub unbound_before: usize,
    pub unbound_after: usize,
    /// Only measured after step-free.
    pub live_after: Option<usize>,
}

struct Leaves<'e> {
    g: &'e Aignet,
    wave: &'e WaveDb,
    tags: &'e TagMap,
    seed: u64,
    t_min: u32,
    init: &'e [bool],
    free_vars: &'e mut BTreeMap<u32, Vec<(usize, Var)>>,
    bound: &'e mut BTreeMap<(u32, usize), bool>,
}

/// Value used when a free input bit is retired: the waveform's, if known.
fn bind_value(g: &Aignet, wave: &WaveDb, seed: u64, ordinal: usize, cycle: u32) -> bool {
    let name = g.input_name(ordinal);
    match wave.sample_bit(&name.signal, name.bit, cycle as usize) {
        Ok(Some(v)) => v,
        _ => rand_bit(seed, ordinal, cycle),
    }
}

impl LeafRule for Leaves<'_> {
    type Error = EngineError;

    fn input(&mut self, ordinal: usize, cycle: u32, var: Var) -> Result<Option<bool>, EngineError> {
        match self.tags.tags[ordinal] {
            Tag::Wave => {
                let name = self.g.input_name(ordinal);
                match self.wave.sample_bit(&name.signal, name.bit, cycle as usize) {
                    Ok(Some(v)) => Ok(Some(v)),
                    _ => Err(EngineError::WaveX {
                        name: name.to_string(),
                        cycle,
                    }),
                }
            }
            Tag::Rand => Ok(Some(rand_bit(self.seed, ordinal, cycle))),
            Tag::Free if cycle < self.t_min => {
                // First reached after its cycle was retired.
                let v = bind_value(self.g, self.wave, self.seed, ordinal, cycle);
                self.bound.insert((cycle, ordinal), v);
                Ok(Some(v))
            }
            Tag::Free => {
                self.free_vars
                    .entry(cycle)
                    .or_default()
                    .push((ordinal, var));
                Ok(None)
            }
        }
    }

    fn initial_register(&mut self, ordinal: usize, _: Var) -> Result<Option<bool>, EngineError> {
        Ok(Some(self.init[ordinal]))
    }
}

pub struct Engine<'a> {
    g: &'a Aignet,
    wave: &'a WaveDb,
    tags: TagMap,
    cfg: RunConfig,
    policy: Policy,
    out: OutputOptions,
    start: u32,
    /// Last fail cycle, as the policy sees it.
    last: i64,
    solver: Solver,
    fm: FrameMap,
    init: Vec<bool>,
    t_min: u32,
    /// One past the last encoded fail cycle.
    t_end: u32,
    pending: Vec<Pending>,
    free_vars: BTreeMap<u32, Vec<(usize, Var)>>,
    bound: BTreeMap<(u32, usize), bool>,
    checks: Vec<FailReport>,
    traces: Vec<(String, WaveDb)>,
    history: Vec<StepRecord>,
    stopped: bool,
    counts: [u64; 3],
    solves: u64,
}

impl<'a> Engine<'a> {
    /// Validates the configuration, reads the register state at the start
    /// cycle from the waveform and asserts it as unit clauses.
    pub fn new(
        g: &'a Aignet,
        wave: &'a WaveDb,
        tags: TagMap,
        cfg: RunConfig,
        out: OutputOptions,
    ) -> Result<Engine<'a>, EngineError> {
        cfg.validate()?;
        let policy = lookup_policy(&cfg.policy).expect("validated");
        let start = cfg.start_cycle;
        if start as usize >= wave.num_cycles() {
            return Err(EngineError::StartPastEnd {
                start,
                cycles: wave.num_cycles(),
            });
        }
        let max = cfg
            .max_cycle
            .unwrap_or((wave.num_cycles() as u32 - 1).max(start));
        let mut cfg = cfg;
        cfg.max_cycle = Some(max);
        let init = (0..g.num_registers())
            .map(|r| {
                let name = g.register_name(r);
                match wave.sample_bit(&name.signal, name.bit, start as usize) {
                    Ok(Some(v)) => Ok(v),
                    _ => Err(EngineError::InitRegister {
                        name: name.to_string(),
                        cycle: start,
                    }),
                }
            })
            .collect::<Result<Vec<bool>, _>>()?;
        let mut e = Engine {
            g,
            wave,
            tags,
            policy,
            out,
            start,
            // With no transition to explore the run is over before it starts.
            last: if max > start {
                max as i64
            } else {
                start as i64 - 1
            },
            cfg,
            solver: Solver::new(),
            fm: FrameMap::new(g.num_nodes(), start),
            init,
            t_min: start,
            t_end: start,
            pending: Vec::new(),
            free_vars: BTreeMap::new(),
            bound: BTreeMap::new(),
            checks: Vec::new(),
            traces: Vec::new(),
            history: Vec::new(),
            stopped: false,
            counts: [0; 3],
            solves: 0,
        };
        for r in 0..g.num_registers() {
            let lit = AigLit::new(g.register_node(r), false);
            e.encode(lit, start)?;
        }
        Ok(e)
    }

    fn encode(&mut self, lit: AigLit, cycle: u32) -> Result<Lit, EngineError> {
        let mut leaves = Leaves {
            g: self.g,
            wave: self.wave,
            tags: &self.tags,
            seed: self.cfg.seed,
            t_min: self.t_min,
            init: &self.init,
            free_vars: &mut self.free_vars,
            bound: &mut self.bound,
        };
        encode_cone(
            &mut self.solver,
            &mut self.fm,
            self.g,
            lit,
            cycle,
            &mut leaves,
        )
    }

    pub fn t_min(&self) -> u32 {
        self.t_min
    }

    pub fn t_max(&self) -> i64 {
        self.t_end as i64 - 1
    }

    pub fn tags(&self) -> &TagMap {
        &self.tags
    }

    pub fn solver(&self) -> &Solver {
        &self.solver
    }

    pub fn frame_map(&self) -> &FrameMap {
        &self.fm
    }

    pub fn checks(&self) -> &[FailReport] {
        &self.checks
    }

    pub fn history(&self) -> &[StepRecord] {
        &self.history
    }

    /// Counterexample waveforms produced so far (the first failure of each
    /// target), with their file names.
    pub fn traces(&self) -> &[(String, WaveDb)] {
        &self.traces
    }

    /// Free input bits still symbolic, as `(cycle, input ordinal)`.
    pub fn unbound_free(&self) -> Vec<(u32, usize)> {
        self.free_vars
            .iter()
            .flat_map(|(&c, v)| v.iter().map(move |&(o, _)| (c, o)))
            .collect()
    }

    /// Free input bits already bound, with their values.
    pub fn bound_free(&self) -> &BTreeMap<(u32, usize), bool> {
        &self.bound
    }

    /// Register values the run starts from.
    pub fn initial_state(&self) -> &[bool] {
        &self.init
    }

    fn unbound_count(&self) -> usize {
        self.free_vars.values().map(Vec::len).sum()
    }

    pub fn observables(&mut self) -> Observables {
        Observables {
            live_clauses: self.solver.live_clause_count(),
            t_min: self.t_min as i64,
            t_max: self.t_max(),
            pending: self.pending.len(),
            max_cycle: self.last,
            clause_hi: self.cfg.clause_hi,
            clause_lo: self.cfg.clause_lo,
            check_period: self.cfg.check_period,
        }
    }

    fn applicable(&self, action: Action) -> bool {
        match action {
            Action::StepFail => self.t_max() < self.last,
            Action::StepFree => (self.t_min as i64) <= self.t_max(),
            Action::CheckFails => !self.pending.is_empty(),
            Action::Done => self.stopped || (self.t_max() == self.last && self.pending.is_empty()),
        }
    }

    /// Executes one action, refusing actions whose preconditions fail.
    pub fn apply(&mut self, action: Action) -> Result<(), EngineError> {
        let before = self.observables();
        if !self.applicable(action) {
            return Err(EngineError::Inapplicable {
                action,
                observables: before,
            });
        }
        let unbound_before = self.unbound_count();
        match action {
            Action::StepFail => self.step_fail()?,
            Action::StepFree => self.step_free(),
            Action::CheckFails => self.check_fails()?,
            Action::Done => {}
        }
        let live_after = (action == Action::StepFree).then(|| self.solver.live_clause_count());
        self.history.push(StepRecord {
            action,
            before,
            unbound_before,
            unbound_after: self.unbound_count(),
            live_after,
        });
        Ok(())
    }

    fn step_fail(&mut self) -> Result<(), EngineError> {
        let cycle = self.t_end;
        for fail in 0..self.tags.fails.len() {
            let lit = self.encode(self.tags.fails[fail].lit, cycle)?;
            self.pending.push(Pending { fail, cycle, lit });
        }
        self.t_end += 1;
        self.counts[0] += 1;
        Ok(())
    }

    fn step_free(&mut self) {
        let cycle = self.t_min;
        for (ordinal, var) in self.free_vars.remove(&cycle).unwrap_or_default() {
            let v = bind_value(self.g, self.wave, self.cfg.seed, ordinal, cycle);
            self.solver.add_clause(&[Lit::new(var, !v)]);
            self.bound.insert((cycle, ordinal), v);
        }
        self.t_min += 1;
        self.counts[1] += 1;
    }

    fn solve(&mut self, lit: Lit) -> Result<SolveStatus, EngineError> {
        let index = self.solves;
        self.solves += 1;
        let status = self.solver.solve(&[lit]);
        if self.out.dimacs_dir.is_none() && self.out.external_solver.is_none() {
            return Ok(status);
        }
        let text = export_dimacs(&self.solver, &[lit]);
        let dir = self
            .out
            .dimacs_dir
            .clone()
            .unwrap_or_else(std::env::temp_dir);
        let file = if self.out.dimacs_dir.is_some() {
            dir.join(format!("check_{index:05}.cnf"))
        } else {
            dir.join(format!("wavecheck_{}_{index}.cnf", std::process::id()))
        };
        let io = |context: String| move |source| EngineError::Io { context, source };
        fs::create_dir_all(&dir).map_err(io(format!("creating {}", dir.display())))?;
        fs::write(&file, text).map_err(io(format!("writing {}", file.display())))?;
        if let Some(exe) = &self.out.external_solver {
            let external =
                solve_external(exe, &file).map_err(io(format!("running {}", exe.display())))?;
            if self.out.dimacs_dir.is_none() {
                let _ = fs::remove_file(&file);
            }
            if external != status {
                return Err(EngineError::SolverDisagreement {
                    index,
                    internal: status,
                    external,
                });
            }
        }
        Ok(status)
    }

    fn check_fails(&mut self) -> Result<(), EngineError> {
        let mut pending = std::mem::take(&mut self.pending);
        pending.sort_by_key(|p| (p.cycle, p.fail));
        self.counts[2] += 1;
        for (i, p) in pending.iter().enumerate() {
            let status = self.solve(p.lit)?;
            let target = &self.tags.fails[p.fail].name;
            let mut report = FailReport {
                signal: target.signal.clone(),
                bit: target.bit,
                cycle: p.cycle,
                status,
                window_start: self.t_min,
                counterexample: None,
                replay_validated: false,
                trace: None,
            };
            if status == SolveStatus::Sat {
                report.counterexample = Some(self.counterexample(p.cycle));
                let trace = self.replay(p)?;
                report.replay_validated = true;
                // Later failures of the same target are usually the same bug
                // shifted in time; one waveform per target is enough.
                let first = !self.checks.iter().any(|c| {
                    c.status == SolveStatus::Sat && c.signal == target.signal && c.bit == target.bit
                });
                if first {
                    let file = format!(
                        "cex_{}_{}_c{}.vcd",
                        sanitize(&target.signal),
                        target.bit,
                        p.cycle
                    );
                    if let Some(dir) = &self.out.cex_dir {
                        let path = dir.join(&file);
                        let io =
                            |context: String| move |source| EngineError::Io { context, source };
                        fs::create_dir_all(dir)
                            .map_err(io(format!("creating {}", dir.display())))?;
                        fs::write(&path, write_vcd(&trace, 10))
                            .map_err(io(format!("writing {}", path.display())))?;
                        report.trace = Some(path.display().to_string());
                    }
                    self.traces.push((file, trace));
                }
            }
            self.checks.push(report);
            if status == SolveStatus::Sat && self.cfg.stop_on_first_fail {
                self.pending = pending[i + 1..].to_vec();
                self.stopped = true;
                break;
            }
        }
        Ok(())
    }

    /// Free input bits in `[start, cycle]` as the last model set them.
    fn counterexample(&self, cycle: u32) -> Vec<CexBit> {
        let mut bits = Vec::new();
        for c in self.start..=cycle {
            for (ordinal, tag) in self.tags.tags.iter().enumerate() {
                if *tag != Tag::Free {
                    continue;
                }
                let (value, bound) = match self.bound.get(&(c, ordinal)) {
                    Some(&v) => (v, true),
                    None => {
                        let node = self.g.input_node(ordinal);
                        match self
                            .fm
                            .get(node, c)
                            .and_then(|l| self.solver.model_value(l))
                        {
                            Some(v) => (v, false),
                            None => continue,
                        }
                    }
                };
                let name = self.g.input_name(ordinal);
                bits.push(CexBit {
                    signal: name.signal.clone(),
                    bit: name.bit,
                    cycle: c,
                    value,
                    bound,
                });
            }
        }
        bits
    }

    /// Input value used by replay: waveform and random inputs from their
    /// sources, free inputs from their binding or the model.
    fn replay_input(&self, ordinal: usize, cycle: u32) -> bool {
        let name = self.g.input_name(ordinal);
        match self.tags.tags[ordinal] {
            Tag::Wave => matches!(
                self.wave.sample_bit(&name.signal, name.bit, cycle as usize),
                Ok(Some(true))
            ),
            Tag::Rand => rand_bit(self.cfg.seed, ordinal, cycle),
            Tag::Free => match self.bound.get(&(cycle, ordinal)) {
                Some(&v) => v,
                None => {
                    let node = self.g.input_node(ordinal);
                    self.fm
                        .get(node, cycle)
                        .and_then(|l| self.solver.model_value(l))
                        .unwrap_or_else(|| {
                            bind_value(self.g, self.wave, self.cfg.seed, ordinal, cycle)
                        })
                }
            },
        }
    }

    /// Simulates from the recorded start state to the fail cycle and
    /// requires the fail bit to be 1 there. Returns the full trace.
    fn replay(&self, p: &Pending) -> Result<WaveDb, EngineError> {
        let g = self.g;
        let mut state = SimState {
            registers: self.init.clone(),
            time: self.start as u64,
        };
        let mut frames = Vec::new();
        for c in self.start..=p.cycle {
            let inputs: Vec<bool> = (0..g.num_inputs())
                .map(|o| self.replay_input(o, c))
                .collect();
            let values = g.eval_comb(&inputs, &state.registers).expect("sizes match");
            let (_, next) = g.sim_step(&state, &inputs).expect("sizes match");
            frames.push(values);
            state = next;
        }
        let fail = &self.tags.fails[p.fail];
        if !lit_value(frames.last().expect("at least one frame"), fail.lit) {
            return Err(EngineError::ReplayMismatch {
                target: fail.name.to_string(),
                cycle: p.cycle,
            });
        }
        Ok(self.trace(p.cycle, &frames))
    }

    /// Waveform of every named design signal over cycles `0..=cycle`: the
    /// recording before the start cycle, the replay from there on.
    fn trace(&self, cycle: u32, frames: &[Vec<bool>]) -> WaveDb {
        let scope = &self.out.trace_scope;
        let clock = self.wave.clock().rsplit('.').next().unwrap_or("clk");
        let mut db = WaveDb::new(&format!("{scope}.{clock}"), cycle as usize + 1, 10);
        db.set_timescale(self.wave.timescale().map(str::to_string));
        for (name, lits) in self.g.signals() {
            let samples = (0..=cycle)
                .map(|c| {
                    if c < self.start {
                        let recorded = self.wave.sample(name, c as usize).ok();
                        (0..lits.len())
                            .map(|b| recorded.as_ref().and_then(|r| r.get(b).copied().flatten()))
                            .collect()
                    } else {
                        let values = &frames[(c - self.start) as usize];
                        lits.iter().map(|&l| Some(lit_value(values, l))).collect()
                    }
                })
                .collect();
            db.set_signal(&format!("{scope}.{name}"), lits.len(), samples)
                .expect("shapes are consistent");
        }
        db
    }

    /// Runs the policy until it says done or a failure stops the run.
    pub fn main_loop(mut self) -> Result<RunReport, EngineError> {
        loop {
            if self.stopped {
                break;
            }
            let o = self.observables();
            let action = (self.policy)(&o);
            self.apply(action)?;
            if action == Action::Done {
                break;
            }
        }
        Ok(self.into_report())
    }

    pub fn into_report(mut self) -> RunReport {
        let live = self.solver.live_clause_count();
        let s = self.solver.stats();
        let name = |o: usize| self.g.input_name(o).to_string();
        let mut tags = TagSummary::default();
        for (o, t) in self.tags.tags.iter().enumerate() {
            match t {
                Tag::Wave => tags.wave.push(name(o)),
                Tag::Rand => tags.rand.push(name(o)),
                Tag::Free => tags.free.push(name(o)),
            }
        }
        tags.fail = self.tags.fails.iter().map(|f| f.name.to_string()).collect();
        let mut pending = self.pending.clone();
        pending.sort_by_key(|p| (p.cycle, p.fail));
        RunReport {
            schema_version: SCHEMA_VERSION,
            config: self.cfg.clone(),
            tags,
            checks: self.checks,
            unchecked: pending
                .iter()
                .map(|p| format!("{}@{}", self.tags.fails[p.fail].name, p.cycle))
                .collect(),
            stopped_on_fail: self.stopped,
            stats: RunStats {
                frames_encoded: self.t_end - self.start,
                variables: self.solver.num_vars(),
                clauses_added: s.clauses_added,
                learned: s.learned,
                solves: s.solves,
                conflicts: s.conflicts,
                decisions: s.decisions,
                propagations: s.propagations,
                step_fail: self.counts[0],
                step_free: self.counts[1],
                check_fails: self.counts[2],
                free_bits_bound: self.bound.len() as u64,
                live_clauses_final: live,
            },
        }
    }
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Tags the inputs, then runs the loop to completion.
pub fn run(
    g: &Aignet,
    wave: &WaveDb,
    overrides: &Overrides,
    cfg: RunConfig,
    out: OutputOptions,
) -> Result<RunReport, EngineError> {
    let tags = tag_for_run(g, wave, overrides, &cfg)?;
    Engine::new(g, wave, tags, cfg, out)?.main_loop()
}

/// The default tagging over the cycles a run with `cfg` will read.
pub fn tag_for_run(
    g: &Aignet,
    wave: &WaveDb,
    overrides: &Overrides,
    cfg: &RunConfig,
) -> Result<TagMap, EngineError> {
    let start = cfg.start_cycle as usize;
    let end = cfg
        .max_cycle
        .map_or(wave.num_cycles().saturating_sub(1), |m| m as usize)
        .max(start);
    default_tagging(g, wave, overrides, start..=end)
}
