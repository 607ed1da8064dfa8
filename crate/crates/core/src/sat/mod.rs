//! Incremental CDCL SAT solver.
//!
//! Clauses persist across calls to [`Solver::solve`]; assumptions are scoped
//! to one call. Propagation uses two watched literals with blockers, conflict
//! analysis learns first-UIP clauses, branching is VSIDS with phase saving,
//! and restarts follow the Luby sequence. The solver is always back at
//! decision level 0 between calls, so every clause is added at the root.

mod dimacs;
mod heap;

use std::fmt;
use std::ops::Not;

use serde::Serialize;

pub use dimacs::{export_dimacs, parse_dimacs, solve_external, DimacsError, DimacsProblem};
use heap::VarHeap;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 1-based DIMACS number of this variable.
    pub fn dimacs(self) -> u32 {
        self.0 + 1
    }
}

/// A solver literal, packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        Lit(var.0 << 1 | negated as u32)
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Converts a non-zero signed DIMACS literal.
    pub fn from_dimacs(x: i32) -> Lit {
        assert!(x != 0, "DIMACS literal 0 is a terminator");
        Lit::new(Var(x.unsigned_abs() - 1), x < 0)
    }

    pub fn to_dimacs(self) -> i32 {
        let v = self.var().dimacs() as i32;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    fn code(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum SolveStatus {
    #[serde(rename = "SAT")]
    Sat,
    #[serde(rename = "UNSAT")]
    Unsat,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolverStats {
    pub clauses_added: u64,
    pub learned: u64,
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub solves: u64,
}

type ClauseRef = u32;

#[derive(Clone, Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    /// Set once a literal is found true at level 0; never cleared.
    root_satisfied: bool,
    activity: f64,
}

#[derive(Clone, Copy, Debug)]
struct Watch {
    cref: ClauseRef,
    blocker: Lit,
}

const UNDEF: u8 = 2;

#[derive(Clone, Debug)]
pub struct Solver {
    clauses: Vec<Clause>,
    free_slots: Vec<ClauseRef>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watch>>,
    /// Per variable: 0 = false, 1 = true, [`UNDEF`].
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    clause_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
    ok: bool,
    model: Vec<bool>,
    has_model: bool,
    max_learnts: f64,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_UNIT: u64 = 100;

impl Solver {
    pub fn new() -> Solver {
        Solver {
            clauses: Vec::new(),
            free_slots: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: Vec::new(),
            var_inc: 1.0,
            clause_inc: 1.0,
            heap: VarHeap::default(),
            phase: Vec::new(),
            seen: Vec::new(),
            ok: true,
            model: Vec::new(),
            has_model: false,
            max_learnts: 2000.0,
            stats: SolverStats::default(),
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.assigns.len() as u32);
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.activity.push(0.0);
        self.phase.push(false);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(v.index() + 1);
        self.heap.insert(v.index(), &self.activity);
        v
    }

    /// Allocates variables until at least `n` exist.
    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// False once the clause set is known to be unsatisfiable without assumptions.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    fn value(&self, lit: Lit) -> u8 {
        let a = self.assigns[lit.var().index()];
        if a == UNDEF {
            UNDEF
        } else {
            a ^ lit.is_negated() as u8
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Value of `lit` fixed at decision level 0, if any.
    pub fn root_value(&self, lit: Lit) -> Option<bool> {
        let v = lit.var().index();
        if v >= self.num_vars() || self.assigns[v] == UNDEF || self.level[v] != 0 {
            return None;
        }
        Some(self.value(lit) == 1)
    }

    /// Adds a problem clause. An empty clause, or one falsified at the root,
    /// makes every later solve UNSAT.
    pub fn add_clause(&mut self, lits: &[Lit]) {
        debug_assert_eq!(self.decision_level(), 0);
        for l in lits {
            assert!(
                l.var().index() < self.num_vars(),
                "literal {l:?} references an unallocated variable"
            );
        }
        self.stats.clauses_added += 1;
        let mut lits = lits.to_vec();
        lits.sort_unstable();
        lits.dedup();
        let tautology = lits.windows(2).any(|w| w[0] == !w[1]);
        let cref = self.store(Clause {
            lits,
            learnt: false,
            deleted: false,
            root_satisfied: tautology,
            activity: 0.0,
        });
        if tautology || !self.ok {
            return;
        }
        let lits = &mut self.clauses[cref as usize].lits;
        // Order as: true literals, unassigned, then false.
        let assigns = &self.assigns;
        let rank = |l: &Lit| {
            let a = assigns[l.var().index()];
            if a == UNDEF {
                1
            } else if a ^ l.is_negated() as u8 == 1 {
                0
            } else {
                2
            }
        };
        lits.sort_by_key(rank);
        let len = lits.len();
        match len {
            0 => self.ok = false,
            1 => {
                let l = lits[0];
                match self.value(l) {
                    0 => self.ok = false,
                    UNDEF => {
                        self.enqueue(l, None);
                        if self.propagate().is_some() {
                            self.ok = false;
                        }
                    }
                    _ => {}
                }
            }
            _ => {
                let (l0, l1) = (lits[0], lits[1]);
                self.attach(cref);
                match (self.value(l0), self.value(l1)) {
                    (0, _) => self.ok = false,
                    (UNDEF, 0) => {
                        self.enqueue(l0, Some(cref));
                        if self.propagate().is_some() {
                            self.ok = false;
                        }
                    }
                    _ => {}
                }
            }
        }
    }

    fn store(&mut self, clause: Clause) -> ClauseRef {
        if clause.learnt {
            if let Some(slot) = self.free_slots.pop() {
                self.clauses[slot as usize] = clause;
                return slot;
            }
        }
        self.clauses.push(clause);
        (self.clauses.len() - 1) as ClauseRef
    }

    fn attach(&mut self, cref: ClauseRef) {
        let c = &self.clauses[cref as usize];
        let (l0, l1) = (c.lits[0], c.lits[1]);
        self.watches[(!l0).code()].push(Watch { cref, blocker: l1 });
        self.watches[(!l1).code()].push(Watch { cref, blocker: l0 });
    }

    fn enqueue(&mut self, lit: Lit, reason: Option<ClauseRef>) {
        let v = lit.var().index();
        debug_assert_eq!(self.assigns[v], UNDEF);
        self.assigns[v] = !lit.is_negated() as u8;
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(lit);
    }

    /// Unit propagation; returns a conflicting clause if one is found.
    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut i = 0;
            let mut j = 0;
            'watches: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                let clause = &mut self.clauses[cref as usize];
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let new_watch = Watch {
                    cref,
                    blocker: first,
                };
                let first_val = {
                    let a = self.assigns[first.var().index()];
                    if a == UNDEF {
                        UNDEF
                    } else {
                        a ^ first.is_negated() as u8
                    }
                };
                if first != w.blocker && first_val == 1 {
                    ws[j] = new_watch;
                    j += 1;
                    continue;
                }
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    let a = self.assigns[l.var().index()];
                    if a == UNDEF || a ^ l.is_negated() as u8 == 1 {
                        clause.lits.swap(1, k);
                        let l1 = clause.lits[1];
                        self.watches[(!l1).code()].push(new_watch);
                        continue 'watches;
                    }
                }
                ws[j] = new_watch;
                j += 1;
                if first_val == 0 {
                    conflict = Some(cref);
                    self.qhead = self.trail.len();
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                break;
            }
        }
        conflict
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for idx in (lim..self.trail.len()).rev() {
            let lit = self.trail[idx];
            let v = lit.var().index();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.phase[v] = !lit.is_negated();
            if !self.heap.contains(v) {
                self.heap.insert(v, &self.activity);
            }
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = lim;
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.heap.contains(v) {
            self.heap.decrease(v, &self.activity);
        }
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.clause_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r as usize].activity *= 1e-20;
            }
            self.clause_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause, asserting
    /// literal first, and the level to backtrack to.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, u32) {
        let dl = self.decision_level();
        let mut learnt = vec![Lit(0)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            self.bump_clause(confl);
            let skip = usize::from(p.is_some());
            let lits = self.clauses[confl as usize].lits.clone();
            for &q in &lits[skip..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(v);
                    self.seen[v] = true;
                    if self.level[v] >= dl {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var().index()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();

        // Drop literals whose reason is subsumed by the rest of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                if i == 0 {
                    return true;
                }
                match self.reason[l.var().index()] {
                    None => true,
                    Some(r) => self.clauses[r as usize].lits[1..].iter().any(|q| {
                        let v = q.var().index();
                        !self.seen[v] && self.level[v] > 0
                    }),
                }
            })
            .collect();
        for l in &learnt {
            self.seen[l.var().index()] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter_map(|(l, k)| k.then_some(l))
            .collect();

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()]
        };
        (learnt, bt)
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let l0 = self.clauses[cref as usize].lits[0];
        self.value(l0) == 1 && self.reason[l0.var().index()] == Some(cref)
    }

    fn reduce_learnts(&mut self) {
        let mut refs = std::mem::take(&mut self.learnts);
        refs.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            (ca.lits.len() <= 2)
                .cmp(&(cb.lits.len() <= 2))
                .then(ca.activity.total_cmp(&cb.activity))
        });
        let half = refs.len() / 2;
        let mut kept = Vec::with_capacity(refs.len());
        for (i, cref) in refs.into_iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                c.lits.clear();
                self.free_slots.push(cref);
            } else {
                kept.push(cref);
            }
        }
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref as usize].deleted);
        }
        self.learnts = kept;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop_max(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit::new(Var(v as u32), !self.phase[v]));
            }
        }
        None
    }

    /// Runs CDCL until a verdict or until `budget` conflicts have occurred.
    fn search(&mut self, budget: u64, assumptions: &[Lit]) -> Option<SolveStatus> {
        let mut conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveStatus::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let asserting = learnt[0];
                    let cref = self.store(Clause {
                        lits: learnt,
                        learnt: true,
                        deleted: false,
                        root_satisfied: false,
                        activity: 0.0,
                    });
                    self.learnts.push(cref);
                    self.attach(cref);
                    self.bump_clause(cref);
                    self.enqueue(asserting, Some(cref));
                }
                self.stats.learned += 1;
                self.var_inc /= VAR_DECAY;
                self.clause_inc /= CLAUSE_DECAY;
                continue;
            }
            if conflicts >= budget {
                self.cancel_until(0);
                return None;
            }
            if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                self.reduce_learnts();
                self.max_learnts *= 1.1;
            }
            let mut next = None;
            while (self.decision_level() as usize) < assumptions.len() {
                let a = assumptions[self.decision_level() as usize];
                match self.value(a) {
                    1 => self.trail_lim.push(self.trail.len()),
                    0 => return Some(SolveStatus::Unsat),
                    _ => {
                        next = Some(a);
                        break;
                    }
                }
            }
            let next = match next {
                Some(a) => a,
                None => match self.pick_branch() {
                    Some(l) => {
                        self.stats.decisions += 1;
                        l
                    }
                    None => return Some(SolveStatus::Sat),
                },
            };
            self.trail_lim.push(self.trail.len());
            self.enqueue(next, None);
        }
    }

    /// Decides the clause set under the given assumptions. Assumptions hold
    /// for this call only.
    pub fn solve(&mut self, assumptions: &[Lit]) -> SolveStatus {
        self.stats.solves += 1;
        self.has_model = false;
        for a in assumptions {
            assert!(
                a.var().index() < self.num_vars(),
                "assumption {a:?} references an unallocated variable"
            );
        }
        if !self.ok {
            return SolveStatus::Unsat;
        }
        if self.propagate().is_some() {
            self.ok = false;
            return SolveStatus::Unsat;
        }
        let mut restart = 0u32;
        let status = loop {
            let budget = luby(restart) * RESTART_UNIT;
            restart += 1;
            if let Some(status) = self.search(budget, assumptions) {
                break status;
            }
        };
        if status == SolveStatus::Sat {
            self.model = (0..self.num_vars()).map(|v| self.assigns[v] == 1).collect();
            self.has_model = true;
        }
        self.cancel_until(0);
        status
    }

    /// Value of `lit` in the model of the last successful solve.
    pub fn model_value(&self, lit: Lit) -> Option<bool> {
        if !self.has_model {
            return None;
        }
        self.model
            .get(lit.var().index())
            .map(|&v| v ^ lit.is_negated())
    }

    /// Number of problem clauses not yet satisfied by a root-level assignment.
    pub fn live_clause_count(&mut self) -> usize {
        if self.ok && self.propagate().is_some() {
            self.ok = false;
        }
        let mut live = 0;
        for i in 0..self.clauses.len() {
            let c = &self.clauses[i];
            if c.learnt || c.deleted || c.root_satisfied {
                continue;
            }
            let sat = c
                .lits
                .iter()
                .any(|&l| self.value(l) == 1 && self.level[l.var().index()] == 0);
            if sat {
                self.clauses[i].root_satisfied = true;
            } else {
                live += 1;
            }
        }
        live
    }

    /// Problem clauses in the order they were added.
    pub fn problem_clauses(&self) -> impl Iterator<Item = &[Lit]> {
        self.clauses
            .iter()
            .filter(|c| !c.learnt)
            .map(|c| c.lits.as_slice())
    }
}

/// Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i as u64 + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = i as u64;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    i = seq;
    1u64 << i
}
