//! Time-frame expansion of AIG cones into CNF.
//!
//! Each `(node, cycle)` pair gets at most one solver literal, recorded in a
//! [`FrameMap`]. AND nodes receive the three Tseitin clauses, inputs and the
//! window-start registers are resolved by a caller-supplied [`LeafRule`], and
//! a register at a later cycle is identified with its next-state literal one
//! cycle earlier, so no variable or clause is spent on it.

use thiserror::Error;

use crate::aig::{AigLit, AigNode, Aignet};
use crate::sat::{Lit, Solver, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("cycle {cycle} lies before the window start {start}")]
    WindowViolation { cycle: u32, start: u32 },
}

/// Resolves the leaves of a frame expansion.
pub trait LeafRule {
    type Error: From<EncodeError>;

    /// Called once per `(input, cycle)` with its fresh variable. Returning a
    /// value fixes the variable with a unit clause; `None` leaves it free.
    fn input(&mut self, ordinal: usize, cycle: u32, var: Var) -> Result<Option<bool>, Self::Error>;

    /// Value of a register at the window start, with the same convention.
    fn initial_register(&mut self, ordinal: usize, var: Var) -> Result<Option<bool>, Self::Error>;
}

/// Leaves every input free and every register at the window start free too.
/// Used for purely combinational queries.
pub struct AllFree;

impl LeafRule for AllFree {
    type Error = EncodeError;

    fn input(&mut self, _: usize, _: u32, _: Var) -> Result<Option<bool>, EncodeError> {
        Ok(None)
    }

    fn initial_register(&mut self, _: usize, _: Var) -> Result<Option<bool>, EncodeError> {
        Ok(None)
    }
}

/// `(node, cycle) -> solver literal`, with the inverse for model decoding.
#[derive(Clone, Debug)]
pub struct FrameMap {
    start: u32,
    num_nodes: usize,
    frames: Vec<Vec<Option<Lit>>>,
    origin: Vec<Option<(usize, u32)>>,
}

impl FrameMap {
    pub fn new(num_nodes: usize, start: u32) -> FrameMap {
        FrameMap {
            start,
            num_nodes,
            frames: Vec::new(),
            origin: Vec::new(),
        }
    }

    /// First cycle that may be encoded.
    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn get(&self, node: usize, cycle: u32) -> Option<Lit> {
        let frame = cycle.checked_sub(self.start)? as usize;
        self.frames.get(frame)?.get(node).copied().flatten()
    }

    /// Solver literal of `lit` at `cycle`, complement folded into the sign.
    pub fn lit(&self, lit: AigLit, cycle: u32) -> Option<Lit> {
        self.get(lit.node(), cycle)
            .map(|l| if lit.is_negated() { !l } else { l })
    }

    /// The `(node, cycle)` that owns `var`, if it was allocated by this map.
    pub fn origin(&self, var: Var) -> Option<(usize, u32)> {
        self.origin.get(var.index()).copied().flatten()
    }

    /// Number of mapped `(node, cycle)` pairs.
    pub fn len(&self) -> usize {
        self.frames
            .iter()
            .map(|f| f.iter().filter(|l| l.is_some()).count())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&mut self, node: usize, cycle: u32, lit: Lit) {
        let frame = (cycle - self.start) as usize;
        if self.frames.len() <= frame {
            self.frames
                .resize_with(frame + 1, || vec![None; self.num_nodes]);
        }
        debug_assert!(self.frames[frame][node].is_none());
        self.frames[frame][node] = Some(lit);
    }

    fn fresh(&mut self, solver: &mut Solver, node: usize, cycle: u32) -> Lit {
        let var = solver.new_var();
        if self.origin.len() <= var.index() {
            self.origin.resize(var.index() + 1, None);
        }
        self.origin[var.index()] = Some((node, cycle));
        let lit = Lit::new(var, false);
        self.insert(node, cycle, lit);
        lit
    }
}

/// Encodes the cone of `lit` at `cycle`, adding only what is not already
/// mapped, and returns its solver literal.
pub fn encode_cone<R: LeafRule>(
    solver: &mut Solver,
    fm: &mut FrameMap,
    g: &Aignet,
    lit: AigLit,
    cycle: u32,
    rule: &mut R,
) -> Result<Lit, R::Error> {
    if cycle < fm.start {
        return Err(EncodeError::WindowViolation {
            cycle,
            start: fm.start,
        }
        .into());
    }
    let mut stack: Vec<(usize, u32, bool)> = vec![(lit.node(), cycle, false)];
    while let Some((node, c, expanded)) = stack.pop() {
        if fm.get(node, c).is_some() {
            continue;
        }
        match g.node(node) {
            AigNode::ConstFalse => {
                let v = fm.fresh(solver, node, c);
                solver.add_clause(&[!v]);
            }
            AigNode::Input { ordinal } => {
                let v = fm.fresh(solver, node, c);
                if let Some(value) = rule.input(ordinal, c, v.var())? {
                    solver.add_clause(&[if value { v } else { !v }]);
                }
            }
            AigNode::Register { ordinal } => {
                if c == fm.start {
                    let v = fm.fresh(solver, node, c);
                    if let Some(value) = rule.initial_register(ordinal, v.var())? {
                        solver.add_clause(&[if value { v } else { !v }]);
                    }
                    continue;
                }
                let next = g.next_state(ordinal);
                match fm.lit(next, c - 1) {
                    Some(l) => fm.insert(node, c, l),
                    None if !expanded => {
                        stack.push((node, c, true));
                        stack.push((next.node(), c - 1, false));
                    }
                    None => unreachable!("next-state cone encoded before its register"),
                }
            }
            AigNode::And { fanin0, fanin1 } => match (fm.lit(fanin0, c), fm.lit(fanin1, c)) {
                (Some(a), Some(b)) => {
                    let o = fm.fresh(solver, node, c);
                    solver.add_clause(&[!o, a]);
                    solver.add_clause(&[!o, b]);
                    solver.add_clause(&[o, !a, !b]);
                }
                _ if !expanded => {
                    stack.push((node, c, true));
                    stack.push((fanin0.node(), c, false));
                    stack.push((fanin1.node(), c, false));
                }
                _ => unreachable!("fanins encoded before their AND"),
            },
        }
    }
    Ok(fm.lit(lit, cycle).expect("root was encoded"))
}
