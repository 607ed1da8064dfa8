//! And-inverter graphs with registers.
//!
//! A graph is assembled with [`AignetBuilder`], which folds constants and
//! hash-conses AND nodes as they are created, and then sealed into an
//! immutable [`Aignet`]. Inverters live on edges: an [`AigLit`] is a node
//! index with a complement bit packed into the low bit.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Not;

use thiserror::Error;

/// A possibly complemented reference to a node, packed as `2 * node + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AigLit(u32);

impl AigLit {
    pub const FALSE: AigLit = AigLit(0);
    pub const TRUE: AigLit = AigLit(1);

    pub fn new(node: usize, negated: bool) -> AigLit {
        AigLit(((node as u32) << 1) | negated as u32)
    }

    pub fn from_raw(raw: u32) -> AigLit {
        AigLit(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn is_const(self) -> bool {
        self.node() == 0
    }

    /// The literal with its complement bit cleared.
    pub fn positive(self) -> AigLit {
        AigLit(self.0 & !1)
    }

    /// Complements the literal when `flip` is set.
    pub fn xor_sign(self, flip: bool) -> AigLit {
        AigLit(self.0 ^ flip as u32)
    }
}

impl Not for AigLit {
    type Output = AigLit;

    fn not(self) -> AigLit {
        AigLit(self.0 ^ 1)
    }
}

impl fmt::Debug for AigLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_negated() {
            write!(f, "!n{}", self.node())
        } else {
            write!(f, "n{}", self.node())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AigNode {
    ConstFalse,
    Input { ordinal: usize },
    Register { ordinal: usize },
    And { fanin0: AigLit, fanin1: AigLit },
}

/// One bit of a named vector signal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitName {
    pub signal: String,
    pub bit: usize,
}

impl BitName {
    pub fn new(signal: impl Into<String>, bit: usize) -> BitName {
        BitName {
            signal: signal.into(),
            bit,
        }
    }
}

impl fmt::Display for BitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.signal, self.bit)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AigError {
    #[error("signal `{0}` is already defined")]
    DuplicateName(String),
    #[error("register bit {0} has no next-state function")]
    UnsetNextState(BitName),
    #[error("register bit {0} already has a next-state function")]
    NextStateAlreadySet(BitName),
    #[error("literal {0:?} does not refer to a register")]
    NotARegister(AigLit),
    #[error("literal {0:?} refers to a node that does not exist")]
    DanglingLiteral(AigLit),
    #[error("output `{0}` conflicts with an existing signal of the same name")]
    OutputConflict(String),
    #[error("expected {expected} {what} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
}

#[derive(Clone, Debug, Default)]
struct Graph {
    nodes: Vec<AigNode>,
    inputs: Vec<usize>,
    input_names: Vec<BitName>,
    registers: Vec<usize>,
    register_names: Vec<BitName>,
    outputs: Vec<(BitName, AigLit)>,
    signals: BTreeMap<String, Vec<AigLit>>,
}

/// A graph under construction.
#[derive(Clone, Debug)]
pub struct AignetBuilder {
    graph: Graph,
    next_state: Vec<Option<AigLit>>,
    strash: HashMap<(AigLit, AigLit), usize>,
}

impl Default for AignetBuilder {
    fn default() -> Self {
        AignetBuilder::new()
    }
}

impl AignetBuilder {
    pub fn new() -> AignetBuilder {
        AignetBuilder {
            graph: Graph {
                nodes: vec![AigNode::ConstFalse],
                ..Graph::default()
            },
            next_state: Vec::new(),
            strash: HashMap::new(),
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.graph.nodes.len()
    }

    pub fn num_registers(&self) -> usize {
        self.graph.registers.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.graph.inputs.len()
    }

    pub fn signal(&self, name: &str) -> Option<&[AigLit]> {
        self.graph.signals.get(name).map(Vec::as_slice)
    }

    pub fn node(&self, index: usize) -> AigNode {
        self.graph.nodes[index]
    }

    fn check_lit(&self, lit: AigLit) -> Result<(), AigError> {
        if lit.node() < self.graph.nodes.len() {
            Ok(())
        } else {
            Err(AigError::DanglingLiteral(lit))
        }
    }

    /// Binds `name` to the given LSB-first literal vector.
    pub fn name_signal(&mut self, name: &str, lits: Vec<AigLit>) -> Result<(), AigError> {
        if self.graph.signals.contains_key(name) {
            return Err(AigError::DuplicateName(name.to_string()));
        }
        for &lit in &lits {
            self.check_lit(lit)?;
        }
        self.graph.signals.insert(name.to_string(), lits);
        Ok(())
    }

    /// Appends one input node without binding a signal name.
    pub fn add_input_bit(&mut self, name: BitName) -> AigLit {
        let node = self.graph.nodes.len();
        let ordinal = self.graph.inputs.len();
        self.graph.nodes.push(AigNode::Input { ordinal });
        self.graph.inputs.push(node);
        self.graph.input_names.push(name);
        AigLit::new(node, false)
    }

    /// Appends one register node without binding a signal name.
    pub fn add_register_bit(&mut self, name: BitName) -> AigLit {
        let node = self.graph.nodes.len();
        let ordinal = self.graph.registers.len();
        self.graph.nodes.push(AigNode::Register { ordinal });
        self.graph.registers.push(node);
        self.graph.register_names.push(name);
        self.next_state.push(None);
        AigLit::new(node, false)
    }

    pub fn add_input(&mut self, name: &str, width: usize) -> Result<Vec<AigLit>, AigError> {
        if self.graph.signals.contains_key(name) {
            return Err(AigError::DuplicateName(name.to_string()));
        }
        let lits: Vec<AigLit> = (0..width)
            .map(|bit| self.add_input_bit(BitName::new(name, bit)))
            .collect();
        self.graph.signals.insert(name.to_string(), lits.clone());
        Ok(lits)
    }

    pub fn add_register(&mut self, name: &str, width: usize) -> Result<Vec<AigLit>, AigError> {
        if self.graph.signals.contains_key(name) {
            return Err(AigError::DuplicateName(name.to_string()));
        }
        let lits: Vec<AigLit> = (0..width)
            .map(|bit| self.add_register_bit(BitName::new(name, bit)))
            .collect();
        self.graph.signals.insert(name.to_string(), lits.clone());
        Ok(lits)
    }

    /// Replaces the per-bit name of an input or register node.
    pub fn rename_bit(&mut self, lit: AigLit, name: BitName) {
        match self.graph.nodes[lit.node()] {
            AigNode::Input { ordinal } => self.graph.input_names[ordinal] = name,
            AigNode::Register { ordinal } => self.graph.register_names[ordinal] = name,
            _ => {}
        }
    }

    /// Defines the next-state function of the register bit `reg`, which must
    /// be an uncomplemented register literal.
    pub fn set_next_state(&mut self, reg: AigLit, next: AigLit) -> Result<(), AigError> {
        self.check_lit(reg)?;
        self.check_lit(next)?;
        let ordinal = match (reg.is_negated(), self.graph.nodes[reg.node()]) {
            (false, AigNode::Register { ordinal }) => ordinal,
            _ => return Err(AigError::NotARegister(reg)),
        };
        if self.next_state[ordinal].is_some() {
            return Err(AigError::NextStateAlreadySet(
                self.graph.register_names[ordinal].clone(),
            ));
        }
        self.next_state[ordinal] = Some(next);
        Ok(())
    }

    /// Records an output vector. If `name` is not yet a signal it is bound to
    /// `lits`; if it is, the existing binding must be identical.
    pub fn add_output(&mut self, name: &str, lits: Vec<AigLit>) -> Result<(), AigError> {
        for &lit in &lits {
            self.check_lit(lit)?;
        }
        match self.graph.signals.get(name) {
            Some(existing) if *existing != lits => {
                return Err(AigError::OutputConflict(name.to_string()))
            }
            Some(_) => {}
            None => {
                self.graph.signals.insert(name.to_string(), lits.clone());
            }
        }
        for (bit, lit) in lits.into_iter().enumerate() {
            self.graph.outputs.push((BitName::new(name, bit), lit));
        }
        Ok(())
    }

    pub fn mk_and(&mut self, a: AigLit, b: AigLit) -> AigLit {
        debug_assert!(a.node() < self.graph.nodes.len() && b.node() < self.graph.nodes.len());
        if a == AigLit::FALSE || b == AigLit::FALSE || a == !b {
            return AigLit::FALSE;
        }
        if a == AigLit::TRUE || a == b {
            return b;
        }
        if b == AigLit::TRUE {
            return a;
        }
        let key = if a < b { (a, b) } else { (b, a) };
        if let Some(&node) = self.strash.get(&key) {
            return AigLit::new(node, false);
        }
        let node = self.graph.nodes.len();
        self.graph.nodes.push(AigNode::And {
            fanin0: key.0,
            fanin1: key.1,
        });
        self.strash.insert(key, node);
        AigLit::new(node, false)
    }

    pub fn mk_or(&mut self, a: AigLit, b: AigLit) -> AigLit {
        !self.mk_and(!a, !b)
    }

    pub fn mk_xor(&mut self, a: AigLit, b: AigLit) -> AigLit {
        let a_not_b = self.mk_and(a, !b);
        let b_not_a = self.mk_and(!a, b);
        !self.mk_and(!a_not_b, !b_not_a)
    }

    pub fn mk_mux(&mut self, sel: AigLit, then_lit: AigLit, else_lit: AigLit) -> AigLit {
        let t = self.mk_and(sel, then_lit);
        let e = self.mk_and(!sel, else_lit);
        self.mk_or(t, e)
    }

    /// AND over all literals; TRUE for an empty slice.
    pub fn mk_and_all(&mut self, lits: &[AigLit]) -> AigLit {
        lits.iter()
            .fold(AigLit::TRUE, |acc, &l| self.mk_and(acc, l))
    }

    pub fn mk_or_all(&mut self, lits: &[AigLit]) -> AigLit {
        lits.iter()
            .fold(AigLit::FALSE, |acc, &l| self.mk_or(acc, l))
    }

    pub fn mk_xor_all(&mut self, lits: &[AigLit]) -> AigLit {
        lits.iter()
            .fold(AigLit::FALSE, |acc, &l| self.mk_xor(acc, l))
    }

    pub fn seal(self) -> Result<Aignet, AigError> {
        let mut next_state = Vec::with_capacity(self.next_state.len());
        for (ordinal, next) in self.next_state.into_iter().enumerate() {
            match next {
                Some(lit) => next_state.push(lit),
                None => {
                    return Err(AigError::UnsetNextState(
                        self.graph.register_names[ordinal].clone(),
                    ))
                }
            }
        }
        Ok(Aignet {
            graph: self.graph,
            next_state,
        })
    }
}

/// A sealed, immutable and-inverter graph.
#[derive(Clone, Debug)]
pub struct Aignet {
    graph: Graph,
    next_state: Vec<AigLit>,
}

/// Register contents at one clock cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimState {
    pub registers: Vec<bool>,
    pub time: u64,
}

impl Aignet {
    pub fn num_nodes(&self) -> usize {
        self.graph.nodes.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.graph.inputs.len()
    }

    pub fn num_registers(&self) -> usize {
        self.graph.registers.len()
    }

    pub fn num_ands(&self) -> usize {
        self.graph
            .nodes
            .iter()
            .filter(|n| matches!(n, AigNode::And { .. }))
            .count()
    }

    pub fn node(&self, index: usize) -> AigNode {
        self.graph.nodes[index]
    }

    pub fn nodes(&self) -> &[AigNode] {
        &self.graph.nodes
    }

    pub fn input_node(&self, ordinal: usize) -> usize {
        self.graph.inputs[ordinal]
    }

    pub fn register_node(&self, ordinal: usize) -> usize {
        self.graph.registers[ordinal]
    }

    pub fn input_name(&self, ordinal: usize) -> &BitName {
        &self.graph.input_names[ordinal]
    }

    pub fn input_names(&self) -> &[BitName] {
        &self.graph.input_names
    }

    pub fn register_name(&self, ordinal: usize) -> &BitName {
        &self.graph.register_names[ordinal]
    }

    pub fn register_names(&self) -> &[BitName] {
        &self.graph.register_names
    }

    pub fn next_state(&self, ordinal: usize) -> AigLit {
        self.next_state[ordinal]
    }

    pub fn outputs(&self) -> &[(BitName, AigLit)] {
        &self.graph.outputs
    }

    pub fn signal(&self, name: &str) -> Option<&[AigLit]> {
        self.graph.signals.get(name).map(Vec::as_slice)
    }

    /// All named signals in name order.
    pub fn signals(&self) -> impl Iterator<Item = (&str, &[AigLit])> {
        self.graph
            .signals
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Input ordinal of `(signal, bit)` if it names a primary input bit.
    pub fn find_input(&self, signal: &str, bit: usize) -> Option<usize> {
        let lit = *self.signal(signal)?.get(bit)?;
        match (lit.is_negated(), self.node(lit.node())) {
            (false, AigNode::Input { ordinal }) => Some(ordinal),
            _ => None,
        }
    }

    /// Evaluates every node. Index `i` of the result is the value of node `i`.
    pub fn eval_comb(&self, inputs: &[bool], registers: &[bool]) -> Result<Vec<bool>, AigError> {
        if inputs.len() != self.num_inputs() {
            return Err(AigError::LengthMismatch {
                what: "input",
                expected: self.num_inputs(),
                got: inputs.len(),
            });
        }
        if registers.len() != self.num_registers() {
            return Err(AigError::LengthMismatch {
                what: "register",
                expected: self.num_registers(),
                got: registers.len(),
            });
        }
        let mut values = Vec::with_capacity(self.graph.nodes.len());
        for node in &self.graph.nodes {
            let v = match *node {
                AigNode::ConstFalse => false,
                AigNode::Input { ordinal } => inputs[ordinal],
                AigNode::Register { ordinal } => registers[ordinal],
                AigNode::And { fanin0, fanin1 } => {
                    lit_value(&values, fanin0) && lit_value(&values, fanin1)
                }
            };
            values.push(v);
        }
        Ok(values)
    }

    /// Advances one clock cycle. Returns the output values sampled before the
    /// edge together with the successor state.
    pub fn sim_step(
        &self,
        state: &SimState,
        inputs: &[bool],
    ) -> Result<(Vec<bool>, SimState), AigError> {
        let values = self.eval_comb(inputs, &state.registers)?;
        let outputs = self
            .graph
            .outputs
            .iter()
            .map(|(_, lit)| lit_value(&values, *lit))
            .collect();
        let registers = self
            .next_state
            .iter()
            .map(|&lit| lit_value(&values, lit))
            .collect();
        Ok((
            outputs,
            SimState {
                registers,
                time: state.time + 1,
            },
        ))
    }
}

/// Value of `lit` given per-node values from [`Aignet::eval_comb`].
pub fn lit_value(values: &[bool], lit: AigLit) -> bool {
    values[lit.node()] ^ lit.is_negated()
}
