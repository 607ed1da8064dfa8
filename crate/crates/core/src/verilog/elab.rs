//! Hierarchy flattening and bit-blasting.
//!
//! Every declared net of every instance becomes a flat net named by its
//! instance path (`des.tmp`). Each bit has at most one driver: a top-level
//! input, a clocked assignment (which makes it a register), or a
//! combinational assignment. Port connections are combinational assignments
//! across the instance boundary. Combinational values are built on demand
//! and memoized per assignment, which also detects combinational cycles.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::ast::*;
use super::{Elaboration, PortInfo};
use crate::aig::{AigError, AigLit, AignetBuilder, BitName};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ElabError {
    #[error("top module `{0}` not found")]
    TopNotFound(String),
    #[error("{line}: unknown module `{name}`")]
    UnknownModule { name: String, line: usize },
    #[error("recursive instantiation: {}", .0.join(" -> "))]
    RecursiveInstance(Vec<String>),
    #[error("{line}: `{name}` is not declared")]
    UnknownNet { name: String, line: usize },
    #[error("{line}: `{name}` is declared twice")]
    DuplicateDecl { name: String, line: usize },
    #[error("{line}: redeclaration of port `{name}` does not match its header")]
    PortRedeclaration { name: String, line: usize },
    #[error("{line}: index {index} is outside the range of `{name}`")]
    IndexOutOfRange {
        name: String,
        index: u32,
        line: usize,
    },
    #[error("{line}: width mismatch in {context}: {expected} vs {got}")]
    WidthMismatch {
        context: String,
        expected: usize,
        got: usize,
        line: usize,
    },
    #[error("{line}: constant {value} does not fit in {width} bits")]
    ConstantTooWide {
        value: u64,
        width: usize,
        line: usize,
    },
    #[error("{line}: unsized constant needs a width from its context")]
    UnsizedInConcat { line: usize },
    #[error("{net}[{bit}] has more than one driver")]
    MultipleDrivers { net: String, bit: usize },
    #[error("{line}: `{net}` is a {kind} and cannot be assigned {how}")]
    IllegalTarget {
        net: String,
        kind: &'static str,
        how: &'static str,
        line: usize,
    },
    #[error("{net}[{bit}] is read but never driven")]
    Undriven { net: String, bit: usize },
    #[error("combinational cycle through {}", .0.join(" -> "))]
    CombCycle(Vec<String>),
    #[error("{line}: instance `{instance}` has no port `{port}`")]
    UnknownPort {
        instance: String,
        port: String,
        line: usize,
    },
    #[error("{line}: output port `{port}` must connect to a net or concatenation of nets")]
    NotAnLvalue { port: String, line: usize },
    #[error("clock `{0}` must be a 1-bit input of the top module")]
    ClockNotTopInput(String),
    #[error("more than one clock: `{0}` and `{1}`")]
    MultipleClocks(String, String),
    #[error("clock `{0}` is used as data")]
    ClockAsData(String),
    #[error("top output `{0}` is not fully driven")]
    UndrivenOutput(String),
    #[error(transparent)]
    Graph(#[from] AigError),
}

type Result<T> = std::result::Result<T, ElabError>;

#[derive(Clone, Debug)]
struct Net {
    name: String,
    width: usize,
    lsb: u32,
    kind: NetKind,
    top_input: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AssignKind {
    Continuous,
    Comb,
    Clocked,
    Port,
}

#[derive(Clone, Debug)]
struct FlatAssign {
    targets: Vec<(usize, usize)>,
    rhs: Expr,
    rhs_scope: String,
    kind: AssignKind,
    line: usize,
}

#[derive(Clone, Copy, Debug)]
enum Driver {
    Input,
    Assign { index: usize, offset: usize },
}

#[derive(Clone, Debug)]
enum Memo {
    Todo,
    Busy,
    Done(Vec<AigLit>),
}

#[derive(Default)]
struct Flat {
    nets: Vec<Net>,
    by_name: HashMap<String, usize>,
    assigns: Vec<FlatAssign>,
    clocks: Vec<(String, usize)>,
}

impl Flat {
    fn lookup(&self, scope: &str, name: &str, line: usize) -> Result<usize> {
        self.by_name
            .get(&format!("{scope}{name}"))
            .copied()
            .ok_or_else(|| ElabError::UnknownNet {
                name: format!("{scope}{name}"),
                line,
            })
    }

    fn offset(&self, net: usize, index: u32, line: usize) -> Result<usize> {
        let n = &self.nets[net];
        if index < n.lsb || (index - n.lsb) as usize >= n.width {
            return Err(ElabError::IndexOutOfRange {
                name: n.name.clone(),
                index,
                line,
            });
        }
        Ok((index - n.lsb) as usize)
    }

    /// Target bits of an lvalue, LSB first.
    fn lvalue_bits(&self, scope: &str, lv: &LValue, line: usize) -> Result<Vec<(usize, usize)>> {
        Ok(match lv {
            LValue::Whole(name) => {
                let n = self.lookup(scope, name, line)?;
                (0..self.nets[n].width).map(|b| (n, b)).collect()
            }
            LValue::Bit(name, i) => {
                let n = self.lookup(scope, name, line)?;
                vec![(n, self.offset(n, *i, line)?)]
            }
            LValue::Part(name, r) => {
                let n = self.lookup(scope, name, line)?;
                let lo = self.offset(n, r.lsb, line)?;
                let hi = self.offset(n, r.msb, line)?;
                (lo..=hi).map(|b| (n, b)).collect()
            }
            LValue::Concat(parts) => {
                let mut bits = Vec::new();
                for p in parts.iter().rev() {
                    bits.extend(self.lvalue_bits(scope, p, line)?);
                }
                bits
            }
        })
    }

    /// Self-determined width, `None` when it depends only on unsized constants.
    fn width_of(&self, scope: &str, e: &Expr, line: usize) -> Result<Option<usize>> {
        Ok(match e {
            Expr::Ident(name) => Some(self.nets[self.lookup(scope, name, line)?].width),
            Expr::Number { width, .. } => width.map(|w| w as usize),
            Expr::Bit(..)
            | Expr::Unary(UnaryOp::ReduceAnd | UnaryOp::ReduceOr | UnaryOp::ReduceXor, _) => {
                Some(1)
            }
            Expr::Part(_, r) => Some(r.width()),
            Expr::Unary(UnaryOp::Not, a) => self.width_of(scope, a, line)?,
            Expr::Binary(_, a, b) | Expr::Ternary(_, a, b) => {
                match self.width_of(scope, a, line)? {
                    Some(w) => Some(w),
                    None => self.width_of(scope, b, line)?,
                }
            }
            Expr::Concat(parts) => Some(self.concat_width(scope, parts, line)?),
            Expr::Replicate(n, parts) => Some(*n as usize * self.concat_width(scope, parts, line)?),
        })
    }

    fn concat_width(&self, scope: &str, parts: &[Expr], line: usize) -> Result<usize> {
        let mut total = 0;
        for p in parts {
            total += self
                .width_of(scope, p, line)?
                .ok_or(ElabError::UnsizedInConcat { line })?;
        }
        Ok(total)
    }

    fn add_net(&mut self, name: String, range: Option<Range>, kind: NetKind, top_input: bool) {
        let r = range.unwrap_or(Range { msb: 0, lsb: 0 });
        self.by_name.insert(name.clone(), self.nets.len());
        self.nets.push(Net {
            name,
            width: r.width(),
            lsb: r.lsb,
            kind,
            top_input,
        });
    }

    fn flatten(
        &mut self,
        file: &SourceFile,
        module: &Module,
        scope: &str,
        is_top: bool,
        stack: &mut Vec<String>,
    ) -> Result<()> {
        stack.push(module.name.clone());
        for p in &module.ports {
            let name = format!("{scope}{}", p.name);
            if self.by_name.contains_key(&name) {
                return Err(ElabError::DuplicateDecl {
                    name,
                    line: p.pos.line,
                });
            }
            let kind = if p.is_reg {
                NetKind::Reg
            } else {
                NetKind::Wire
            };
            self.add_net(name, p.range, kind, is_top && p.dir == Direction::Input);
        }
        let mut declared = BTreeSet::new();
        for d in &module.decls {
            let name = format!("{scope}{}", d.name);
            if !declared.insert(d.name.clone()) {
                return Err(ElabError::DuplicateDecl {
                    name,
                    line: d.pos.line,
                });
            }
            match module.port(&d.name) {
                Some(p) => {
                    // A body declaration may restate a port's type.
                    let same_range = d.range.unwrap_or(Range { msb: 0, lsb: 0 })
                        == p.range.unwrap_or(Range { msb: 0, lsb: 0 });
                    if !same_range || (d.kind == NetKind::Reg && p.dir == Direction::Input) {
                        return Err(ElabError::PortRedeclaration {
                            name,
                            line: d.pos.line,
                        });
                    }
                    if d.kind == NetKind::Reg {
                        let n = self.by_name[&name];
                        self.nets[n].kind = NetKind::Reg;
                    }
                }
                None => self.add_net(name, d.range, d.kind, false),
            }
        }
        for item in &module.items {
            match item {
                Item::Assign(a) => self.push_assign(scope, a, AssignKind::Continuous)?,
                Item::Comb(list) => {
                    for a in list {
                        self.push_assign(scope, a, AssignKind::Comb)?;
                    }
                }
                Item::Clocked {
                    clock,
                    assigns,
                    pos,
                } => {
                    let c = self.lookup(scope, clock, pos.line)?;
                    self.clocks.push((format!("{scope}{clock}"), c));
                    for a in assigns {
                        self.push_assign(scope, a, AssignKind::Clocked)?;
                    }
                }
                Item::Instance {
                    module: child_name,
                    name,
                    connections,
                    pos,
                } => {
                    let child =
                        file.module(child_name)
                            .ok_or_else(|| ElabError::UnknownModule {
                                name: child_name.clone(),
                                line: pos.line,
                            })?;
                    if stack.contains(child_name) {
                        let mut chain = stack.clone();
                        chain.push(child_name.clone());
                        return Err(ElabError::RecursiveInstance(chain));
                    }
                    let child_scope = format!("{scope}{name}.");
                    self.flatten(file, child, &child_scope, false, stack)?;
                    let conns: Vec<(String, Option<Expr>)> = match connections {
                        Connections::Wildcard => child
                            .ports
                            .iter()
                            .map(|p| (p.name.clone(), Some(Expr::Ident(p.name.clone()))))
                            .collect(),
                        Connections::Named(list) => list.clone(),
                    };
                    for (port_name, expr) in conns {
                        let port =
                            child
                                .port(&port_name)
                                .ok_or_else(|| ElabError::UnknownPort {
                                    instance: format!("{scope}{name}"),
                                    port: port_name.clone(),
                                    line: pos.line,
                                })?;
                        let Some(expr) = expr else { continue };
                        let port_net = self.lookup(&child_scope, &port_name, pos.line)?;
                        match port.dir {
                            Direction::Input => {
                                self.assigns.push(FlatAssign {
                                    targets: (0..self.nets[port_net].width)
                                        .map(|b| (port_net, b))
                                        .collect(),
                                    rhs: expr,
                                    rhs_scope: scope.to_string(),
                                    kind: AssignKind::Port,
                                    line: pos.line,
                                });
                            }
                            Direction::Output => {
                                let lv = expr_to_lvalue(&expr).ok_or_else(|| {
                                    ElabError::NotAnLvalue {
                                        port: port_name.clone(),
                                        line: pos.line,
                                    }
                                })?;
                                let targets = self.lvalue_bits(scope, &lv, pos.line)?;
                                self.assigns.push(FlatAssign {
                                    targets,
                                    rhs: Expr::Ident(port_name.clone()),
                                    rhs_scope: child_scope.clone(),
                                    kind: AssignKind::Port,
                                    line: pos.line,
                                });
                            }
                        }
                    }
                }
            }
        }
        stack.pop();
        Ok(())
    }

    fn push_assign(&mut self, scope: &str, a: &Assign, kind: AssignKind) -> Result<()> {
        let targets = self.lvalue_bits(scope, &a.lhs, a.pos.line)?;
        self.assigns.push(FlatAssign {
            targets,
            rhs: a.rhs.clone(),
            rhs_scope: scope.to_string(),
            kind,
            line: a.pos.line,
        });
        Ok(())
    }
}

fn expr_to_lvalue(e: &Expr) -> Option<LValue> {
    Some(match e {
        Expr::Ident(n) => LValue::Whole(n.clone()),
        Expr::Bit(n, i) => LValue::Bit(n.clone(), *i),
        Expr::Part(n, r) => LValue::Part(n.clone(), *r),
        Expr::Concat(parts) => LValue::Concat(
            parts
                .iter()
                .map(expr_to_lvalue)
                .collect::<Option<Vec<_>>>()?,
        ),
        _ => return None,
    })
}

struct Builder<'a> {
    flat: &'a Flat,
    b: AignetBuilder,
    drivers: Vec<Vec<Option<Driver>>>,
    bits: Vec<Vec<Option<AigLit>>>,
    memo: Vec<Memo>,
    busy: Vec<usize>,
    clock_nets: Vec<bool>,
}

impl Builder<'_> {
    fn bit(&mut self, net: usize, bit: usize) -> Result<AigLit> {
        if let Some(l) = self.bits[net][bit] {
            return Ok(l);
        }
        if self.clock_nets[net] {
            return Err(ElabError::ClockAsData(self.flat.nets[net].name.clone()));
        }
        let lit = match self.drivers[net][bit] {
            None => {
                return Err(ElabError::Undriven {
                    net: self.flat.nets[net].name.clone(),
                    bit,
                })
            }
            // Inputs and registers are created up front.
            Some(Driver::Input) => unreachable!(),
            Some(Driver::Assign { index, offset }) => self.assign_value(index)?[offset],
        };
        self.bits[net][bit] = Some(lit);
        Ok(lit)
    }

    fn assign_value(&mut self, index: usize) -> Result<Vec<AigLit>> {
        match &self.memo[index] {
            Memo::Done(v) => return Ok(v.clone()),
            Memo::Busy => {
                let from = self.busy.iter().position(|&i| i == index).unwrap_or(0);
                let mut names: Vec<String> = self.busy[from..]
                    .iter()
                    .map(|&i| self.target_name(i))
                    .collect();
                names.push(self.target_name(index));
                return Err(ElabError::CombCycle(names));
            }
            Memo::Todo => {}
        }
        self.memo[index] = Memo::Busy;
        self.busy.push(index);
        let a = &self.flat.assigns[index];
        let (rhs, scope, line, width) =
            (a.rhs.clone(), a.rhs_scope.clone(), a.line, a.targets.len());
        let got = self.flat.width_of(&scope, &rhs, line)?.unwrap_or(width);
        if got != width {
            return Err(ElabError::WidthMismatch {
                context: format!("assignment to {}", self.target_name(index)),
                expected: width,
                got,
                line,
            });
        }
        let v = self.eval(&scope, &rhs, width, line)?;
        self.busy.pop();
        self.memo[index] = Memo::Done(v.clone());
        Ok(v)
    }

    fn target_name(&self, index: usize) -> String {
        let (net, _) = self.flat.assigns[index].targets[0];
        self.flat.nets[net].name.clone()
    }

    /// Evaluates `e` at exactly `width` bits, LSB first. `width` comes from
    /// the context and only matters for unsized constants; everything else
    /// must already have that width.
    fn eval(&mut self, scope: &str, e: &Expr, width: usize, line: usize) -> Result<Vec<AigLit>> {
        let v = match e {
            Expr::Ident(name) => {
                let n = self.flat.lookup(scope, name, line)?;
                (0..self.flat.nets[n].width)
                    .map(|b| self.bit(n, b))
                    .collect::<Result<Vec<_>>>()?
            }
            Expr::Bit(name, i) => {
                let n = self.flat.lookup(scope, name, line)?;
                let off = self.flat.offset(n, *i, line)?;
                vec![self.bit(n, off)?]
            }
            Expr::Part(name, r) => {
                let n = self.flat.lookup(scope, name, line)?;
                let lo = self.flat.offset(n, r.lsb, line)?;
                let hi = self.flat.offset(n, r.msb, line)?;
                (lo..=hi)
                    .map(|b| self.bit(n, b))
                    .collect::<Result<Vec<_>>>()?
            }
            Expr::Number { width: w, value } => {
                let w = w.map_or(width, |w| w as usize);
                if w < 64 && value >> w != 0 {
                    return Err(ElabError::ConstantTooWide {
                        value: *value,
                        width: w,
                        line,
                    });
                }
                (0..w)
                    .map(|i| {
                        if i < 64 && (value >> i) & 1 == 1 {
                            AigLit::TRUE
                        } else {
                            AigLit::FALSE
                        }
                    })
                    .collect()
            }
            Expr::Unary(UnaryOp::Not, a) => self
                .eval(scope, a, width, line)?
                .into_iter()
                .map(|l| !l)
                .collect(),
            Expr::Unary(op, a) => {
                let w = self.flat.width_of(scope, a, line)?.unwrap_or(32);
                let v = self.eval(scope, a, w, line)?;
                vec![match op {
                    UnaryOp::ReduceAnd => self.b.mk_and_all(&v),
                    UnaryOp::ReduceOr => self.b.mk_or_all(&v),
                    UnaryOp::ReduceXor => self.b.mk_xor_all(&v),
                    UnaryOp::Not => unreachable!(),
                }]
            }
            Expr::Binary(op, a, b) => {
                let w = self.operand_width(scope, a, b, width, line, "binary operator")?;
                let l = self.eval(scope, a, w, line)?;
                let r = self.eval(scope, b, w, line)?;
                l.into_iter()
                    .zip(r)
                    .map(|(x, y)| match op {
                        BinaryOp::And => self.b.mk_and(x, y),
                        BinaryOp::Or => self.b.mk_or(x, y),
                        BinaryOp::Xor => self.b.mk_xor(x, y),
                    })
                    .collect()
            }
            Expr::Ternary(c, t, f) => {
                let cw = self.flat.width_of(scope, c, line)?.unwrap_or(32);
                let cv = self.eval(scope, c, cw, line)?;
                let sel = self.b.mk_or_all(&cv);
                let w = self.operand_width(scope, t, f, width, line, "conditional")?;
                let tv = self.eval(scope, t, w, line)?;
                let fv = self.eval(scope, f, w, line)?;
                tv.into_iter()
                    .zip(fv)
                    .map(|(x, y)| self.b.mk_mux(sel, x, y))
                    .collect()
            }
            Expr::Concat(parts) => self.eval_concat(scope, parts, line)?,
            Expr::Replicate(n, parts) => {
                let one = self.eval_concat(scope, parts, line)?;
                one.iter()
                    .copied()
                    .cycle()
                    .take(one.len() * *n as usize)
                    .collect()
            }
        };
        if v.len() != width {
            return Err(ElabError::WidthMismatch {
                context: "expression".into(),
                expected: width,
                got: v.len(),
                line,
            });
        }
        Ok(v)
    }

    fn operand_width(
        &self,
        scope: &str,
        a: &Expr,
        b: &Expr,
        ctx: usize,
        line: usize,
        what: &str,
    ) -> Result<usize> {
        match (
            self.flat.width_of(scope, a, line)?,
            self.flat.width_of(scope, b, line)?,
        ) {
            (Some(x), Some(y)) if x != y => Err(ElabError::WidthMismatch {
                context: format!("operands of {what}"),
                expected: x,
                got: y,
                line,
            }),
            (Some(x), _) | (None, Some(x)) => Ok(x),
            (None, None) => Ok(ctx),
        }
    }

    fn eval_concat(&mut self, scope: &str, parts: &[Expr], line: usize) -> Result<Vec<AigLit>> {
        let mut out = Vec::new();
        for p in parts.iter().rev() {
            let w = self
                .flat
                .width_of(scope, p, line)?
                .ok_or(ElabError::UnsizedInConcat { line })?;
            out.extend(self.eval(scope, p, w, line)?);
        }
        Ok(out)
    }
}

pub fn elaborate(file: &SourceFile, top: &str) -> Result<Elaboration> {
    let top_mod = file
        .module(top)
        .ok_or_else(|| ElabError::TopNotFound(top.to_string()))?;
    let mut flat = Flat::default();
    flat.flatten(file, top_mod, "", true, &mut Vec::new())?;

    // Driver table.
    let mut drivers: Vec<Vec<Option<Driver>>> =
        flat.nets.iter().map(|n| vec![None; n.width]).collect();
    for (i, n) in flat.nets.iter().enumerate() {
        if n.top_input {
            drivers[i].fill(Some(Driver::Input));
        }
    }
    for (index, a) in flat.assigns.iter().enumerate() {
        for (offset, &(net, bit)) in a.targets.iter().enumerate() {
            let n = &flat.nets[net];
            let (ok, how) = match a.kind {
                AssignKind::Clocked => (n.kind == NetKind::Reg, "in a clocked block"),
                AssignKind::Comb => (n.kind == NetKind::Reg, "in an always@* block"),
                AssignKind::Continuous => (n.kind == NetKind::Wire, "with `assign`"),
                AssignKind::Port => (n.kind == NetKind::Wire, "by a port connection"),
            };
            if n.top_input || !ok {
                return Err(ElabError::IllegalTarget {
                    net: n.name.clone(),
                    kind: if n.top_input {
                        "top-level input"
                    } else if n.kind == NetKind::Reg {
                        "reg"
                    } else {
                        "wire"
                    },
                    how,
                    line: a.line,
                });
            }
            if drivers[net][bit].is_some() {
                return Err(ElabError::MultipleDrivers {
                    net: n.name.clone(),
                    bit,
                });
            }
            drivers[net][bit] = Some(Driver::Assign { index, offset });
        }
    }

    // Clock nets: a top-level input and every net that is a plain copy of a
    // clock net.
    let mut clock_nets = vec![false; flat.nets.len()];
    let mut clock: Option<usize> = None;
    for (name, net) in &flat.clocks {
        let root = resolve_alias(&flat, &drivers, *net);
        let n = &flat.nets[root];
        if !n.top_input || n.width != 1 {
            return Err(ElabError::ClockNotTopInput(name.clone()));
        }
        match clock {
            Some(c) if c != root => {
                return Err(ElabError::MultipleClocks(
                    flat.nets[c].name.clone(),
                    n.name.clone(),
                ))
            }
            _ => clock = Some(root),
        }
    }
    if let Some(c) = clock {
        for (net, is_clock) in clock_nets.iter_mut().enumerate() {
            if resolve_alias(&flat, &drivers, net) == c {
                *is_clock = true;
            }
        }
    }

    let mut bld = Builder {
        flat: &flat,
        b: AignetBuilder::new(),
        bits: flat.nets.iter().map(|n| vec![None; n.width]).collect(),
        drivers,
        memo: vec![Memo::Todo; flat.assigns.len()],
        busy: Vec::new(),
        clock_nets,
    };

    // Inputs in port order, then registers in declaration order.
    for (net, n) in flat.nets.iter().enumerate() {
        if n.top_input && Some(net) != clock {
            for bit in 0..n.width {
                let l = bld.b.add_input_bit(BitName::new(&n.name, bit));
                bld.bits[net][bit] = Some(l);
            }
        }
    }
    let mut regs = Vec::new();
    for (net, n) in flat.nets.iter().enumerate() {
        for bit in 0..n.width {
            if let Some(Driver::Assign { index, offset }) = bld.drivers[net][bit] {
                if flat.assigns[index].kind == AssignKind::Clocked {
                    let l = bld.b.add_register_bit(BitName::new(&n.name, bit));
                    bld.bits[net][bit] = Some(l);
                    regs.push((l, index, offset));
                }
            }
        }
    }
    for (reg, index, offset) in regs {
        let next = bld.assign_value(index)?[offset];
        bld.b.set_next_state(reg, next)?;
    }

    // Name every fully driven net, which also elaborates logic that feeds
    // nothing observable.
    for (net, n) in flat.nets.iter().enumerate() {
        if bld.clock_nets[net] || bld.drivers[net].iter().any(Option::is_none) {
            continue;
        }
        let lits = (0..n.width)
            .map(|b| bld.bit(net, b))
            .collect::<Result<Vec<_>>>()?;
        bld.b.name_signal(&n.name, lits)?;
    }

    let mut ports = Vec::new();
    for p in &top_mod.ports {
        let width = p.range.map_or(1, |r| r.width());
        ports.push(PortInfo {
            name: p.name.clone(),
            dir: p.dir,
            width,
        });
        if p.dir == Direction::Output {
            let lits = bld
                .b
                .signal(&p.name)
                .ok_or_else(|| ElabError::UndrivenOutput(p.name.clone()))?
                .to_vec();
            bld.b.add_output(&p.name, lits)?;
        }
    }
    let clock = clock.map(|c| flat.nets[c].name.clone());
    let aignet = bld.b.seal()?;
    Ok(Elaboration {
        aignet,
        top: top.to_string(),
        clock,
        ports,
    })
}

/// Follows whole-net copies (`assign a = b;`, port connections) back to
/// the net they copy.
fn resolve_alias(flat: &Flat, drivers: &[Vec<Option<Driver>>], mut net: usize) -> usize {
    for _ in 0..flat.nets.len() {
        if flat.nets[net].width != 1 {
            return net;
        }
        let Some(Driver::Assign { index, .. }) = drivers[net][0] else {
            return net;
        };
        let a = &flat.assigns[index];
        if a.kind == AssignKind::Clocked {
            return net;
        }
        let src = match &a.rhs {
            Expr::Ident(name) => flat.lookup(&a.rhs_scope, name, a.line).ok(),
            Expr::Bit(name, _) => flat.lookup(&a.rhs_scope, name, a.line).ok(),
            _ => None,
        };
        match src {
            Some(s) if flat.nets[s].width == 1 => net = s,
            _ => return net,
        }
    }
    net
}

#[cfg(test)]
mod tests {
    use super::super::compile;
    use super::*;

    fn toy() -> Elaboration {
        compile(include_str!("../../../../corpus/toy/toy.v"), "top").unwrap()
    }

    #[test]
    fn toy_has_eight_register_bits() {
        let e = toy();
        let g = &e.aignet;
        assert_eq!(g.num_registers(), 8);
        assert_eq!(e.clock.as_deref(), Some("clk"));
        let mut regs: Vec<String> = g.register_names().iter().map(|b| b.to_string()).collect();
        regs.sort();
        assert_eq!(
            regs,
            [
                "des.out[0]",
                "des.out[1]",
                "des.tmp[0]",
                "des.tmp[1]",
                "fail_out[0]",
                "in[0]",
                "in[1]",
                "op[0]"
            ]
        );
        let mut inputs: Vec<String> = g.input_names().iter().map(|b| b.to_string()).collect();
        inputs.sort();
        assert_eq!(
            inputs,
            ["free_in[0]", "free_in[1]", "reset[0]", "wave_op[0]"]
        );
        assert!(g.signal("clk").is_none());
        assert_eq!(g.signal("out"), g.signal("des.out"));
        assert_eq!(g.outputs().len(), 1);
    }

    #[test]
    fn pass_through_output_is_input() {
        let e = compile("module m(input a, output b); assign b = a; endmodule", "m").unwrap();
        let g = &e.aignet;
        assert_eq!(g.num_ands(), 0);
        assert_eq!(g.outputs()[0].1, g.signal("a").unwrap()[0]);
        assert_eq!(e.clock, None);
    }

    #[test]
    fn toy_fail_is_and_of_or_over_two_cycles() {
        // Exhaustive four-cycle check from every initial state with op held
        // at 1: fail_out after four steps is &(x0 | x1) for the first two
        // free_in values.
        let e = toy();
        let g = &e.aignet;
        let idx = |name: &str, bit| g.find_input(name, bit).unwrap();
        assert_eq!(g.outputs()[0].0.signal, "fail_out");
        for init in 0..256u32 {
            for stim in 0..16u32 {
                let x = [stim & 3, stim >> 2];
                let mut state = crate::aig::SimState {
                    registers: (0..8).map(|i| init >> i & 1 == 1).collect(),
                    time: 0,
                };
                let mut out = Vec::new();
                for t in 0..5 {
                    let v = x.get(t).copied().unwrap_or(0);
                    let mut inputs = vec![false; g.num_inputs()];
                    inputs[idx("wave_op", 0)] = true;
                    inputs[idx("free_in", 0)] = v & 1 == 1;
                    inputs[idx("free_in", 1)] = v & 2 == 2;
                    let (outputs, next) = g.sim_step(&state, &inputs).unwrap();
                    out.push(outputs[0]);
                    state = next;
                }
                let or = x[0] | x[1];
                assert_eq!(out[4], or == 3, "init {init:08b} stim {x:?}");
            }
        }
    }

    #[test]
    fn errors() {
        let err = |src: &str, top: &str| compile(src, top).unwrap_err().to_string();
        assert!(
            err("module m(input a, output b); assign b = a; endmodule", "x").contains("not found")
        );
        assert!(err(
            "module m(input a, output b); wire c; assign c = b; assign b = c; endmodule",
            "m"
        )
        .contains("combinational cycle"));
        assert!(err(
            "module m(input [1:0] a, output b); assign b = a; endmodule",
            "m"
        )
        .contains("width mismatch"));
        assert!(err(
            "module m(input a, output b); assign b = a; assign b = ~a; endmodule",
            "m"
        )
        .contains("more than one driver"));
        assert!(err(
            "module m(input c1, input c2, input d, output reg q, output reg r);
             always@(posedge c1) q <= d; always@(posedge c2) r <= d; endmodule",
            "m"
        )
        .contains("more than one clock"));
        assert!(err(
            "module m(input clk, input d, output reg q); always@(posedge clk) q <= d & clk; endmodule",
            "m"
        )
        .contains("used as data"));
        assert!(
            err("module m(input a, output b); assign b = c; endmodule", "m")
                .contains("not declared")
        );
        assert!(err("module m(input a, output b); endmodule", "m").contains("not fully driven"));
        assert!(err("module m(input a, output b); n u(.*); endmodule module n(input a, output b); m v(.*); endmodule", "m")
            .contains("recursive"));
    }

    #[test]
    fn unsized_constants_adapt() {
        let e = compile(
            "module m(input [3:0] a, output [3:0] y); assign y = a ^ 5; endmodule",
            "m",
        )
        .unwrap();
        let g = &e.aignet;
        let y = g.signal("y").unwrap().to_vec();
        let values = g.eval_comb(&[false; 4], &[]).unwrap();
        let bits: Vec<bool> = y
            .iter()
            .map(|&l| crate::aig::lit_value(&values, l))
            .collect();
        assert_eq!(bits, [true, false, true, false]);
    }

    #[test]
    fn clock_through_hierarchy() {
        let src =
            "module leaf(input ck, input d, output reg q); always@(posedge ck) q <= d; endmodule
                   module t(input clock, input d, output q); wire c2; assign c2 = clock;
                   leaf u(.ck(c2), .d(d), .q(q)); endmodule";
        let e = compile(src, "t").unwrap();
        assert_eq!(e.clock.as_deref(), Some("clock"));
        assert_eq!(e.aignet.num_registers(), 1);
        assert_eq!(e.aignet.num_inputs(), 1);
    }
}
