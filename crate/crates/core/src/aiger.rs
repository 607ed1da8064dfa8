//! ASCII AIGER (`aag`) import and export.
//!
//! Only the combinational/latch subset is supported: the header may carry
//! the optional `B C J F` counts but they must all be zero. Latch reset
//! values are accepted and discarded because register initial values come
//! from the waveform. Symbols of the form `name[bit]` are regrouped into
//! vector signals on import.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

use crate::aig::{AigError, AigLit, AigNode, Aignet, AignetBuilder, BitName};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AigerError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: literal {lit} exceeds maximum variable index {max_var}")]
    LiteralOutOfRange { line: usize, lit: u32, max_var: u32 },
    #[error("line {line}: variable {var} is defined more than once")]
    DuplicateDefinition { line: usize, var: u32 },
    #[error("variable {0} is used but never defined")]
    Undefined(u32),
    #[error("AND gates form a cycle through variable {0}")]
    Cycle(u32),
    #[error(transparent)]
    Graph(#[from] AigError),
}

fn malformed(line: usize, message: impl Into<String>) -> AigerError {
    AigerError::Malformed {
        line,
        message: message.into(),
    }
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), AigerError> {
        match self.inner.next() {
            Some((idx, text)) => Ok((idx + 1, text.split_whitespace().collect())),
            None => Err(malformed(
                0,
                format!("unexpected end of file while reading {what}"),
            )),
        }
    }
}

fn parse_num(line: usize, field: &str) -> Result<u32, AigerError> {
    field
        .parse::<u32>()
        .map_err(|_| malformed(line, format!("expected unsigned integer, found `{field}`")))
}

#[derive(Clone, Copy)]
enum Def {
    Input(AigLit),
    Latch(AigLit),
    And { rhs0: u32, rhs1: u32 },
}

pub fn parse_aiger(text: &str) -> Result<Aignet, AigerError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (hline, header) = lines.next_fields("header")?;
    if header.first() != Some(&"aag") {
        return Err(malformed(hline, "expected `aag` header"));
    }
    if header.len() != 6 && header.len() != 10 {
        return Err(malformed(hline, "header must be `aag M I L O A [B C J F]`"));
    }
    let nums = header[1..]
        .iter()
        .map(|f| parse_num(hline, f))
        .collect::<Result<Vec<_>, _>>()?;
    let (max_var, ni, nl, no, na) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    if nums[5..].iter().any(|&n| n != 0) {
        return Err(malformed(
            hline,
            "bad-state, constraint, justice and fairness sections are not supported",
        ));
    }
    if (ni as u64) + (nl as u64) + (na as u64) > max_var as u64 {
        return Err(malformed(hline, "M is smaller than I + L + A"));
    }

    let check = |line: usize, lit: u32| -> Result<u32, AigerError> {
        if lit / 2 > max_var {
            Err(AigerError::LiteralOutOfRange { line, lit, max_var })
        } else {
            Ok(lit)
        }
    };

    let mut builder = AignetBuilder::new();
    let mut defs: HashMap<u32, Def> = HashMap::new();
    let mut define = |line: usize, lit: u32, def: Def| -> Result<(), AigerError> {
        if lit < 2 || lit % 2 == 1 {
            return Err(malformed(line, format!("`{lit}` cannot be defined")));
        }
        if defs.insert(lit / 2, def).is_some() {
            return Err(AigerError::DuplicateDefinition { line, var: lit / 2 });
        }
        Ok(())
    };

    let mut input_lits = Vec::with_capacity(ni as usize);
    for k in 0..ni {
        let (line, f) = lines.next_fields("inputs")?;
        if f.len() != 1 {
            return Err(malformed(line, "input line must hold one literal"));
        }
        let lit = check(line, parse_num(line, f[0])?)?;
        let node = builder.add_input_bit(BitName::new(format!("_i{k}"), 0));
        define(line, lit, Def::Input(node))?;
        input_lits.push(node);
    }

    let mut latches = Vec::with_capacity(nl as usize);
    for k in 0..nl {
        let (line, f) = lines.next_fields("latches")?;
        if f.len() != 2 && f.len() != 3 {
            return Err(malformed(line, "latch line must be `lit next [reset]`"));
        }
        let lit = check(line, parse_num(line, f[0])?)?;
        let next = check(line, parse_num(line, f[1])?)?;
        if let Some(reset) = f.get(2) {
            let reset = parse_num(line, reset)?;
            if reset != 0 && reset != 1 && reset != lit {
                return Err(malformed(
                    line,
                    format!("invalid latch reset value `{reset}`"),
                ));
            }
        }
        let node = builder.add_register_bit(BitName::new(format!("_l{k}"), 0));
        define(line, lit, Def::Latch(node))?;
        latches.push((line, node, next));
    }

    let mut outputs = Vec::with_capacity(no as usize);
    for _ in 0..no {
        let (line, f) = lines.next_fields("outputs")?;
        if f.len() != 1 {
            return Err(malformed(line, "output line must hold one literal"));
        }
        outputs.push(check(line, parse_num(line, f[0])?)?);
    }

    let mut and_order = Vec::with_capacity(na as usize);
    for _ in 0..na {
        let (line, f) = lines.next_fields("AND gates")?;
        if f.len() != 3 {
            return Err(malformed(line, "AND line must be `lhs rhs0 rhs1`"));
        }
        let lhs = check(line, parse_num(line, f[0])?)?;
        let rhs0 = check(line, parse_num(line, f[1])?)?;
        let rhs1 = check(line, parse_num(line, f[2])?)?;
        define(line, lhs, Def::And { rhs0, rhs1 })?;
        and_order.push(lhs / 2);
    }

    // Resolve AND definitions depth-first; they may appear in any order.
    let mut resolved: HashMap<u32, AigLit> = HashMap::new();
    for (&var, def) in &defs {
        match def {
            Def::Input(l) | Def::Latch(l) => {
                resolved.insert(var, *l);
            }
            Def::And { .. } => {}
        }
    }
    let mut on_stack: HashMap<u32, bool> = HashMap::new();
    for &root in &and_order {
        let mut stack = vec![root];
        while let Some(&var) = stack.last() {
            if resolved.contains_key(&var) {
                stack.pop();
                continue;
            }
            let Some(&Def::And { rhs0, rhs1, .. }) = defs.get(&var) else {
                return Err(AigerError::Undefined(var));
            };
            let mut pending = false;
            for rhs in [rhs0, rhs1] {
                let v = rhs / 2;
                if v != 0 && !resolved.contains_key(&v) {
                    if on_stack.get(&v).copied().unwrap_or(false) {
                        return Err(AigerError::Cycle(v));
                    }
                    if !defs.contains_key(&v) {
                        return Err(AigerError::Undefined(v));
                    }
                    stack.push(v);
                    pending = true;
                }
            }
            if pending {
                on_stack.insert(var, true);
                continue;
            }
            let a = lookup(&resolved, rhs0)?;
            let b = lookup(&resolved, rhs1)?;
            let lit = builder.mk_and(a, b);
            resolved.insert(var, lit);
            on_stack.insert(var, false);
            stack.pop();
        }
    }

    for (_, reg, next) in &latches {
        let next = lookup(&resolved, *next)?;
        builder.set_next_state(*reg, next)?;
    }
    let output_lits = outputs
        .iter()
        .map(|&l| lookup(&resolved, l))
        .collect::<Result<Vec<_>, _>>()?;

    // Symbol table.
    let mut input_syms: BTreeMap<usize, String> = BTreeMap::new();
    let mut latch_syms: BTreeMap<usize, String> = BTreeMap::new();
    let mut output_syms: BTreeMap<usize, String> = BTreeMap::new();
    for (idx, text) in lines.inner.by_ref() {
        let line = idx + 1;
        if text.trim_end() == "c" || text.starts_with("c ") {
            break;
        }
        if text.trim().is_empty() {
            continue;
        }
        let (head, name) = text
            .split_once(' ')
            .ok_or_else(|| malformed(line, "symbol line must be `<kind><index> <name>`"))?;
        let (kind, pos) = head.split_at(1);
        let pos: usize = pos
            .parse()
            .map_err(|_| malformed(line, format!("bad symbol position `{head}`")))?;
        let (table, limit) = match kind {
            "i" => (&mut input_syms, ni as usize),
            "l" => (&mut latch_syms, nl as usize),
            "o" => (&mut output_syms, no as usize),
            "b" | "c" | "j" | "f" => return Err(malformed(line, "unsupported symbol kind")),
            _ => return Err(malformed(line, format!("unknown symbol kind `{kind}`"))),
        };
        if pos >= limit {
            return Err(malformed(
                line,
                format!("symbol position {pos} out of range"),
            ));
        }
        if table.insert(pos, name.trim().to_string()).is_some() {
            return Err(malformed(line, format!("duplicate symbol for `{head}`")));
        }
    }

    let mut builder = rename(builder, &input_lits, &input_syms, "_i")?;
    let latch_lits: Vec<AigLit> = latches.iter().map(|(_, l, _)| *l).collect();
    builder = rename(builder, &latch_lits, &latch_syms, "_l")?;

    let mut out_groups: BTreeMap<String, BTreeMap<usize, AigLit>> = BTreeMap::new();
    for (k, lit) in output_lits.iter().enumerate() {
        let bit_name = match output_syms.get(&k) {
            Some(sym) => split_bit(sym),
            None => BitName::new(format!("_o{k}"), 0),
        };
        out_groups
            .entry(bit_name.signal)
            .or_default()
            .insert(bit_name.bit, *lit);
    }
    for (name, bits) in out_groups {
        let lits = contiguous(&name, bits)?;
        builder.add_output(&name, lits)?;
    }
    Ok(builder.seal()?)
}

fn lookup(resolved: &HashMap<u32, AigLit>, lit: u32) -> Result<AigLit, AigerError> {
    let var = lit / 2;
    if var == 0 {
        return Ok(AigLit::new(0, lit & 1 == 1));
    }
    resolved
        .get(&var)
        .map(|l| l.xor_sign(lit & 1 == 1))
        .ok_or(AigerError::Undefined(var))
}

/// Splits `name[3]` into (`name`, 3); anything else is bit 0 of itself.
fn split_bit(sym: &str) -> BitName {
    if let Some(open) = sym.rfind('[') {
        if let Some(inner) = sym[open + 1..].strip_suffix(']') {
            if let Ok(bit) = inner.parse() {
                return BitName::new(&sym[..open], bit);
            }
        }
    }
    BitName::new(sym, 0)
}

fn contiguous(name: &str, bits: BTreeMap<usize, AigLit>) -> Result<Vec<AigLit>, AigerError> {
    if bits.keys().copied().ne(0..bits.len()) {
        return Err(malformed(
            0,
            format!("bits of `{name}` are not contiguous from 0"),
        ));
    }
    Ok(bits.into_values().collect())
}

/// Rebuilds per-bit names from the symbol table and binds vector signals.
fn rename(
    mut builder: AignetBuilder,
    lits: &[AigLit],
    syms: &BTreeMap<usize, String>,
    prefix: &str,
) -> Result<AignetBuilder, AigerError> {
    let mut groups: BTreeMap<String, BTreeMap<usize, AigLit>> = BTreeMap::new();
    for (k, &lit) in lits.iter().enumerate() {
        let name = match syms.get(&k) {
            Some(sym) => split_bit(sym),
            None => BitName::new(format!("{prefix}{k}"), 0),
        };
        builder.rename_bit(lit, name.clone());
        if groups
            .entry(name.signal.clone())
            .or_default()
            .insert(name.bit, lit)
            .is_some()
        {
            return Err(malformed(0, format!("duplicate symbol `{name}`")));
        }
    }
    for (name, bits) in groups {
        let lits = contiguous(&name, bits)?;
        builder.name_signal(&name, lits)?;
    }
    Ok(builder)
}

/// Serializes a sealed graph. Inputs, latches and AND gates are renumbered
/// into the conventional contiguous blocks; latches are written as
/// uninitialized.
pub fn write_aiger(g: &Aignet) -> String {
    let ni = g.num_inputs();
    let nl = g.num_registers();
    let mut var_of = vec![0u32; g.num_nodes()];
    for k in 0..ni {
        var_of[g.input_node(k)] = (k + 1) as u32;
    }
    for k in 0..nl {
        var_of[g.register_node(k)] = (ni + k + 1) as u32;
    }
    let mut next_var = (ni + nl + 1) as u32;
    let mut ands = Vec::new();
    for (idx, node) in g.nodes().iter().enumerate() {
        if let AigNode::And { fanin0, fanin1 } = node {
            var_of[idx] = next_var;
            next_var += 1;
            ands.push((idx, *fanin0, *fanin1));
        }
    }
    let enc = |lit: AigLit| var_of[lit.node()] * 2 + lit.is_negated() as u32;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "aag {} {} {} {} {}",
        next_var - 1,
        ni,
        nl,
        g.outputs().len(),
        ands.len()
    );
    for k in 0..ni {
        let _ = writeln!(out, "{}", (k + 1) * 2);
    }
    for k in 0..nl {
        let lit = (ni + k + 1) * 2;
        let _ = writeln!(out, "{} {} {}", lit, enc(g.next_state(k)), lit);
    }
    for (_, lit) in g.outputs() {
        let _ = writeln!(out, "{}", enc(*lit));
    }
    for (idx, a, b) in ands {
        let (hi, lo) = {
            let (x, y) = (enc(a), enc(b));
            if x >= y {
                (x, y)
            } else {
                (y, x)
            }
        };
        let _ = writeln!(out, "{} {} {}", var_of[idx] * 2, hi, lo);
    }
    for (k, name) in g.input_names().iter().enumerate() {
        let _ = writeln!(out, "i{k} {name}");
    }
    for (k, name) in g.register_names().iter().enumerate() {
        let _ = writeln!(out, "l{k} {name}");
    }
    for (k, (name, _)) in g.outputs().iter().enumerate() {
        let _ = writeln!(out, "o{k} {name}");
    }
    out
}
