//! Value-change-dump waveforms, sampled once per rising clock edge.
//!
//! Cycle `k` is the state immediately after the timestamp holding the
//! clock's `k`-th rising edge, so changes stamped at the same time as the
//! edge are visible in that cycle. A rise from `x` counts as an edge. `z` is
//! read as `x`. Past the last edge every signal holds its last value.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use thiserror::Error;

/// One sampled bit; `None` is unknown (`x` or `z`).
pub type Bit = Option<bool>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VcdError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: malformed identifier code `{code}`")]
    BadIdCode { line: usize, code: String },
    #[error("line {line}: value change for undeclared identifier `{code}`")]
    UnknownId { line: usize, code: String },
    #[error("line {line}: value change before `$enddefinitions`")]
    ValueBeforeDefinitions { line: usize },
    #[error("line {line}: value `{value}` is wider than `{signal}` ({width} bits)")]
    TooWide {
        line: usize,
        value: String,
        signal: String,
        width: usize,
    },
    #[error("line {line}: unsupported VCD construct `{construct}`")]
    Unsupported { line: usize, construct: String },
    #[error("line {line}: timestamps must not decrease")]
    TimeReversal { line: usize },
    #[error("clock `{0}` is not a 1-bit signal of the waveform")]
    MissingClock(String),
    #[error("signal `{0}` is not in the waveform")]
    UnknownSignal(String),
    #[error("signal `{name}` sample has width {got}, expected {expected}")]
    WidthMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("signal `{name}` has {got} cycles, expected {expected}")]
    CycleMismatch {
        name: String,
        expected: usize,
        got: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Signal {
    width: usize,
    /// Per cycle, LSB first.
    samples: Vec<Vec<Bit>>,
}

/// Per-cycle sampled values of every signal in a waveform.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WaveDb {
    clock: String,
    cycle_times: Vec<u64>,
    timescale: Option<String>,
    signals: BTreeMap<String, Signal>,
}

impl WaveDb {
    /// An empty database of `num_cycles` cycles, stamped `k * period`.
    pub fn new(clock: &str, num_cycles: usize, period: u64) -> WaveDb {
        WaveDb {
            clock: clock.to_string(),
            cycle_times: (0..num_cycles as u64).map(|k| k * period).collect(),
            timescale: None,
            signals: BTreeMap::new(),
        }
    }

    /// Adds or replaces a signal. `samples` holds one LSB-first vector per cycle.
    pub fn set_signal(
        &mut self,
        name: &str,
        width: usize,
        samples: Vec<Vec<Bit>>,
    ) -> Result<(), VcdError> {
        if samples.len() != self.num_cycles() {
            return Err(VcdError::CycleMismatch {
                name: name.to_string(),
                expected: self.num_cycles(),
                got: samples.len(),
            });
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != width) {
            return Err(VcdError::WidthMismatch {
                name: name.to_string(),
                expected: width,
                got: bad.len(),
            });
        }
        self.signals
            .insert(name.to_string(), Signal { width, samples });
        Ok(())
    }

    pub fn set_timescale(&mut self, timescale: Option<String>) {
        self.timescale = timescale;
    }

    pub fn clock(&self) -> &str {
        &self.clock
    }

    pub fn num_cycles(&self) -> usize {
        self.cycle_times.len()
    }

    pub fn cycle_times(&self) -> &[u64] {
        &self.cycle_times
    }

    pub fn timescale(&self) -> Option<&str> {
        self.timescale.as_deref()
    }

    /// Full hierarchical names, sorted.
    pub fn signal_names(&self) -> impl Iterator<Item = &str> {
        self.signals.keys().map(String::as_str)
    }

    /// Resolves a design-side name: an exact match, or else the unique
    /// signal whose name is `<scope>.<name>` for a single outer scope (the
    /// testbench or top module wrapper).
    pub fn resolve(&self, name: &str) -> Option<&str> {
        if let Some((k, _)) = self.signals.get_key_value(name) {
            return Some(k);
        }
        let mut found = self
            .signals
            .keys()
            .filter(|k| k.split_once('.').is_some_and(|(_, rest)| rest == name));
        match (found.next(), found.next()) {
            (Some(k), None) => Some(k),
            _ => None,
        }
    }

    pub fn width(&self, name: &str) -> Option<usize> {
        self.resolve(name).map(|k| self.signals[k].width)
    }

    /// LSB-first value of `name` at `cycle`, holding the last cycle's value
    /// beyond the end. An empty waveform reads as all `x`.
    pub fn sample(&self, name: &str, cycle: usize) -> Result<Vec<Bit>, VcdError> {
        let key = self
            .resolve(name)
            .ok_or_else(|| VcdError::UnknownSignal(name.to_string()))?;
        let s = &self.signals[key];
        Ok(match s.samples.len() {
            0 => vec![None; s.width],
            n => s.samples[cycle.min(n - 1)].clone(),
        })
    }

    pub fn sample_bit(&self, name: &str, bit: usize, cycle: usize) -> Result<Bit, VcdError> {
        Ok(self.sample(name, cycle)?.get(bit).copied().flatten())
    }
}

struct VarDecl {
    name: String,
    width: usize,
}

/// Parses VCD text, sampling on rising edges of `clock`.
pub fn parse_vcd(text: &str, clock: &str) -> Result<WaveDb, VcdError> {
    let mut vars: Vec<VarDecl> = Vec::new();
    let mut ids: HashMap<String, Vec<usize>> = HashMap::new();
    let mut scope: Vec<String> = Vec::new();
    let mut timescale = None;
    let mut in_definitions = true;
    let mut current: Vec<Vec<Bit>> = Vec::new();
    let mut clock_var: Option<usize> = None;
    let mut clock_before: Bit = None;
    let mut cycle_times = Vec::new();
    let mut samples: Vec<Vec<Vec<Bit>>> = Vec::new();
    let mut time: Option<u64> = None;

    let mut tokens = Tokens::new(text);
    while let Some((line, tok)) = tokens.next() {
        if in_definitions {
            match tok {
                "$timescale" => timescale = Some(tokens.until_end(line)?.join(" ")),
                "$scope" => {
                    let body = tokens.until_end(line)?;
                    let name = body
                        .get(1)
                        .ok_or_else(|| syntax(line, "`$scope` without a name"))?;
                    scope.push(name.to_string());
                }
                "$upscope" => {
                    tokens.until_end(line)?;
                    scope
                        .pop()
                        .ok_or_else(|| syntax(line, "`$upscope` without `$scope`"))?;
                }
                "$var" => {
                    let body = tokens.until_end(line)?;
                    if body.len() < 4 {
                        return Err(syntax(line, "`$var` needs a type, width, code and name"));
                    }
                    if matches!(body[0], "real" | "realtime") {
                        return Err(VcdError::Unsupported {
                            line,
                            construct: format!("$var {}", body[0]),
                        });
                    }
                    let width: usize = body[1]
                        .parse()
                        .ok()
                        .filter(|&w| w > 0)
                        .ok_or_else(|| syntax(line, format!("bad width `{}`", body[1])))?;
                    let code = check_code(line, body[2])?;
                    let base = body[3].split('[').next().unwrap_or(body[3]);
                    let name = scope
                        .iter()
                        .map(String::as_str)
                        .chain(std::iter::once(base))
                        .collect::<Vec<_>>()
                        .join(".");
                    ids.entry(code.to_string()).or_default().push(vars.len());
                    vars.push(VarDecl { name, width });
                }
                "$enddefinitions" => {
                    tokens.until_end(line)?;
                    in_definitions = false;
                    current = vars.iter().map(|v| vec![None; v.width]).collect();
                    clock_var = vars
                        .iter()
                        .position(|v| v.name == clock)
                        .or_else(|| {
                            let mut m = vars.iter().enumerate().filter(|(_, v)| {
                                v.name.split_once('.').is_some_and(|(_, r)| r == clock)
                            });
                            match (m.next(), m.next()) {
                                (Some((i, _)), None) => Some(i),
                                _ => None,
                            }
                        })
                        .filter(|&i| vars[i].width == 1);
                    if clock_var.is_none() {
                        return Err(VcdError::MissingClock(clock.to_string()));
                    }
                }
                t if t.starts_with('$') => {
                    tokens.until_end(line)?;
                }
                t if t.starts_with('#') => return Err(VcdError::ValueBeforeDefinitions { line }),
                t if t.starts_with(['0', '1', 'x', 'X', 'z', 'Z', 'b', 'B', 'r', 'R']) => {
                    return Err(VcdError::ValueBeforeDefinitions { line })
                }
                t => return Err(syntax(line, format!("unexpected `{t}` in declarations"))),
            }
            continue;
        }

        let clk = clock_var.expect("set at $enddefinitions");
        if let Some(t) = tok.strip_prefix('#') {
            let t: u64 = t
                .parse()
                .map_err(|_| syntax(line, format!("bad timestamp `{tok}`")))?;
            if time.is_some_and(|prev| t < prev) {
                return Err(VcdError::TimeReversal { line });
            }
            if time != Some(t) {
                close_timestamp(
                    time,
                    &current,
                    clk,
                    &mut clock_before,
                    &mut cycle_times,
                    &mut samples,
                );
                time = Some(t);
            }
            continue;
        }
        match tok {
            "$dumpvars" | "$dumpall" | "$dumpon" | "$end" => continue,
            "$dumpoff" => {
                return Err(VcdError::Unsupported {
                    line,
                    construct: "$dumpoff".into(),
                })
            }
            t if t.starts_with('$') => {
                tokens.until_end(line)?;
                continue;
            }
            _ => {}
        }
        let first = tok.as_bytes()[0].to_ascii_lowercase();
        let (value, code) = match first {
            b'0' | b'1' | b'x' | b'z' => (&tok[..1], &tok[1..]),
            b'b' => {
                let (_, code) = tokens
                    .next()
                    .ok_or_else(|| syntax(line, "vector value without identifier"))?;
                (&tok[1..], code)
            }
            b'r' => {
                return Err(VcdError::Unsupported {
                    line,
                    construct: "real value change".into(),
                })
            }
            _ => return Err(syntax(line, format!("unexpected `{tok}`"))),
        };
        let code = check_code(line, code)?;
        let targets = ids.get(code).ok_or_else(|| VcdError::UnknownId {
            line,
            code: code.to_string(),
        })?;
        for &v in targets {
            current[v] = decode_value(line, value, &vars[v])?;
        }
        if time.is_none() {
            time = Some(0);
        }
    }
    if !in_definitions {
        let clk = clock_var.expect("set at $enddefinitions");
        close_timestamp(
            time,
            &current,
            clk,
            &mut clock_before,
            &mut cycle_times,
            &mut samples,
        );
    } else {
        return Err(syntax(tokens.line, "missing `$enddefinitions`"));
    }

    let mut db = WaveDb {
        clock: vars[clock_var.unwrap()].name.clone(),
        cycle_times,
        timescale,
        signals: BTreeMap::new(),
    };
    for (i, v) in vars.iter().enumerate() {
        // The same name may be declared under several codes; the first wins.
        db.signals.entry(v.name.clone()).or_insert_with(|| Signal {
            width: v.width,
            samples: samples.iter().map(|cycle| cycle[i].clone()).collect(),
        });
    }
    Ok(db)
}

/// Ends the block of changes at one timestamp: a rising clock across the
/// block records a cycle.
fn close_timestamp(
    time: Option<u64>,
    current: &[Vec<Bit>],
    clk: usize,
    clock_before: &mut Bit,
    cycle_times: &mut Vec<u64>,
    samples: &mut Vec<Vec<Vec<Bit>>>,
) {
    let Some(t) = time else { return };
    let now = current[clk][0];
    if now == Some(true) && *clock_before != Some(true) {
        cycle_times.push(t);
        samples.push(current.to_vec());
    }
    *clock_before = now;
}

fn decode_value(line: usize, value: &str, var: &VarDecl) -> Result<Vec<Bit>, VcdError> {
    let bit = |c: u8| match c.to_ascii_lowercase() {
        b'0' => Ok(Some(false)),
        b'1' => Ok(Some(true)),
        b'x' | b'z' => Ok(None),
        _ => Err(syntax(line, format!("bad value `{value}`"))),
    };
    let bytes = value.as_bytes();
    if bytes.is_empty() {
        return Err(syntax(line, "empty vector value"));
    }
    if bytes.len() > var.width {
        return Err(VcdError::TooWide {
            line,
            value: value.to_string(),
            signal: var.name.clone(),
            width: var.width,
        });
    }
    // Left-extend: with 0 after a leading 0 or 1, otherwise with x.
    let fill = bit(bytes[0])?.map(|_| false);
    let mut out: Vec<Bit> = bytes
        .iter()
        .rev()
        .map(|&c| bit(c))
        .collect::<Result<_, _>>()?;
    out.resize(var.width, fill);
    Ok(out)
}

fn check_code(line: usize, code: &str) -> Result<&str, VcdError> {
    if code.is_empty() || !code.bytes().all(|b| (33..=126).contains(&b)) {
        return Err(VcdError::BadIdCode {
            line,
            code: code.to_string(),
        });
    }
    Ok(code)
}

fn syntax(line: usize, message: impl Into<String>) -> VcdError {
    VcdError::Syntax {
        line,
        message: message.into(),
    }
}

/// Whitespace tokenizer that tracks line numbers.
struct Tokens<'a> {
    rest: &'a str,
    line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        Tokens {
            rest: text,
            line: 1,
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        let trimmed = self.rest.trim_start();
        self.line += self.rest[..self.rest.len() - trimmed.len()]
            .matches('\n')
            .count();
        if trimmed.is_empty() {
            self.rest = trimmed;
            return None;
        }
        let end = trimmed.find(char::is_whitespace).unwrap_or(trimmed.len());
        let (tok, rest) = trimmed.split_at(end);
        self.rest = rest;
        Some((self.line, tok))
    }

    /// Tokens up to the next `$end`, which is consumed.
    fn until_end(&mut self, start: usize) -> Result<Vec<&'a str>, VcdError> {
        let mut body = Vec::new();
        loop {
            match self.next() {
                Some((_, "$end")) => return Ok(body),
                Some((_, t)) => body.push(t),
                None => return Err(syntax(start, "missing `$end`")),
            }
        }
    }
}

fn id_code(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push((33 + (i % 94)) as u8 as char);
        i /= 94;
        if i == 0 {
            return s;
        }
        i -= 1;
    }
}

fn value_text(bits: &[Bit], code: &str) -> String {
    let ch = |b: &Bit| match b {
        Some(false) => '0',
        Some(true) => '1',
        None => 'x',
    };
    if bits.len() == 1 {
        format!("{}{code}", ch(&bits[0]))
    } else {
        let s: String = bits.iter().rev().map(ch).collect();
        format!("b{s} {code}")
    }
}

#[derive(Default)]
struct ScopeTree<'a> {
    vars: Vec<(&'a str, usize, &'a str)>,
    children: BTreeMap<&'a str, ScopeTree<'a>>,
}

/// Writes a waveform with cycle `k` at time `k * period`: the clock rises
/// there and falls half a period later, except after the last cycle.
/// Only changed values are written.
pub fn write_vcd(db: &WaveDb, period: u64) -> String {
    assert!(period >= 2, "period must leave room for the falling edge");
    let mut names: Vec<(&str, usize)> = db
        .signals
        .iter()
        .map(|(n, s)| (n.as_str(), s.width))
        .collect();
    let clock_is_signal = db.signals.contains_key(&db.clock);
    if !clock_is_signal {
        names.push((db.clock.as_str(), 1));
    }
    let codes: Vec<String> = (0..names.len()).map(id_code).collect();
    let clock_code = &codes[names.iter().position(|n| n.0 == db.clock).unwrap()];

    let mut out = String::new();
    let _ = writeln!(
        out,
        "$timescale {} $end",
        db.timescale.as_deref().unwrap_or("1ns")
    );
    let mut root = ScopeTree::default();
    for (i, &(name, width)) in names.iter().enumerate() {
        let parts: Vec<&str> = name.split('.').collect();
        let mut node = &mut root;
        for p in &parts[..parts.len() - 1] {
            node = node.children.entry(p).or_default();
        }
        node.vars.push((parts[parts.len() - 1], width, &codes[i]));
    }
    write_tree(&root, &mut out);
    out.push_str("$enddefinitions $end\n");

    let mut last: Vec<Option<Vec<Bit>>> = vec![None; names.len()];
    let n = db.num_cycles();
    for k in 0..n {
        let _ = writeln!(out, "#{}", k as u64 * period);
        if k == 0 {
            out.push_str("$dumpvars\n");
        }
        for (i, &(name, _)) in names.iter().enumerate() {
            let value = if name == db.clock {
                vec![Some(true)]
            } else {
                db.signals[name].samples[k].clone()
            };
            if last[i].as_ref() != Some(&value) {
                let _ = writeln!(out, "{}", value_text(&value, &codes[i]));
                last[i] = Some(value);
            }
        }
        if k == 0 {
            out.push_str("$end\n");
        }
        if k + 1 < n {
            let _ = writeln!(out, "#{}", k as u64 * period + period / 2);
            let _ = writeln!(out, "0{clock_code}");
            let clock_idx = names.iter().position(|x| x.0 == db.clock).unwrap();
            last[clock_idx] = Some(vec![Some(false)]);
        }
    }
    out
}

fn write_tree(node: &ScopeTree<'_>, out: &mut String) {
    for &(name, width, code) in &node.vars {
        let range = if width > 1 {
            format!(" [{}:0]", width - 1)
        } else {
            String::new()
        };
        let _ = writeln!(out, "$var wire {width} {code} {name}{range} $end");
    }
    for (name, child) in &node.children {
        let _ = writeln!(out, "$scope module {name} $end");
        write_tree(child, out);
        out.push_str("$upscope $end\n");
    }
}
