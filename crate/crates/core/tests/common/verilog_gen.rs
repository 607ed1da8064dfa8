//! Random flat mini-Verilog modules with an independent cycle interpreter.
//!
//! The generator keeps its own expression tree, prints it as Verilog and
//! evaluates it directly, so the parser and the elaborator are both checked
//! against something that shares no code with them.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Input,
    /// Combinational, driven by `assign`.
    Wire,
    /// Combinational, driven in `always @*`.
    CombReg,
    /// Driven in `always @(posedge clk)`.
    Reg,
}

#[derive(Clone, Debug)]
pub struct Net {
    pub name: String,
    pub width: u32,
    pub lsb: u32,
    pub kind: Kind,
    pub output: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    And,
    Or,
    Xor,
}

#[derive(Clone, Debug)]
pub enum GExpr {
    Net(usize),
    Sized(u32, u64),
    /// Takes the width of its context.
    Unsized(u64),
    Bit(usize, u32),
    Part(usize, u32, u32),
    Not(Box<GExpr>),
    Reduce(Op, Box<GExpr>),
    Bin(Op, Box<GExpr>, Box<GExpr>),
    Tern(Box<GExpr>, Box<GExpr>, Box<GExpr>),
    Concat(Vec<GExpr>),
    Repl(u32, Box<GExpr>),
}

/// One driver: the whole net, or bits `[hi:lo]` (declared indices).
#[derive(Clone, Debug)]
pub struct Driver {
    pub net: usize,
    pub slice: Option<(u32, u32)>,
    pub rhs: GExpr,
}

#[derive(Clone, Debug)]
pub struct GenModule {
    pub nets: Vec<Net>,
    /// Combinational drivers in dependency order.
    pub comb: Vec<Driver>,
    pub clocked: Vec<Driver>,
    pub text: String,
}

fn mask(w: u32) -> u64 {
    if w >= 64 {
        u64::MAX
    } else {
        (1u64 << w) - 1
    }
}

struct Gen<'r> {
    rng: &'r mut StdRng,
    nets: Vec<Net>,
}

impl Gen<'_> {
    fn expr(&mut self, w: u32, depth: u32, avail: &[usize]) -> GExpr {
        let leaf = depth == 0 || self.rng.gen_ratio(1, 4);
        if leaf {
            return self.leaf(w, avail);
        }
        match self.rng.gen_range(0..7) {
            0 => GExpr::Not(Box::new(self.expr(w, depth - 1, avail))),
            1 | 2 => {
                let op = *[Op::And, Op::Or, Op::Xor].choose(self.rng).unwrap();
                let a = self.expr(w, depth - 1, avail);
                let b = if self.rng.gen_ratio(1, 5) {
                    GExpr::Unsized(self.rng.gen_range(0..=mask(w)))
                } else {
                    self.expr(w, depth - 1, avail)
                };
                GExpr::Bin(op, Box::new(a), Box::new(b))
            }
            3 => {
                let cw = self.rng.gen_range(1..=3);
                let c = self.expr(cw, depth - 1, avail);
                GExpr::Tern(
                    Box::new(c),
                    Box::new(self.expr(w, depth - 1, avail)),
                    Box::new(self.expr(w, depth - 1, avail)),
                )
            }
            4 if w == 1 => {
                let op = *[Op::And, Op::Or, Op::Xor].choose(self.rng).unwrap();
                let iw = self.rng.gen_range(1..=4);
                GExpr::Reduce(op, Box::new(self.expr(iw, depth - 1, avail)))
            }
            5 if w >= 2 => {
                let split = self.rng.gen_range(1..w);
                GExpr::Concat(vec![
                    self.expr(w - split, depth - 1, avail),
                    self.expr(split, depth - 1, avail),
                ])
            }
            6 if w >= 2 && w.is_multiple_of(2) => {
                GExpr::Repl(2, Box::new(self.expr(w / 2, depth - 1, avail)))
            }
            _ => self.leaf(w, avail),
        }
    }

    fn leaf(&mut self, w: u32, avail: &[usize]) -> GExpr {
        let same: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&n| self.nets[n].width == w)
            .collect();
        let wider: Vec<usize> = avail
            .iter()
            .copied()
            .filter(|&n| self.nets[n].width > w)
            .collect();
        match self.rng.gen_range(0..6) {
            0 => GExpr::Sized(w, self.rng.gen_range(0..=mask(w))),
            1 | 2 if !wider.is_empty() => {
                let n = *wider.choose(self.rng).unwrap();
                let net = &self.nets[n];
                let lo = net.lsb + self.rng.gen_range(0..=net.width - w);
                if w == 1 {
                    GExpr::Bit(n, lo)
                } else {
                    GExpr::Part(n, lo + w - 1, lo)
                }
            }
            _ if !same.is_empty() => GExpr::Net(*same.choose(self.rng).unwrap()),
            _ if !wider.is_empty() => {
                let n = *wider.choose(self.rng).unwrap();
                let lsb = self.nets[n].lsb;
                if w == 1 {
                    GExpr::Bit(n, lsb)
                } else {
                    GExpr::Part(n, lsb + w - 1, lsb)
                }
            }
            _ => GExpr::Sized(w, self.rng.gen_range(0..=mask(w))),
        }
    }

    fn drivers(&mut self, net: usize, depth: u32, avail: &[usize]) -> Vec<Driver> {
        let n = self.nets[net].clone();
        if n.width >= 2 && self.rng.gen_ratio(1, 3) {
            let k = self.rng.gen_range(1..n.width);
            let msb = n.lsb + n.width - 1;
            let mid = n.lsb + k;
            vec![
                Driver {
                    net,
                    slice: Some((msb, mid)),
                    rhs: self.expr(msb - mid + 1, depth, avail),
                },
                Driver {
                    net,
                    slice: Some((mid - 1, n.lsb)),
                    rhs: self.expr(k, depth, avail),
                },
            ]
        } else {
            vec![Driver {
                net,
                slice: None,
                rhs: self.expr(n.width, depth, avail),
            }]
        }
    }
}

fn prec(e: &GExpr) -> u8 {
    match e {
        GExpr::Tern(..) => 0,
        GExpr::Bin(Op::Or, ..) => 1,
        GExpr::Bin(Op::Xor, ..) => 2,
        GExpr::Bin(Op::And, ..) => 3,
        _ => 4,
    }
}

fn op_str(op: Op) -> &'static str {
    match op {
        Op::And => "&",
        Op::Or => "|",
        Op::Xor => "^",
    }
}

fn print(e: &GExpr, nets: &[Net], out: &mut String) {
    let child = |c: &GExpr, min: u8, out: &mut String| {
        if prec(c) < min {
            out.push('(');
            print(c, nets, out);
            out.push(')');
        } else {
            print(c, nets, out);
        }
    };
    match e {
        GExpr::Net(n) => out.push_str(&nets[*n].name),
        GExpr::Sized(w, v) => out.push_str(&format!("{w}'d{v}")),
        GExpr::Unsized(v) => out.push_str(&v.to_string()),
        GExpr::Bit(n, i) => out.push_str(&format!("{}[{i}]", nets[*n].name)),
        GExpr::Part(n, h, l) => out.push_str(&format!("{}[{h}:{l}]", nets[*n].name)),
        GExpr::Not(a) => {
            out.push('~');
            // `~&` would lex as a reduction NAND.
            if matches!(**a, GExpr::Reduce(..) | GExpr::Not(..)) {
                out.push('(');
                print(a, nets, out);
                out.push(')');
            } else {
                child(a, 4, out);
            }
        }
        GExpr::Reduce(op, a) => {
            out.push_str(op_str(*op));
            if matches!(**a, GExpr::Reduce(..) | GExpr::Not(..)) {
                out.push('(');
                print(a, nets, out);
                out.push(')');
            } else {
                child(a, 4, out);
            }
        }
        GExpr::Bin(op, a, b) => {
            let p = prec(e);
            child(a, p, out);
            out.push_str(&format!(" {} ", op_str(*op)));
            child(b, p, out);
        }
        GExpr::Tern(c, a, b) => {
            child(c, 1, out);
            out.push_str(" ? ");
            child(a, 0, out);
            out.push_str(" : ");
            child(b, 0, out);
        }
        GExpr::Concat(parts) => {
            out.push('{');
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print(p, nets, out);
            }
            out.push('}');
        }
        GExpr::Repl(n, a) => {
            out.push_str(&format!("{{{n}{{"));
            print(a, nets, out);
            out.push_str("}}");
        }
    }
}

/// Width of `e` where it is self-determined; `ctx` for unsized literals.
fn width(e: &GExpr, nets: &[Net], ctx: u32) -> u32 {
    match e {
        GExpr::Net(n) => nets[*n].width,
        GExpr::Sized(w, _) => *w,
        GExpr::Unsized(_) => ctx,
        GExpr::Bit(..) | GExpr::Reduce(..) => 1,
        GExpr::Part(_, h, l) => h - l + 1,
        GExpr::Not(a) => width(a, nets, ctx),
        GExpr::Bin(_, a, _) => width(a, nets, ctx),
        GExpr::Tern(_, a, _) => width(a, nets, ctx),
        GExpr::Concat(ps) => ps.iter().map(|p| width(p, nets, ctx)).sum(),
        GExpr::Repl(n, a) => n * width(a, nets, ctx),
    }
}

/// Value of `e` in a context of width `ctx`, under per-net values `env`.
pub fn eval(e: &GExpr, nets: &[Net], env: &[u64], ctx: u32) -> u64 {
    let v = match e {
        GExpr::Net(n) => env[*n],
        GExpr::Sized(_, v) | GExpr::Unsized(v) => *v,
        GExpr::Bit(n, i) => (env[*n] >> (i - nets[*n].lsb)) & 1,
        GExpr::Part(n, h, l) => (env[*n] >> (l - nets[*n].lsb)) & mask(h - l + 1),
        GExpr::Not(a) => !eval(a, nets, env, ctx),
        GExpr::Reduce(op, a) => {
            let w = width(a, nets, ctx);
            let x = eval(a, nets, env, w) & mask(w);
            match op {
                Op::And => (x == mask(w)) as u64,
                Op::Or => (x != 0) as u64,
                Op::Xor => (x.count_ones() & 1) as u64,
            }
        }
        GExpr::Bin(op, a, b) => {
            let (x, y) = (eval(a, nets, env, ctx), eval(b, nets, env, ctx));
            match op {
                Op::And => x & y,
                Op::Or => x | y,
                Op::Xor => x ^ y,
            }
        }
        GExpr::Tern(c, a, b) => {
            let cw = width(c, nets, 1);
            if eval(c, nets, env, cw) & mask(cw) != 0 {
                eval(a, nets, env, ctx)
            } else {
                eval(b, nets, env, ctx)
            }
        }
        GExpr::Concat(ps) => {
            let mut acc = 0;
            for p in ps {
                let w = width(p, nets, ctx);
                acc = (acc << w) | (eval(p, nets, env, w) & mask(w));
            }
            acc
        }
        GExpr::Repl(n, a) => {
            let w = width(a, nets, ctx);
            let x = eval(a, nets, env, w) & mask(w);
            (0..*n).fold(0, |acc, _| (acc << w) | x)
        }
    };
    v & mask(ctx)
}

fn apply(d: &Driver, nets: &[Net], env: &mut [u64], value_env: &[u64]) {
    let n = &nets[d.net];
    let (hi, lo) = d.slice.unwrap_or((n.lsb + n.width - 1, n.lsb));
    let w = hi - lo + 1;
    let v = eval(&d.rhs, nets, value_env, w);
    let sh = lo - n.lsb;
    let m = mask(w) << sh;
    env[d.net] = (env[d.net] & !m) | ((v << sh) & m);
}

impl GenModule {
    /// Settles every combinational net for the given inputs and register
    /// values (both stored in `env` at their net indices).
    pub fn settle(&self, env: &mut [u64]) {
        for d in &self.comb {
            let snapshot = env.to_vec();
            apply(d, &self.nets, env, &snapshot);
        }
    }

    /// Register values after the clock edge.
    pub fn next(&self, env: &[u64]) -> Vec<u64> {
        let mut out = env.to_vec();
        for d in &self.clocked {
            apply(d, &self.nets, &mut out, env);
        }
        out
    }
}

fn decl_range(n: &Net) -> String {
    if n.width == 1 && n.lsb == 0 {
        String::new()
    } else {
        format!("[{}:{}] ", n.lsb + n.width - 1, n.lsb)
    }
}

/// A random module `dut` clocked by `clk`.
pub fn random_module(rng: &mut StdRng) -> GenModule {
    let mut g = Gen {
        rng,
        nets: Vec::new(),
    };
    let net = |g: &mut Gen, prefix: &str, kind: Kind| {
        let width = g.rng.gen_range(1..=4);
        let lsb = if g.rng.gen_ratio(1, 4) {
            g.rng.gen_range(1..=3)
        } else {
            0
        };
        let output = kind != Kind::Input && g.rng.gen_ratio(1, 3);
        let name = format!("{prefix}{}", g.nets.len());
        g.nets.push(Net {
            name,
            width,
            lsb,
            kind,
            output,
        });
        g.nets.len() - 1
    };
    let inputs: Vec<usize> = (0..g.rng.gen_range(1..=3))
        .map(|_| net(&mut g, "i", Kind::Input))
        .collect();
    let regs: Vec<usize> = (0..g.rng.gen_range(1..=3))
        .map(|_| net(&mut g, "r", Kind::Reg))
        .collect();
    let ncomb = g.rng.gen_range(1..=5);
    let mut avail: Vec<usize> = inputs.iter().chain(&regs).copied().collect();
    let mut comb = Vec::new();
    for _ in 0..ncomb {
        let kind = if g.rng.gen() {
            Kind::Wire
        } else {
            Kind::CombReg
        };
        let n = net(&mut g, "c", kind);
        comb.extend(g.drivers(n, 3, &avail.clone()));
        avail.push(n);
    }
    let mut clocked = Vec::new();
    for &r in &regs {
        clocked.extend(g.drivers(r, 3, &avail.clone()));
    }
    if !g.nets.iter().any(|n| n.output) {
        let last = g.nets.len() - 1;
        g.nets[last].output = true;
    }

    let nets = g.nets;
    let rng = g.rng;
    let mut header = vec!["input clk".to_string()];
    for n in &nets {
        match (n.kind, n.output) {
            (Kind::Input, _) => header.push(format!("input {}{}", decl_range(n), n.name)),
            (Kind::Wire, true) => header.push(format!("output {}{}", decl_range(n), n.name)),
            (_, true) => header.push(format!("output reg {}{}", decl_range(n), n.name)),
            _ => {}
        }
    }
    let mut text = format!("module dut({});\n", header.join(", "));
    for n in nets.iter().filter(|n| !n.output && n.kind != Kind::Input) {
        let kw = if n.kind == Kind::Wire { "wire" } else { "reg" };
        text.push_str(&format!("  {kw} {}{};\n", decl_range(n), n.name));
    }
    let lhs = |d: &Driver| match d.slice {
        None => nets[d.net].name.clone(),
        Some((h, l)) if h == l => format!("{}[{h}]", nets[d.net].name),
        Some((h, l)) => format!("{}[{h}:{l}]", nets[d.net].name),
    };
    let rhs = |d: &Driver| {
        let mut s = String::new();
        print(&d.rhs, &nets, &mut s);
        s
    };
    let mut items = Vec::new();
    for d in &comb {
        if nets[d.net].kind == Kind::Wire {
            items.push(format!("  assign {} = {};\n", lhs(d), rhs(d)));
        } else if rng.gen() {
            items.push(format!("  always @* {} = {};\n", lhs(d), rhs(d)));
        } else {
            items.push(format!(
                "  always @(*) begin\n    {} = {};\n  end\n",
                lhs(d),
                rhs(d)
            ));
        }
    }
    let mut clocked_items: Vec<String> = clocked
        .iter()
        .map(|d| format!("{} <= {};", lhs(d), rhs(d)))
        .collect();
    clocked_items.shuffle(rng);
    while !clocked_items.is_empty() {
        let take = rng.gen_range(1..=clocked_items.len());
        let chunk: Vec<String> = clocked_items.drain(..take).collect();
        if chunk.len() == 1 && rng.gen() {
            items.push(format!("  always @(posedge clk) {}\n", chunk[0]));
        } else {
            items.push(format!(
                "  always @(posedge clk) begin\n{}  end\n",
                chunk
                    .iter()
                    .map(|c| format!("    {c}\n"))
                    .collect::<String>()
            ));
        }
    }
    items.shuffle(rng);
    for i in items {
        text.push_str(&i);
    }
    text.push_str("endmodule\n");
    GenModule {
        nets,
        comb,
        clocked,
        text,
    }
}
