//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

pub mod verilog_gen;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wavecheck_core::aig::{lit_value, AigLit, Aignet, AignetBuilder, SimState};
use wavecheck_core::engine::{rand_bit, FailReport, Tag, TagMap};
use wavecheck_core::vcd::{Bit, WaveDb};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn corpus(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(file)
}

fn pick(rng: &mut StdRng, pool: &[AigLit]) -> AigLit {
    let l = pool[rng.gen_range(0..pool.len())];
    if rng.gen_bool(0.5) {
        !l
    } else {
        l
    }
}

/// Combinational graph with `inputs` inputs and up to `ands` AND requests
/// over random earlier literals (constants included now and then), and a
/// single output `y`.
pub fn random_comb(rng: &mut StdRng, inputs: usize, ands: usize) -> Aignet {
    let mut b = AignetBuilder::new();
    let mut pool = b.add_input("x", inputs).unwrap();
    for _ in 0..ands {
        let a = if rng.gen_ratio(1, 20) {
            AigLit::new(0, rng.gen())
        } else {
            pick(rng, &pool)
        };
        let c = pick(rng, &pool);
        let n = b.mk_and(a, c);
        pool.push(n);
    }
    let out = if rng.gen_bool(0.8) {
        pool[pool.len() - 1]
    } else {
        pick(rng, &pool)
    };
    b.add_output("y", vec![out]).unwrap();
    b.seal().unwrap()
}

/// Small sequential design: a free input vector `free_a`, a waveform input
/// vector `w`, registers `r` with random next-state functions, and a fail
/// output `fail_o`.
pub fn random_seq(rng: &mut StdRng) -> Aignet {
    let mut b = AignetBuilder::new();
    let fa = b.add_input("free_a", rng.gen_range(1..=2)).unwrap();
    let w = b.add_input("w", rng.gen_range(1..=2)).unwrap();
    let nregs = rng.gen_range(1..=4);
    let regs = b.add_register("r", nregs).unwrap();
    let mut pool: Vec<AigLit> = fa.iter().chain(&w).chain(&regs).copied().collect();
    for _ in 0..rng.gen_range(3..=14) {
        let a = pick(rng, &pool);
        let c = pick(rng, &pool);
        let n = b.mk_and(a, c);
        pool.push(n);
    }
    for &r in &regs {
        let next = pick(rng, &pool);
        b.set_next_state(r, next).unwrap();
    }
    // Bias towards a fail that depends on state, so failures happen later.
    let tail = &pool[pool.len().saturating_sub(4)..];
    let f = pick(rng, tail);
    b.add_output("fail_o", vec![f]).unwrap();
    b.seal().unwrap()
}

/// Exhaustive satisfiability of a DIMACS-style clause list.
pub fn brute_force_sat(num_vars: usize, clauses: &[Vec<i32>]) -> bool {
    assert!(num_vars <= 24);
    (0u64..1 << num_vars).any(|m| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = (m >> (l.unsigned_abs() - 1)) & 1 == 1;
                v == (l > 0)
            })
        })
    })
}

pub fn random_cnf(
    rng: &mut StdRng,
    num_vars: usize,
    num_clauses: usize,
    max_len: usize,
) -> Vec<Vec<i32>> {
    (0..num_clauses)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len)
                .map(|_| {
                    let v = rng.gen_range(1..=num_vars as i32);
                    if rng.gen() {
                        v
                    } else {
                        -v
                    }
                })
                .collect()
        })
        .collect()
}

/// Values of one signal over cycles, as written by a reference scanner.
pub type Trace = Vec<Vec<Bit>>;

/// Naive VCD reader: samples every variable right after each timestamp at
/// which `clock` rose from a non-1 value to 1, taking every change at that
/// timestamp into account. Only handles well-formed input.
pub fn naive_vcd_samples(text: &str, clock: &str) -> BTreeMap<String, Trace> {
    let mut widths: Vec<(String, usize)> = Vec::new();
    let mut ids: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut scope: Vec<String> = Vec::new();
    let words: Vec<&str> = text.split_whitespace().collect();
    let mut i = 0;
    while i < words.len() && words[i] != "$enddefinitions" {
        match words[i] {
            "$scope" => {
                scope.push(words[i + 2].to_string());
                i += 4;
            }
            "$upscope" => {
                scope.pop();
                i += 2;
            }
            "$var" => {
                let width: usize = words[i + 2].parse().unwrap();
                let id = words[i + 3].to_string();
                let mut name = scope.clone();
                name.push(words[i + 4].to_string());
                ids.entry(id).or_default().push(widths.len());
                widths.push((name.join("."), width));
                while words[i] != "$end" {
                    i += 1;
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    while i < words.len() && words[i] != "$end" {
        i += 1;
    }
    i += 1;
    let clock_idx = widths
        .iter()
        .position(|(n, _)| n == clock)
        .expect("clock declared");
    let mut cur: Vec<Vec<Bit>> = widths.iter().map(|(_, w)| vec![None; *w]).collect();
    let mut out: Vec<Trace> = vec![Vec::new(); widths.len()];
    let mut clock_at_stamp_start: Bit = None;
    let flush = |cur: &Vec<Vec<Bit>>, before: Bit, out: &mut Vec<Trace>| {
        if before != Some(true) && cur[clock_idx][0] == Some(true) {
            for (k, v) in cur.iter().enumerate() {
                out[k].push(v.clone());
            }
        }
    };
    let bit = |c: char| match c {
        '0' => Some(false),
        '1' => Some(true),
        _ => None,
    };
    let mut started = false;
    while i < words.len() {
        let w = words[i];
        if let Some(_t) = w.strip_prefix('#') {
            if started {
                flush(&cur, clock_at_stamp_start, &mut out);
            }
            started = true;
            clock_at_stamp_start = cur[clock_idx][0];
            i += 1;
        } else if matches!(w, "$dumpvars" | "$dumpall" | "$dumpon" | "$end") {
            i += 1;
        } else if w.starts_with('$') {
            while words[i] != "$end" {
                i += 1;
            }
            i += 1;
        } else if let Some(v) = w.strip_prefix(['b', 'B']) {
            let id = words[i + 1];
            for &k in &ids[id] {
                let width = widths[k].1;
                let chars: Vec<char> = v.chars().collect();
                let fill = match chars[0] {
                    '1' => '0',
                    c => c,
                };
                let mut bits = vec![None; width];
                for (pos, slot) in bits.iter_mut().enumerate() {
                    // pos counts from the least significant bit
                    let c = if pos < chars.len() {
                        chars[chars.len() - 1 - pos]
                    } else {
                        fill
                    };
                    *slot = bit(c.to_ascii_lowercase());
                }
                cur[k] = bits;
            }
            i += 2;
        } else {
            let mut cs = w.chars();
            let c = cs.next().unwrap();
            let id: String = cs.collect();
            for &k in &ids[&id] {
                let width = widths[k].1;
                let fill = match c {
                    '1' => '0',
                    c => c,
                };
                let mut bits = vec![bit(fill.to_ascii_lowercase()); width];
                bits[0] = bit(c.to_ascii_lowercase());
                cur[k] = bits;
            }
            i += 1;
        }
    }
    if started {
        flush(&cur, clock_at_stamp_start, &mut out);
    }
    widths.into_iter().map(|(n, _)| n).zip(out).collect()
}

/// Input values a run feeds into cycle `c` for non-free inputs, and for a
/// free input whose cycle lies before `window_start` (already retired).
pub fn concrete_input(
    g: &Aignet,
    wave: &WaveDb,
    tags: &TagMap,
    seed: u64,
    ordinal: usize,
    c: u32,
) -> bool {
    let name = g.input_name(ordinal);
    let recorded = wave
        .sample_bit(&name.signal, name.bit, c as usize)
        .ok()
        .flatten();
    match tags.tags[ordinal] {
        Tag::Wave => recorded.unwrap_or(false),
        Tag::Rand => rand_bit(seed, ordinal, c),
        Tag::Free => recorded.unwrap_or_else(|| rand_bit(seed, ordinal, c)),
    }
}

/// Register values recorded at `cycle`.
pub fn recorded_state(g: &Aignet, wave: &WaveDb, cycle: u32) -> Vec<bool> {
    (0..g.num_registers())
        .map(|r| {
            let n = g.register_name(r);
            wave.sample_bit(&n.signal, n.bit, cycle as usize)
                .unwrap()
                .expect("register known at start")
        })
        .collect()
}

/// Brute-force verdict for one check: can the fail bit be 1 at `check.cycle`
/// when every free input bit in `[window_start, cycle]` ranges over both
/// values and everything else takes its concrete value? Returns the verdict
/// and the number of bits enumerated.
pub fn window_oracle(
    g: &Aignet,
    wave: &WaveDb,
    tags: &TagMap,
    seed: u64,
    start: u32,
    check: &FailReport,
) -> (bool, usize) {
    let fail = tags
        .fails
        .iter()
        .find(|f| f.name.signal == check.signal && f.name.bit == check.bit)
        .unwrap()
        .lit;
    let free: Vec<usize> = (0..g.num_inputs())
        .filter(|&o| tags.tags[o] == Tag::Free)
        .collect();
    let ws = check.window_start.max(start);
    let mut state = SimState {
        registers: recorded_state(g, wave, start),
        time: 0,
    };
    let concrete = |o: usize, c: u32| concrete_input(g, wave, tags, seed, o, c);
    let prefix_end = ws.min(check.cycle);
    for c in start..prefix_end {
        let inputs: Vec<bool> = (0..g.num_inputs()).map(|o| concrete(o, c)).collect();
        state = g.sim_step(&state, &inputs).unwrap().1;
    }
    let frames = (check.cycle + 1).saturating_sub(ws) as usize;
    let bits = frames * free.len();
    // Depth-first over frames. Whether the fail can still be reached depends
    // only on the register state and the cycle, so that pair is memoized;
    // the search stays exhaustive over every assignment of the window bits.
    let mut memo: HashMap<(Vec<bool>, u32), bool> = HashMap::new();
    let found = reach(
        g,
        fail,
        &free,
        ws,
        check.cycle,
        prefix_end,
        state.registers,
        &concrete,
        &mut memo,
    );
    (found, bits)
}

/// Plain enumeration of every assignment of the window bits, simulated from
/// the start cycle each time. Slow; used to cross-check [`window_oracle`]
/// on small spaces.
pub fn window_oracle_flat(
    g: &Aignet,
    wave: &WaveDb,
    tags: &TagMap,
    seed: u64,
    start: u32,
    check: &FailReport,
) -> bool {
    let fail = tags
        .fails
        .iter()
        .find(|f| f.name.signal == check.signal && f.name.bit == check.bit)
        .unwrap()
        .lit;
    let free: Vec<usize> = (0..g.num_inputs())
        .filter(|&o| tags.tags[o] == Tag::Free)
        .collect();
    let ws = check.window_start.max(start);
    let bits = (check.cycle + 1).saturating_sub(ws) as usize * free.len();
    assert!(bits <= 16);
    (0u64..1 << bits).any(|m| {
        let mut state = SimState {
            registers: recorded_state(g, wave, start),
            time: 0,
        };
        for c in start..=check.cycle {
            let inputs: Vec<bool> = (0..g.num_inputs())
                .map(|o| match free.iter().position(|&f| f == o) {
                    Some(k) if c >= ws => (m >> ((c - ws) as usize * free.len() + k)) & 1 == 1,
                    _ => concrete_input(g, wave, tags, seed, o, c),
                })
                .collect();
            if c == check.cycle {
                return lit_value(&g.eval_comb(&inputs, &state.registers).unwrap(), fail);
            }
            state = g.sim_step(&state, &inputs).unwrap().1;
        }
        unreachable!()
    })
}

#[allow(clippy::too_many_arguments)]
fn reach(
    g: &Aignet,
    fail: AigLit,
    free: &[usize],
    ws: u32,
    target: u32,
    c: u32,
    regs: Vec<bool>,
    concrete: &dyn Fn(usize, u32) -> bool,
    memo: &mut HashMap<(Vec<bool>, u32), bool>,
) -> bool {
    if let Some(&v) = memo.get(&(regs.clone(), c)) {
        return v;
    }
    let symbolic = c >= ws;
    let choices: u64 = if symbolic { 1 << free.len() } else { 1 };
    let mut found = false;
    for m in 0..choices {
        let inputs: Vec<bool> = (0..g.num_inputs())
            .map(|o| match free.iter().position(|&f| f == o) {
                Some(k) if symbolic => (m >> k) & 1 == 1,
                _ => concrete(o, c),
            })
            .collect();
        let values = g.eval_comb(&inputs, &regs).unwrap();
        if c == target {
            found = lit_value(&values, fail);
        } else {
            let next = (0..g.num_registers())
                .map(|r| lit_value(&values, g.next_state(r)))
                .collect();
            found = reach(g, fail, free, ws, target, c + 1, next, concrete, memo);
        }
        if found {
            break;
        }
    }
    memo.insert((regs, c), found);
    found
}

/// Simulates a counterexample independently of the engine: free inputs take
/// the reported values, everything else its concrete value. Returns the
/// fail bit at the reported cycle.
pub fn replay_counterexample(
    g: &Aignet,
    wave: &WaveDb,
    tags: &TagMap,
    seed: u64,
    start: u32,
    check: &FailReport,
) -> bool {
    let cex = check
        .counterexample
        .as_ref()
        .expect("SAT reports carry a counterexample");
    let fail = tags
        .fails
        .iter()
        .find(|f| f.name.signal == check.signal && f.name.bit == check.bit)
        .unwrap()
        .lit;
    let mut state = SimState {
        registers: recorded_state(g, wave, start),
        time: 0,
    };
    for c in start..=check.cycle {
        let inputs: Vec<bool> = (0..g.num_inputs())
            .map(|o| {
                let n = g.input_name(o);
                cex.iter()
                    .find(|b| b.cycle == c && b.signal == n.signal && b.bit == n.bit)
                    .map(|b| b.value)
                    .unwrap_or_else(|| concrete_input(g, wave, tags, seed, o, c))
            })
            .collect();
        if c == check.cycle {
            let values = g.eval_comb(&inputs, &state.registers).unwrap();
            return lit_value(&values, fail);
        }
        state = g.sim_step(&state, &inputs).unwrap().1;
    }
    unreachable!()
}

/// A waveform for `g` from random stimulus and a random initial state, with
/// the given inputs blanked to `x` now and then.
pub fn random_wave(rng: &mut StdRng, g: &Aignet, cycles: usize, x_inputs: &[&str]) -> WaveDb {
    let init: Vec<bool> = (0..g.num_registers()).map(|_| rng.gen()).collect();
    let inputs: Vec<Vec<bool>> = (0..cycles)
        .map(|_| (0..g.num_inputs()).map(|_| rng.gen()).collect())
        .collect();
    let mut db = wavecheck_core::sim::simulate_wave(g, &init, &inputs, "clk", "tb");
    for name in x_inputs {
        let full = format!("tb.{name}");
        let Some(width) = db.width(&full) else {
            continue;
        };
        let samples: Vec<Vec<Bit>> = (0..cycles)
            .map(|c| {
                let v = db.sample(&full, c).unwrap();
                if rng.gen_ratio(1, 4) {
                    vec![None; width]
                } else {
                    v
                }
            })
            .collect();
        db.set_signal(&full, width, samples).unwrap();
    }
    db
}

fn random_bit(rng: &mut StdRng, x_rate: u32) -> Bit {
    if rng.gen_ratio(1, x_rate) {
        None
    } else {
        Some(rng.gen())
    }
}

/// Random waveform over a few nested scopes, clocked by `top.clk`.
pub fn random_db(rng: &mut StdRng) -> WaveDb {
    let cycles = rng.gen_range(1..=30);
    let mut db = WaveDb::new("top.clk", cycles, 10);
    let names = [
        "top.a",
        "top.b",
        "top.sub.c",
        "top.sub.d",
        "top.sub.deep.e",
        "top.f",
    ];
    for name in names.iter().take(rng.gen_range(1..=names.len())) {
        let width = rng.gen_range(1..=5);
        let x_rate = rng.gen_range(2..=20);
        let mut prev: Vec<Bit> = (0..width).map(|_| random_bit(rng, x_rate)).collect();
        let samples = (0..cycles)
            .map(|_| {
                if rng.gen_ratio(1, 2) {
                    prev = (0..width).map(|_| random_bit(rng, x_rate)).collect();
                }
                prev.clone()
            })
            .collect();
        db.set_signal(name, width, samples).unwrap();
    }
    db
}
