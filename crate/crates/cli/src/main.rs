//! `wavecheck`: compile designs and check fail signals along a waveform.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use wavecheck_core::aiger::write_aiger;
use wavecheck_core::engine::{self, OutputOptions, Selector};
use wavecheck_core::load_design;
use wavecheck_core::vcd::parse_vcd;

use config::{parse_config, FileConfig};

const EXIT_CLEAN: u8 = 0;
const EXIT_ERROR: u8 = 1;
const EXIT_INTERNAL: u8 = 2;
const EXIT_FAIL_FOUND: u8 = 10;

#[derive(Parser, Debug)]
#[command(
    name = "wavecheck",
    version,
    about = "Bounded checking of fail signals around a recorded waveform"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compile a design to ASCII AIGER.
    Prep {
        /// Mini-Verilog source, or an `.aag` file.
        design: PathBuf,
        /// Top module; inferred when exactly one module is never instantiated.
        #[arg(long)]
        top: Option<String>,
        /// Output AIGER file.
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check fail signals along a waveform.
    Run(Box<RunArgs>),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Mini-Verilog source, or an `.aag` file.
    design: PathBuf,
    /// Waveform to start from.
    vcd: PathBuf,
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    top: Option<String>,
    /// Clock signal in the waveform (defaults to the design's clock).
    #[arg(long)]
    clock: Option<String>,
    #[arg(long, value_name = "CYCLE")]
    start_cycle: Option<u32>,
    #[arg(long, value_name = "CYCLE")]
    max_cycle: Option<u32>,
    /// Live clause count above which the oldest free frame is retired.
    #[arg(long, value_name = "N")]
    clause_hi: Option<usize>,
    #[arg(long, value_name = "N")]
    clause_lo: Option<usize>,
    /// Pending fail frames that trigger a check.
    #[arg(long, value_name = "N")]
    check_period: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Inputs kept symbolic, as `name` or `name[bit]`, comma separated.
    #[arg(long, value_name = "LIST")]
    free: Option<String>,
    /// Signals checked for 1.
    #[arg(long, value_name = "LIST")]
    fail: Option<String>,
    /// Inputs forced to follow the waveform.
    #[arg(long, value_name = "LIST")]
    wave: Option<String>,
    /// Inputs forced to seeded random values.
    #[arg(long, value_name = "LIST")]
    rand: Option<String>,
    /// One of: default, eager-free, no-free.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    stop_on_first_fail: bool,
    /// Write one DIMACS file per solve into this directory.
    #[arg(long, value_name = "DIR")]
    dump_dimacs: Option<PathBuf>,
    /// Directory for counterexample waveforms [default: .]
    #[arg(long, value_name = "DIR")]
    cex_out: Option<PathBuf>,
    /// JSON report path [default: wavecheck-report.json]
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

enum Failure {
    Error(String),
    Internal(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Error(s)
    }
}

fn prep(design: &Path, top: Option<&str>, out: &Path) -> Result<u8, Failure> {
    let d = load_design(design, top).map_err(|e| e.to_string())?;
    let g = &d.aignet;
    fs::write(out, write_aiger(g)).map_err(|e| format!("{}: {e}", out.display()))?;
    println!(
        "nodes={} inputs={} registers={} ands={} outputs={}",
        g.num_nodes(),
        g.num_inputs(),
        g.num_registers(),
        g.num_ands(),
        g.outputs().len()
    );
    if let Some(clock) = &d.clock {
        println!("clock={clock}");
    }
    Ok(EXIT_CLEAN)
}

fn list(flag: &str, text: &str) -> Result<Vec<Selector>, String> {
    Selector::parse_list(text).map_err(|e| format!("--{flag}: {e}"))
}

fn run(a: RunArgs) -> Result<u8, Failure> {
    let mut c = match &a.config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            parse_config(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => FileConfig::default(),
    };
    let r = &mut c.run;
    macro_rules! flag {
        ($field:ident) => {
            if let Some(v) = a.$field.clone() {
                r.$field = v;
            }
        };
    }
    flag!(start_cycle);
    flag!(clause_hi);
    flag!(clause_lo);
    flag!(check_period);
    flag!(seed);
    flag!(policy);
    if a.max_cycle.is_some() {
        r.max_cycle = a.max_cycle;
    }
    r.stop_on_first_fail |= a.stop_on_first_fail;
    if let Some(t) = &a.free {
        c.overrides.free = Some(list("free", t)?);
    }
    if let Some(t) = &a.fail {
        c.overrides.fail = Some(list("fail", t)?);
    }
    if let Some(t) = &a.wave {
        c.overrides.wave = list("wave", t)?;
    }
    if let Some(t) = &a.rand {
        c.overrides.rand = list("rand", t)?;
    }
    c.run.validate().map_err(|e| e.to_string())?;

    let top = a.top.or(c.top);
    let d = load_design(&a.design, top.as_deref()).map_err(|e| e.to_string())?;
    let clock = a.clock.or(c.clock).or(d.clock).ok_or_else(|| {
        format!(
            "{}: the design records no clock; pass --clock",
            a.design.display()
        )
    })?;
    let text = fs::read_to_string(&a.vcd).map_err(|e| format!("{}: {e}", a.vcd.display()))?;
    let wave = parse_vcd(&text, &clock).map_err(|e| format!("{}: {e}", a.vcd.display()))?;

    let out = OutputOptions {
        cex_dir: Some(
            a.cex_out
                .or(c.cex_out.map(PathBuf::from))
                .unwrap_or_else(|| ".".into()),
        ),
        dimacs_dir: a.dump_dimacs.or(c.dump_dimacs.map(PathBuf::from)),
        ..OutputOptions::from_env()
    };
    let report_path = a
        .report
        .or(c.report.map(PathBuf::from))
        .unwrap_or_else(|| "wavecheck-report.json".into());

    let report = match engine::run(&d.aignet, &wave, &c.overrides, c.run, out) {
        Ok(r) => r,
        Err(e) if e.is_internal() => return Err(Failure::Internal(e.to_string())),
        Err(e) => return Err(Failure::Error(e.to_string())),
    };
    print!("{}", report.to_text());
    fs::write(&report_path, report.to_json())
        .map_err(|e| format!("{}: {e}", report_path.display()))?;
    for check in &report.checks {
        if let Some(t) = &check.trace {
            eprintln!("counterexample for {}[{}]: {t}", check.signal, check.bit);
        }
    }
    Ok(if report.sat_count() > 0 {
        EXIT_FAIL_FOUND
    } else {
        EXIT_CLEAN
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return ExitCode::from(EXIT_CLEAN);
            }
            if !matches!(
                e.kind(),
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand
            ) {
                let mut cmd = Cli::command();
                cmd.build();
                let sub = std::env::args().nth(1).unwrap_or_default();
                let usage = match cmd.find_subcommand_mut(&sub) {
                    Some(s) => s.render_usage(),
                    None => cmd.render_usage(),
                };
                eprintln!("\n{usage}");
            }
            return ExitCode::from(EXIT_ERROR);
        }
    };
    let result = match cli.cmd {
        Command::Prep { design, top, out } => prep(&design, top.as_deref(), &out),
        Command::Run(a) => run(*a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Error(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_ERROR)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("==================== INTERNAL ERROR ====================");
            eprintln!("{m}");
            eprintln!("This is a bug in wavecheck, not in the design under test.");
            eprintln!("=========================================================");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
