use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::process::Command;

use thiserror::Error;

use super::{Lit, SolveStatus, Solver};

/// Writes the problem clauses of `solver` in DIMACS CNF, with each
/// assumption appended as a unit clause.
pub fn export_dimacs(solver: &Solver, assumptions: &[Lit]) -> String {
    let clauses: Vec<&[Lit]> = solver.problem_clauses().collect();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "p cnf {} {}",
        solver.num_vars(),
        clauses.len() + assumptions.len()
    );
    for clause in clauses {
        for l in clause {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    for a in assumptions {
        let _ = writeln!(out, "{} 0", a.to_dimacs());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimacsProblem {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {num_vars}")]
    OutOfRange {
        line: usize,
        lit: i32,
        num_vars: usize,
    },
    #[error("declared {declared} clauses but found {found}")]
    ClauseCount { declared: usize, found: usize },
}

pub fn parse_dimacs(text: &str) -> Result<DimacsProblem, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') || trimmed.starts_with('%') {
            continue;
        }
        if trimmed.starts_with('p') {
            let f: Vec<&str> = trimmed.split_whitespace().collect();
            if header.is_some() || f.len() != 4 || f[1] != "cnf" {
                return Err(DimacsError::Header(line_no));
            }
            let v = f[2].parse().map_err(|_| DimacsError::Header(line_no))?;
            let c = f[3].parse().map_err(|_| DimacsError::Header(line_no))?;
            header = Some((v, c));
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::Header(line_no))?;
        for token in trimmed.split_whitespace() {
            let lit: i32 = token.parse().map_err(|_| DimacsError::Literal {
                line: line_no,
                token: token.to_string(),
            })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > num_vars {
                return Err(DimacsError::OutOfRange {
                    line: line_no,
                    lit,
                    num_vars,
                });
            } else {
                current.push(lit);
            }
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::Header(0))?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: clauses.len(),
        });
    }
    Ok(DimacsProblem { num_vars, clauses })
}

/// Runs an external solver executable on a DIMACS file. The verdict is read
/// from an `s SATISFIABLE` / `s UNSATISFIABLE` line, falling back to the
/// conventional exit codes 10 and 20.
pub fn solve_external(executable: &Path, cnf: &Path) -> io::Result<SolveStatus> {
    let output = Command::new(executable).arg(cnf).output()?;
    let stdout = String::from_utf8_lossy(&output.stdout);
    for line in stdout.lines() {
        match line.trim() {
            "s SATISFIABLE" | "SAT" | "SATISFIABLE" => return Ok(SolveStatus::Sat),
            "s UNSATISFIABLE" | "UNSAT" | "UNSATISFIABLE" => return Ok(SolveStatus::Unsat),
            _ => {}
        }
    }
    match output.status.code() {
        Some(10) => Ok(SolveStatus::Sat),
        Some(20) => Ok(SolveStatus::Unsat),
        code => Err(io::Error::other(format!(
            "external solver {} gave no verdict (exit code {code:?})",
            executable.display()
        ))),
    }
}
