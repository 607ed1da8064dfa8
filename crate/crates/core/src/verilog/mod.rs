//! A small synthesizable Verilog subset and its elaboration into an [`Aignet`].
//!
//! Accepted: ANSI-style module headers, `wire`/`reg` declarations with
//! descending `[msb:lsb]` ranges, continuous `assign`, `always@*` blocks of
//! blocking assignments, `always@(posedge clk)` blocks of non-blocking
//! assignments, the operators `~ & | ^ ?:`, reduction `& | ^`, concatenation,
//! replication, constant bit- and part-selects, and named or `.*` instances.
//! Anything else is reported as an unsupported construct.
//!
//! Vectors are bit-blasted. Registers have no reset value of their own; the
//! initial state comes from the waveform, and `reset` is an ordinary input.

pub mod ast;
mod elab;
mod lexer;
mod parser;

use thiserror::Error;

use crate::aig::Aignet;
pub use ast::Direction;
pub use elab::{elaborate, ElabError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unsupported construct: {construct}")]
    Unsupported {
        line: usize,
        col: usize,
        construct: String,
    },
}

pub fn parse_mini_verilog(src: &str) -> Result<ast::SourceFile, ParseError> {
    parser::parse(src)
}

/// A port of the elaborated top module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortInfo {
    pub name: String,
    pub dir: Direction,
    pub width: usize,
}

#[derive(Clone, Debug)]
pub struct Elaboration {
    pub aignet: Aignet,
    pub top: String,
    /// The top-level input driving every clocked block, if there are any.
    /// It is not part of the graph.
    pub clock: Option<String>,
    pub ports: Vec<PortInfo>,
}

#[derive(Debug, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Elab(#[from] ElabError),
}

/// Parses and elaborates in one step.
pub fn compile(src: &str, top: &str) -> Result<Elaboration, FrontendError> {
    let file = parse_mini_verilog(src)?;
    Ok(elaborate(&file, top)?)
}
