//! Loading a design from either supported source format.

use std::collections::BTreeSet;
use std::path::Path;

use thiserror::Error;

use crate::aig::Aignet;
use crate::aiger::{parse_aiger, AigerError};
use crate::verilog::{self, ast::Item, ElabError, ParseError};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Elab { path: String, source: ElabError },
    #[error("{path}: {source}")]
    Aiger { path: String, source: AigerError },
    #[error("{path}: cannot infer the top module (candidates: {candidates}); pass --top")]
    AmbiguousTop { path: String, candidates: String },
}

#[derive(Clone, Debug)]
pub struct Design {
    pub aignet: Aignet,
    /// Top module name; `None` for AIGER input.
    pub top: Option<String>,
    /// Clock found by elaboration; AIGER files do not record one.
    pub clock: Option<String>,
}

/// Reads `.aag` files as ASCII AIGER and anything else as mini-Verilog.
/// Without `top`, the unique module that no other module instantiates is
/// used.
pub fn load_design(path: &Path, top: Option<&str>) -> Result<Design, DesignError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| DesignError::Io {
        path: shown.clone(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "aag") {
        let aignet = parse_aiger(&text).map_err(|source| DesignError::Aiger {
            path: shown,
            source,
        })?;
        return Ok(Design {
            aignet,
            top: None,
            clock: None,
        });
    }
    let file = verilog::parse_mini_verilog(&text).map_err(|source| DesignError::Parse {
        path: shown.clone(),
        source,
    })?;
    let top = match top {
        Some(t) => t.to_string(),
        None => {
            let used: BTreeSet<&str> = file
                .modules
                .iter()
                .flat_map(|m| &m.items)
                .filter_map(|i| match i {
                    Item::Instance { module, .. } => Some(module.as_str()),
                    _ => None,
                })
                .collect();
            let roots: Vec<&str> = file
                .modules
                .iter()
                .map(|m| m.name.as_str())
                .filter(|n| !used.contains(n))
                .collect();
            match roots.as_slice() {
                [one] => one.to_string(),
                _ => {
                    return Err(DesignError::AmbiguousTop {
                        path: shown,
                        candidates: roots.join(", "),
                    })
                }
            }
        }
    };
    let e = verilog::elaborate(&file, &top).map_err(|source| DesignError::Elab {
        path: shown,
        source,
    })?;
    Ok(Design {
        aignet: e.aignet,
        top: Some(e.top),
        clock: e.clock,
    })
}
