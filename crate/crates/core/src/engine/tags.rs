//! Input disciplines and fail targets.

use std::fmt;
use std::ops::RangeInclusive;

use serde::Serialize;

use super::EngineError;
use crate::aig::{AigLit, AigNode, Aignet, BitName};
use crate::vcd::WaveDb;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    /// Follows the waveform.
    Wave,
    /// Takes a seeded pseudorandom bit per cycle.
    Rand,
    /// Stays a solver variable until its cycle is retired.
    Free,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tag::Wave => "wave",
            Tag::Rand => "rand",
            Tag::Free => "free",
        })
    }
}

/// A signal or a single bit of one: `name` or `name[bit]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub signal: String,
    pub bit: Option<usize>,
}

impl Selector {
    pub fn parse(text: &str) -> Result<Selector, EngineError> {
        let text = text.trim();
        let bad = || EngineError::Config(format!("bad signal selector `{text}`"));
        match text.strip_suffix(']') {
            Some(rest) => {
                let (signal, bit) = rest.rsplit_once('[').ok_or_else(bad)?;
                let bit = bit.trim().parse().map_err(|_| bad())?;
                if signal.is_empty() {
                    return Err(bad());
                }
                Ok(Selector {
                    signal: signal.to_string(),
                    bit: Some(bit),
                })
            }
            None if !text.is_empty() && !text.contains(['[', ']', ' ']) => Ok(Selector {
                signal: text.to_string(),
                bit: None,
            }),
            None => Err(bad()),
        }
    }

    /// Parses a comma-separated list; blank entries are skipped.
    pub fn parse_list(text: &str) -> Result<Vec<Selector>, EngineError> {
        text.split(',')
            .filter(|s| !s.trim().is_empty())
            .map(Selector::parse)
            .collect()
    }

    fn bits(&self, g: &Aignet) -> Result<Vec<(usize, AigLit)>, EngineError> {
        let lits = g
            .signal(&self.signal)
            .ok_or_else(|| EngineError::UnknownSignal(self.signal.clone()))?;
        match self.bit {
            None => Ok(lits.iter().copied().enumerate().collect()),
            Some(b) if b < lits.len() => Ok(vec![(b, lits[b])]),
            Some(b) => Err(EngineError::UnknownSignal(format!("{}[{b}]", self.signal))),
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bit {
            Some(b) => write!(f, "{}[{b}]", self.signal),
            None => f.write_str(&self.signal),
        }
    }
}

/// User overrides of the default tagging. `None` for `free` or `fail` means
/// "use the naming convention" (`free_*` inputs, top-level `fail_*` signals).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub free: Option<Vec<Selector>>,
    pub wave: Vec<Selector>,
    pub rand: Vec<Selector>,
    pub fail: Option<Vec<Selector>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FailTarget {
    pub name: BitName,
    pub lit: AigLit,
}

/// One tag per input ordinal plus the fail targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TagMap {
    pub tags: Vec<Tag>,
    pub fails: Vec<FailTarget>,
}

impl TagMap {
    pub fn count(&self, tag: Tag) -> usize {
        self.tags.iter().filter(|&&t| t == tag).count()
    }
}

fn input_ordinal(
    g: &Aignet,
    sel: &Selector,
    lit: AigLit,
    bit: usize,
) -> Result<usize, EngineError> {
    match (lit.is_negated(), g.node(lit.node())) {
        (false, AigNode::Input { ordinal }) => Ok(ordinal),
        _ => Err(EngineError::Config(format!(
            "`{}[{bit}]` is not a primary input",
            sel.signal
        ))),
    }
}

fn wave_known(g: &Aignet, wave: &WaveDb, ordinal: usize, cycles: &RangeInclusive<usize>) -> bool {
    let name = g.input_name(ordinal);
    cycles
        .clone()
        .all(|c| matches!(wave.sample_bit(&name.signal, name.bit, c), Ok(Some(_))))
}

/// Tags every input and collects the fail targets.
///
/// Precedence per input bit: a `free` selector, then `wave`, then `rand`,
/// then the `free_*` convention (only without `free` selectors); remaining
/// bits follow the waveform when it records them without `x`
/// over `cycles`, and are random otherwise.
pub fn default_tagging(
    g: &Aignet,
    wave: &WaveDb,
    overrides: &Overrides,
    cycles: RangeInclusive<usize>,
) -> Result<TagMap, EngineError> {
    let n = g.num_inputs();
    let mut explicit: Vec<Option<Tag>> = vec![None; n];
    let mut apply = |sels: &[Selector], tag: Tag| -> Result<(), EngineError> {
        for sel in sels {
            for (bit, lit) in sel.bits(g)? {
                let ord = input_ordinal(g, sel, lit, bit)?;
                explicit[ord].get_or_insert(tag);
            }
        }
        Ok(())
    };
    if let Some(sels) = &overrides.free {
        apply(sels, Tag::Free)?;
    }
    apply(&overrides.wave, Tag::Wave)?;
    apply(&overrides.rand, Tag::Rand)?;
    if overrides.free.is_none() {
        // The naming convention only covers bits nobody tagged explicitly.
        let defaults: Vec<Selector> = g
            .input_names()
            .iter()
            .filter(|b| b.signal.starts_with("free_"))
            .map(|b| Selector {
                signal: b.signal.clone(),
                bit: Some(b.bit),
            })
            .collect();
        apply(&defaults, Tag::Free)?;
    }
    let tags = explicit
        .into_iter()
        .enumerate()
        .map(|(ord, t)| {
            t.unwrap_or_else(|| {
                if wave_known(g, wave, ord, &cycles) {
                    Tag::Wave
                } else {
                    Tag::Rand
                }
            })
        })
        .collect();

    let fail_sels: Vec<Selector> = match &overrides.fail {
        Some(sels) => sels.clone(),
        None => g
            .signals()
            .filter(|(name, _)| name.starts_with("fail_") && !name.contains('.'))
            .map(|(name, _)| Selector {
                signal: name.to_string(),
                bit: None,
            })
            .collect(),
    };
    let mut fails = Vec::new();
    for sel in &fail_sels {
        for (bit, lit) in sel.bits(g)? {
            let name = BitName::new(&sel.signal, bit);
            if !fails.iter().any(|f: &FailTarget| f.name == name) {
                fails.push(FailTarget { name, lit });
            }
        }
    }
    if fails.is_empty() {
        return Err(EngineError::NoFailTargets);
    }
    Ok(TagMap { tags, fails })
}
