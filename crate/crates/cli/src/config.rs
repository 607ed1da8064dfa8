//! `key = value` run configuration files.

use std::collections::BTreeSet;

use wavecheck_core::engine::{Overrides, RunConfig, Selector};

/// Everything a config file can set. Command-line flags are applied on top.
#[derive(Clone, Debug, Default)]
pub struct FileConfig {
    pub top: Option<String>,
    pub clock: Option<String>,
    pub run: RunConfig,
    pub overrides: Overrides,
    pub report: Option<String>,
    pub cex_out: Option<String>,
    pub dump_dimacs: Option<String>,
}

pub const KEYS: &[&str] = &[
    "top",
    "clock",
    "start-cycle",
    "max-cycle",
    "clause-hi",
    "clause-lo",
    "check-period",
    "seed",
    "rand-seed",
    "policy",
    "stop-on-first-fail",
    "free",
    "fail",
    "wave",
    "rand",
    "report",
    "cex-out",
    "dump-dimacs",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("`{key}` expects a non-negative integer, got `{value}`"))
}

fn boolean(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("`{key}` expects true or false, got `{value}`")),
    }
}

fn selectors(value: &str) -> Result<Vec<Selector>, String> {
    Selector::parse_list(value).map_err(|e| e.to_string())
}

/// Parses a config file. Blank lines and `#` comments are ignored; every
/// other line is `key = value`. Unknown and repeated keys are errors.
pub fn parse_config(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = |m: String| format!("line {}: {m}", i + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| at(format!("expected `key = value`, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(at(format!("unknown key `{key}`")));
        }
        let canonical = if key == "rand-seed" { "seed" } else { key };
        if !seen.insert(canonical) {
            return Err(at(format!("`{key}` is set twice")));
        }
        let r = &mut cfg.run;
        match canonical {
            "top" => cfg.top = Some(value.to_string()),
            "clock" => cfg.clock = Some(value.to_string()),
            "start-cycle" => r.start_cycle = number(key, value).map_err(at)?,
            "max-cycle" => r.max_cycle = Some(number(key, value).map_err(at)?),
            "clause-hi" => r.clause_hi = number(key, value).map_err(at)?,
            "clause-lo" => r.clause_lo = number(key, value).map_err(at)?,
            "check-period" => r.check_period = number(key, value).map_err(at)?,
            "seed" => r.seed = number(key, value).map_err(at)?,
            "policy" => r.policy = value.to_string(),
            "stop-on-first-fail" => r.stop_on_first_fail = boolean(key, value).map_err(at)?,
            "free" => cfg.overrides.free = Some(selectors(value).map_err(at)?),
            "fail" => cfg.overrides.fail = Some(selectors(value).map_err(at)?),
            "wave" => cfg.overrides.wave = selectors(value).map_err(at)?,
            "rand" => cfg.overrides.rand = selectors(value).map_err(at)?,
            "report" => cfg.report = Some(value.to_string()),
            "cex-out" => cfg.cex_out = Some(value.to_string()),
            "dump-dimacs" => cfg.dump_dimacs = Some(value.to_string()),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c = parse_config(
            "# toy\nstart-cycle = 3\nclause-hi=30 # inline\n\nfree = free_in[1], x\nrand-seed = 7\nstop-on-first-fail = yes\n",
        )
        .unwrap();
        assert_eq!(c.run.start_cycle, 3);
        assert_eq!(c.run.clause_hi, 30);
        assert_eq!(c.run.seed, 7);
        assert!(c.run.stop_on_first_fail);
        assert_eq!(c.overrides.free.as_ref().unwrap().len(), 2);
        assert!(c.overrides.fail.is_none());
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(parse_config("bogus = 1")
            .unwrap_err()
            .contains("unknown key"));
        assert!(parse_config("start-cycle 3")
            .unwrap_err()
            .contains("line 1"));
        assert!(parse_config("seed = 1\nrand-seed = 2")
            .unwrap_err()
            .contains("twice"));
        assert!(parse_config("clause-hi = -4").is_err());
        assert!(parse_config("stop-on-first-fail = maybe").is_err());
    }
}
