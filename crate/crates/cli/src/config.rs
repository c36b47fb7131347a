//! `--config` files: flat `key=value` lines, `#` comments, keys named like
//! the subcommand's long flags (`-` or `_` both accepted).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Command};

/// Keys written into provenance blocks that are not flags.
const IGNORED_KEYS: &[&str] = &["crowdcast-version", "command"];

pub fn parse(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("config line {}: expected key=value, got {line:?}", i + 1));
        };
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if k.is_empty() {
            return Err(format!("config line {}: empty key", i + 1));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Finds the root-level `--config PATH` (before the subcommand) and the
/// index of the subcommand token.
pub fn locate(argv: &[OsString], cmd: &Command) -> (Option<PathBuf>, Option<usize>) {
    let mut config = None;
    let mut i = 1;
    while i < argv.len() {
        let tok = argv[i].to_string_lossy();
        if tok == "--config" {
            config = argv.get(i + 1).map(PathBuf::from);
            i += 2;
            continue;
        }
        if let Some(p) = tok.strip_prefix("--config=") {
            config = Some(PathBuf::from(p));
        } else if tok == "--seed" || tok == "--threads" {
            i += 2;
            continue;
        } else if !tok.starts_with('-') {
            if cmd.find_subcommand(tok.as_ref()).is_some() {
                return (config, Some(i));
            }
            return (config, None);
        }
        i += 1;
    }
    (config, None)
}

/// Turns config pairs into flags for subcommand `sub`.
pub fn expand(cmd: &Command, sub: &str, pairs: &[(String, String)]) -> Result<Vec<OsString>, String> {
    let sc = cmd
        .find_subcommand(sub)
        .ok_or_else(|| format!("unknown subcommand {sub:?}"))?;
    let mut out = Vec::new();
    for (k, v) in pairs {
        if IGNORED_KEYS.contains(&k.as_str()) {
            if k == "command" && v != sub {
                return Err(format!("config is for command {v:?}, not {sub:?}"));
            }
            continue;
        }
        let arg = sc
            .get_arguments()
            .chain(cmd.get_arguments().filter(|a| a.is_global_set()))
            .find(|a| a.get_long() == Some(k.as_str()))
            .ok_or_else(|| format!("unknown config key '{k}'"))?;
        if matches!(arg.get_action(), ArgAction::SetTrue) {
            match v.as_str() {
                "true" | "1" | "yes" => out.push(OsString::from(format!("--{k}"))),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config key '{k}' expects true or false, got {v:?}")),
            }
        } else if !v.is_empty() {
            out.push(OsString::from(format!("--{k}")));
            out.push(OsString::from(v));
        }
    }
    Ok(out)
}
