//! `--config FILE` support. Each `key = value` line becomes `--key value`
//! unless the flag is already on the command line; `command = name` picks
//! the subcommand when none is given.

use std::ffi::OsString;
use std::fs;

use crate::error::{invalid, CliResult};

const COMMANDS: [&str; 7] = [
    "analyze",
    "separator",
    "simulate",
    "reconstruct",
    "timereverse",
    "levitate",
    "layer-levitate",
];

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.to_string());
        }
    }
    None
}

fn has_flag(args: &[String], key: &str) -> bool {
    let flag = format!("--{key}");
    let eq = format!("--{key}=");
    args.iter().any(|a| *a == flag || a.starts_with(&eq))
}

pub fn parse_config(text: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return invalid(format!("config line {}: expected key = value", i + 1));
        };
        let k = k.trim().replace('_', "-");
        if k.is_empty() || k == "config" {
            return invalid(format!("config line {}: bad key", i + 1));
        }
        out.push((k, v.trim().to_string()));
    }
    Ok(out)
}

/// Command line with the configuration merged in.
pub fn expand_args(args: Vec<OsString>) -> CliResult<Vec<OsString>> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = config_path(&strings) else {
        return Ok(args);
    };
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return invalid(format!("cannot read config {path}: {e}")),
    };
    let entries = parse_config(&text)?;
    let mut out = strings.clone();
    let has_command = strings.iter().skip(1).any(|a| COMMANDS.contains(&a.as_str()));
    if !has_command {
        if let Some((_, c)) = entries.iter().find(|(k, _)| k == "command") {
            out.insert(1, c.clone());
        }
    }
    for (k, v) in &entries {
        if k == "command" || has_flag(&strings, k) {
            continue;
        }
        out.push(format!("--{k}"));
        out.push(v.clone());
    }
    Ok(out.into_iter().map(OsString::from).collect())
}
