//! Plain-text configuration files: `key = value` per line, `#` starts a
//! comment. Keys are long flag names without the leading dashes.

use std::ffi::OsString;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidParameter(format!("config line {}: expected `key = value`", i + 1)))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
            return Err(Error::InvalidParameter(format!("config line {}: bad key {key:?}", i + 1)));
        }
        if key == "config" {
            return Err(Error::InvalidParameter(format!("config line {}: nested config files are not supported", i + 1)));
        }
        entries.push(ConfigEntry { key: key.replace('_', "-"), value: value.trim().to_owned(), line: i + 1 });
    }
    Ok(entries)
}

pub fn load_config(path: &Path) -> Result<Vec<ConfigEntry>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Turns entries into command-line tokens. `true`/`false` values become a
/// bare flag or nothing.
pub fn config_tokens(entries: &[ConfigEntry]) -> Vec<OsString> {
    let mut out = Vec::new();
    for e in entries {
        match e.value.as_str() {
            "true" => out.push(format!("--{}", e.key).into()),
            "false" => {}
            v => {
                out.push(format!("--{}", e.key).into());
                out.push(v.into());
            }
        }
    }
    out
}

/// Finds the value of `--config PATH` or `--config=PATH` in `argv`.
pub fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Inserts the file's tokens right after the subcommand, so flags given on
/// the command line come later and win.
pub fn inject(argv: &[OsString], tokens: Vec<OsString>) -> Vec<OsString> {
    let at = argv.len().min(2);
    let mut out = argv[..at].to_vec();
    out.extend(tokens);
    out.extend_from_slice(&argv[at..]);
    out
}
