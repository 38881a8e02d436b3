//! Flat `key=value` config files merged under explicit flags.

use std::ffi::OsString;
use std::path::Path;

use crate::cli;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("config line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("config line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
}

pub fn parse(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: i + 1,
            text: raw.to_string(),
        })?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                text: raw.to_string(),
            });
        }
        entries.push((i + 1, key, value.trim().to_string()));
    }
    Ok(entries)
}

fn config_path(args: &[OsString]) -> Option<OsString> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(rest) = a.to_str().and_then(|s| s.strip_prefix("--config=")) {
            return Some(rest.into());
        }
    }
    None
}

/// Inserts config entries as flags right after the subcommand, so that
/// flags given on the command line, which come later, override them. Keys
/// that another subcommand accepts are skipped; keys no subcommand accepts
/// are an error.
pub fn merge(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|source| ConfigError::Read {
        path: path.to_string_lossy().into_owned(),
        source,
    })?;
    let entries = parse(&text)?;

    let command = cli::command();
    let sub_name = args.get(1).and_then(|s| s.to_str()).unwrap_or_default();
    let Some(sub) = command.find_subcommand(sub_name) else {
        // Let clap report the bad subcommand.
        return Ok(args);
    };
    let accepts = |cmd: &clap::Command, key: &str| cmd.get_arguments().any(|a| a.get_long() == Some(key));

    let mut injected = Vec::new();
    for (line, key, value) in entries {
        if key == "config" {
            continue;
        }
        if accepts(sub, &key) {
            injected.push(OsString::from(format!("--{key}={value}")));
        } else if !command.get_subcommands().any(|c| accepts(c, &key)) {
            return Err(ConfigError::UnknownKey { line, key });
        }
    }
    let mut merged = args[..2].to_vec();
    merged.extend(injected);
    merged.extend_from_slice(&args[2..]);
    Ok(merged)
}
