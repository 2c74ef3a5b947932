//! `key = value` configuration files that mirror command-line flags.
//!
//! ```text
//! # toy run
//! records = fixtures/toy_world/records.tsv
//! regions = fixtures/toy_world/regions.geojson
//! threads = 2
//! ```
//!
//! Each key becomes `--key value`, inserted before the flags given on the
//! command line so that explicit flags win.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config file {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config file {path}, line {line}: expected 'key = value'")]
    Syntax { path: String, line: usize },
    #[error("--config needs a path")]
    MissingPath,
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str, path: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .filter(|(k, _)| !k.is_empty() && !k.contains(char::is_whitespace))
            .ok_or_else(|| ConfigError::Syntax { path: path.to_string(), line: i + 1 })?;
        out.push((key.trim_start_matches("--").replace('_', "-"), value.to_string()));
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: name.clone(), source })?;
    parse_config(&text, &name)
}

/// Replaces `--config <path>` (or `--config=<path>`) in `args` with the
/// file's flags, placed directly after the subcommand name (`args[1]`).
pub fn splice_config_args(args: Vec<String>) -> Result<Vec<String>, ConfigError> {
    let mut rest = Vec::with_capacity(args.len());
    let mut config_path = None;
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            config_path = Some(iter.next().ok_or(ConfigError::MissingPath)?);
        } else if let Some(p) = arg.strip_prefix("--config=") {
            config_path = Some(p.to_string());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config_path else { return Ok(rest) };
    let pairs = load_config(Path::new(&path))?;
    let split = rest.len().min(2);
    let mut out: Vec<String> = rest[..split].to_vec();
    for (k, v) in pairs {
        out.push(format!("--{k}"));
        out.push(v);
    }
    out.extend_from_slice(&rest[split..]);
    Ok(out)
}
