//! `key=value` configuration files.
//!
//! Each key names a long flag (`power_db` and `power-db` are equivalent).
//! Entries are spliced into the argument list right after the subcommand,
//! skipping any flag already present on the command line, so command-line
//! flags always win. Boolean switches take `true` or `false`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

const SUBCOMMANDS: [&str; 6] = [
    "density",
    "capacity",
    "degradation",
    "simulate",
    "validate",
    "correlations",
];
const SWITCHES: [&str; 5] = ["asymptotic", "simulate", "power-linear", "quick", "compare"];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Syntax { path: PathBuf, line: usize, msg: String },
}

pub fn parse(path: &Path, text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let syntax = |msg: &str| ConfigError::Syntax {
            path: path.to_path_buf(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let (k, v) = line.split_once('=').ok_or_else(|| syntax("expected key=value"))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(syntax("empty key"));
        }
        if key == "config" {
            return Err(syntax("config files cannot include other config files"));
        }
        let value = v.trim().to_string();
        if SWITCHES.contains(&key.as_str()) && value != "true" && value != "false" {
            return Err(syntax(&format!("switch '{key}' takes true or false, got '{value}'")));
        }
        out.push((key, value));
    }
    Ok(out)
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

fn given(args: &[OsString], key: &str) -> bool {
    // q and tau are one setting.
    let names: Vec<&str> = match key {
        "q" | "tau" => vec!["q", "tau"],
        k => vec![k],
    };
    args.iter().any(|a| {
        let s = a.to_string_lossy();
        names.iter().any(|n| {
            let long = format!("--{n}");
            s == long || s.starts_with(&format!("{long}=")) || (*n == "output" && s == "-o")
        })
    })
}

/// Returns `args` with the entries of the `--config` file (if any) spliced in.
pub fn expand(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Read {
        path: path.clone(),
        source,
    })?;
    let entries = parse(&path, &text)?;
    let Some(at) = args
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()))
    else {
        return Ok(args);
    };
    let mut extra: Vec<OsString> = Vec::new();
    for (key, value) in entries {
        if given(&args, &key) {
            continue;
        }
        if SWITCHES.contains(&key.as_str()) {
            if value == "true" {
                extra.push(format!("--{key}").into());
            }
        } else {
            extra.push(format!("--{key}={value}").into());
        }
    }
    let mut out = args;
    out.splice(at + 1..at + 1, extra);
    Ok(out)
}
