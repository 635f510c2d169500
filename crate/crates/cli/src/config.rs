//! `--config` handling: a JSON object whose keys are long flag names.
//!
//! Top-level keys apply to whichever subcommand runs; an object stored under
//! a subcommand name applies to that subcommand only and wins over top-level
//! keys. A key is skipped when the same flag is given on the command line.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

const SUBCOMMANDS: [&str; 10] = [
    "ingest", "tokenize", "validate", "stats", "score", "iaa", "confusion", "sublabel", "pipeline", "ontology",
];

// Global options that take a value, so the subcommand search can skip it.
const VALUE_FLAGS: [&str; 3] = ["--config", "--jobs", "-j"];

/// Returns the command line with config file defaults spliced in after the
/// subcommand name.
pub fn expand_args(args: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let strings: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let Some(path) = config_path(&strings) else {
        return Ok(args);
    };
    let Some(sub_pos) = subcommand_position(&strings) else {
        return Ok(args);
    };
    let config = load(Path::new(&path))?;
    let injected = flags_for(&config, &strings[sub_pos], &strings[1..])?;
    let mut out = args;
    let tail = out.split_off(sub_pos + 1);
    out.extend(injected.into_iter().map(OsString::from));
    out.extend(tail);
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(p.to_string());
        }
    }
    None
}

fn subcommand_position(args: &[String]) -> Option<usize> {
    let mut i = 1;
    while i < args.len() {
        let a = &args[i];
        if VALUE_FLAGS.contains(&a.as_str()) {
            i += 2;
            continue;
        }
        if !a.starts_with('-') {
            return SUBCOMMANDS.contains(&a.as_str()).then_some(i);
        }
        i += 1;
    }
    None
}

fn load(path: &Path) -> Result<Map<String, Value>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(format!("config {} must hold a JSON object", path.display())),
        Err(e) => Err(format!("invalid config {}: {e}", path.display())),
    }
}

fn given(user_args: &[String], flag: &str) -> bool {
    user_args
        .iter()
        .any(|a| a == flag || a.strip_prefix(flag).is_some_and(|rest| rest.starts_with('=')))
        || (flag == "--jobs" && user_args.iter().any(|a| a.starts_with("-j")))
}

fn flags_for(config: &Map<String, Value>, sub: &str, user_args: &[String]) -> Result<Vec<String>, String> {
    let mut merged: Vec<(&String, &Value)> = config
        .iter()
        .filter(|(k, v)| !(SUBCOMMANDS.contains(&k.as_str()) && v.is_object()))
        .collect();
    if let Some(Value::Object(section)) = config.get(sub) {
        merged.retain(|(k, _)| !section.contains_key(*k));
        merged.extend(section.iter());
    }
    merged.sort_by(|a, b| a.0.cmp(b.0));

    let mut out = Vec::new();
    for (key, value) in merged {
        if key == "config" {
            return Err("config files cannot name another config file".into());
        }
        let flag = format!("--{}", key.replace('_', "-"));
        if given(user_args, &flag) {
            continue;
        }
        push_value(&mut out, &flag, value).map_err(|e| format!("config key {key:?}: {e}"))?;
    }
    Ok(out)
}

fn push_value(out: &mut Vec<String>, flag: &str, value: &Value) -> Result<(), String> {
    match value {
        Value::Bool(true) => out.push(flag.to_string()),
        Value::Bool(false) | Value::Null => {}
        Value::String(s) => out.push(format!("{flag}={s}")),
        Value::Number(n) => out.push(format!("{flag}={n}")),
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::String(s) => out.push(format!("{flag}={s}")),
                    Value::Number(n) => out.push(format!("{flag}={n}")),
                    _ => return Err("arrays may hold only strings and numbers".into()),
                }
            }
        }
        Value::Object(_) => return Err("nested objects are only allowed under subcommand names".into()),
    }
    Ok(())
}
