//! Flat `key = value` config files. Entries are turned into long flags and
//! spliced in right after the subcommand, so anything given on the command
//! line (which comes later) overrides them.

use std::collections::BTreeMap;
use std::path::Path;

use clap::{ArgAction, Command};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut map = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", n + 1))?;
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("config line {}: empty key", n + 1));
        }
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(format!("config line {}: duplicate key {key}", n + 1));
        }
    }
    Ok(map)
}

/// Value of `--config` in raw arguments, if any.
fn config_path(args: &[String]) -> Option<String> {
    let mut it = args.iter();
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

/// Rewrites `args` (including argv[0]) with the config file's entries.
/// A `command` key names the subcommand when none is given.
pub fn merge(cmd: &Command, args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else { return Ok(args) };
    let text = std::fs::read_to_string(Path::new(&path)).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let mut map = parse(&text)?;
    let named = map.remove("command");

    let mut args = args;
    let pos = args.iter().position(|a| cmd.find_subcommand(a).is_some());
    let (sub_name, insert_at) = match (pos, named) {
        (Some(p), _) => (args[p].clone(), p + 1),
        (None, Some(name)) => {
            // after the global options, i.e. at the end
            args.push(name.clone());
            (name, args.len())
        }
        (None, None) => return Err("config file has no `command` and none was given".into()),
    };
    let sub = cmd.find_subcommand(&sub_name).ok_or_else(|| format!("config: unknown command {sub_name}"))?;

    let mut extra = Vec::new();
    for (key, value) in map {
        let arg = sub
            .get_arguments()
            .chain(cmd.get_arguments())
            .find(|a| a.get_long() == Some(key.as_str()))
            .ok_or_else(|| format!("config: unknown key {key} for {sub_name}"))?;
        if arg.get_id() == "config" {
            return Err("config: nested config files are not supported".into());
        }
        match arg.get_action() {
            ArgAction::SetTrue => match value.as_str() {
                "true" | "1" | "yes" => extra.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => return Err(format!("config: {key} expects true or false, got {value}")),
            },
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    args.splice(insert_at..insert_at, extra);
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_underscores() {
        let m = parse("# run\nbeta_min = 0.5  # lower end\n\nn=3\n").unwrap();
        assert_eq!(m["beta-min"], "0.5");
        assert_eq!(m["n"], "3");
        assert!(parse("novalue\n").is_err());
        assert!(parse("a=1\na=2\n").is_err());
    }
}
