//! `key = value` configuration files, merged into the argument list ahead of
//! the explicit flags so that the latter win.

use std::path::Path;

use clap::{ArgAction, CommandFactory};

use super::args::Cli;

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigEntry {
    pub key: String,
    pub value: String,
}

pub fn parse_config(text: &str) -> Result<Vec<ConfigEntry>, String> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("line {}: expected key = value", no + 1));
        };
        let key = k.trim().replace('_', "-");
        if key.is_empty() {
            return Err(format!("line {}: empty key", no + 1));
        }
        out.push(ConfigEntry {
            key,
            value: v.trim().to_string(),
        });
    }
    Ok(out)
}

fn config_path(args: &[String]) -> Option<String> {
    let mut found = None;
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            found = it.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            found = Some(p.to_string());
        }
    }
    found
}

fn is_switch(sub: &str, key: &str) -> bool {
    Cli::command()
        .find_subcommand(sub)
        .and_then(|c| {
            c.get_arguments()
                .find(|a| a.get_long() == Some(key))
                .cloned()
        })
        .is_some_and(|a| matches!(a.get_action(), ArgAction::SetTrue))
}

/// Expands `--config PATH` into explicit flags. A `command` key supplies the
/// subcommand when none is given on the command line.
pub fn expand_args(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(Path::new(&path))
        .map_err(|e| format!("cannot read config '{path}': {e}"))?;
    let entries = parse_config(&text)?;

    let mut rest: Vec<String> = args.iter().skip(1).cloned().collect();
    let given = rest.first().filter(|a| !a.starts_with('-')).cloned();
    let from_file = entries
        .iter()
        .rev()
        .find(|e| e.key == "command")
        .map(|e| e.value.clone());
    let sub = match (given, from_file) {
        (Some(s), _) => {
            rest.remove(0);
            s
        }
        (None, Some(s)) => s,
        (None, None) => return Err("no subcommand given and config has no 'command' key".into()),
    };

    let mut out = vec![
        args.first().cloned().unwrap_or_else(|| "kerrpb".into()),
        sub.clone(),
    ];
    for e in entries
        .iter()
        .filter(|e| e.key != "command" && e.key != "config")
    {
        if is_switch(&sub, &e.key) {
            match e.value.as_str() {
                "true" => out.push(format!("--{}", e.key)),
                "false" => {}
                v => return Err(format!("'{}' expects true or false, got '{v}'", e.key)),
            }
        } else {
            out.push(format!("--{}={}", e.key, e.value));
        }
    }
    out.extend(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn parses_comments_and_underscores() {
        let e = parse_config("# header\nchi = 30 # trailing\n\nk_range=-1:1:0.5\n").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e[1].key, "k-range");
        assert_eq!(e[1].value, "-1:1:0.5");
        assert!(parse_config("chi 30").is_err());
    }

    #[test]
    fn config_flags_precede_explicit_ones() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.conf");
        std::fs::write(&path, "command = evolve\nchi = 10\nwith-approx = true\n").unwrap();
        let p = path.to_str().unwrap();
        let out = expand_args(s(&["kerrpb", "--config", p, "--chi", "20"])).unwrap();
        assert_eq!(
            out[..4],
            s(&["kerrpb", "evolve", "--chi=10", "--with-approx"])[..]
        );
        assert_eq!(out[4..], s(&["--config", p, "--chi", "20"])[..]);
        let given = expand_args(s(&["kerrpb", "wigner", "--config", p])).unwrap();
        assert_eq!(given[1], "wigner");
        assert!(expand_args(s(&["kerrpb", "--config", "/nonexistent/x.conf"])).is_err());
    }
}
