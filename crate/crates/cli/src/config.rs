//! Flat `key = value` configuration files.
//!
//! Keys are long flag names without dashes (`seed`, `exact-cap`, `eps`, ...).
//! A key applies when the running command accepts that flag and the command
//! line does not set it; command-line flags always win. Keys that no command
//! knows are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use clap::parser::ValueSource;
use clap::{ArgMatches, Command, CommandFactory};

use crate::args::Cli;

/// Flags that steer a run rather than describe it; never read from a file.
const RESERVED: &[&str] = &["config", "manifest", "replay", "help", "version"];

pub fn parse(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("config line {}: expected key = value", i + 1))?;
        let k = k.trim().trim_start_matches("--").to_string();
        if RESERVED.contains(&k.as_str()) {
            return Err(format!("config line {}: '{k}' cannot be set from a file", i + 1));
        }
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return Err(format!("config line {}: '{k}' set twice", i + 1));
        }
    }
    Ok(out)
}

pub fn load(path: &Path) -> Result<BTreeMap<String, String>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    parse(&text)
}

fn all_longs(cmd: &Command, out: &mut Vec<String>) {
    out.extend(cmd.get_arguments().filter_map(|a| a.get_long().map(str::to_string)));
    for s in cmd.get_subcommands() {
        all_longs(s, out);
    }
}

fn relaxed(cmd: Command) -> Command {
    cmd.mut_args(|a| a.required(false)).mut_subcommands(relaxed)
}

/// The `--config` value, read before full parsing so that the file can
/// supply required flags.
pub fn config_path(argv: &[String]) -> Option<std::path::PathBuf> {
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--" {
            break;
        }
        if a == "--config" {
            return it.next().map(Into::into);
        }
        if let Some(v) = a.strip_prefix("--config=") {
            return Some(v.into());
        }
    }
    None
}

/// Appends file values for flags the command line left unset.
pub fn merge(argv: &[String], cfg: &BTreeMap<String, String>) -> Result<Vec<String>, String> {
    let mut root = Cli::command();
    root.build();
    let mut known = Vec::new();
    all_longs(&root, &mut known);
    if let Some(k) = cfg.keys().find(|k| !known.contains(k)) {
        return Err(format!("unknown config key '{k}'"));
    }
    // Required flags may come from the file, so look up sources leniently.
    let matches = relaxed(root.clone()).try_get_matches_from(argv).map_err(|e| e.to_string())?;
    let (mut cmd, mut m): (&Command, &ArgMatches) = (&root, &matches);
    while let Some((name, sub)) = m.subcommand() {
        cmd = cmd.find_subcommand(name).expect("matched subcommand exists");
        m = sub;
    }
    let mut out = argv.to_vec();
    for (k, v) in cfg {
        let Some(arg) = cmd.get_arguments().find(|a| a.get_long() == Some(k.as_str())) else {
            continue;
        };
        if m.value_source(arg.get_id().as_str()) == Some(ValueSource::CommandLine) {
            continue;
        }
        if arg.get_action().takes_values() {
            out.push(format!("--{k}"));
            out.push(v.clone());
        } else {
            match v.as_str() {
                "true" | "yes" | "1" => out.push(format!("--{k}")),
                "false" | "no" | "0" => {}
                other => return Err(format!("config key '{k}' expects true or false, got '{other}'")),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn command_line_wins_and_foreign_keys_are_skipped() {
        let cfg = parse("seed = 9\n# comment\nbits = true\nreplicas = 7\n").unwrap();
        let a = merge(&argv("scalent --seed 3 omega margin --n 4"), &cfg).unwrap();
        assert_eq!(a, argv("scalent --seed 3 omega margin --n 4 --bits"));
        let b = merge(&argv("scalent mdist invariance --system circle --n 5"), &cfg).unwrap();
        assert_eq!(b, argv("scalent mdist invariance --system circle --n 5 --bits --replicas 7 --seed 9"));
    }

    #[test]
    fn bad_files_are_rejected() {
        assert!(parse("seed 3").is_err());
        assert!(parse("config = x").is_err());
        assert!(parse("seed = 1\nseed = 2").is_err());
        assert!(merge(&argv("scalent omega margin --n 4"), &parse("nonsense = 1").unwrap()).is_err());
    }

    #[test]
    fn file_can_supply_required_flags() {
        let cfg = parse("n = 8").unwrap();
        assert_eq!(merge(&argv("scalent omega margin"), &cfg).unwrap(), argv("scalent omega margin --n 8"));
        assert_eq!(config_path(&argv("scalent --config=a.cfg omega margin")), Some("a.cfg".into()));
        assert_eq!(config_path(&argv("scalent omega margin --config b.cfg")), Some("b.cfg".into()));
    }
}
