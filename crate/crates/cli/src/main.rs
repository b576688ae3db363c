//! `scalent`: epsilon-entropy, transport distances and scaling-entropy
//! profiles from the command line.

mod args;
mod cache;
mod commands;
mod config;
mod ctx;
mod manifest;
mod plot;
mod source;

use std::collections::BTreeMap;
use std::path::Path;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};

use args::Cli;
use ctx::{CliError, CliResult, Ctx, EXIT_USAGE};
use manifest::RunManifest;

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let (cli, argv, cfg) = match parse(argv) {
        Ok(x) => x,
        Err(code) => return code,
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_USAGE;
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return EXIT_USAGE;
        }
    }
    match run(cli, &argv, cfg) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            e.code
        }
    }
}

/// Parses the command line, merging a config file when one is named.
fn parse(argv: Vec<String>) -> Result<(Cli, Vec<String>, BTreeMap<String, String>), i32> {
    let Some(path) = config::config_path(&argv) else {
        return Ok((parse_args(&argv)?, argv, BTreeMap::new()));
    };
    let merged = config::load(&path)
        .and_then(|cfg| config::merge(&argv, &cfg).map(|a| (a, cfg)).map_err(|e| format!("config {}: {e}", path.display())));
    match merged {
        Ok((argv, cfg)) => Ok((parse_args(&argv)?, argv, cfg)),
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_USAGE)
        }
    }
}

fn parse_args(argv: &[String]) -> Result<Cli, i32> {
    match Cli::try_parse_from(argv) {
        Ok(cli) if cli.command.is_some() && cli.replay.is_some() => {
            eprintln!("error: --replay takes no subcommand");
            Err(EXIT_USAGE)
        }
        Ok(cli) if cli.command.is_none() && cli.replay.is_none() => {
            let _ = Cli::command().write_help(&mut std::io::stderr());
            Err(EXIT_USAGE)
        }
        Ok(cli) => Ok(cli),
        Err(e) => {
            let _ = e.print();
            Err(match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            })
        }
    }
}

fn run(cli: Cli, argv: &[String], cfg: BTreeMap<String, String>) -> CliResult<i32> {
    if let Some(path) = &cli.replay {
        return replay(path, cli.global.threads);
    }
    let mut ctx = Ctx::new(&cli.global);
    let code = commands::execute(cli.command.expect("checked at parse time"), &mut ctx)?;
    if cli.global.manifest.is_some() || !ctx.outputs.is_empty() {
        let m = RunManifest::new(argv, cfg, cli.global.threads, &ctx)?;
        if let Some(path) = cli.global.manifest.clone().or_else(|| m.default_path()) {
            m.write(&path)?;
        }
    }
    Ok(code)
}

/// Re-runs a manifest in its recorded directory and checks every output
/// hash; exit 0 only when all match.
fn replay(path: &Path, threads: Option<usize>) -> CliResult<i32> {
    let m = RunManifest::load(path)?;
    std::env::set_current_dir(&m.cwd)
        .map_err(|e| CliError::validation(format!("cannot enter recorded directory {}: {e}", m.cwd.display())))?;
    let mut argv = m.argv.clone();
    if let Some(t) = threads {
        argv.splice(1..1, ["--threads".to_string(), t.to_string()]);
    }
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::validation(format!("manifest command line no longer parses: {e}")))?;
    let command = cli.command.ok_or_else(|| CliError::validation("manifest has no command"))?;
    let mut ctx = Ctx::new(&cli.global);
    commands::execute(command, &mut ctx)?;
    let differing = m.verify();
    for p in &differing {
        eprintln!("replay: {} differs from the recorded hash", p.display());
    }
    if ctx.cells != m.cells {
        eprintln!("replay: derived seeds differ from the manifest");
        return Ok(1);
    }
    if differing.is_empty() {
        eprintln!("replay: {} outputs identical", m.outputs.len());
        Ok(0)
    } else {
        Ok(1)
    }
}

#[cfg(test)]
mod tests {
    #[test]
    fn command_definition_is_consistent() {
        <super::Cli as clap::CommandFactory>::command().debug_assert();
    }
}
