//! Run manifests and replay.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cache::sha256_hex;
use crate::ctx::{CellSeed, CliError, CliResult, Ctx, OutputRecord};

pub const MANIFEST_SCHEMA: &str = "scalent-manifest-v1";

/// Everything needed to regenerate a run's outputs byte for byte.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema: String,
    pub tool_version: String,
    /// Effective command line: config values merged in, run-only flags
    /// (`--config`, `--manifest`, `--threads`) removed.
    pub argv: Vec<String>,
    /// Values taken from the config file, if one was given.
    pub config: BTreeMap<String, String>,
    pub seed: u64,
    /// Thread count of the recorded run; outputs do not depend on it.
    pub threads: Option<usize>,
    pub cwd: PathBuf,
    pub cells: Vec<CellSeed>,
    pub outputs: Vec<OutputRecord>,
}

const RUN_FLAGS: &[&str] = &["--config", "--manifest", "--threads"];

/// Drops flags that do not influence outputs.
pub fn strip_run_flags(argv: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len());
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if RUN_FLAGS.contains(&a.as_str()) {
            skip = true;
            continue;
        }
        if RUN_FLAGS.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

impl RunManifest {
    pub fn new(argv: &[String], config: BTreeMap<String, String>, threads: Option<usize>, ctx: &Ctx) -> CliResult<Self> {
        Ok(RunManifest {
            schema: MANIFEST_SCHEMA.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            argv: strip_run_flags(argv),
            config,
            seed: ctx.seed,
            threads,
            cwd: std::env::current_dir()?,
            cells: ctx.cells.clone(),
            outputs: ctx.outputs.clone(),
        })
    }

    pub fn default_path(&self) -> Option<PathBuf> {
        self.outputs.first().map(|o| {
            let mut s = o.path.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::validation(e.to_string()))?;
        s.push('\n');
        std::fs::write(path, s)?;
        Ok(())
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read manifest {}: {e}", path.display())))?;
        let m: RunManifest = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("malformed manifest {}: {e}", path.display())))?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(CliError::validation(format!("unsupported manifest schema '{}'", m.schema)));
        }
        Ok(m)
    }

    /// Compares the recorded hashes with the files on disk; returns the
    /// paths that differ.
    pub fn verify(&self) -> Vec<PathBuf> {
        self.outputs
            .iter()
            .filter(|o| std::fs::read(&o.path).map(|b| sha256_hex(&b) != o.sha256).unwrap_or(true))
            .map(|o| o.path.clone())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_flags_are_stripped() {
        let argv: Vec<String> = "scalent --threads 8 --config=c.txt scale grid --manifest m.json --n 2".split(' ').map(String::from).collect();
        assert_eq!(strip_run_flags(&argv), vec!["scalent", "scale", "grid", "--n", "2"]);
    }
}
