//! Per-run state: global settings, emitted outputs and derived seeds.

use std::path::{Path, PathBuf};

use scalent_core::report::Report;
use scalent_core::LogBase;
use serde::{Deserialize, Serialize};

use crate::args::{Global, OutArg};
use crate::cache::{sha256_hex, Cache};

pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_CAP: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub msg: String,
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_USAGE, msg: msg.into() }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, msg: msg.into() }
    }
}

impl From<scalent_core::Error> for CliError {
    fn from(e: scalent_core::Error) -> Self {
        let code = if e.is_cap() { EXIT_CAP } else { EXIT_VALIDATION };
        CliError { code, msg: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::validation(format!("io error: {e}"))
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: PathBuf,
    pub sha256: String,
    pub bytes: usize,
}

/// A derived random key and the grid cell or replica it drives.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSeed {
    pub cell: String,
    pub key: u64,
}

pub struct Ctx {
    pub seed: u64,
    pub bits: bool,
    pub exact_cap: usize,
    pub prefix_len: usize,
    pub cache: Option<Cache>,
    pub outputs: Vec<OutputRecord>,
    pub cells: Vec<CellSeed>,
}

impl Ctx {
    pub fn new(g: &Global) -> Self {
        Ctx {
            seed: g.seed,
            bits: g.bits,
            exact_cap: g.exact_cap,
            prefix_len: g.prefix_len,
            cache: Cache::from_env(),
            outputs: Vec::new(),
            cells: Vec::new(),
        }
    }

    pub fn base(&self) -> LogBase {
        if self.bits {
            LogBase::Bits
        } else {
            LogBase::Nats
        }
    }

    /// Converts a value in nats to the run's base.
    pub fn conv(&self, nats: f64) -> f64 {
        self.base().convert(nats)
    }

    pub fn cell(&mut self, cell: impl Into<String>, key: u64) {
        self.cells.push(CellSeed { cell: cell.into(), key });
    }

    pub fn emit_to(&mut self, path: Option<&Path>, text: &str) -> CliResult<()> {
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    std::fs::create_dir_all(dir)?;
                }
                std::fs::write(p, text)?;
                self.outputs.push(OutputRecord { path: p.to_path_buf(), sha256: sha256_hex(text.as_bytes()), bytes: text.len() });
            }
            None => print!("{text}"),
        }
        Ok(())
    }

    pub fn emit(&mut self, out: &OutArg, text: &str) -> CliResult<()> {
        self.emit_to(out.out.as_deref(), text)
    }

    /// Emits a report computed in the run's base.
    pub fn report(&mut self, out: &OutArg, report: Report) -> CliResult<()> {
        let r = report.with_unit(self.base().tag());
        self.emit(out, &r.to_json())
    }

    /// Emits a report whose unit was set by the caller, e.g. from an input
    /// profile.
    pub fn report_as(&mut self, out: &OutArg, report: Report) -> CliResult<()> {
        self.emit(out, &report.to_json())
    }
}
