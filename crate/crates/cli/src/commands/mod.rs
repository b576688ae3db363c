mod dist;
mod entropy;
mod mdist;
mod omega;
mod scale;
mod system;
mod triple;

use crate::args::Command;
use crate::ctx::{CliError, CliResult, Ctx};

/// Runs one subcommand; the returned code is 0 unless the command itself
/// found a violation after writing its outputs.
pub fn execute(cmd: Command, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        Command::Triple(c) => triple::run(c, ctx),
        Command::Entropy(c) => entropy::run(c, ctx),
        Command::System(c) => system::run(c, ctx),
        Command::Scale(c) => scale::run(c, ctx),
        Command::Mdist(c) => mdist::run(c, ctx),
        Command::Dist(c) => dist::run(c, ctx),
        Command::Omega(c) => omega::run(c, ctx),
    }
}

/// `2..10,16,32`: inclusive ranges and single values.
pub fn parse_sizes(s: &str) -> CliResult<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::usage(format!("bad size '{t}' in '{s}'")));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(CliError::usage(format!("empty range '{part}'")));
                }
                out.extend(a..=b);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::usage(format!("no sizes in '{s}'")));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// `0.1,0.5` or `a..b:step` (inclusive, step counted from `a`).
pub fn parse_reals(s: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("bad number '{t}' in '{s}'")));
        match part.split_once("..") {
            Some((a, rest)) => {
                let (b, step) = rest
                    .split_once(':')
                    .ok_or_else(|| CliError::usage(format!("range '{part}' needs a step, as in 0..1:0.1")))?;
                let (a, b, step) = (num(a)?, num(b)?, num(step)?);
                if !(step > 0.0) || b < a {
                    return Err(CliError::usage(format!("bad range '{part}'")));
                }
                let count = ((b - a) / step + 1e-9).floor() as usize;
                out.extend((0..=count).map(|k| a + k as f64 * step));
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(CliError::usage(format!("no values in '{s}'")));
    }
    Ok(out)
}

pub fn parse<T: std::str::FromStr<Err = scalent_core::Error>>(s: &str) -> CliResult<T> {
    s.parse::<T>().map_err(|e| CliError::usage(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn size_and_real_lists() {
        assert_eq!(parse_sizes("2..4,8,3").unwrap(), vec![2, 3, 4, 8]);
        assert!(parse_sizes("5..2").is_err());
        assert_eq!(parse_reals("0..0.3:0.1").unwrap().len(), 4);
        assert_eq!(parse_reals("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_reals("0..1").is_err());
    }
}
