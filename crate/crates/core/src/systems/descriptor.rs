//! Text descriptors for systems and sampleable sources.

use std::path::PathBuf;

use super::{RotationTriple, SigmaSchedule, SymbolicSystem, DEFAULT_PREFIX_LEN};
use crate::metric::ProbabilityVector;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub enum Descriptor {
    Symbolic(SymbolicSystem),
    /// Rotation angle in turns; the discretization is chosen by the caller.
    Rotation(f64),
    Cube(usize),
    Circle,
    Sphere,
    File(PathBuf),
}

fn split_top(s: &str) -> Result<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Value(format!("unbalanced parentheses in '{s}'")));
        }
    }
    if depth != 0 {
        return Err(Error::Value(format!("unbalanced parentheses in '{s}'")));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn num(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Value(format!("'{s}' is not a number")))
}

fn symbolic(d: Descriptor, text: &str) -> Result<SymbolicSystem> {
    match d {
        Descriptor::Symbolic(s) => Ok(s),
        _ => Err(Error::Value(format!("'{text}' is not a symbolic system"))),
    }
}

/// Parses `bernoulli:P`, `bernoulli:P0,P1,..`, `rotation:ALPHA`,
/// `subst:0=01,1=10`, `morse`, `chacon`, `adic:1,0,1`, `product:(A;B)`,
/// `cube:D`, `circle`, `sphere` and `file:PATH`.
pub fn parse_descriptor(text: &str, prefix_len: Option<usize>) -> Result<Descriptor> {
    let text = text.trim();
    let prefix = prefix_len.unwrap_or(DEFAULT_PREFIX_LEN);
    let (head, arg) = match text.split_once(':') {
        Some((h, a)) => (h, a),
        None => (text, ""),
    };
    match (head, arg) {
        ("bernoulli", a) => {
            let vals: Vec<f64> = a.split(',').map(num).collect::<Result<_>>()?;
            let p = if vals.len() == 1 {
                let p = vals[0];
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::Value(format!("Bernoulli parameter {p} outside [0, 1]")));
                }
                ProbabilityVector::new(vec![1.0 - p, p])?
            } else {
                ProbabilityVector::new(vals)?
            };
            Ok(Descriptor::Symbolic(SymbolicSystem::bernoulli(p)?))
        }
        ("rotation", a) => Ok(Descriptor::Rotation(num(a)?)),
        ("morse", "") => Ok(Descriptor::Symbolic(SymbolicSystem::morse(prefix)?)),
        ("chacon", "") => Ok(Descriptor::Symbolic(SymbolicSystem::chacon(prefix)?)),
        ("subst", a) => {
            let rules: Vec<(char, String)> = a
                .split(',')
                .map(|r| {
                    let (l, w) = r.split_once('=').ok_or_else(|| Error::Value(format!("rule '{r}' lacks '='")))?;
                    let mut cs = l.trim().chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Ok((c, w.trim().to_string())),
                        _ => Err(Error::Value(format!("rule '{r}' must map a single letter"))),
                    }
                })
                .collect::<Result<_>>()?;
            Ok(Descriptor::Symbolic(SymbolicSystem::substitution(&rules, prefix)?))
        }
        ("adic", a) => {
            let sigma: Vec<u8> = if a.trim().is_empty() {
                Vec::new()
            } else {
                a.split(',')
                    .map(|b| b.trim().parse::<u8>().map_err(|_| Error::Value(format!("'{b}' is not a schedule entry"))))
                    .collect::<Result<_>>()?
            };
            Ok(Descriptor::Symbolic(SymbolicSystem::adic(SigmaSchedule::new(sigma)?)))
        }
        ("product", a) => {
            let inner = a
                .trim()
                .strip_prefix('(')
                .and_then(|x| x.strip_suffix(')'))
                .ok_or_else(|| Error::Value(format!("product expects '(A;B)', got '{a}'")))?;
            let children = split_top(inner)?
                .into_iter()
                .map(|c| symbolic(parse_descriptor(c, prefix_len)?, c))
                .collect::<Result<Vec<_>>>()?;
            Ok(Descriptor::Symbolic(SymbolicSystem::product(children)?))
        }
        ("cube", a) => {
            let d: usize = a.trim().parse().map_err(|_| Error::Value(format!("bad cube dimension '{a}'")))?;
            if d == 0 || d > 63 {
                return Err(Error::Value(format!("cube dimension must lie in 1..=63, got {d}")));
            }
            Ok(Descriptor::Cube(d))
        }
        ("circle", "") => Ok(Descriptor::Circle),
        ("sphere", "") => Ok(Descriptor::Sphere),
        ("file", a) if !a.is_empty() => Ok(Descriptor::File(PathBuf::from(a))),
        _ => Err(Error::Value(format!("unknown system descriptor '{text}'"))),
    }
}

impl Descriptor {
    pub fn rotation(&self, m: usize) -> Option<Result<RotationTriple>> {
        match self {
            Descriptor::Rotation(a) => Some(RotationTriple::new(*a, m)),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for d in ["bernoulli:0.5", "subst:0=01,1=10", "adic:1,0,1,1", "product:(bernoulli:0.5;adic:0,0)"] {
            match parse_descriptor(d, Some(256)).unwrap() {
                Descriptor::Symbolic(s) => assert!(s.name().starts_with(d.split(':').next().unwrap())),
                other => panic!("{other:?}"),
            }
        }
        let nested = parse_descriptor("product:(morse;product:(bernoulli:0.5;adic:1))", Some(256)).unwrap();
        match nested {
            Descriptor::Symbolic(s) => assert_eq!(s.channel_weights(), vec![0.5, 0.25, 0.25]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_descriptor("rotation:0.381966", None).unwrap(), Descriptor::Rotation(_)));
        assert!(parse_descriptor("product:(morse)", Some(64)).is_err());
        assert!(parse_descriptor("warp:9", None).is_err());
    }
}
