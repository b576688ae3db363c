//! Resolving descriptors into things that can be sampled.

use scalent_core::io::load_triple;
use scalent_core::sample::Cube;
use scalent_core::systems::{averaged_triple, parse_descriptor, Descriptor, Realization, RotationTriple, SymbolicSystem};
use scalent_core::FiniteMetricTriple;

use crate::ctx::{CliError, CliResult, Ctx};

/// Largest cube enumerated as a finite triple.
const CUBE_FULL_DIM: usize = 12;

pub enum Source {
    Finite(FiniteMetricTriple),
    Cube(Cube),
    Circle,
    Sphere,
    /// Windows of the given length, drawn without enumerating the law.
    Window(SymbolicSystem, usize),
}

/// Runs `$body` with `$s` bound to a `&impl SampleableTriple`.
#[macro_export]
macro_rules! with_source {
    ($src:expr, $s:ident => $body:expr) => {
        match $src {
            $crate::source::Source::Finite(t) => {
                let $s = t;
                $body
            }
            $crate::source::Source::Cube(c) => {
                let $s = c;
                $body
            }
            $crate::source::Source::Circle => {
                let $s = &scalent_core::sample::Circle;
                $body
            }
            $crate::source::Source::Sphere => {
                let $s = &scalent_core::sample::Sphere;
                $body
            }
            $crate::source::Source::Window(sys, h) => {
                let w = scalent_core::systems::WindowSource::new(sys, *h)?;
                let $s = &w;
                $body
            }
        }
    };
}

pub fn descriptor(text: &str, ctx: &Ctx) -> CliResult<Descriptor> {
    Ok(parse_descriptor(text, Some(ctx.prefix_len))?)
}

pub fn symbolic(text: &str, ctx: &Ctx) -> CliResult<SymbolicSystem> {
    match descriptor(text, ctx)? {
        Descriptor::Symbolic(s) => Ok(s),
        _ => Err(CliError::validation(format!("'{text}' is not a symbolic system"))),
    }
}

/// `horizon` is the window length for symbolic systems and the number of
/// averaged rotations; `m` discretizes rotations.
pub fn resolve(text: &str, horizon: usize, m: usize, ctx: &Ctx) -> CliResult<Source> {
    Ok(match descriptor(text, ctx)? {
        Descriptor::Symbolic(s) => Source::Window(s, horizon),
        Descriptor::Rotation(a) => Source::Finite(RotationTriple::new(a, m)?.triple(horizon)?),
        Descriptor::Cube(d) => Source::Cube(Cube { dim: d }),
        Descriptor::Circle => Source::Circle,
        Descriptor::Sphere => Source::Sphere,
        Descriptor::File(p) => Source::Finite(load_triple(&p)?),
    })
}

impl Source {
    /// The source as a finite triple, when it is one or can be enumerated.
    pub fn full(&self, ctx: &Ctx) -> CliResult<Option<FiniteMetricTriple>> {
        Ok(match self {
            Source::Finite(t) => Some(t.clone()),
            Source::Cube(c) if c.dim <= CUBE_FULL_DIM => Some(c.triple()),
            Source::Window(s, h) => match averaged_triple(s, *h, Realization::Exact { cap: ctx.exact_cap }) {
                Ok(t) => Some(t),
                Err(e) if e.is_cap() => None,
                Err(e) => return Err(e.into()),
            },
            _ => None,
        })
    }
}

