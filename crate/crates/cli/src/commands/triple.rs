use scalent_core::io::{format_triple, load_triple, validate_file};
use scalent_core::report::Report;
use scalent_core::rng;
use scalent_core::sample::subsample;
use serde::Serialize;

use crate::args::TripleCmd;
use crate::ctx::{CliResult, Ctx};
use crate::source::resolve;
use crate::with_source;

#[derive(Serialize)]
struct Info {
    n: usize,
    diameter: f64,
    mean_distance: f64,
    uniform_weights: bool,
    min_weight: f64,
}

pub fn run(cmd: TripleCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        TripleCmd::Validate { file, strict, out } => {
            let report = validate_file(&file, strict)?;
            // The matrix can pass while a weights line is malformed.
            let weights = if report.ok() { load_triple(&file).err().map(|e| e.to_string()) } else { None };
            #[derive(Serialize)]
            struct Validation<'a> {
                file: String,
                ok: bool,
                matrix: &'a scalent_core::metric::ValidationReport,
                weights_error: Option<String>,
            }
            let ok = report.ok() && weights.is_none();
            let v = Validation { file: file.display().to_string(), ok, matrix: &report, weights_error: weights };
            ctx.report(&out, Report::new("triple-validate", if strict { "strict" } else { "semimetric" }, true, &v)?)?;
            if !ok {
                eprintln!("error: {} fails validation: {}", file.display(), report.summary());
            }
            Ok(if ok { 0 } else { 1 })
        }
        TripleCmd::Info { file, out } => {
            let t = load_triple(&file)?;
            let info = Info {
                n: t.n(),
                diameter: t.dist().max_entry(),
                mean_distance: t.mean_distance(),
                uniform_weights: t.weights().is_uniform(),
                min_weight: t.w().iter().copied().fold(f64::INFINITY, f64::min),
            };
            ctx.report(&out, Report::new("triple-info", "direct", true, &info)?)?;
            Ok(0)
        }
        TripleCmd::Sample { source, n, replica, horizon, m, out } => {
            let src = resolve(&source, horizon, m, ctx)?;
            let t = with_source!(&src, s => subsample(s, n, ctx.seed, replica));
            ctx.cell(format!("replica {replica}"), rng::key(ctx.seed, "sample", replica, 0));
            let text = format!("# {n} points of {source}, seed {}, replica {replica}\n{}", ctx.seed, format_triple(&t));
            ctx.emit(&out, &text)?;
            Ok(0)
        }
    }
}
