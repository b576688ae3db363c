use scalent_core::entropy::{
    admissibility_event, eps_entropy, hk_entropy, shannon, subsample_entropy_bounds, tail_support, AdmissibilityMethod,
    EpsMethod, HkMode, SubsampleScheme,
};
use scalent_core::io::load_triple;
use scalent_core::report::Report;
use scalent_core::{rng, ProbabilityVector};
use serde::Serialize;

use super::parse;
use crate::args::EntropyCmd;
use crate::ctx::{CliError, CliResult, Ctx};
use crate::source::resolve;
use crate::with_source;

pub fn run(cmd: EntropyCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        EntropyCmd::Eps { triple, eps, method, out } => {
            let t = load_triple(&triple)?;
            let method: EpsMethod = parse(&method)?;
            let mut rows = Vec::new();
            for e in eps {
                let mut r = eps_entropy(&t, e, method)?;
                r.value = ctx.conv(r.value);
                rows.push(r);
            }
            let exact = rows.iter().all(|r| r.exact);
            ctx.report(&out, Report::new("entropy-eps", method.name(), exact, &rows)?)?;
            Ok(0)
        }
        EntropyCmd::Kantorovich { triple, eps, mode, out } => {
            let t = load_triple(&triple)?;
            let mode = match mode.as_str() {
                "exact-tiny" | "exact" => HkMode::ExactTiny,
                "greedy" => HkMode::Greedy,
                other => return Err(CliError::usage(format!("unknown mode '{other}', expected exact-tiny or greedy"))),
            };
            let mut rows = Vec::new();
            for e in eps {
                let mut r = hk_entropy(&t, e, mode)?;
                r.entropy = ctx.conv(r.entropy);
                rows.push(r);
            }
            let name = if mode == HkMode::ExactTiny { "exact-tiny" } else { "greedy" };
            ctx.report(&out, Report::new("entropy-kantorovich", name, mode == HkMode::ExactTiny, &rows)?)?;
            Ok(0)
        }
        EntropyCmd::Admissible { triple, eps, method, out } => {
            let t = load_triple(&triple)?;
            let m = match method.as_str() {
                "exact" => AdmissibilityMethod::Exact,
                "greedy" => AdmissibilityMethod::Greedy,
                other => return Err(CliError::usage(format!("unknown method '{other}', expected exact or greedy"))),
            };
            let rows = eps.iter().map(|&e| admissibility_event(t.dist(), e, m)).collect::<Result<Vec<_>, _>>()?;
            let exact = rows.iter().all(|r| r.exact);
            ctx.report(&out, Report::new("entropy-admissible", &method, exact, &rows)?)?;
            Ok(0)
        }
        EntropyCmd::Tail { p, delta, out } => {
            let pv = ProbabilityVector::new(p)?;
            let h = shannon(pv.as_slice());
            #[derive(Serialize)]
            struct Row {
                delta: f64,
                indices: Vec<usize>,
                size: usize,
                mass: f64,
                /// `exp((H + 1) / delta)` with `H` in nats.
                bound: f64,
            }
            let mut rows = Vec::new();
            for d in delta {
                let idx = tail_support(pv.as_slice(), d)?;
                let mass = idx.iter().map(|&i| pv.as_slice()[i]).sum();
                rows.push(Row { delta: d, size: idx.len(), indices: idx, mass, bound: ((h + 1.0) / d).exp() });
            }
            #[derive(Serialize)]
            struct Tail {
                entropy: f64,
                rows: Vec<Row>,
            }
            ctx.report(&out, Report::new("entropy-tail", "sort", true, &Tail { entropy: ctx.conv(h), rows })?)?;
            Ok(0)
        }
        EntropyCmd::Subsample { source, eps, sizes, replicas, method, scheme, horizon, m, out } => {
            let method: EpsMethod = parse(&method)?;
            let scheme = match scheme.as_str() {
                "iid" => SubsampleScheme::Iid,
                "identity" => SubsampleScheme::Identity,
                other => return Err(CliError::usage(format!("unknown scheme '{other}', expected iid or identity"))),
            };
            let src = resolve(&source, horizon, m, ctx)?;
            let full = src.full(ctx)?;
            let seed = ctx.seed;
            let mut table = with_source!(&src, s => subsample_entropy_bounds(s, full.as_ref(), eps, &sizes, replicas, seed, method, scheme))?;
            for &n in &sizes {
                for r in 0..replicas as u64 {
                    ctx.cell(format!("n {n} replica {r}"), rng::key(seed ^ n as u64, "sample", r, 0));
                }
            }
            for row in &mut table.rows {
                for v in row.values.iter_mut().chain([&mut row.mean, &mut row.min, &mut row.max]) {
                    *v = ctx.conv(*v);
                }
            }
            table.full = table.full.map(|v| ctx.conv(v));
            table.full_plus = table.full_plus.map(|v| ctx.conv(v));
            let exact = method == EpsMethod::Exact;
            ctx.report(&out, Report::new("entropy-subsample", method.name(), exact, &table)?.with_seed(seed))?;
            Ok(0)
        }
    }
}
