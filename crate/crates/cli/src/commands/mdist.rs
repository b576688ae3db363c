use scalent_core::io::format_matrix;
use scalent_core::matrixdist::{
    doubling_schedule, entropy_admissibility_diagnostic, minor_spectra, permutation_invariance_test, projectivity_check,
    sample_dn, InvarianceStatistic, MatrixSampleSet,
};
use scalent_core::report::Report;
use scalent_core::rng;
use serde::Serialize;

use super::parse;
use crate::args::{MdistCmd, SampleArgs};
use crate::cache::cached;
use crate::ctx::{CliResult, Ctx};
use crate::source::resolve;
use crate::with_source;

/// Samples `replicas` matrices, through the cache when one is set.
fn sample_set(a: &SampleArgs, ctx: &mut Ctx) -> CliResult<MatrixSampleSet> {
    let src = resolve(&a.system, a.horizon, a.m, ctx)?;
    let key = [
        a.system.clone(),
        a.n.to_string(),
        a.replicas.to_string(),
        ctx.seed.to_string(),
        a.horizon.to_string(),
        a.m.to_string(),
        ctx.prefix_len.to_string(),
    ];
    let parts: Vec<&str> = key.iter().map(String::as_str).collect();
    let seed = ctx.seed;
    let set = with_source!(&src, s => cached(ctx.cache.as_ref(), "mdist-sample", &parts, || sample_dn(s, a.n, a.replicas, seed))?);
    for r in 0..a.replicas as u64 {
        ctx.cell(format!("replica {r}"), rng::key(seed, "sample", r, 0));
    }
    Ok(set)
}

pub fn run(cmd: MdistCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        MdistCmd::Sample { s, out } => {
            let set = sample_set(&s, ctx)?;
            let mut text = format!("# {} matrices of {} points from {}, seed {}\n", set.replicas, set.n, set.source, set.seed);
            for (r, m) in set.matrices.iter().enumerate() {
                text.push_str(&format!("# replica {r}\n"));
                text.push_str(&format_matrix(m));
            }
            ctx.emit(&out, &text)?;
            Ok(0)
        }
        MdistCmd::Spectra { s, sizes, summary, out } => {
            let set = sample_set(&s, ctx)?;
            let sizes = if sizes.is_empty() { doubling_schedule(s.n) } else { sizes };
            let report = minor_spectra(&set, &sizes)?;
            ctx.emit(&out, &report.to_csv())?;
            let ok = report.trace_ok && report.interlacing_ok;
            if let Some(path) = summary {
                #[derive(Serialize)]
                struct Summary<'a> {
                    sizes: &'a [usize],
                    summary: &'a [scalent_core::matrixdist::SizeSummary],
                    max_trace_error: f64,
                    max_interlacing_violation: f64,
                    trace_ok: bool,
                    interlacing_ok: bool,
                }
                let sm = Summary {
                    sizes: &report.sizes,
                    summary: &report.summary,
                    max_trace_error: report.max_trace_error,
                    max_interlacing_violation: report.max_interlacing_violation,
                    trace_ok: report.trace_ok,
                    interlacing_ok: report.interlacing_ok,
                };
                let r = Report::new("mdist-spectra", "symmetric-eigen", false, &sm)?.with_seed(ctx.seed).with_unit("distance");
                ctx.emit_to(Some(&path), &r.to_json())?;
            }
            if !ok {
                eprintln!(
                    "error: spectral hygiene failed (trace error {:e}, interlacing violation {:e})",
                    report.max_trace_error, report.max_interlacing_violation
                );
            }
            Ok(if ok { 0 } else { 1 })
        }
        MdistCmd::Invariance { s, statistic, out } => {
            let stat: InvarianceStatistic = parse(&statistic)?;
            let set = sample_set(&s, ctx)?;
            let report = permutation_invariance_test(&set, stat, ctx.seed)?;
            let gross = report.gross_failure;
            ctx.report_as(&out, Report::new("mdist-invariance", "ks-two-sample", false, &report)?.with_seed(ctx.seed).with_unit("p-value"))?;
            if gross {
                eprintln!("error: relabeling changes the matrix law (p = {:e})", report.p_value);
            }
            Ok(if gross { 1 } else { 0 })
        }
        MdistCmd::Projectivity { system, n, seeds, horizon, m, out } => {
            let src = resolve(&system, horizon, m, ctx)?;
            let keys: Vec<u64> = (0..seeds).map(|k| rng::key(ctx.seed, "projectivity", k, 0)).collect();
            let failures: Vec<u64> =
                with_source!(&src, s => keys.iter().copied().filter(|&k| !projectivity_check(s, n, k)).collect());
            for (k, &key) in keys.iter().enumerate() {
                ctx.cell(format!("seed {k}"), key);
            }
            #[derive(Serialize)]
            struct Projectivity {
                n: usize,
                checked: u64,
                failing_keys: Vec<u64>,
                ok: bool,
            }
            let ok = failures.is_empty();
            let result = Projectivity { n, checked: seeds, failing_keys: failures, ok };
            ctx.report_as(&out, Report::new("mdist-projectivity", "prefix-stream", true, &result)?.with_seed(ctx.seed).with_unit("none"))?;
            Ok(if ok { 0 } else { 1 })
        }
        MdistCmd::Corner { s, eps, out } => {
            let one = SampleArgs { replicas: 1, ..s };
            let set = sample_set(&one, ctx)?;
            let mut diag = entropy_admissibility_diagnostic(&set.matrices[0], &eps)?;
            for row in &mut diag.rows {
                row.value = ctx.conv(row.value);
            }
            ctx.report(&out, Report::new("mdist-corner", "exact", true, &diag)?.with_seed(ctx.seed))?;
            Ok(0)
        }
    }
}
