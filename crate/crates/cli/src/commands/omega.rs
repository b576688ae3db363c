use scalent_core::io::format_triple;
use scalent_core::report::Report;
use scalent_core::scaling::{fit_class, AsymptoticClassReport, Candidate, EntropyProfile, Thresholds};
use scalent_core::systems::{omega_pattern_margin, omega_terms, omega_truncated, Realization};
use scalent_core::{entropy::EpsMethod, rng};
use serde::Serialize;

use super::parse_sizes;
use super::scale::{grid, warn_failed, GridSpec};
use crate::args::OmegaCmd;
use crate::cache::cached;
use crate::ctx::{CliError, CliResult, Ctx};
use crate::source::symbolic;

#[derive(Serialize)]
struct MarginRow {
    n: usize,
    z: f64,
    margin: f64,
    holds: bool,
}

#[derive(Serialize)]
struct Side {
    profile: Vec<(f64, usize, Option<f64>)>,
    fit: Option<AsymptoticClassReport>,
    fit_error: Option<String>,
}

#[derive(Serialize)]
struct Comparison {
    system: String,
    average: Side,
    omega: Side,
    omega_terms: usize,
    /// Cells where both metrics have a value and the omega entropy is at
    /// least the averaged one.
    omega_dominates: Vec<(f64, usize, bool)>,
    labels_agree: Option<bool>,
}

fn side(p: &EntropyProfile, classes: &[Candidate], nmin: usize, ctx: &Ctx) -> Side {
    let profile = p.records.iter().map(|r| (r.eps, r.n, r.ok().then(|| ctx.conv(r.h)))).collect();
    match fit_class(p, classes, nmin, &Thresholds::default()) {
        Ok(f) => Side { profile, fit: Some(f), fit_error: None },
        Err(e) => Side { profile, fit: None, fit_error: Some(e.to_string()) },
    }
}

pub fn run(cmd: OmegaCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        OmegaCmd::Triple { system, z, tol, terms, realization, out } => {
            let s = symbolic(&system, ctx)?;
            let real = Realization::parse(&realization, ctx.exact_cap, ctx.seed)?;
            let terms = match terms {
                Some(t) => t,
                None => omega_terms(z, tol)?,
            };
            if let Realization::MonteCarlo { .. } = real {
                ctx.cell(format!("terms {terms}"), rng::key(ctx.seed, "sample", terms as u64, 0));
            }
            let key = [s.name().to_string(), format!("{z:?}"), terms.to_string(), format!("{real:?}"), ctx.prefix_len.to_string()];
            let parts: Vec<&str> = key.iter().map(String::as_str).collect();
            let t = cached(ctx.cache.as_ref(), "omega-triple", &parts, || omega_truncated(&s, z, terms, real).map(|o| o.triple))?;
            let text = format!(
                "# omega metric of {system}, z {z:?}, {terms} terms, tail bound {:?}\n{}",
                z.powi(terms as i32),
                format_triple(&t)
            );
            ctx.emit(&out, &text)?;
            Ok(0)
        }
        OmegaCmd::Margin { n, out } => {
            let rows = n
                .iter()
                .map(|&n| {
                    let margin = omega_pattern_margin(n)?;
                    Ok(MarginRow { n, z: 1.0 - 1.0 / n as f64, margin, holds: margin >= 0.0 })
                })
                .collect::<CliResult<Vec<_>>>()?;
            let ok = rows.iter().all(|r| r.holds);
            ctx.report_as(&out, Report::new("omega-margin", "enumeration", true, &rows)?.with_unit("distance"))?;
            Ok(if ok { 0 } else { 1 })
        }
        OmegaCmd::Compare { system, eps, n, omega_terms, classes, nmin, out } => {
            let n = parse_sizes(&n)?;
            let classes = Candidate::parse_list(&classes).map_err(|e| CliError::usage(e.to_string()))?;
            let mut spec =
                GridSpec { system: &system, eps: &eps, n: &n, method: EpsMethod::Exact, realization: "exact", replicas: 1, omega_terms: None, m: 256 };
            let avg = grid(&spec, ctx)?;
            spec.omega_terms = Some(omega_terms);
            let om = grid(&spec, ctx)?;
            warn_failed(&avg);
            warn_failed(&om);
            let omega_dominates = avg
                .records
                .iter()
                .filter_map(|a| {
                    let o = om.get(a.eps, a.n).filter(|o| o.ok() && a.ok())?;
                    Some((a.eps, a.n, o.h >= a.h - 1e-12))
                })
                .collect();
            let (average, omega) = (side(&avg, &classes, nmin, ctx), side(&om, &classes, nmin, ctx));
            let labels_agree = match (&average.fit, &omega.fit) {
                (Some(a), Some(o)) => {
                    Some(a.per_eps.iter().zip(&o.per_eps).all(|(x, y)| x.label.kind() == y.label.kind()))
                }
                _ => None,
            };
            let result = Comparison { system: avg.system.clone(), average, omega, omega_terms, omega_dominates, labels_agree };
            ctx.report(&out, Report::new("omega-compare", "exact", true, &result)?)?;
            Ok(0)
        }
    }
}
