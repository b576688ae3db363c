use std::path::Path;

use scalent_core::entropy::EpsMethod;
use scalent_core::report::Report;
use scalent_core::rng;
use scalent_core::scaling::{
    entropy_dimension, exp_profile, fit_class, phi_grid, slow_entropy, stability_check, Candidate, EntropyProfile,
    GridOptions, GridSource, ScaleFamily, Thresholds,
};
use scalent_core::systems::{Descriptor, Realization, RotationTriple};
use serde::Serialize;

use super::{parse, parse_reals, parse_sizes};
use crate::args::{FitArgs, ScaleCmd};
use crate::ctx::{CliError, CliResult, Ctx, EXIT_CAP};
use crate::plot::profile_svg;
use crate::source::descriptor;

pub fn load_profile(path: &Path) -> CliResult<EntropyProfile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    Ok(EntropyProfile::from_csv(&text)?)
}

pub struct GridSpec<'a> {
    pub system: &'a str,
    pub eps: &'a [f64],
    pub n: &'a [usize],
    pub method: EpsMethod,
    pub realization: &'a str,
    pub replicas: usize,
    /// Keep this many shift terms of the partition-function metric; `None`
    /// for the averaged metric.
    pub omega_terms: Option<usize>,
    pub m: usize,
}

/// Computes a profile in nats and records the Monte Carlo cell seeds.
pub fn grid(spec: &GridSpec, ctx: &mut Ctx) -> CliResult<EntropyProfile> {
    let realization = Realization::parse(spec.realization, ctx.exact_cap, ctx.seed)?;
    let opts = GridOptions { method: spec.method, realization, replicas: spec.replicas, seed: ctx.seed, ..Default::default() };
    let d = descriptor(spec.system, ctx)?;
    let profile = match (&d, spec.omega_terms) {
        (Descriptor::Symbolic(s), None) => phi_grid(&GridSource::Averaged(s), spec.eps, spec.n, &opts)?,
        (Descriptor::Symbolic(s), Some(t)) => phi_grid(&GridSource::Omega { system: s, max_terms: t }, spec.eps, spec.n, &opts)?,
        (Descriptor::Rotation(a), None) => phi_grid(&GridSource::Rotation(RotationTriple::new(*a, spec.m)?), spec.eps, spec.n, &opts)?,
        (Descriptor::Rotation(_), Some(_)) => {
            return Err(CliError::usage("the omega metric needs a symbolic system"));
        }
        _ => return Err(CliError::validation(format!("'{}' is not a system", spec.system))),
    };
    if let Realization::MonteCarlo { .. } = realization {
        for &n in spec.n {
            for r in 0..spec.replicas.max(1) as u64 {
                ctx.cell(format!("n {n} replica {r}"), rng::key(ctx.seed, "grid", n as u64, r));
            }
        }
    }
    Ok(profile)
}

/// Prints failed cells; returns how many there were.
pub fn warn_failed(p: &EntropyProfile) -> usize {
    let failed: Vec<_> = p.records.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        eprintln!("warning: eps={} n={}: {}", r.eps, r.n, r.error.as_deref().unwrap_or(""));
    }
    failed.len()
}

/// Writes a grid; exits 2 when no cell succeeded.
fn finish_grid(p: &EntropyProfile, out: &crate::args::OutArg, ctx: &mut Ctx) -> CliResult<i32> {
    let converted = p.in_base(ctx.base())?;
    ctx.emit(out, &converted.to_csv())?;
    let failed = warn_failed(p);
    Ok(if !p.records.is_empty() && failed == p.records.len() { EXIT_CAP } else { 0 })
}

fn candidates(f: &FitArgs) -> CliResult<Vec<Candidate>> {
    Candidate::parse_list(&f.classes).map_err(|e| CliError::usage(e.to_string()))
}

#[derive(Serialize)]
struct WithThresholds<T: Serialize> {
    #[serde(flatten)]
    inner: T,
    thresholds: Thresholds,
}

pub fn run(cmd: ScaleCmd, ctx: &mut Ctx) -> CliResult<i32> {
    let th = Thresholds::default();
    match cmd {
        ScaleCmd::Grid { system, eps, n, method, realization, replicas, metric, omega_terms, m, out } => {
            let n = parse_sizes(&n)?;
            let omega_terms = match metric.as_str() {
                "average" => None,
                "omega" => Some(omega_terms),
                other => return Err(CliError::usage(format!("unknown metric '{other}', expected average or omega"))),
            };
            let spec = GridSpec {
                system: &system,
                eps: &eps,
                n: &n,
                method: parse(&method)?,
                realization: &realization,
                replicas,
                omega_terms,
                m,
            };
            let p = grid(&spec, ctx)?;
            finish_grid(&p, &out, ctx)
        }
        ScaleCmd::Fit { fit, plot, out } => {
            let p = load_profile(&fit.profile)?;
            let report = fit_class(&p, &candidates(&fit)?, fit.nmin, &th)?;
            if let Some(path) = plot {
                let svg = profile_svg(&p, true).map_err(CliError::validation)?;
                ctx.emit_to(Some(&path), &svg)?;
            }
            let result = WithThresholds { inner: report, thresholds: th };
            ctx.report_as(&out, Report::new("scale-fit", "least-squares", false, &result)?.with_unit(&p.unit))?;
            Ok(0)
        }
        ScaleCmd::Stability { fit, out } => {
            let p = load_profile(&fit.profile)?;
            let report = stability_check(&p, &candidates(&fit)?, fit.nmin, &th)?;
            let result = WithThresholds { inner: report, thresholds: th };
            ctx.report_as(&out, Report::new("scale-stability", "least-squares", false, &result)?.with_unit(&p.unit))?;
            Ok(0)
        }
        ScaleCmd::Dimension { profile, nmin, out } => {
            let p = load_profile(&profile)?;
            let d = entropy_dimension(&p, nmin, &th)?;
            ctx.report_as(&out, Report::new("scale-dimension", "tail-slopes", false, &WithThresholds { inner: d, thresholds: th })?.with_unit(&p.unit))?;
            Ok(0)
        }
        ScaleCmd::Slow { profile, family, t, nmin, out } => {
            let p = load_profile(&profile)?;
            let family: ScaleFamily = parse(&family)?;
            let ts = parse_reals(&t)?;
            let rows = slow_entropy(&p, family, &ts, nmin, &th)?;
            #[derive(Serialize)]
            struct Slow {
                family: ScaleFamily,
                t: Vec<f64>,
                rows: Vec<scalent_core::scaling::SlowEntropyRow>,
                thresholds: Thresholds,
            }
            ctx.report_as(&out, Report::new("scale-slow", "grid-proxy", false, &Slow { family, t: ts, rows, thresholds: th })?.with_unit("t"))?;
            Ok(0)
        }
        ScaleCmd::Exp { profile, out } => {
            let p = load_profile(&profile)?;
            ctx.emit(&out, &exp_profile(&p)?.to_csv())?;
            Ok(0)
        }
        ScaleCmd::Plot { profile, linear, out } => {
            let p = load_profile(&profile)?;
            let svg = profile_svg(&p, !linear).map_err(CliError::validation)?;
            ctx.emit(&out, &svg)?;
            Ok(0)
        }
    }
}
