use scalent_core::io::load_triple;
use scalent_core::report::Report;
use scalent_core::transport::{dist_k, dist_m, dist_pair, DistMode, DistOptions};
use serde::Serialize;

use crate::args::DistCmd;
use crate::ctx::{CliError, CliResult, Ctx};

/// Tolerance for the `dist_k <= dist_m <= 2 dist_k` check.
const SANDWICH_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct Both {
    dist_m: f64,
    dist_k: f64,
    sandwich_holds: bool,
    detail: scalent_core::transport::DistPair,
}

pub fn run(cmd: DistCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        DistCmd::Pair { a, b, metric, mode, budget, out } => {
            let (t1, t2) = (load_triple(&a)?, load_triple(&b)?);
            let mode = match mode.as_str() {
                "exact" | "exact-tiny" => DistMode::ExactTiny,
                "heur" | "heuristic" => DistMode::Heuristic,
                other => return Err(CliError::usage(format!("unknown mode '{other}', expected exact or heur"))),
            };
            let opts = DistOptions { mode, restarts: budget, seed: ctx.seed };
            let exact = mode == DistMode::ExactTiny;
            let name = if exact { "exact-tiny" } else { "heuristic" };
            let report = match metric.as_str() {
                "distm" => Report::new("dist-m", name, exact, &dist_m(&t1, &t2, &opts)?)?,
                "distk" => Report::new("dist-k", name, exact, &dist_k(&t1, &t2, &opts)?)?,
                "both" => {
                    let p = dist_pair(&t1, &t2, &opts)?;
                    let both = Both { dist_m: p.dist_m.value, dist_k: p.dist_k.value, sandwich_holds: p.sandwich_holds(SANDWICH_TOL), detail: p };
                    Report::new("dist-pair", name, exact, &both)?
                }
                other => return Err(CliError::usage(format!("unknown metric '{other}', expected distm, distk or both"))),
            };
            let report = if exact { report } else { report.with_seed(ctx.seed) };
            ctx.report_as(&out, report.with_unit("distance"))?;
            Ok(0)
        }
    }
}
