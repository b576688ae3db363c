use scalent_core::entropy::shannon;
use scalent_core::io::format_triple;
use scalent_core::report::Report;
use scalent_core::systems::{averaged_triple, centrality_holds, Descriptor, Realization, SymbolicSystem, SystemKind};
use scalent_core::{rng, FiniteMetricTriple};
use serde::Serialize;

use crate::args::SystemCmd;
use crate::cache::cached;
use crate::ctx::{CliError, CliResult, Ctx};
use crate::source::{descriptor, symbolic};

#[derive(Serialize)]
struct FactorCount {
    n: usize,
    count: Option<usize>,
    exact: Option<bool>,
    error: Option<String>,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum Facts {
    Bernoulli {
        alphabet: usize,
        entropy: f64,
    },
    Substitution {
        alphabet: usize,
        rules: Vec<String>,
        primitive: bool,
        injective: bool,
        constant_length: Option<usize>,
        column_number: Option<usize>,
        height: Option<usize>,
        prefix_len: usize,
    },
    Adic {
        schedule: Vec<u8>,
        /// `log2 |V_k|` for `k = 0..=levels`.
        log2_level_sizes: Vec<String>,
        /// Checked for levels small enough to enumerate.
        centrality: Vec<(usize, bool)>,
    },
    Product {
        factors: Vec<String>,
    },
    Rotation {
        alpha: f64,
    },
}

#[derive(Serialize)]
struct SystemInfo {
    system: String,
    facts: Facts,
    factors: Vec<FactorCount>,
}

/// Largest adic level whose words are enumerated for the centrality check.
const CENTRALITY_LEVELS: usize = 6;

fn facts(s: &SymbolicSystem, ctx: &Ctx) -> CliResult<Facts> {
    Ok(match &s.kind {
        SystemKind::Bernoulli(p) => Facts::Bernoulli { alphabet: p.len(), entropy: ctx.conv(shannon(p.as_slice())) },
        SystemKind::Substitution(sub) => {
            let constant_length = sub.constant_length();
            Facts::Substitution {
                alphabet: sub.alphabet_size(),
                rules: sub
                    .letters()
                    .iter()
                    .zip(sub.rules())
                    .map(|(c, r)| format!("{c}={}", sub.render(r)))
                    .collect(),
                primitive: sub.is_primitive(),
                injective: sub.is_injective(),
                constant_length,
                column_number: constant_length.and_then(|_| sub.column_number(12).ok()),
                height: constant_length.and_then(|_| sub.height().ok()),
                prefix_len: sub.prefix().len(),
            }
        }
        SystemKind::Adic(a) => {
            let levels = a.sigma.levels();
            let log2_level_sizes =
                (0..=levels).map(|k| a.sigma.log2_size(k).map(|v| v.to_string()).unwrap_or_else(|e| e.to_string())).collect();
            let mut centrality = Vec::new();
            for k in 0..levels.min(CENTRALITY_LEVELS) {
                centrality.push((k, centrality_holds(a, k)?));
            }
            Facts::Adic { schedule: a.sigma.entries().to_vec(), log2_level_sizes, centrality }
        }
        SystemKind::Product(ch) => Facts::Product { factors: ch.iter().map(|c| c.name().to_string()).collect() },
    })
}

fn factor_counts(s: &SymbolicSystem, lengths: &[usize], cap: usize) -> Vec<FactorCount> {
    lengths
        .iter()
        .map(|&n| match s.window_law(n, cap) {
            Ok(law) => FactorCount { n, count: Some(law.words.len()), exact: Some(law.exact), error: None },
            Err(e) => FactorCount { n, count: None, exact: None, error: Some(e.to_string()) },
        })
        .collect()
}

/// The averaged triple at horizon `n`, through the cache when one is set.
pub fn system_triple(s: &SymbolicSystem, n: usize, realization: Realization, ctx: &Ctx) -> CliResult<FiniteMetricTriple> {
    let real = format!("{realization:?}");
    let (n_s, p) = (n.to_string(), ctx.prefix_len.to_string());
    Ok(cached(ctx.cache.as_ref(), "system-triple", &[s.name(), &n_s, &real, &p], || averaged_triple(s, n, realization))?)
}

pub fn run(cmd: SystemCmd, ctx: &mut Ctx) -> CliResult<i32> {
    match cmd {
        SystemCmd::Info { system, lengths, out } => {
            let info = match descriptor(&system, ctx)? {
                Descriptor::Symbolic(s) => {
                    SystemInfo { system: s.name().into(), facts: facts(&s, ctx)?, factors: factor_counts(&s, &lengths, ctx.exact_cap) }
                }
                Descriptor::Rotation(alpha) => SystemInfo { system: system.clone(), facts: Facts::Rotation { alpha }, factors: Vec::new() },
                _ => return Err(CliError::validation(format!("'{system}' is not a system"))),
            };
            ctx.report(&out, Report::new("system-info", "direct", true, &info)?)?;
            Ok(0)
        }
        SystemCmd::Law { system, n, out } => {
            let s = symbolic(&system, ctx)?;
            let law = s.window_law(n, ctx.exact_cap)?;
            #[derive(Serialize)]
            struct Law {
                system: String,
                n: usize,
                windows: Vec<(String, f64)>,
                entropy: f64,
            }
            let entropy = ctx.conv(shannon(&law.probs));
            let windows = law.words.iter().map(|w| s.render_window(w, n)).zip(law.probs.iter().copied()).collect();
            let result = Law { system: s.name().into(), n, windows, entropy };
            let method = if law.exact { "enumeration" } else { "prefix-counts" };
            ctx.report(&out, Report::new("system-law", method, law.exact, &result)?)?;
            Ok(0)
        }
        SystemCmd::Triple { system, n, realization, m, out } => {
            let t = match descriptor(&system, ctx)? {
                Descriptor::Symbolic(s) => {
                    let real = Realization::parse(&realization, ctx.exact_cap, ctx.seed)?;
                    if let Realization::MonteCarlo { .. } = real {
                        ctx.cell(format!("n {n}"), rng::key(ctx.seed, "sample", n as u64, 0));
                    }
                    system_triple(&s, n, real, ctx)?
                }
                Descriptor::Rotation(a) => scalent_core::systems::RotationTriple::new(a, m)?.triple(n)?,
                _ => return Err(CliError::validation(format!("'{system}' is not a system"))),
            };
            let text = format!("# {system} at horizon {n}, {realization}\n{}", format_triple(&t));
            ctx.emit(&out, &text)?;
            Ok(0)
        }
    }
}
