//! Entropy profiles `Phi(eps, n)` and their CSV form.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{eps_entropy_with, CoverConfig, EpsMethod};
use crate::metric::FiniteMetricTriple;
use crate::systems::{averaged_triple, omega_truncated, Realization, RotationTriple, SymbolicSystem};
use crate::{rng, Error, LogBase, Result};

pub const PROFILE_SCHEMA: &str = "scalent-profile-v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub eps: f64,
    pub n: usize,
    /// Entropy (or its exponential for exp profiles); NaN for failed cells.
    pub h: f64,
    pub method: String,
    /// Monte Carlo replicas; 0 for exact window laws.
    pub replicas: usize,
    pub seed: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// True when `h` is exact for the realized triple.
    pub exact: bool,
    pub error: Option<String>,
}

impl ProfileRecord {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.h.is_finite()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    pub system: String,
    /// `nats`, `bits`, or `exp` after exponentiation.
    pub unit: String,
    pub records: Vec<ProfileRecord>,
}

impl EntropyProfile {
    pub fn eps_values(&self) -> Vec<f64> {
        let mut e: Vec<f64> = self.records.iter().map(|r| r.eps).collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    }

    /// Successful `(n, H)` pairs for one `eps`, sorted by `n`.
    pub fn series(&self, eps: f64) -> Vec<(usize, f64)> {
        let mut s: Vec<(usize, f64)> = self.records.iter().filter(|r| r.eps == eps && r.ok()).map(|r| (r.n, r.h)).collect();
        s.sort_by_key(|p| p.0);
        s
    }

    pub fn get(&self, eps: f64, n: usize) -> Option<&ProfileRecord> {
        self.records.iter().find(|r| r.eps == eps && r.n == n)
    }

    /// Converts a nats profile to `base`.
    pub fn in_base(&self, base: LogBase) -> Result<EntropyProfile> {
        if self.unit != "nats" {
            return Err(Error::Value(format!("cannot convert a '{}' profile", self.unit)));
        }
        let mut p = self.clone();
        for r in &mut p.records {
            r.h = base.convert(r.h);
            r.ci_low = base.convert(r.ci_low);
            r.ci_high = base.convert(r.ci_high);
        }
        p.unit = base.tag().into();
        Ok(p)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("# schema: {PROFILE_SCHEMA}\n# system: {}\n# unit: {}\n", self.system, self.unit);
        for r in &self.records {
            if let Some(e) = &r.error {
                out.push_str(&format!("# error: eps={:?} n={}: {}\n", r.eps, r.n, e.replace('\n', " ")));
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eps", "n", "H", "method", "replicas", "seed", "ci_low", "ci_high"]).unwrap();
        for r in &self.records {
            let method = if r.exact || r.error.is_some() { r.method.clone() } else { format!("{}~", r.method) };
            w.write_record([
                format!("{:?}", r.eps),
                r.n.to_string(),
                format!("{:?}", r.h),
                method,
                r.replicas.to_string(),
                r.seed.to_string(),
                format!("{:?}", r.ci_low),
                format!("{:?}", r.ci_high),
            ])
            .unwrap();
        }
        out.push_str(&String::from_utf8(w.into_inner().unwrap()).unwrap());
        out
    }

    pub fn from_csv(text: &str) -> Result<EntropyProfile> {
        let mut system = String::new();
        let mut unit = "nats".to_string();
        let mut errors: BTreeMap<(u64, usize), String> = BTreeMap::new();
        for line in text.lines() {
            let Some(c) = line.strip_prefix('#') else { continue };
            let c = c.trim();
            if let Some(v) = c.strip_prefix("schema:") {
                if v.trim() != PROFILE_SCHEMA {
                    return Err(Error::Value(format!("unsupported profile schema '{}'", v.trim())));
                }
            } else if let Some(v) = c.strip_prefix("system:") {
                system = v.trim().to_string();
            } else if let Some(v) = c.strip_prefix("unit:") {
                unit = v.trim().to_string();
            } else if let Some(v) = c.strip_prefix("error:") {
                let parsed = (|| {
                    let (cell, msg) = v.trim().split_once(": ")?;
                    let (e, n) = cell.split_once(' ')?;
                    let eps: f64 = e.strip_prefix("eps=")?.parse().ok()?;
                    let n: usize = n.strip_prefix("n=")?.parse().ok()?;
                    Some(((eps.to_bits(), n), msg.to_string()))
                })();
                if let Some((k, m)) = parsed {
                    errors.insert(k, m);
                }
            }
        }
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?.clone();
        let want = ["eps", "n", "H", "method", "replicas", "seed", "ci_low", "ci_high"];
        if headers.iter().collect::<Vec<_>>() != want {
            return Err(Error::Parse { line: 1, msg: format!("expected columns {}", want.join(",")) });
        }
        let mut records = Vec::new();
        for (i, row) in rdr.records().enumerate() {
            let row = row.map_err(|e| Error::Parse { line: i + 2, msg: e.to_string() })?;
            let bad = |what: &str| Error::Parse { line: i + 2, msg: format!("bad {what}") };
            let num = |k: usize, what: &str| row[k].parse::<f64>().map_err(|_| bad(what));
            let eps = num(0, "eps")?;
            let n: usize = row[1].parse().map_err(|_| bad("n"))?;
            let (method, exact) = match row[3].strip_suffix('~') {
                Some(m) => (m.to_string(), false),
                None => (row[3].to_string(), true),
            };
            records.push(ProfileRecord {
                eps,
                n,
                h: num(2, "H")?,
                method,
                replicas: row[4].parse().map_err(|_| bad("replicas"))?,
                seed: row[5].parse().map_err(|_| bad("seed"))?,
                ci_low: num(6, "ci_low")?,
                ci_high: num(7, "ci_high")?,
                exact,
                error: errors.get(&(eps.to_bits(), n)).cloned(),
            });
        }
        if records.is_empty() {
            return Err(Error::InsufficientData("profile has no rows".into()));
        }
        Ok(EntropyProfile { system, unit, records })
    }
}

/// What a grid is computed over.
#[derive(Clone, Debug)]
pub enum GridSource<'a> {
    /// The averaged metric of a symbolic system.
    Averaged(&'a SymbolicSystem),
    /// The partition-function metric at `z = 1 - 1/n`, keeping the first
    /// `min(n, max_terms)` shifts; the neglected tail is at most `z^terms`.
    Omega { system: &'a SymbolicSystem, max_terms: usize },
    Rotation(RotationTriple),
}

impl GridSource<'_> {
    pub fn describe(&self) -> String {
        match self {
            GridSource::Averaged(s) => s.name().to_string(),
            GridSource::Omega { system, max_terms } => format!("omega({};terms<={max_terms})", system.name()),
            GridSource::Rotation(r) => format!("rotation:{:?}@{}", r.alpha, r.m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GridOptions {
    pub method: EpsMethod,
    /// `Exact { cap }` or Monte Carlo with `m` windows per replica.
    pub realization: Realization,
    /// Replicas for Monte Carlo realizations.
    pub replicas: usize,
    pub seed: u64,
    pub cover: CoverConfig,
}

impl Default for GridOptions {
    fn default() -> Self {
        GridOptions { method: EpsMethod::Exact, realization: Realization::exact(), replicas: 1, seed: 0, cover: CoverConfig::default() }
    }
}

fn realize(src: &GridSource, n: usize, realization: Realization) -> Result<FiniteMetricTriple> {
    match src {
        GridSource::Averaged(s) => averaged_triple(s, n, realization),
        GridSource::Omega { system, max_terms } => {
            let z = 1.0 - 1.0 / n as f64;
            Ok(omega_truncated(system, z, n.min(*max_terms).max(1), realization)?.triple)
        }
        GridSource::Rotation(r) => r.triple(n),
    }
}

struct Cell {
    values: Vec<f64>,
    exact: bool,
}

/// `Phi(eps, n)` over a grid. Failed cells carry their error instead of a
/// value. Replica `r` at horizon `n` uses a seed derived from
/// `(seed, n, r)`, so the grid does not depend on scheduling.
pub fn phi_grid(src: &GridSource, eps_list: &[f64], n_list: &[usize], opts: &GridOptions) -> Result<EntropyProfile> {
    if eps_list.is_empty() || n_list.is_empty() {
        return Err(Error::Value("eps and n grids must be nonempty".into()));
    }
    let mc = matches!(opts.realization, Realization::MonteCarlo { .. });
    let replicas = if mc { opts.replicas.max(1) } else { 1 };
    let jobs: Vec<(usize, usize)> = n_list.iter().flat_map(|&n| (0..replicas).map(move |r| (n, r))).collect();
    let triples: Vec<std::result::Result<FiniteMetricTriple, String>> = jobs
        .par_iter()
        .map(|&(n, r)| {
            let real = match opts.realization {
                Realization::MonteCarlo { m, .. } => {
                    Realization::MonteCarlo { m, seed: rng::key(opts.seed, "grid", n as u64, r as u64) }
                }
                exact => exact,
            };
            realize(src, n, real).map(|t| t.quotient_zero_blocks()).map_err(|e| e.to_string())
        })
        .collect();
    let cells: Vec<(f64, usize)> = eps_list.iter().flat_map(|&e| n_list.iter().map(move |&n| (e, n))).collect();
    let results: Vec<std::result::Result<Cell, String>> = cells
        .par_iter()
        .map(|&(eps, n)| {
            let mut values = Vec::with_capacity(replicas);
            let mut exact = true;
            for (k, &(jn, _)) in jobs.iter().enumerate() {
                if jn != n {
                    continue;
                }
                let t = triples[k].as_ref().map_err(Clone::clone)?;
                let r = eps_entropy_with(t, eps, opts.method, &opts.cover).map_err(|e| e.to_string())?;
                exact &= r.exact;
                values.push(r.value);
            }
            Ok(Cell { values, exact: exact && !mc })
        })
        .collect();
    let mut records = Vec::with_capacity(cells.len());
    for (&(eps, n), res) in cells.iter().zip(results) {
        let base = ProfileRecord {
            eps,
            n,
            h: f64::NAN,
            method: opts.method.name().into(),
            replicas: if mc { replicas } else { 0 },
            seed: opts.seed,
            ci_low: f64::NAN,
            ci_high: f64::NAN,
            exact: false,
            error: None,
        };
        records.push(match res {
            Ok(c) => {
                let k = c.values.len() as f64;
                let mean = c.values.iter().sum::<f64>() / k;
                let half = if c.values.len() > 1 {
                    let var = c.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
                    1.96 * (var / k).sqrt()
                } else {
                    0.0
                };
                ProfileRecord { h: mean, ci_low: (mean - half).max(0.0), ci_high: mean + half, exact: c.exact, ..base }
            }
            Err(e) => ProfileRecord { error: Some(e), ..base },
        });
    }
    records.sort_by(|a, b| a.eps.total_cmp(&b.eps).then(a.n.cmp(&b.n)));
    Ok(EntropyProfile { system: src.describe(), unit: "nats".into(), records })
}

/// Pointwise `exp(H)` in the profile's base. Exact cells are part counts,
/// so they are rounded to the nearest integer.
pub fn exp_profile(p: &EntropyProfile) -> Result<EntropyProfile> {
    let f = match p.unit.as_str() {
        "nats" => |x: f64| x.exp(),
        "bits" => |x: f64| x.exp2(),
        other => return Err(Error::Value(format!("cannot exponentiate a '{other}' profile"))),
    };
    let mut q = p.clone();
    for r in &mut q.records {
        let g = |x: f64| if r.exact && r.replicas == 0 { f(x).round() } else { f(x) };
        (r.h, r.ci_low, r.ci_high) = (g(r.h), g(r.ci_low), g(r.ci_high));
    }
    q.unit = "exp".into();
    Ok(q)
}

/// Cells where `H` increases with `eps` at fixed `n` (beyond `tol`).
pub fn monotonicity_violations(p: &EntropyProfile, tol: f64) -> Vec<(f64, f64, usize)> {
    let eps = p.eps_values();
    let mut out = Vec::new();
    for w in eps.windows(2) {
        for (n, h_lo) in p.series(w[0]) {
            if let Some(r) = p.get(w[1], n).filter(|r| r.ok()) {
                if r.h > h_lo + tol {
                    out.push((w[0], w[1], n));
                }
            }
        }
    }
    out
}

/// Grid triples `(n, m, n + m)` with `H(n + m) > H(n) + H(m) + slack`.
pub fn subadditivity_violations(p: &EntropyProfile, eps: f64, slack: f64) -> Vec<(usize, usize)> {
    let s: BTreeMap<usize, f64> = p.series(eps).into_iter().collect();
    let mut out = Vec::new();
    for (&a, &ha) in &s {
        for (&b, &hb) in s.range(a..) {
            if let Some(&hab) = s.get(&(a + b)) {
                if hab > ha + hb + slack {
                    out.push((a, b));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ProbabilityVector;

    #[test]
    fn rotation_rows_are_constant_and_large_eps_is_zero() {
        let src = GridSource::Rotation(RotationTriple::new(0.381966, 32).unwrap());
        let p = phi_grid(&src, &[0.1, 1.5], &[1, 3, 8], &GridOptions::default()).unwrap();
        let s = p.series(0.1);
        assert!(s.iter().all(|&(_, h)| h == s[0].1));
        assert!(p.series(1.5).iter().all(|&(_, h)| h == 0.0));
    }

    #[test]
    fn csv_round_trip_keeps_errors() {
        let s = SymbolicSystem::bernoulli(ProbabilityVector::uniform(2)).unwrap();
        let opts = GridOptions { realization: Realization::Exact { cap: 16 }, ..GridOptions::default() };
        let p = phi_grid(&GridSource::Averaged(&s), &[0.3], &[2, 4, 6], &opts).unwrap();
        assert!(p.get(0.3, 6).unwrap().error.is_some());
        let text = p.to_csv();
        let q = EntropyProfile::from_csv(&text).unwrap();
        assert_eq!(q.to_csv(), text);
        assert_eq!(q.series(0.3).len(), 2);
    }
}
