//! Asymptotic class fitting and the grid functionals built on it.

use serde::{Deserialize, Serialize};

use super::profile::EntropyProfile;
use super::Thresholds;
use crate::systems::SigmaSchedule;
use crate::{Error, Result};

/// Candidate growth classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Candidate {
    Bounded,
    /// `(log n)^a`.
    LogPower,
    /// `n^s`, `0 < s < 1`.
    Power,
    Linear,
    /// `2^(sigma_1 + ... + sigma_floor(log2 n))`.
    Adic(Vec<u8>),
    /// `exp(c n)`.
    Exp,
}

impl Candidate {
    pub fn name(&self) -> &'static str {
        match self {
            Candidate::Bounded => "bounded",
            Candidate::LogPower => "log-power",
            Candidate::Power => "power",
            Candidate::Linear => "linear",
            Candidate::Adic(_) => "adic",
            Candidate::Exp => "exp",
        }
    }

    /// `auto`, or a comma list of `bounded`, `log`, `power`, `linear`, `exp`,
    /// and `adic=1/0/1` (schedule entries separated by `/`).
    pub fn parse_list(s: &str) -> Result<Vec<Candidate>> {
        if s.trim() == "auto" {
            return Ok(Self::auto());
        }
        s.split(',')
            .map(|c| match c.trim() {
                "bounded" => Ok(Candidate::Bounded),
                "log" | "log-power" => Ok(Candidate::LogPower),
                "power" => Ok(Candidate::Power),
                "linear" => Ok(Candidate::Linear),
                "exp" => Ok(Candidate::Exp),
                other => match other.strip_prefix("adic=") {
                    Some(sig) => {
                        let v: Vec<u8> = sig
                            .split('/')
                            .map(|b| b.parse().map_err(|_| Error::Value(format!("bad schedule entry '{b}'"))))
                            .collect::<Result<_>>()?;
                        SigmaSchedule::new(v.clone())?;
                        Ok(Candidate::Adic(v))
                    }
                    None => Err(Error::Value(format!("unknown class '{other}'"))),
                },
            })
            .collect()
    }

    pub fn auto() -> Vec<Candidate> {
        vec![Candidate::Bounded, Candidate::LogPower, Candidate::Power, Candidate::Linear, Candidate::Exp]
    }
}

/// The class assigned to one `eps` row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum ClassLabel {
    Bounded,
    LogPower { a: f64 },
    Power { s: f64 },
    Linear,
    Adic,
    Exp { c: f64 },
    /// Outside the candidate family; the raw fit is kept.
    Custom { fit: String, params: Vec<f64> },
}

impl ClassLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            ClassLabel::Bounded => "bounded",
            ClassLabel::LogPower { .. } => "log-power",
            ClassLabel::Power { .. } => "power",
            ClassLabel::Linear => "linear",
            ClassLabel::Adic => "adic",
            ClassLabel::Exp { .. } => "exp",
            ClassLabel::Custom { .. } => "custom",
        }
    }
}

impl std::fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassLabel::Bounded => write!(f, "bounded"),
            ClassLabel::LogPower { a } => write!(f, "(log n)^{a:.2}"),
            ClassLabel::Power { s } => write!(f, "n^{s:.2}"),
            ClassLabel::Linear => write!(f, "n"),
            ClassLabel::Adic => write!(f, "2^sigma"),
            ClassLabel::Exp { c } => write!(f, "exp({c:.3} n)"),
            ClassLabel::Custom { fit, params } => write!(f, "custom {fit} {params:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateFit {
    pub candidate: String,
    /// Root-mean-square error of the fitted curve over the mean of `H`.
    pub residual: f64,
    pub params: Vec<f64>,
    pub label: ClassLabel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Stable,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsFit {
    pub eps: f64,
    pub label: ClassLabel,
    pub residual: f64,
    /// Runner-up with a residual within the tie ratio, if any.
    pub tie: Option<ClassLabel>,
    pub n_min: usize,
    pub n_max: usize,
    pub points: usize,
    pub fits: Vec<CandidateFit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticClassReport {
    pub system: String,
    pub per_eps: Vec<EpsFit>,
    pub consistency: Verdict,
}

fn line_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx <= 1e-300 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

fn rel_rms(h: &[f64], pred: &[f64]) -> f64 {
    let k = h.len() as f64;
    let mean = h.iter().map(|v| v.abs()).sum::<f64>() / k;
    let rms = (h.iter().zip(pred).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / k).sqrt();
    if mean == 0.0 {
        if rms == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        rms / mean
    }
}

fn adic_exponent(sigma: &[u8], n: usize) -> Option<f64> {
    let k = (usize::BITS - 1 - n.max(1).leading_zeros()) as usize;
    if k > sigma.len() {
        return None;
    }
    Some(sigma[..k].iter().map(|&b| b as f64).sum())
}

fn fit_one(c: &Candidate, ns: &[f64], h: &[f64], th: &Thresholds) -> Option<CandidateFit> {
    let positive = h.iter().all(|&v| v > 0.0);
    let (pred, params, label): (Vec<f64>, Vec<f64>, ClassLabel) = match c {
        Candidate::Bounded => {
            let m = h.iter().sum::<f64>() / h.len() as f64;
            (vec![m; h.len()], vec![m], ClassLabel::Bounded)
        }
        Candidate::LogPower => {
            if !positive || ns.iter().any(|&n| n < 2.0) {
                return None;
            }
            let x: Vec<f64> = ns.iter().map(|n| n.ln().ln()).collect();
            let y: Vec<f64> = h.iter().map(|v| v.ln()).collect();
            let (a, b) = line_fit(&x, &y)?;
            let pred = ns.iter().map(|n| b.exp() * n.ln().powf(a)).collect();
            let label = if a > 0.0 { ClassLabel::LogPower { a } } else { custom("log-power", &[a, b]) };
            (pred, vec![a, b.exp()], label)
        }
        Candidate::Power => {
            if !positive {
                return None;
            }
            let x: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
            let y: Vec<f64> = h.iter().map(|v| v.ln()).collect();
            let (s, b) = line_fit(&x, &y)?;
            let pred = ns.iter().map(|n| b.exp() * n.powf(s)).collect();
            let label = if s <= 0.0 || s > 2.0 - th.linear_exponent {
                custom("power", &[s, b.exp()])
            } else if s >= th.linear_exponent {
                ClassLabel::Linear
            } else {
                ClassLabel::Power { s }
            };
            (pred, vec![s, b.exp()], label)
        }
        Candidate::Linear => {
            let (a, b) = line_fit(ns, h)?;
            let pred = ns.iter().map(|n| a * n + b).collect();
            let label = if a > 0.0 { ClassLabel::Linear } else { custom("linear", &[a, b]) };
            (pred, vec![a, b], label)
        }
        Candidate::Exp => {
            if !positive {
                return None;
            }
            let y: Vec<f64> = h.iter().map(|v| v.ln()).collect();
            let (cc, b) = line_fit(ns, &y)?;
            let pred = ns.iter().map(|n| (b + cc * n).exp()).collect();
            let label = if cc > 0.0 { ClassLabel::Exp { c: cc } } else { custom("exp", &[cc, b.exp()]) };
            (pred, vec![cc, b.exp()], label)
        }
        Candidate::Adic(sigma) => {
            let x: Vec<f64> =
                ns.iter().map(|&n| adic_exponent(sigma, n as usize).map(f64::exp2)).collect::<Option<_>>()?;
            let (a, b) = line_fit(&x, h)?;
            let pred = x.iter().map(|v| a * v + b).collect();
            let label = if a > 0.0 { ClassLabel::Adic } else { custom("adic", &[a, b]) };
            (pred, vec![a, b], label)
        }
    };
    Some(CandidateFit { candidate: c.name().into(), residual: rel_rms(h, &pred), params, label })
}

fn custom(fit: &str, params: &[f64]) -> ClassLabel {
    ClassLabel::Custom { fit: fit.into(), params: params.to_vec() }
}

/// Fits every candidate to each `eps` row (points with `n >= n_min`).
/// A constant fit within the bounded tolerance wins outright; otherwise the
/// smallest residual wins and a runner-up of a different class within the
/// tie ratio makes the row inconclusive.
pub fn fit_class(p: &EntropyProfile, candidates: &[Candidate], n_min: usize, th: &Thresholds) -> Result<AsymptoticClassReport> {
    if candidates.is_empty() {
        return Err(Error::Value("no candidate classes".into()));
    }
    let mut per_eps = Vec::new();
    for eps in p.eps_values() {
        let pts: Vec<(usize, f64)> = p.series(eps).into_iter().filter(|&(n, _)| n >= n_min).collect();
        if pts.len() < th.min_points {
            return Err(Error::InsufficientData(format!(
                "eps {eps}: {} grid points with n >= {n_min}, at least {} needed",
                pts.len(),
                th.min_points
            )));
        }
        let ns: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
        let h: Vec<f64> = pts.iter().map(|p| p.1).collect();
        let fits: Vec<CandidateFit> = candidates.iter().filter_map(|c| fit_one(c, &ns, &h, th)).collect();
        let bounded = fits.iter().find(|f| f.candidate == "bounded" && f.residual <= th.bounded_tol);
        let (best, tie) = match bounded {
            Some(b) => (b.clone(), None),
            None => {
                let mut ranked: Vec<&CandidateFit> = fits.iter().filter(|f| f.candidate != "bounded" || fits.len() == 1).collect();
                if ranked.is_empty() {
                    ranked = fits.iter().collect();
                }
                ranked.sort_by(|a, b| a.residual.total_cmp(&b.residual));
                let best = ranked
                    .first()
                    .ok_or_else(|| Error::InsufficientData(format!("eps {eps}: no candidate applies")))?;
                let tie = ranked
                    .iter()
                    .skip(1)
                    .find(|f| f.label.kind() != best.label.kind() && f.residual <= best.residual * th.tie_ratio + 1e-15)
                    .map(|f| f.label.clone());
                ((*best).clone(), tie)
            }
        };
        per_eps.push(EpsFit {
            eps,
            label: best.label.clone(),
            residual: best.residual,
            tie,
            n_min: pts[0].0,
            n_max: pts[pts.len() - 1].0,
            points: pts.len(),
            fits,
        });
    }
    let consistency = label_agreement(&per_eps);
    Ok(AsymptoticClassReport { system: p.system.clone(), per_eps, consistency })
}

fn label_agreement(rows: &[EpsFit]) -> Verdict {
    if rows.iter().any(|r| r.tie.is_some()) {
        Verdict::Inconclusive
    } else if rows.iter().all(|r| r.label.kind() == rows[0].label.kind()) {
        Verdict::Stable
    } else {
        Verdict::Unstable
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub verdict: Verdict,
    pub labels: Vec<(f64, String)>,
    /// Largest over smallest `H` across `eps` at the largest common `n`.
    pub ratio: f64,
    pub n: usize,
}

/// Stable when every `eps` row gets the same class and the rows stay within
/// the ratio factor of each other at the largest common `n`.
pub fn stability_check(p: &EntropyProfile, candidates: &[Candidate], n_min: usize, th: &Thresholds) -> Result<StabilityReport> {
    let eps = p.eps_values();
    if eps.len() < 2 {
        return Err(Error::InsufficientData("stability needs at least two eps rows".into()));
    }
    let report = fit_class(p, candidates, n_min, th)?;
    let common = eps
        .iter()
        .map(|&e| p.series(e).into_iter().map(|x| x.0).collect::<std::collections::BTreeSet<_>>())
        .reduce(|a, b| a.intersection(&b).copied().collect())
        .and_then(|s| s.last().copied())
        .ok_or_else(|| Error::InsufficientData("rows share no n".into()))?;
    let vals: Vec<f64> = eps.iter().map(|&e| p.get(e, common).unwrap().h).collect();
    let (lo, hi) = vals.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &v| (l.min(v), h.max(v)));
    let ratio = if hi == 0.0 {
        1.0
    } else if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    };
    let verdict = match report.consistency {
        Verdict::Stable if ratio <= th.stability_ratio => Verdict::Stable,
        Verdict::Stable | Verdict::Unstable => Verdict::Unstable,
        Verdict::Inconclusive => Verdict::Inconclusive,
    };
    Ok(StabilityReport {
        verdict,
        labels: report.per_eps.iter().map(|r| (r.eps, r.label.to_string())).collect(),
        ratio,
        n: common,
    })
}

fn tail<T: Copy>(pts: &[T], window: usize) -> &[T] {
    let keep = pts.len().div_ceil(2).max(window).min(pts.len());
    &pts[pts.len() - keep..]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionRow {
    pub eps: f64,
    pub upper: f64,
    pub lower: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyDimension {
    pub rows: Vec<DimensionRow>,
    /// Values at the smallest `eps`.
    pub upper: f64,
    pub lower: f64,
}

/// Slopes of `log H` against `log n` over sliding windows of the grid tail,
/// clamped to `[0, 1]`; the largest is the upper value, the smallest the
/// lower one.
pub fn entropy_dimension(p: &EntropyProfile, n_min: usize, th: &Thresholds) -> Result<EntropyDimension> {
    let mut rows = Vec::new();
    for eps in p.eps_values() {
        let pts: Vec<(usize, f64)> = p.series(eps).into_iter().filter(|&(n, _)| n >= n_min).collect();
        if pts.len() < th.min_points {
            return Err(Error::InsufficientData(format!("eps {eps}: {} grid points, {} needed", pts.len(), th.min_points)));
        }
        let t = tail(&pts, th.tail_window);
        let slopes: Vec<f64> = t
            .windows(th.tail_window.min(t.len()))
            .map(|w| {
                if w.iter().any(|&(_, h)| h <= 0.0) {
                    return 0.0;
                }
                let x: Vec<f64> = w.iter().map(|&(n, _)| (n as f64).ln()).collect();
                let y: Vec<f64> = w.iter().map(|&(_, h)| h.ln()).collect();
                line_fit(&x, &y).map_or(0.0, |(s, _)| s.clamp(0.0, 1.0))
            })
            .collect();
        let upper = slopes.iter().copied().fold(0.0, f64::max);
        let lower = slopes.iter().copied().fold(1.0, f64::min);
        rows.push(DimensionRow { eps, upper, lower: lower.min(upper) });
    }
    let first = rows.first().cloned().ok_or_else(|| Error::InsufficientData("empty profile".into()))?;
    Ok(EntropyDimension { upper: first.upper, lower: first.lower, rows })
}

/// Scale families `a_n(t)`, all non-decreasing in `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleFamily {
    /// `n^t`.
    Power,
    /// `exp(t n)`.
    Exp,
    /// `(log n)^t`.
    LogPower,
    /// The constant `t`.
    Constant,
}

impl std::str::FromStr for ScaleFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "power" => Ok(ScaleFamily::Power),
            "exp" => Ok(ScaleFamily::Exp),
            "log-power" => Ok(ScaleFamily::LogPower),
            "constant" => Ok(ScaleFamily::Constant),
            other => Err(Error::Value(format!("unknown scale family '{other}'"))),
        }
    }
}

impl ScaleFamily {
    /// `ln a_n(t)`.
    pub fn ln_scale(self, n: usize, t: f64) -> f64 {
        let n = n as f64;
        match self {
            ScaleFamily::Power => t * n.ln(),
            ScaleFamily::Exp => t * n,
            ScaleFamily::LogPower => t * n.ln().max(f64::MIN_POSITIVE).ln(),
            ScaleFamily::Constant => t.ln(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlowEntropyRow {
    pub eps: f64,
    /// Largest grid `t` whose ratio stays bounded below on some tail window.
    pub upper: f64,
    /// Largest grid `t` whose ratio stays bounded below on every tail window.
    pub lower: f64,
    /// The bound held at the largest `t` of the grid.
    pub upper_unbounded: bool,
    pub lower_unbounded: bool,
}

/// Grid proxy of slow entropy: `exp(H) / a_n(t)` counts as bounded away
/// from zero on a window when `log` of it does not fall against
/// `log a_n(t)` faster than the slope tolerance (or, for scales constant in
/// `n`, when `H` does not drop by more than the slack).
pub fn slow_entropy(
    p: &EntropyProfile,
    family: ScaleFamily,
    ts: &[f64],
    n_min: usize,
    th: &Thresholds,
) -> Result<Vec<SlowEntropyRow>> {
    let to_nats = match p.unit.as_str() {
        "nats" => 1.0,
        "bits" => std::f64::consts::LN_2,
        other => return Err(Error::Value(format!("slow entropy needs an entropy profile, got '{other}'"))),
    };
    let mut ts = ts.to_vec();
    ts.sort_by(f64::total_cmp);
    if ts.is_empty() {
        return Err(Error::Value("empty t grid".into()));
    }
    let ns: Vec<usize> = p.records.iter().map(|r| r.n).filter(|&n| n >= n_min).collect();
    for w in ts.windows(2) {
        for &n in &ns {
            let (a, b) = (family.ln_scale(n, w[0]), family.ln_scale(n, w[1]));
            if !(b >= a) {
                return Err(Error::Value(format!("scale family is not monotone in t at n = {n}")));
            }
        }
    }
    if family == ScaleFamily::Constant && ts[0] <= 0.0 {
        return Err(Error::Value("constant scales need t > 0".into()));
    }
    let mut rows = Vec::new();
    for eps in p.eps_values() {
        let pts: Vec<(usize, f64)> =
            p.series(eps).into_iter().filter(|&(n, _)| n >= n_min).map(|(n, h)| (n, h * to_nats)).collect();
        if pts.len() < th.min_points {
            return Err(Error::InsufficientData(format!("eps {eps}: {} grid points, {} needed", pts.len(), th.min_points)));
        }
        let t_pts = tail(&pts, th.tail_window);
        let windows: Vec<&[(usize, f64)]> = t_pts.windows(th.tail_window.min(t_pts.len())).collect();
        let ok = |w: &[(usize, f64)], t: f64| -> bool {
            let x: Vec<f64> = w.iter().map(|&(n, _)| family.ln_scale(n, t)).collect();
            let l: Vec<f64> = w.iter().zip(&x).map(|(&(_, h), xi)| h - xi).collect();
            match line_fit(&x, &l) {
                Some((slope, _)) => slope >= -th.slow_slope_tol,
                None => l[l.len() - 1] >= l[0] - th.subadditivity_slack,
            }
        };
        let mut upper = (0.0, false);
        let mut lower = (0.0, false);
        for (k, &t) in ts.iter().enumerate() {
            let last = k + 1 == ts.len();
            if windows.iter().any(|w| ok(w, t)) {
                upper = if last { (f64::INFINITY, true) } else { (t, false) };
            }
            if windows.iter().all(|w| ok(w, t)) {
                lower = if last { (f64::INFINITY, true) } else { (t, false) };
            }
        }
        rows.push(SlowEntropyRow { eps, upper: upper.0, lower: lower.0, upper_unbounded: upper.1, lower_unbounded: lower.1 });
    }
    Ok(rows)
}
