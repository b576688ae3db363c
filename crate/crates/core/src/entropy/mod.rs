//! Epsilon-entropy of finite triples and related estimates.
//!
//! The epsilon-entropy is `log k`, where `k` is the least number of parts of
//! diameter below `eps` covering everything outside a set of mass below
//! `eps`. For `eps >= 1` it is zero by convention.

mod admissible;
pub mod cover;
pub mod graph;
mod kantorovich;
mod subsample;

pub use admissible::{admissibility_event, AdmissibilityMethod, AdmissibilityResult};
pub use cover::{exact_cover, greedy_cover, packing_bound, Certificate, CoverConfig, CoverSolution};
pub use kantorovich::{hk_entropy, DiscreteApproximation, HkMode};
pub use subsample::{subsample_entropy_bounds, SubsampleRow, SubsampleScheme, SubsampleTable};

use serde::{Deserialize, Serialize};

use crate::metric::FiniteMetricTriple;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EpsMethod {
    Exact,
    Greedy,
    PackLb,
}

impl std::str::FromStr for EpsMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(EpsMethod::Exact),
            "greedy" => Ok(EpsMethod::Greedy),
            "pack-lb" => Ok(EpsMethod::PackLb),
            other => Err(Error::Value(format!("unknown entropy method '{other}'"))),
        }
    }
}

impl EpsMethod {
    pub fn name(self) -> &'static str {
        match self {
            EpsMethod::Exact => "exact",
            EpsMethod::Greedy => "greedy",
            EpsMethod::PackLb => "pack-lb",
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyResult {
    pub eps: f64,
    pub method: EpsMethod,
    /// Entropy in nats.
    pub value: f64,
    /// Part count (`exp(value)`); for `pack-lb` the bound on it.
    pub k: usize,
    /// True when `value` is the exact entropy rather than a bound.
    pub exact: bool,
    pub certificate: Option<Certificate>,
    pub cover: Option<CoverSolution>,
    /// Points forced into separate parts (`pack-lb` only).
    pub separated: Option<Vec<usize>>,
}

/// Epsilon-entropy with the chosen method: `exact` is the true value (or a
/// cap error), `greedy` an upper bound and `pack-lb` a lower bound.
pub fn eps_entropy(t: &FiniteMetricTriple, eps: f64, method: EpsMethod) -> Result<EntropyResult> {
    eps_entropy_with(t, eps, method, &CoverConfig::default())
}

pub fn eps_entropy_with(t: &FiniteMetricTriple, eps: f64, method: EpsMethod, cfg: &CoverConfig) -> Result<EntropyResult> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::Value(format!("eps must be positive, got {eps}")));
    }
    let mut r = EntropyResult {
        eps,
        method,
        value: 0.0,
        k: 1,
        exact: method == EpsMethod::Exact,
        certificate: None,
        cover: None,
        separated: None,
    };
    if eps >= 1.0 {
        r.exact = true;
        return Ok(r);
    }
    match method {
        EpsMethod::Exact => {
            let c = exact_cover(t, eps, cfg)?;
            r.k = c.k;
            r.certificate = Some(c.certificate);
            r.cover = Some(c.solution);
        }
        EpsMethod::Greedy => {
            let c = greedy_cover(t, eps);
            r.k = c.k();
            r.cover = Some(c);
        }
        EpsMethod::PackLb => {
            let (k, sep) = packing_bound(t, eps);
            r.k = k;
            r.separated = Some(sep);
        }
    }
    r.value = (r.k as f64).ln();
    Ok(r)
}

/// Shannon entropy in nats; zero entries contribute nothing.
pub fn shannon(p: &[f64]) -> f64 {
    // Entries at 1 up to rounding are point masses.
    p.iter().filter(|&&x| x > 0.0 && x < 1.0 - 1e-15).map(|&x| -x * x.ln()).sum()
}

/// Indices of the heaviest entries (ties by index) whose mass first reaches
/// `1 - delta`. Its size never exceeds `exp((H(p) + 1) / delta)`.
pub fn tail_support(p: &[f64], delta: f64) -> Result<Vec<usize>> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Value(format!("delta must lie in (0, 1), got {delta}")));
    }
    let mut idx: Vec<usize> = (0..p.len()).collect();
    idx.sort_by(|&a, &b| p[b].total_cmp(&p[a]).then(a.cmp(&b)));
    let mut acc = 0.0;
    let mut out = Vec::new();
    for i in idx {
        if acc >= 1.0 - delta {
            break;
        }
        acc += p[i];
        out.push(i);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shannon_values() {
        assert_eq!(shannon(&[1.0]), 0.0);
        assert!((shannon(&[0.5, 0.5]) - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((shannon(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(shannon(&[0.0, 1.0]), 0.0);
    }

    #[test]
    fn tail_support_of_uniform() {
        let p = vec![0.1; 10];
        // Eight entries are needed to reach 0.75.
        assert_eq!(tail_support(&p, 0.25).unwrap().len(), 8);
        assert!(tail_support(&p, 0.0).is_err());
    }
}
