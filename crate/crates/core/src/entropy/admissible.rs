//! The event that a distance matrix contains a large separated set.

use serde::{Deserialize, Serialize};

use super::graph::{maximum_clique, Graph};
use crate::metric::DistanceMatrix;
use crate::{Error, Result, STRICT_MARGIN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdmissibilityMethod {
    /// Maximum separated set by branch and bound.
    Exact,
    /// Greedy separated set; a lower bound on the maximum.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityResult {
    pub eps: f64,
    pub n: usize,
    /// Indices pairwise at distance greater than `eps`.
    pub separated: Vec<usize>,
    /// Whether `|separated| >= eps * n`.
    pub event: bool,
    pub exact: bool,
}

const EXACT_BUDGET: u64 = 20_000_000;

/// Largest index set with all pairwise distances above `eps`, and whether
/// it holds at least `eps * n` indices.
pub fn admissibility_event(d: &DistanceMatrix, eps: f64, method: AdmissibilityMethod) -> Result<AdmissibilityResult> {
    if !(eps > 0.0) {
        return Err(Error::Value(format!("eps must be positive, got {eps}")));
    }
    let n = d.n();
    let mut far = Graph::empty(n);
    for i in 0..n {
        for j in i + 1..n {
            if d.get(i, j) >= eps + STRICT_MARGIN {
                far.adj[i].insert(j);
                far.adj[j].insert(i);
            }
        }
    }
    let separated = match method {
        AdmissibilityMethod::Exact => {
            let budget = if n <= 20 { u64::MAX } else { EXACT_BUDGET };
            maximum_clique(&far, budget)?
        }
        AdmissibilityMethod::Greedy => {
            let mut s: Vec<usize> = Vec::new();
            for v in 0..n {
                if s.iter().all(|&u| far.has_edge(u, v)) {
                    s.push(v);
                }
            }
            s
        }
    };
    let event = separated.len() as f64 >= eps * n as f64 - 1e-12;
    Ok(AdmissibilityResult { eps, n, separated, event, exact: method == AdmissibilityMethod::Exact })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extremes() {
        let z = DistanceMatrix::zeros(6);
        let r = admissibility_event(&z, 0.5, AdmissibilityMethod::Exact).unwrap();
        assert_eq!(r.separated.len(), 1);
        assert!(!r.event);
        let s = DistanceMatrix::from_fn(6, |_, _| 1.0).unwrap();
        let r = admissibility_event(&s, 0.5, AdmissibilityMethod::Exact).unwrap();
        assert_eq!(r.separated.len(), 6);
        assert!(r.event);
    }
}
