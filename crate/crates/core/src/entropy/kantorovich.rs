//! Entropy of the best discrete approximation in transport distance.
//!
//! For a fixed support the search uses the pushforward of the measure under
//! nearest-centre assignment (lowest index on ties); its transport cost is
//! `sum_i w_i d(i, S)`, the least cost of any measure carried by `S`.

use serde::{Deserialize, Serialize};

use super::shannon;
use crate::metric::FiniteMetricTriple;
use crate::{Error, Result, STRICT_MARGIN};

/// Largest point count for exhaustive support enumeration.
pub const HK_EXACT_CAP: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HkMode {
    /// All supports, `n <= 15`.
    ExactTiny,
    /// Supports grown one centre at a time, k-median style.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteApproximation {
    pub eps: f64,
    pub support: Vec<usize>,
    /// Mass of each support point.
    pub nu: Vec<f64>,
    /// Transport cost from the measure to `nu`.
    pub cost: f64,
    /// Shannon entropy of `nu` in nats.
    pub entropy: f64,
}

fn assign(t: &FiniteMetricTriple, support: &[usize]) -> (Vec<f64>, f64) {
    let mut nu = vec![0.0; support.len()];
    let mut cost = 0.0;
    for i in 0..t.n() {
        let mut best = (f64::INFINITY, 0);
        for (k, &s) in support.iter().enumerate() {
            let d = t.dist().get(i, s);
            if d < best.0 {
                best = (d, k);
            }
        }
        nu[best.1] += t.w()[i];
        cost += t.w()[i] * best.0;
    }
    (nu, cost)
}

fn build(t: &FiniteMetricTriple, eps: f64, support: Vec<usize>) -> DiscreteApproximation {
    let (nu, cost) = assign(t, &support);
    let entropy = shannon(&nu);
    DiscreteApproximation { eps, support, nu, cost, entropy }
}

/// Least entropy of a measure within transport distance `eps` of the
/// triple's measure.
pub fn hk_entropy(t: &FiniteMetricTriple, eps: f64, mode: HkMode) -> Result<DiscreteApproximation> {
    if !(eps > 0.0) {
        return Err(Error::Value(format!("eps must be positive, got {eps}")));
    }
    let n = t.n();
    let cut = eps - STRICT_MARGIN;
    match mode {
        HkMode::ExactTiny => {
            if n > HK_EXACT_CAP {
                return Err(Error::CapExceeded(format!("exact mode enumerates supports of at most {HK_EXACT_CAP} points, got {n}")));
            }
            let mut best: Option<DiscreteApproximation> = None;
            for mask in 1u32..(1u32 << n) {
                let support: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                let (nu, cost) = assign(t, &support);
                if cost > cut {
                    continue;
                }
                let h = shannon(&nu);
                let better = match &best {
                    None => true,
                    Some(b) => h < b.entropy - 1e-15 || (h <= b.entropy + 1e-15 && support.len() < b.support.len()),
                };
                if better {
                    best = Some(DiscreteApproximation { eps, support, nu, cost, entropy: h });
                }
            }
            best.ok_or_else(|| Error::Infeasible("no support within the transport budget".into()))
        }
        HkMode::Greedy => {
            let mut support: Vec<usize> = Vec::new();
            let mut current = vec![f64::INFINITY; n];
            loop {
                let mut best = (f64::INFINITY, usize::MAX);
                for c in 0..n {
                    if support.contains(&c) {
                        continue;
                    }
                    let cost: f64 = (0..n).map(|i| t.w()[i] * current[i].min(t.dist().get(i, c))).sum();
                    if cost < best.0 {
                        best = (cost, c);
                    }
                }
                if best.1 == usize::MAX {
                    break;
                }
                support.push(best.1);
                for (i, cur) in current.iter_mut().enumerate() {
                    *cur = cur.min(t.dist().get(i, best.1));
                }
                if best.0 <= cut {
                    break;
                }
            }
            support.sort_unstable();
            Ok(build(t, eps, support))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistanceMatrix;

    #[test]
    fn large_eps_allows_a_point_mass() {
        let t = FiniteMetricTriple::uniform(DistanceMatrix::from_fn(4, |_, _| 1.0).unwrap());
        // Moving everything onto one point costs 3/4.
        let a = hk_entropy(&t, 0.8, HkMode::ExactTiny).unwrap();
        assert_eq!(a.support.len(), 1);
        assert_eq!(a.entropy, 0.0);
        let b = hk_entropy(&t, 0.7, HkMode::ExactTiny).unwrap();
        assert_eq!(b.support.len(), 2);
        assert!((b.entropy - (0.75f64 * -(0.75f64.ln()) - 0.25 * 0.25f64.ln())).abs() < 1e-12);
        let g = hk_entropy(&t, 0.7, HkMode::Greedy).unwrap();
        assert!(g.entropy >= b.entropy - 1e-12);
    }
}
