//! The m-norm of a symmetric kernel: the least mean of a semimetric that
//! dominates its absolute value.

use serde::{Deserialize, Serialize};

use crate::lp::{Cmp, LinearProgram, Row};
use crate::metric::{DistanceMatrix, ProbabilityVector};
use crate::{Error, Result, SYM_TOL};

/// Largest point count accepted by the m-norm linear program.
pub const MNORM_CAP: usize = 32;

/// Symmetric `n x n` array with zero diagonal; not necessarily a semimetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricArray {
    n: usize,
    a: Vec<f64>,
}

impl SymmetricArray {
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Structure(format!("array has {} entries, expected {n}x{n}", a.len())));
        }
        for i in 0..n {
            if a[i * n + i].abs() > SYM_TOL {
                return Err(Error::Value(format!("diagonal entry {i} is nonzero")));
            }
            for j in i + 1..n {
                if !a[i * n + j].is_finite() || (a[i * n + j] - a[j * n + i]).abs() > SYM_TOL {
                    return Err(Error::Value(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(SymmetricArray { n, a })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                a[i * n + j] = v;
                a[j * n + i] = v;
            }
        }
        SymmetricArray { n, a }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    /// `sum_ij w_i w_j |a_ij|`, a lower bound for the m-norm.
    pub fn mean_abs(&self, w: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += w[i] * w[j] * self.get(i, j).abs();
            }
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MNormResult {
    pub value: f64,
    /// Optimal dominating semimetric.
    pub dominating: DistanceMatrix,
    pub cut_rounds: usize,
}

fn pair_index(n: usize) -> Vec<usize> {
    let mut idx = vec![usize::MAX; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            idx[i * n + j] = k;
            idx[j * n + i] = k;
            k += 1;
        }
    }
    idx
}

fn assemble(n: usize, idx: &[usize], x: &[f64], f: &SymmetricArray) -> Vec<f64> {
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                d[i * n + j] = x[idx[i * n + j]].max(f.get(i, j).abs());
            }
        }
    }
    d
}

fn is_semimetric(n: usize, d: &[f64]) -> bool {
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if d[i * n + k] > d[i * n + j] + d[j * n + k] + 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// `min sum_ij w_i w_j D_ij` over semimetrics `D >= |f|`.
pub fn m_norm(f: &SymmetricArray, weights: &[f64]) -> Result<MNormResult> {
    let n = f.n();
    if weights.len() != n {
        return Err(Error::Structure(format!("{} weights for {n} points", weights.len())));
    }
    if n > MNORM_CAP {
        return Err(Error::CapExceeded(format!("m-norm program limited to {MNORM_CAP} points, got {n}")));
    }
    let abs: Vec<f64> = (0..n * n).map(|k| f.a[k].abs()).collect();
    if is_semimetric(n, &abs) {
        let value = f.mean_abs(weights);
        return Ok(MNormResult { value, dominating: DistanceMatrix::symmetrized(n, abs), cut_rounds: 0 });
    }
    let idx = pair_index(n);
    let mut lp = LinearProgram::new();
    for i in 0..n {
        for j in i + 1..n {
            lp.add_var(2.0 * weights[i] * weights[j], f.get(i, j).abs(), f64::INFINITY);
        }
    }
    let separate = |x: &[f64]| -> Vec<Row> {
        let mut cuts = Vec::new();
        for i in 0..n {
            for k in i + 1..n {
                let dik = x[idx[i * n + k]];
                let mut worst = 1e-10;
                let mut via = usize::MAX;
                for j in 0..n {
                    if j == i || j == k {
                        continue;
                    }
                    let ex = dik - x[idx[i * n + j]] - x[idx[j * n + k]];
                    if ex > worst {
                        worst = ex;
                        via = j;
                    }
                }
                if via != usize::MAX {
                    cuts.push(Row {
                        terms: vec![(idx[i * n + k], 1.0), (idx[i * n + via], -1.0), (idx[via * n + k], -1.0)],
                        cmp: Cmp::Le,
                        rhs: 0.0,
                    });
                }
            }
        }
        cuts
    };
    let sol = lp.solve_with_cuts(separate, 500)?;
    let d = assemble(n, &idx, &sol.x, f);
    let dominating = DistanceMatrix::symmetrized(n, d);
    let excess = dominating.triangle_excess();
    if excess > SYM_TOL {
        return Err(Error::Solver(format!("dominating matrix violates the triangle inequality by {excess:e}")));
    }
    let w = weights;
    let mut value = 0.0;
    for i in 0..n {
        for j in 0..n {
            value += w[i] * w[j] * dominating.get(i, j);
        }
    }
    Ok(MNormResult { value, dominating, cut_rounds: sol.rounds })
}

/// `m_norm(|A - B|)` for two distance matrices on the same weighted points.
pub fn mdist(a: &DistanceMatrix, b: &DistanceMatrix, weights: &ProbabilityVector) -> Result<MNormResult> {
    if a.n() != b.n() {
        return Err(Error::Structure(format!("matrix sizes differ: {} vs {}", a.n(), b.n())));
    }
    let f = SymmetricArray::from_fn(a.n(), |i, j| (a.get(i, j) - b.get(i, j)).abs());
    m_norm(&f, weights.as_slice())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_matrices_have_zero_distance() {
        let a = DistanceMatrix::from_fn(4, |i, j| (i as f64 - j as f64).abs()).unwrap();
        let r = mdist(&a, &a, &ProbabilityVector::uniform(4)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn semimetric_input_is_its_own_optimum() {
        let a = DistanceMatrix::from_fn(3, |_, _| 1.0).unwrap();
        let z = DistanceMatrix::zeros(3);
        let r = mdist(&a, &z, &ProbabilityVector::uniform(3)).unwrap();
        assert!((r.value - 6.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn single_spike_needs_a_triangle_repair() {
        // |f| = 1 on pair (0,1) only: every path 0-2-1 forces
        // d02 + d21 >= 1, so the optimum spreads mass over one of them.
        let f = SymmetricArray::from_fn(3, |i, j| if (i, j) == (0, 1) { 1.0 } else { 0.0 });
        let r = m_norm(&f, &[1.0 / 3.0; 3]).unwrap();
        assert!((r.value - 4.0 / 9.0).abs() < 1e-9);
        assert!(r.dominating.triangle_excess() <= 1e-9);
    }

    #[test]
    fn cap_is_enforced() {
        let f = SymmetricArray::from_fn(33, |_, _| 0.0);
        assert!(matches!(m_norm(&f, &[1.0 / 33.0; 33]), Err(Error::CapExceeded(_))));
    }
}
