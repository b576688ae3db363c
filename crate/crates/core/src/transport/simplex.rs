//! Transportation simplex (MODI form) with a spanning-tree basis.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Sparse transport plan between `n1` sources and `n2` targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPlan {
    pub n1: usize,
    pub n2: usize,
    /// `(i, j, mass)` with positive mass, sorted by `(i, j)`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl TransportPlan {
    pub fn from_dense(n1: usize, n2: usize, x: &[f64]) -> Self {
        let mut entries = Vec::new();
        for i in 0..n1 {
            for j in 0..n2 {
                let v = x[i * n2 + j];
                if v > 1e-15 {
                    entries.push((i, j, v));
                }
            }
        }
        TransportPlan { n1, n2, entries }
    }

    pub fn dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n1 * self.n2];
        for &(i, j, v) in &self.entries {
            x[i * self.n2 + j] += v;
        }
        x
    }

    pub fn cost(&self, cost: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, j, v)| v * cost[i * self.n2 + j]).sum()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let mut r = vec![0.0; self.n1];
        for &(i, _, v) in &self.entries {
            r[i] += v;
        }
        r
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.n2];
        for &(_, j, v) in &self.entries {
            c[j] += v;
        }
        c
    }

    /// Convex combination `(1 - t) self + t other`.
    pub fn mix(&self, other: &TransportPlan, t: f64) -> TransportPlan {
        let a = self.dense();
        let b = other.dense();
        let x: Vec<f64> = a.iter().zip(&b).map(|(p, q)| (1.0 - t) * p + t * q).collect();
        TransportPlan::from_dense(self.n1, self.n2, &x)
    }
}

/// Optimal plan together with the dual certificate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportSolution {
    pub value: f64,
    pub plan: TransportPlan,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// `|primal - dual|`.
    pub gap: f64,
    pub pivots: usize,
}

struct Basis {
    n1: usize,
    n2: usize,
    cells: Vec<(usize, usize)>,
    x: Vec<f64>,
}

impl Basis {
    /// Tree adjacency: node `i < n1` is a row, `n1 + j` a column; each entry
    /// is `(neighbour, basis slot)`.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n1 + self.n2];
        for (k, &(i, j)) in self.cells.iter().enumerate() {
            adj[i].push((self.n1 + j, k));
            adj[self.n1 + j].push((i, k));
        }
        adj
    }

    fn potentials(&self, cost: &[f64], adj: &[Vec<(usize, usize)>]) -> (Vec<f64>, Vec<f64>) {
        let (n1, n2) = (self.n1, self.n2);
        let mut pot = vec![f64::NAN; n1 + n2];
        let mut stack = vec![0usize];
        pot[0] = 0.0;
        while let Some(a) = stack.pop() {
            for &(b, k) in &adj[a] {
                if pot[b].is_nan() {
                    let (i, j) = self.cells[k];
                    pot[b] = cost[i * n2 + j] - pot[a];
                    stack.push(b);
                }
            }
        }
        (pot[..n1].to_vec(), pot[n1..].to_vec())
    }

    /// Basis slots on the tree path from column node of `j` to row node `i`.
    fn path(&self, adj: &[Vec<(usize, usize)>], i: usize, j: usize) -> Vec<usize> {
        let n = self.n1 + self.n2;
        let start = self.n1 + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            if a == i {
                break;
            }
            for &(b, k) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some((a, k));
                    queue.push_back(b);
                }
            }
        }
        let mut slots = Vec::new();
        let mut cur = i;
        while cur != start {
            let (p, k) = parent[cur].expect("basis is a spanning tree");
            slots.push(k);
            cur = p;
        }
        slots.reverse();
        slots
    }
}

fn northwest(a: &[f64], b: &[f64]) -> Basis {
    let (n1, n2) = (a.len(), b.len());
    let mut ra = a.to_vec();
    let mut rb = b.to_vec();
    let mut cells = Vec::with_capacity(n1 + n2 - 1);
    let mut x = Vec::with_capacity(n1 + n2 - 1);
    let (mut i, mut j) = (0, 0);
    loop {
        let last = i == n1 - 1 && j == n2 - 1;
        let q = if last { ra[i].max(rb[j]) } else { ra[i].min(rb[j]) };
        cells.push((i, j));
        x.push(q.max(0.0));
        ra[i] -= q;
        rb[j] -= q;
        if last {
            break;
        }
        if (ra[i] <= rb[j] && i < n1 - 1) || j == n2 - 1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    Basis { n1, n2, cells, x }
}

/// Minimizes `sum c_ij x_ij` over couplings of the masses `a` and `b`.
/// Totals must agree within `1e-9`.
pub fn transport(cost: &[f64], a: &[f64], b: &[f64]) -> Result<TransportSolution> {
    let (n1, n2) = (a.len(), b.len());
    if n1 == 0 || n2 == 0 {
        return Err(Error::Structure("empty marginal".into()));
    }
    if cost.len() != n1 * n2 {
        return Err(Error::Structure(format!("cost has {} entries, expected {}x{}", cost.len(), n1, n2)));
    }
    if a.iter().chain(b).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::Value("marginals must be nonnegative".into()));
    }
    if cost.iter().any(|c| !c.is_finite()) {
        return Err(Error::Value("cost entries must be finite".into()));
    }
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("marginal totals differ: {sa} vs {sb}")));
    }
    let scale = cost.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let tol = 1e-12 * scale;
    let mut basis = northwest(a, b);
    let mut in_basis = vec![usize::MAX; n1 * n2];
    for (k, &(i, j)) in basis.cells.iter().enumerate() {
        in_basis[i * n2 + j] = k;
    }
    let max_pivots = 50 * n1 * n2 + 1000;
    let bland_after = 10 * (n1 + n2) + 200;
    let mut stall = 0usize;
    let mut pivots = 0usize;
    loop {
        let adj = basis.adjacency();
        let (u, v) = basis.potentials(cost, &adj);
        let bland = stall > bland_after;
        let mut enter: Option<(usize, usize)> = None;
        let mut best = -tol;
        'scan: for i in 0..n1 {
            for j in 0..n2 {
                if in_basis[i * n2 + j] != usize::MAX {
                    continue;
                }
                let r = cost[i * n2 + j] - u[i] - v[j];
                if r < best {
                    enter = Some((i, j));
                    if bland {
                        break 'scan;
                    }
                    best = r;
                }
            }
        }
        let Some((ei, ej)) = enter else {
            let primal: f64 = basis.cells.iter().zip(&basis.x).map(|(&(i, j), &q)| q * cost[i * n2 + j]).sum();
            let dual: f64 = a.iter().zip(&u).map(|(p, q)| p * q).sum::<f64>()
                + b.iter().zip(&v).map(|(p, q)| p * q).sum::<f64>();
            let mut dense = vec![0.0; n1 * n2];
            for (&(i, j), &q) in basis.cells.iter().zip(&basis.x) {
                dense[i * n2 + j] = q;
            }
            return Ok(TransportSolution {
                value: primal,
                plan: TransportPlan::from_dense(n1, n2, &dense),
                u,
                v,
                gap: (primal - dual).abs(),
                pivots,
            });
        };
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::Budget("transportation simplex pivot limit reached".into()));
        }
        let path = basis.path(&adj, ei, ej);
        // Odd positions along the path lose mass.
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                let q = basis.x[k];
                let (li, lj) = basis.cells[k];
                let better = q < theta
                    || (q == theta && bland && li * n2 + lj < basis.cells[leave].0 * n2 + basis.cells[leave].1);
                if better {
                    theta = q;
                    leave = k;
                }
            }
        }
        if theta > 0.0 {
            stall = 0;
        } else {
            stall += 1;
        }
        for (pos, &k) in path.iter().enumerate() {
            if pos % 2 == 0 {
                basis.x[k] -= theta;
            } else {
                basis.x[k] += theta;
            }
        }
        let (li, lj) = basis.cells[leave];
        in_basis[li * n2 + lj] = usize::MAX;
        basis.cells[leave] = (ei, ej);
        basis.x[leave] = theta;
        in_basis[ei * n2 + ej] = leave;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_instance() {
        // Line metric |i - j|; shifting a quarter of the mass two steps costs 0.5.
        let cost = [0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0];
        let a = [0.5, 0.25, 0.25];
        let b = [0.25, 0.25, 0.5];
        let s = transport(&cost, &a, &b).unwrap();
        assert!((s.value - 0.5).abs() < 1e-12);
        assert!(s.gap < 1e-12);
    }

    #[test]
    fn mismatched_totals_are_infeasible() {
        let r = transport(&[0.0, 1.0], &[1.0], &[0.5, 0.6]);
        assert!(matches!(r, Err(Error::Infeasible(_))));
    }

    #[test]
    fn degenerate_uniform_permutation() {
        let n = 6;
        let cost: Vec<f64> = (0..n * n).map(|k| if k / n == (k % n + 2) % n { 0.0 } else { 1.0 }).collect();
        let a = vec![1.0 / n as f64; n];
        let s = transport(&cost, &a, &a).unwrap();
        assert!(s.value.abs() < 1e-12);
    }
}
