//! Distances between triples: the coupling distance built on the m-norm and
//! the transport distance over all gluings of the two spaces.
//!
//! Each distance is an infimum, so every routine returns the best witness it
//! found. [`dist_pair`] runs both searches against each other: a coupling
//! witness yields a gluing whose transport cost is at most its m-norm, and a
//! transport witness yields a coupling whose m-norm is at most twice its
//! cost. Iterating to a fixed point makes the returned pair satisfy
//! `K <= M <= 2K` by construction.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mnorm::{m_norm, SymmetricArray, MNORM_CAP};
use super::simplex::{transport, TransportPlan};
use crate::lp::{Cmp, LinearProgram};
use crate::metric::{DistanceMatrix, FiniteMetricTriple};
use crate::{rng, Error, Result, SYM_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistMode {
    /// Exhaustive over transport-polytope vertices plus segment refinement.
    /// Limited to `n1, n2 <= 4`, or equal sizes `<= 8` with uniform weights.
    ExactTiny,
    /// Alternating minimization from random vertex starts.
    Heuristic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistOptions {
    pub mode: DistMode,
    /// Random restarts for the heuristic parts of the search.
    pub restarts: usize,
    pub seed: u64,
}

impl Default for DistOptions {
    fn default() -> Self {
        DistOptions { mode: DistMode::ExactTiny, restarts: 8, seed: 0 }
    }
}

/// Distances between `X1` and `X2` inside a gluing `X1 ⊔ X2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossMetric {
    pub n1: usize,
    pub n2: usize,
    pub c: Vec<f64>,
}

impl CrossMetric {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n2 + j]
    }

    /// Full matrix on `X1 ⊔ X2`, first block `X1`.
    pub fn assembled(&self, t1: &FiniteMetricTriple, t2: &FiniteMetricTriple) -> DistanceMatrix {
        let (n1, n2) = (self.n1, self.n2);
        DistanceMatrix::from_upper(n1 + n2, |a, b| match (a < n1, b < n1) {
            (true, true) => t1.dist().get(a, b),
            (false, false) => t2.dist().get(a - n1, b - n1),
            (true, false) => self.get(a, b - n1),
            (false, true) => self.get(b, a - n1),
        })
    }

    pub fn is_gluing(&self, t1: &FiniteMetricTriple, t2: &FiniteMetricTriple) -> bool {
        self.c.iter().all(|&v| v >= -SYM_TOL) && self.assembled(t1, t2).triangle_excess() <= SYM_TOL
    }
}

/// m-norm of one coupling, with the support cells it was evaluated on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingNorm {
    pub value: f64,
    pub coupling: TransportPlan,
    pub dominating: DistanceMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistMResult {
    pub value: f64,
    pub witness: CouplingNorm,
    pub evaluations: usize,
    pub mode: DistMode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistKResult {
    pub value: f64,
    pub cross: CrossMetric,
    pub plan: TransportPlan,
    pub mode: DistMode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DistPair {
    pub dist_m: DistMResult,
    pub dist_k: DistKResult,
    pub rounds: usize,
}

impl DistPair {
    pub fn sandwich_holds(&self, tol: f64) -> bool {
        self.dist_k.value <= self.dist_m.value + tol && self.dist_m.value <= 2.0 * self.dist_k.value + tol
    }
}

pub fn in_tiny_scope(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple) -> bool {
    let (n1, n2) = (t1.n(), t2.n());
    (n1 <= 4 && n2 <= 4) || (n1 == n2 && n1 <= 8 && t1.weights().is_uniform() && t2.weights().is_uniform())
}

/// m-norm of `rho1(z1, z1') - rho2(z2, z2')` on the support of `plan`.
pub fn coupling_m_norm(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, plan: &TransportPlan) -> Result<CouplingNorm> {
    let cells = &plan.entries;
    let k = cells.len();
    if k > MNORM_CAP {
        return Err(Error::CapExceeded(format!("coupling support {k} exceeds {MNORM_CAP}")));
    }
    let f = SymmetricArray::from_fn(k, |a, b| {
        let (i, j, _) = cells[a];
        let (p, q, _) = cells[b];
        t1.dist().get(i, p) - t2.dist().get(j, q)
    });
    let w: Vec<f64> = cells.iter().map(|c| c.2).collect();
    let r = m_norm(&f, &w)?;
    Ok(CouplingNorm { value: r.value, coupling: plan.clone(), dominating: r.dominating })
}

fn l1_bound(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, plan: &TransportPlan) -> f64 {
    let c = &plan.entries;
    let mut s = 0.0;
    for &(i, j, a) in c {
        for &(p, q, b) in c {
            s += a * b * (t1.dist().get(i, p) - t2.dist().get(j, q)).abs();
        }
    }
    s
}

/// Gluing induced by a coupling and its dominating semimetric: anchor at the
/// support cell `x0` minimizing `sum_z pi(z) D(z, x0)` and join the spaces
/// through bridges of length `D(z, x0)`.
pub fn glue_from_coupling(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, cn: &CouplingNorm) -> CrossMetric {
    let cells = &cn.coupling.entries;
    let d = &cn.dominating;
    let mut x0 = 0;
    let mut best = f64::INFINITY;
    for a in 0..cells.len() {
        let s: f64 = cells.iter().enumerate().map(|(b, c)| c.2 * d.get(a, b)).sum();
        if s < best {
            best = s;
            x0 = a;
        }
    }
    let (n1, n2) = (t1.n(), t2.n());
    let mut c = vec![f64::INFINITY; n1 * n2];
    for i in 0..n1 {
        for j in 0..n2 {
            for (z, &(z1, z2, _)) in cells.iter().enumerate() {
                let v = t1.dist().get(i, z1) + d.get(z, x0) + t2.dist().get(z2, j);
                if v < c[i * n2 + j] {
                    c[i * n2 + j] = v;
                }
            }
        }
    }
    CrossMetric { n1, n2, c }
}

/// Upper bound `2 * sum_ij plan_ij c_ij` on the m-norm of `plan`, realized
/// by the dominating semimetric `D(a, b) = c(a) + c(b)` for `a != b`.
pub fn plan_dominating_bound(cross: &CrossMetric, plan: &TransportPlan) -> f64 {
    let mass: f64 = plan.entries.iter().map(|e| e.2).sum();
    let first: f64 = plan.entries.iter().map(|&(i, j, v)| v * cross.get(i, j)).sum();
    let diag: f64 = plan.entries.iter().map(|&(i, j, v)| v * v * cross.get(i, j)).sum();
    2.0 * first * mass - 2.0 * diag
}

/// Cheapest gluing for a fixed plan, as a linear program in the cross
/// distances.
pub fn gluing_lp(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, plan: &TransportPlan) -> Result<CrossMetric> {
    let (n1, n2) = (t1.n(), t2.n());
    let mut lp = LinearProgram::new();
    let x = plan.dense();
    let var = |i: usize, j: usize| i * n2 + j;
    let cap = t1.dist().max_entry() + t2.dist().max_entry() + 1.0;
    for i in 0..n1 {
        for j in 0..n2 {
            lp.add_var(x[i * n2 + j], 0.0, cap);
        }
    }
    for j in 0..n2 {
        for i in 0..n1 {
            for p in 0..n1 {
                if p == i {
                    continue;
                }
                let r = t1.dist().get(i, p);
                lp.add_row(vec![(var(i, j), 1.0), (var(p, j), -1.0)], Cmp::Le, r);
                if i < p {
                    lp.add_row(vec![(var(i, j), 1.0), (var(p, j), 1.0)], Cmp::Ge, r);
                }
            }
        }
    }
    for i in 0..n1 {
        for j in 0..n2 {
            for q in 0..n2 {
                if q == j {
                    continue;
                }
                let r = t2.dist().get(j, q);
                lp.add_row(vec![(var(i, j), 1.0), (var(i, q), -1.0)], Cmp::Le, r);
                if j < q {
                    lp.add_row(vec![(var(i, j), 1.0), (var(i, q), 1.0)], Cmp::Ge, r);
                }
            }
        }
    }
    let sol = lp.solve()?;
    Ok(CrossMetric { n1, n2, c: sol.x.iter().map(|v| v.max(0.0)).collect() })
}

fn half_diameter_gluing(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple) -> CrossMetric {
    let c = 0.5 * t1.dist().max_entry().max(t2.dist().max_entry());
    CrossMetric { n1: t1.n(), n2: t2.n(), c: vec![c; t1.n() * t2.n()] }
}

fn plan_for(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, cross: &CrossMetric) -> Result<TransportPlan> {
    Ok(transport(&cross.c, t1.w(), t2.w())?.plan)
}

/// Alternates optimal plans and optimal gluings from `start`.
fn descend_k(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, start: CrossMetric, mode: DistMode) -> Result<DistKResult> {
    let mut cross = start;
    let mut plan = plan_for(t1, t2, &cross)?;
    let mut value = plan.cost(&cross.c);
    for _ in 0..50 {
        let next = gluing_lp(t1, t2, &plan)?;
        let nplan = plan_for(t1, t2, &next)?;
        let nvalue = nplan.cost(&next.c);
        if nvalue < value - 1e-12 {
            cross = next;
            plan = nplan;
            value = nvalue;
        } else {
            if nvalue <= value {
                cross = next;
                plan = nplan;
                value = nvalue;
            }
            break;
        }
    }
    Ok(DistKResult { value, cross, plan, mode })
}

fn random_vertex(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, seed: u64, tag: &str, r: u64) -> Result<TransportPlan> {
    let mut g = rng::stream(seed, tag, r);
    let cost: Vec<f64> = (0..t1.n() * t2.n()).map(|_| g.gen::<f64>()).collect();
    Ok(transport(&cost, t1.w(), t2.w())?.plan)
}

fn check_mode(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, mode: DistMode) -> Result<()> {
    if mode == DistMode::ExactTiny && !in_tiny_scope(t1, t2) {
        return Err(Error::CapExceeded(format!(
            "exact-tiny mode covers sizes up to 4x4 or uniform 8x8, got {}x{}",
            t1.n(),
            t2.n()
        )));
    }
    Ok(())
}

/// Transport distance over gluings.
pub fn dist_k(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, opts: &DistOptions) -> Result<DistKResult> {
    Ok(dist_pair(t1, t2, opts)?.dist_k)
}

/// Coupling distance in the m-norm.
pub fn dist_m(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, opts: &DistOptions) -> Result<DistMResult> {
    Ok(dist_pair(t1, t2, opts)?.dist_m)
}

struct MSearch<'a> {
    t1: &'a FiniteMetricTriple,
    t2: &'a FiniteMetricTriple,
    best: Option<CouplingNorm>,
    evaluations: usize,
}

impl<'a> MSearch<'a> {
    fn best_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |b| b.value)
    }

    fn offer(&mut self, plan: &TransportPlan) -> Result<f64> {
        let cn = coupling_m_norm(self.t1, self.t2, plan)?;
        self.evaluations += 1;
        let v = cn.value;
        if v < self.best_value() - 1e-15 {
            self.best = Some(cn);
        }
        Ok(v)
    }

    /// Evaluates plans in order of their cheap lower bound, skipping those
    /// that cannot beat the incumbent.
    fn sweep(&mut self, mut plans: Vec<TransportPlan>) -> Result<()> {
        let mut keyed: Vec<(f64, TransportPlan)> = plans.drain(..).map(|p| (l1_bound(self.t1, self.t2, &p), p)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (lb, p) in keyed {
            if lb >= self.best_value() - 1e-15 {
                break;
            }
            self.offer(&p)?;
        }
        Ok(())
    }

    /// Golden-section search on the segment from `a` to `b`.
    fn segment(&mut self, a: &TransportPlan, b: &TransportPlan) -> Result<()> {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut x1 = hi - phi * (hi - lo);
        let mut x2 = lo + phi * (hi - lo);
        let mut f1 = self.offer(&a.mix(b, x1))?;
        let mut f2 = self.offer(&a.mix(b, x2))?;
        for _ in 0..8 {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - phi * (hi - lo);
                f1 = self.offer(&a.mix(b, x1))?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + phi * (hi - lo);
                f2 = self.offer(&a.mix(b, x2))?;
            }
        }
        Ok(())
    }
}

/// Vertices of the transport polytope, one per feasible spanning-tree basis.
pub fn polytope_vertices(a: &[f64], b: &[f64]) -> Vec<TransportPlan> {
    let (n1, n2) = (a.len(), b.len());
    let cells: Vec<(usize, usize)> = (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    let m = n1 + n2 - 1;
    let mut out: Vec<TransportPlan> = Vec::new();
    let mut seen: Vec<Vec<i64>> = Vec::new();
    let mut pick: Vec<usize> = (0..m).collect();
    loop {
        if let Some(x) = tree_flow(n1, n2, &pick.iter().map(|&k| cells[k]).collect::<Vec<_>>(), a, b) {
            let key: Vec<i64> = x.iter().map(|v| (v * 1e12).round() as i64).collect();
            if !seen.contains(&key) {
                seen.push(key);
                out.push(TransportPlan::from_dense(n1, n2, &x));
            }
        }
        // Next combination in lexicographic order.
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if pick[i] < cells.len() - m + i {
                break;
            }
        }
        pick[i] += 1;
        for k in i + 1..m {
            pick[k] = pick[k - 1] + 1;
        }
    }
}

fn tree_flow(n1: usize, n2: usize, edges: &[(usize, usize)], a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    let nodes = n1 + n2;
    let mut deg = vec![0usize; nodes];
    for &(i, j) in edges {
        deg[i] += 1;
        deg[n1 + j] += 1;
    }
    if deg.iter().any(|&d| d == 0) {
        return None;
    }
    let mut rem: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut used = vec![false; edges.len()];
    let mut x = vec![0.0; n1 * n2];
    for _ in 0..edges.len() {
        let leaf = (0..nodes).find(|&v| deg[v] == 1)?;
        let k = (0..edges.len()).find(|&k| !used[k] && (edges[k].0 == leaf || n1 + edges[k].1 == leaf))?;
        let (i, j) = edges[k];
        let q = rem[leaf];
        if q < -1e-12 {
            return None;
        }
        let q = q.max(0.0);
        used[k] = true;
        x[i * n2 + j] = q;
        let other = if i == leaf { n1 + j } else { i };
        rem[leaf] = 0.0;
        rem[other] -= q;
        deg[leaf] -= 1;
        deg[other] -= 1;
    }
    // A cycle would leave an edge unused or a node with positive degree.
    if deg.iter().any(|&d| d != 0) || rem.iter().any(|r| r.abs() > 1e-9) {
        return None;
    }
    Some(x)
}

fn permutation_plans(n: usize) -> Vec<TransportPlan> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    let mut c = vec![0usize; n];
    let w = 1.0 / n as f64;
    let make = |p: &[usize]| TransportPlan { n1: n, n2: n, entries: p.iter().enumerate().map(|(i, &j)| (i, j, w)).collect() };
    out.push(make(&perm));
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            let mut p = make(&perm);
            p.entries.sort_by_key(|e| (e.0, e.1));
            out.push(p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

fn search_m(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, opts: &DistOptions, search: &mut MSearch<'_>) -> Result<()> {
    match opts.mode {
        DistMode::ExactTiny => {
            let vertices = if t1.n() <= 4 && t2.n() <= 4 {
                polytope_vertices(t1.w(), t2.w())
            } else {
                permutation_plans(t1.n())
            };
            let mut pool: Vec<(f64, TransportPlan)> =
                vertices.iter().map(|p| (l1_bound(t1, t2, p), p.clone())).collect();
            search.sweep(vertices)?;
            // Refine along segments from the best vertex towards the next
            // most promising ones.
            pool.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut ranked: Vec<(f64, TransportPlan)> = Vec::new();
            for (_, p) in pool.into_iter().take(6) {
                ranked.push((coupling_m_norm(t1, t2, &p)?.value, p));
            }
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
            if let Some(best) = search.best.as_ref().map(|b| b.coupling.clone()) {
                for (_, p) in ranked.iter().take(4) {
                    if p != &best {
                        search.segment(&best, p)?;
                    }
                }
                if t1.n() * t2.n() <= MNORM_CAP {
                    search.segment(&best, &product_plan(t1, t2))?;
                }
            }
        }
        DistMode::Heuristic => {}
    }
    for r in 0..opts.restarts as u64 {
        let start = random_vertex(t1, t2, opts.seed, "dist-m-start", r)?;
        alternate_m(t1, t2, start, search)?;
    }
    Ok(())
}

fn product_plan(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple) -> TransportPlan {
    let x: Vec<f64> = t1.w().iter().flat_map(|&a| t2.w().iter().map(move |&b| a * b)).collect();
    TransportPlan::from_dense(t1.n(), t2.n(), &x)
}

/// Coupling, m-norm, gluing, optimal plan, and around again.
fn alternate_m(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, start: TransportPlan, search: &mut MSearch<'_>) -> Result<()> {
    let mut plan = start;
    let mut last = f64::INFINITY;
    for _ in 0..20 {
        let cn = coupling_m_norm(t1, t2, &plan)?;
        search.evaluations += 1;
        let v = cn.value;
        if v < search.best_value() - 1e-15 {
            search.best = Some(cn.clone());
        }
        if v >= last - 1e-12 {
            break;
        }
        last = v;
        let cross = glue_from_coupling(t1, t2, &cn);
        plan = plan_for(t1, t2, &cross)?;
    }
    Ok(())
}

/// Runs both distance searches and iterates the two witness constructions
/// until neither improves the other.
pub fn dist_pair(t1: &FiniteMetricTriple, t2: &FiniteMetricTriple, opts: &DistOptions) -> Result<DistPair> {
    check_mode(t1, t2, opts.mode)?;
    let mut search = MSearch { t1, t2, best: None, evaluations: 0 };
    search_m(t1, t2, opts, &mut search)?;

    let mut k_best = descend_k(t1, t2, half_diameter_gluing(t1, t2), opts.mode)?;
    for r in 0..opts.restarts as u64 {
        let v = random_vertex(t1, t2, opts.seed, "dist-k-start", r)?;
        if let Ok(cn) = coupling_m_norm(t1, t2, &v) {
            let cand = descend_k(t1, t2, glue_from_coupling(t1, t2, &cn), opts.mode)?;
            if cand.value < k_best.value {
                k_best = cand;
            }
        }
    }

    let mut rounds = 0;
    for _ in 0..20 {
        rounds += 1;
        let mut changed = false;
        if let Some(cn) = search.best.clone() {
            let cand = descend_k(t1, t2, glue_from_coupling(t1, t2, &cn), opts.mode)?;
            if cand.value < k_best.value - 1e-13 {
                k_best = cand;
                changed = true;
            }
        }
        let before = search.best_value();
        if k_best.plan.entries.len() <= MNORM_CAP {
            search.offer(&k_best.plan.clone())?;
            alternate_m(t1, t2, k_best.plan.clone(), &mut search)?;
        }
        if search.best_value() < before - 1e-13 {
            changed = true;
        }
        if !changed {
            break;
        }
    }
    let witness = search.best.take().ok_or_else(|| Error::Solver("no coupling evaluated".into()))?;
    Ok(DistPair {
        dist_m: DistMResult { value: witness.value, witness, evaluations: search.evaluations, mode: opts.mode },
        dist_k: k_best,
        rounds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::ProbabilityVector;

    fn two_point(a: f64) -> FiniteMetricTriple {
        FiniteMetricTriple::uniform(DistanceMatrix::from_fn(2, |_, _| a).unwrap())
    }

    #[test]
    fn two_point_spaces() {
        let r = dist_pair(&two_point(1.0), &two_point(0.4), &DistOptions::default()).unwrap();
        assert!((r.dist_m.value - 0.3).abs() < 1e-9, "{}", r.dist_m.value);
        assert!(r.sandwich_holds(1e-9));
        assert!(r.dist_k.cross.is_gluing(&two_point(1.0), &two_point(0.4)));
    }

    #[test]
    fn vertices_of_uniform_2x2_are_permutations() {
        let v = polytope_vertices(&[0.5, 0.5], &[0.5, 0.5]);
        assert_eq!(v.len(), 2);
        let v = polytope_vertices(&[0.5, 0.5], &[0.25, 0.25, 0.5]);
        assert!(v.iter().all(|p| p.entries.len() <= 4));
        assert_eq!(permutation_plans(4).len(), 24);
    }

    #[test]
    fn relabeled_copy_is_at_distance_zero() {
        let d = DistanceMatrix::from_fn(3, |i, j| (i + j) as f64 / 4.0).unwrap();
        let t = FiniteMetricTriple::new(d, ProbabilityVector::new(vec![0.2, 0.3, 0.5]).unwrap()).unwrap();
        let s = t.permuted(&[2, 0, 1]);
        let r = dist_pair(&t, &s, &DistOptions::default()).unwrap();
        assert!(r.dist_m.value < 1e-9);
        assert!(r.dist_k.value < 1e-9);
    }

    #[test]
    fn exact_mode_refuses_large_inputs() {
        let t = FiniteMetricTriple::uniform(DistanceMatrix::from_fn(5, |_, _| 1.0).unwrap());
        let u = FiniteMetricTriple::new(
            DistanceMatrix::from_fn(5, |_, _| 1.0).unwrap(),
            ProbabilityVector::new(vec![0.1, 0.2, 0.3, 0.2, 0.2]).unwrap(),
        )
        .unwrap();
        assert!(matches!(dist_pair(&t, &u, &DistOptions::default()), Err(Error::CapExceeded(_))));
    }
}
