//! Minimal covers by small-diameter parts up to a removed set of small mass.
//!
//! Parts are cliques of the threshold graph `{d < eps}`, so a cover with `k`
//! parts is a choice of `k` maximal cliques whose union carries more than
//! `1 - eps` of the mass. The exact solver
//!
//! 1. merges true twins of the threshold graph (lossless),
//! 2. splits into connected components,
//! 3. computes, per component, the best coverage achievable with `j`
//!    cliques for every `j` (exhaustive branch and bound on small
//!    components), and combines components by max-plus convolution.
//!
//! Components too large for exhaustive search get a fractional upper
//! profile and a greedy/local-search lower profile. The result is exact
//! when both combined profiles give the same part count; otherwise the
//! solver reports a cap error rather than an unproven value.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::graph::{maximal_cliques, Graph};
use crate::bitset::BitSet;
use crate::metric::FiniteMetricTriple;
use crate::{rng, Error, Result, STRICT_MARGIN};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverConfig {
    /// Components up to this size are solved exhaustively without a budget.
    pub small_component: usize,
    /// Components up to this size get a budgeted exhaustive attempt.
    pub medium_component: usize,
    pub dfs_budget: u64,
    pub clique_limit: usize,
    pub search_iters: usize,
    pub max_points: usize,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig {
            small_component: 20,
            medium_component: 64,
            dfs_budget: 2_000_000,
            clique_limit: 500_000,
            search_iters: 400_000,
            max_points: 4096,
        }
    }
}

/// A cover: disjoint parts plus the removed set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverSolution {
    pub parts: Vec<Vec<usize>>,
    pub removed: Vec<usize>,
    pub removed_mass: f64,
}

impl CoverSolution {
    pub fn k(&self) -> usize {
        self.parts.len()
    }

    /// Checks diameters and removed mass against the strict thresholds.
    pub fn verify(&self, t: &FiniteMetricTriple, eps: f64) -> bool {
        let cut = eps - STRICT_MARGIN;
        let mut seen = vec![false; t.n()];
        for p in &self.parts {
            for (a, &i) in p.iter().enumerate() {
                if seen[i] {
                    return false;
                }
                seen[i] = true;
                for &j in &p[a + 1..] {
                    if t.dist().get(i, j) > cut {
                        return false;
                    }
                }
            }
        }
        let removed: f64 = (0..t.n()).filter(|&i| !seen[i]).map(|i| t.w()[i]).sum();
        removed <= cut
    }

    fn from_parts(t: &FiniteMetricTriple, mut parts: Vec<Vec<usize>>) -> Self {
        parts.retain(|p| !p.is_empty());
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort();
        let mut seen = vec![false; t.n()];
        for p in &parts {
            for &i in p {
                seen[i] = true;
            }
        }
        let removed: Vec<usize> = (0..t.n()).filter(|&i| !seen[i]).collect();
        // Start from +0.0: an empty f64 sum is -0.0.
        let removed_mass = removed.iter().fold(0.0, |acc, &i| acc + t.w()[i]);
        CoverSolution { parts, removed, removed_mass }
    }
}

/// How exactness of a cover count was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    /// Every component was searched exhaustively.
    Exhaustive,
    /// A proven lower bound meets the size of an explicit cover.
    MatchingBounds,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactCover {
    pub k: usize,
    pub solution: CoverSolution,
    pub certificate: Certificate,
}

struct Comp {
    /// Indices into the twin-reduced vertex set.
    verts: Vec<usize>,
    w: Vec<f64>,
    members: Vec<Vec<usize>>,
    sets: Vec<BitSet>,
    mass: Vec<f64>,
    clique_of: Vec<Vec<usize>>,
    total: f64,
}

impl Comp {
    fn new(g: &Graph, verts: Vec<usize>, rw: &[f64], limit: usize) -> Result<Comp> {
        let sub = g.induced(&verts);
        let sets = maximal_cliques(&sub, limit)?;
        let w: Vec<f64> = verts.iter().map(|&v| rw[v]).collect();
        let members: Vec<Vec<usize>> = sets.iter().map(|s| s.iter().collect()).collect();
        let mass: Vec<f64> = members.iter().map(|m| m.iter().map(|&i| w[i]).sum()).collect();
        let mut clique_of = vec![Vec::new(); verts.len()];
        for (c, m) in members.iter().enumerate() {
            for &v in m {
                clique_of[v].push(c);
            }
        }
        let total = w.iter().sum();
        Ok(Comp { verts, w, members, sets, mass, clique_of, total })
    }

    fn size(&self) -> usize {
        self.verts.len()
    }

    /// Greedy nested profile: entry `j` holds the coverage of the first `j`
    /// greedy picks.
    fn greedy(&self) -> Profile {
        let s = self.size();
        let mut covered = vec![false; s];
        let mut cov = vec![0.0];
        let mut sols = vec![Vec::new()];
        let mut chosen = Vec::new();
        let mut mass = 0.0;
        while mass < self.total - 1e-15 {
            let mut best = (-1.0, usize::MAX);
            for (c, m) in self.members.iter().enumerate() {
                let g: f64 = m.iter().filter(|&&v| !covered[v]).map(|&v| self.w[v]).sum();
                if g > best.0 + 1e-15 {
                    best = (g, c);
                }
            }
            if best.0 <= 0.0 {
                break;
            }
            for &v in &self.members[best.1] {
                covered[v] = true;
            }
            mass += best.0;
            chosen.push(best.1);
            cov.push(mass);
            sols.push(chosen.clone());
        }
        Profile { cov, sols }
    }

    /// Fractional upper bound on the coverage of `j` cliques: each covered
    /// vertex costs at least `w_v / M_v` cliques, where `M_v` is the largest
    /// clique mass through `v`.
    fn fractional(&self, len: usize) -> Vec<f64> {
        let mut items: Vec<(f64, f64)> = (0..self.size())
            .map(|v| {
                let m = self.clique_of[v].iter().map(|&c| self.mass[c]).fold(0.0, f64::max);
                (m, self.w[v])
            })
            .collect();
        items.sort_by(|a, b| b.0.total_cmp(&a.0));
        (0..len)
            .map(|j| {
                let mut budget = j as f64;
                let mut got = 0.0;
                for &(m, w) in &items {
                    let cost = w / m;
                    if cost <= budget {
                        budget -= cost;
                        got += w;
                    } else {
                        got += budget * m;
                        break;
                    }
                }
                got.min(self.total)
            })
            .collect()
    }

    fn exact_profile(&self, budget: u64, nodes: &mut u64) -> Result<Profile> {
        let greedy = self.greedy();
        let mut cov = vec![0.0];
        let mut sols = vec![Vec::new()];
        for j in 1..greedy.cov.len() {
            let mut dfs = Dfs {
                c: self,
                j,
                best: greedy.cov[j],
                best_sol: greedy.sols[j].clone(),
                cur: Vec::new(),
                nodes,
                budget,
            };
            let full = BitSet::full(self.size());
            dfs.rec(&BitSet::new(self.size()), &BitSet::new(self.size()), 0.0, &full)?;
            let (b, s) = (dfs.best, dfs.best_sol);
            cov.push(b);
            sols.push(s);
            if b >= self.total - 1e-15 {
                break;
            }
        }
        Ok(Profile { cov, sols })
    }

    /// Swap-based local search for `j` cliques of large union mass.
    fn local_search(&self, j: usize, target: f64, iters: usize, seed: u64, init: &[usize]) -> (f64, Vec<usize>) {
        let s = self.size();
        let mut g = rng::stream2(seed, "cover-search", j as u64, s as u64);
        let mut chosen: Vec<usize> = init.iter().copied().take(j).collect();
        while chosen.len() < j {
            chosen.push(g.gen_range(0..self.members.len()));
        }
        let mut cnt = vec![0u32; s];
        for &c in &chosen {
            for &v in &self.members[c] {
                cnt[v] += 1;
            }
        }
        let mut pos = vec![usize::MAX; s];
        let mut unc: Vec<usize> = Vec::new();
        let mut mass = 0.0;
        for v in 0..s {
            if cnt[v] == 0 {
                pos[v] = unc.len();
                unc.push(v);
            } else {
                mass += self.w[v];
            }
        }
        let mut best = (mass, chosen.clone());
        let nc = self.members.len();
        let mut tabu_add = vec![0usize; nc];
        let mut tabu_del = vec![0usize; nc];
        let tenure = 7 + j / 8;
        let mut in_add = vec![false; s];
        let mut ties: Vec<usize> = Vec::new();
        for it in 1..=iters {
            if best.0 >= target - 1e-15 || unc.is_empty() {
                break;
            }
            let v = unc[g.gen_range(0..unc.len())];
            let mut top = -1.0;
            ties.clear();
            for &c in &self.clique_of[v] {
                if tabu_add[c] > it {
                    continue;
                }
                let gain: f64 = self.members[c].iter().filter(|&&u| cnt[u] == 0).map(|&u| self.w[u]).sum();
                if gain > top + 1e-15 {
                    top = gain;
                    ties.clear();
                    ties.push(c);
                } else if gain >= top - 1e-15 {
                    ties.push(c);
                }
            }
            if ties.is_empty() {
                continue;
            }
            let add = ties[g.gen_range(0..ties.len())];
            for &u in &self.members[add] {
                in_add[u] = true;
            }
            let mut low = f64::INFINITY;
            ties.clear();
            for (slot, &d) in chosen.iter().enumerate() {
                if tabu_del[d] > it || d == add {
                    continue;
                }
                let loss: f64 =
                    self.members[d].iter().filter(|&&u| cnt[u] == 1 && !in_add[u]).map(|&u| self.w[u]).sum();
                if loss < low - 1e-15 {
                    low = loss;
                    ties.clear();
                    ties.push(slot);
                } else if loss <= low + 1e-15 {
                    ties.push(slot);
                }
            }
            for &u in &self.members[add] {
                in_add[u] = false;
            }
            if ties.is_empty() {
                continue;
            }
            let slot = ties[g.gen_range(0..ties.len())];
            if top - low < -1e-15 && g.gen::<f64>() >= 0.02 {
                continue;
            }
            let old = chosen[slot];
            for &u in &self.members[old] {
                cnt[u] -= 1;
                if cnt[u] == 0 {
                    pos[u] = unc.len();
                    unc.push(u);
                    mass -= self.w[u];
                }
            }
            for &u in &self.members[add] {
                if cnt[u] == 0 {
                    let p = pos[u];
                    let last = *unc.last().expect("nonempty");
                    unc[p] = last;
                    pos[last] = p;
                    unc.pop();
                    pos[u] = usize::MAX;
                    mass += self.w[u];
                }
                cnt[u] += 1;
            }
            chosen[slot] = add;
            tabu_add[old] = it + tenure;
            tabu_del[add] = it + tenure;
            if mass > best.0 + 1e-15 {
                best = (mass, chosen.clone());
            }
        }
        // Recompute from scratch to avoid drift in the running sum.
        let mut cov = vec![false; s];
        for &c in &best.1 {
            for &v in &self.members[c] {
                cov[v] = true;
            }
        }
        let exact: f64 = (0..s).filter(|&v| cov[v]).map(|v| self.w[v]).sum();
        (exact, best.1)
    }
}

#[derive(Clone, Debug)]
struct Profile {
    cov: Vec<f64>,
    sols: Vec<Vec<usize>>,
}

impl Profile {
    fn at(&self, j: usize) -> f64 {
        self.cov[j.min(self.cov.len() - 1)]
    }

    fn sol(&self, j: usize) -> &[usize] {
        &self.sols[j.min(self.sols.len() - 1)]
    }
}

struct Dfs<'a, 'n> {
    c: &'a Comp,
    j: usize,
    best: f64,
    best_sol: Vec<usize>,
    cur: Vec<usize>,
    nodes: &'n mut u64,
    budget: u64,
}

impl Dfs<'_, '_> {
    fn rec(&mut self, covered: &BitSet, excluded: &BitSet, mass: f64, full: &BitSet) -> Result<()> {
        *self.nodes += 1;
        if *self.nodes > self.budget {
            return Err(Error::Budget(format!("cover search exceeded {} nodes", self.budget)));
        }
        if mass > self.best + 1e-15 {
            self.best = mass;
            self.best_sol = self.cur.clone();
        }
        if self.cur.len() == self.j {
            return Ok(());
        }
        let mut undecided = full.and_not(covered);
        undecided.difference_with(excluded);
        let mut v = usize::MAX;
        let mut und_mass = 0.0;
        for u in undecided.iter() {
            und_mass += self.c.w[u];
            if v == usize::MAX || self.c.w[u] > self.c.w[v] {
                v = u;
            }
        }
        if v == usize::MAX {
            return Ok(());
        }
        let left = (self.j - self.cur.len()) as f64;
        let mut max_gain: f64 = 0.0;
        for s in &self.c.sets {
            if s.intersects(&undecided) {
                max_gain = max_gain.max(s.and(&undecided).mass(&self.c.w));
            }
        }
        if mass + und_mass.min(left * max_gain) <= self.best + 1e-15 {
            return Ok(());
        }
        let mut gains: Vec<(f64, usize, BitSet)> = Vec::new();
        for &c in &self.c.clique_of[v] {
            let g = self.c.sets[c].and(&undecided);
            gains.push((g.mass(&self.c.w), c, g));
        }
        gains.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut kept: Vec<(f64, usize, BitSet)> = Vec::new();
        for cand in gains {
            if !kept.iter().any(|k| cand.2.is_subset(&k.2)) {
                kept.push(cand);
            }
        }
        for (gm, c, g) in kept {
            let mut nc = covered.clone();
            nc.union_with(&g);
            self.cur.push(c);
            self.rec(&nc, excluded, mass + gm, full)?;
            self.cur.pop();
        }
        let mut ne = excluded.clone();
        ne.insert(v);
        self.rec(covered, &ne, mass, full)
    }
}

/// Max-plus convolution of profiles; `choice[c][k]` is the clique count
/// given to component `c` in the best split of `k` cliques among the
/// components `0..=c`.
fn combine(profiles: &[&Profile]) -> (Vec<f64>, Vec<Vec<usize>>) {
    let mut dp = vec![0.0];
    let mut choice = Vec::with_capacity(profiles.len());
    for p in profiles {
        let jmax = p.cov.len() - 1;
        let len = dp.len() + jmax;
        let mut next = vec![f64::NEG_INFINITY; len];
        let mut ch = vec![0usize; len];
        for (k, &base) in dp.iter().enumerate() {
            for j in 0..=jmax {
                let v = base + p.cov[j];
                if v > next[k + j] + 1e-15 {
                    next[k + j] = v;
                    ch[k + j] = j;
                }
            }
        }
        // Coverage is monotone in the number of cliques.
        for k in 1..len {
            if next[k - 1] > next[k] {
                next[k] = next[k - 1];
                ch[k] = usize::MAX;
            }
        }
        dp = next;
        choice.push(ch);
    }
    (dp, choice)
}

/// Clique counts per component for a total of `k`, following `choice`.
fn split(choice: &[Vec<usize>], profiles: &[&Profile], mut k: usize) -> Vec<usize> {
    let mut out = vec![0; choice.len()];
    for c in (0..choice.len()).rev() {
        let mut kk = k.min(choice[c].len() - 1);
        while choice[c][kk] == usize::MAX {
            kk -= 1;
        }
        let j = choice[c][kk];
        out[c] = j.min(profiles[c].cov.len() - 1);
        k = kk - j;
    }
    out
}

fn first_reaching(dp: &[f64], total: f64, u_max: f64) -> Option<usize> {
    dp.iter().position(|&c| total - c <= u_max)
}

/// Exact minimal part count for covers of `t` at scale `eps < 1`.
pub fn exact_cover(t: &FiniteMetricTriple, eps: f64, cfg: &CoverConfig) -> Result<ExactCover> {
    let n = t.n();
    if n > cfg.max_points {
        return Err(Error::CapExceeded(format!("exact covers are limited to {} points, got {n}", cfg.max_points)));
    }
    let u_max = eps - STRICT_MARGIN;
    let g = Graph::threshold(t.dist(), eps);
    let classes = g.twin_classes();
    let rg = g.quotient(&classes);
    let rw: Vec<f64> = classes.iter().map(|c| c.iter().map(|&i| t.w()[i]).sum()).collect();
    let total: f64 = rw.iter().sum();

    let mut comps = Vec::new();
    let mut cliques = 0usize;
    for verts in rg.components() {
        let c = Comp::new(&rg, verts, &rw, cfg.clique_limit.saturating_sub(cliques).max(1))?;
        cliques += c.members.len();
        comps.push(c);
    }

    let mut exact: Vec<Option<Profile>> = Vec::with_capacity(comps.len());
    for c in &comps {
        let p = if c.size() <= cfg.small_component {
            let mut nodes = 0;
            Some(c.exact_profile(u64::MAX, &mut nodes)?)
        } else if c.size() <= cfg.medium_component {
            let mut nodes = 0;
            match c.exact_profile(cfg.dfs_budget, &mut nodes) {
                Ok(p) => Some(p),
                Err(Error::Budget(_)) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        exact.push(p);
    }

    let mut lower: Vec<Profile> = Vec::with_capacity(comps.len());
    let mut upper: Vec<Profile> = Vec::with_capacity(comps.len());
    for (c, p) in comps.iter().zip(&exact) {
        match p {
            Some(p) => {
                lower.push(p.clone());
                upper.push(p.clone());
            }
            None => {
                let gr = c.greedy();
                let ub = c.fractional(gr.cov.len());
                let sols = vec![Vec::new(); ub.len()];
                upper.push(Profile { cov: ub, sols });
                lower.push(gr);
            }
        }
    }

    let all_exact = exact.iter().all(Option::is_some);
    let ups: Vec<&Profile> = upper.iter().collect();
    let (dp_up, choice_up) = combine(&ups);
    let k_lo = first_reaching(&dp_up, total, u_max).ok_or_else(|| Error::Solver("no cover reaches the target".into()))?;

    let big: Vec<usize> = (0..comps.len()).filter(|&i| exact[i].is_none()).collect();
    let mut k_hi = {
        let lows: Vec<&Profile> = lower.iter().collect();
        first_reaching(&combine(&lows).0, total, u_max).expect("greedy profiles reach full coverage")
    };
    if k_hi > k_lo {
        let ideal = split(&choice_up, &ups, k_lo);
        for &b in &big {
            let others: Vec<&Profile> = (0..comps.len()).filter(|&i| i != b).map(|i| &lower[i]).collect();
            let (dp_o, _) = combine(&others);
            let centre = ideal[b];
            let lo = centre.saturating_sub(2).max(1);
            for j in lo..=centre + 2 {
                if j > k_lo {
                    break;
                }
                let rest = dp_o[(k_lo - j).min(dp_o.len() - 1)];
                let need = total - u_max - rest;
                let have = lower[b].at(j);
                if have >= need || upper[b].at(j) < need - 1e-15 {
                    continue;
                }
                let init = lower[b].sol(j).to_vec();
                let (m, sol) = comps[b].local_search(j, need, cfg.search_iters, 0x5eed, &init);
                if m > have {
                    while lower[b].cov.len() <= j {
                        let last = *lower[b].cov.last().expect("nonempty");
                        let s = lower[b].sols.last().expect("nonempty").clone();
                        lower[b].cov.push(last);
                        lower[b].sols.push(s);
                    }
                    lower[b].cov[j] = m;
                    lower[b].sols[j] = sol;
                }
                if m >= need {
                    break;
                }
            }
        }
        let lows: Vec<&Profile> = lower.iter().collect();
        k_hi = first_reaching(&combine(&lows).0, total, u_max).expect("greedy profiles reach full coverage");
    }
    if k_hi > k_lo {
        return Err(Error::CapExceeded(format!(
            "cover count not certified: lower bound {k_lo}, best cover {k_hi}"
        )));
    }

    let lows: Vec<&Profile> = lower.iter().collect();
    let (_, choice) = combine(&lows);
    let js = split(&choice, &lows, k_hi);
    let mut parts = Vec::new();
    let mut assigned = vec![false; rw.len()];
    for (ci, c) in comps.iter().enumerate() {
        for &cl in lower[ci].sol(js[ci]) {
            let mut part = Vec::new();
            for &lv in &c.members[cl] {
                let rv = c.verts[lv];
                if !assigned[rv] {
                    assigned[rv] = true;
                    part.extend(classes[rv].iter().copied());
                }
            }
            parts.push(part);
        }
    }
    let solution = CoverSolution::from_parts(t, parts);
    debug_assert!(solution.verify(t, eps));
    let certificate = if all_exact { Certificate::Exhaustive } else { Certificate::MatchingBounds };
    Ok(ExactCover { k: solution.k(), solution, certificate })
}

/// Repeatedly takes the ball of radius `eps / 2` with the most uncovered
/// mass (lowest centre index on ties) until the rest weighs less than `eps`.
pub fn greedy_cover(t: &FiniteMetricTriple, eps: f64) -> CoverSolution {
    let n = t.n();
    let w = t.w();
    let u_max = eps - STRICT_MARGIN;
    let r = 0.5 * eps - STRICT_MARGIN;
    let balls: Vec<Vec<usize>> = (0..n).map(|c| (0..n).filter(|&x| t.dist().get(c, x) <= r).collect()).collect();
    let mut covered = vec![false; n];
    let mut left: f64 = w.iter().sum();
    let mut parts = Vec::new();
    while left > u_max {
        let mut best = (-1.0, 0);
        for (c, b) in balls.iter().enumerate() {
            let g: f64 = b.iter().filter(|&&x| !covered[x]).map(|&x| w[x]).sum();
            if g > best.0 {
                best = (g, c);
            }
        }
        let mut part: Vec<usize> = Vec::new();
        for &x in &balls[best.1] {
            if !covered[x] && part.iter().all(|&y| t.dist().get(x, y) <= eps - STRICT_MARGIN) {
                part.push(x);
            }
        }
        for &x in &part {
            covered[x] = true;
        }
        left = (0..n).filter(|&x| !covered[x]).map(|x| w[x]).sum();
        parts.push(part);
    }
    CoverSolution::from_parts(t, parts)
}

/// Packing lower bound: points pairwise at distance `>= eps` need separate
/// parts unless removed, and at most the lightest ones fit in the removed
/// set. Returns the bound and the separated set.
pub fn packing_bound(t: &FiniteMetricTriple, eps: f64) -> (usize, Vec<usize>) {
    let n = t.n();
    let w = t.w();
    let u_max = eps - STRICT_MARGIN;
    let g = Graph::threshold(t.dist(), eps);
    let score = |set: &[usize]| -> usize {
        let mut ws: Vec<f64> = set.iter().map(|&i| w[i]).collect();
        ws.sort_by(|a, b| a.total_cmp(b));
        let mut acc = 0.0;
        let mut r = 0;
        for x in ws {
            if acc + x <= u_max {
                acc += x;
                r += 1;
            } else {
                break;
            }
        }
        set.len() - r
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]).then(a.cmp(&b)));
    let mut greedy = Vec::new();
    for &v in &order {
        if greedy.iter().all(|&u| !g.has_edge(u, v)) {
            greedy.push(v);
        }
    }
    greedy.sort_unstable();
    let mut best = (score(&greedy), greedy);
    if n <= 20 {
        let adj: Vec<u32> = (0..n).map(|i| g.adj[i].iter().fold(0u32, |m, j| m | 1 << j)).collect();
        let mut stack = vec![(0usize, 0u32)];
        while let Some((next, set)) = stack.pop() {
            if next == n {
                let members: Vec<usize> = (0..n).filter(|&i| set >> i & 1 == 1).collect();
                let s = score(&members);
                if s > best.0 {
                    best = (s, members);
                }
                continue;
            }
            stack.push((next + 1, set));
            if adj[next] & set == 0 {
                stack.push((next + 1, set | 1 << next));
            }
        }
    }
    (best.0.max(1), best.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DistanceMatrix;

    #[test]
    fn discrete_space_needs_singletons() {
        let t = FiniteMetricTriple::uniform(DistanceMatrix::from_fn(5, |_, _| 1.0).unwrap());
        // Removing two of five points leaves mass 0.6 > 1 - 0.45.
        let c = exact_cover(&t, 0.45, &CoverConfig::default()).unwrap();
        assert_eq!(c.k, 3);
        assert!(c.solution.verify(&t, 0.45));
        assert_eq!(packing_bound(&t, 0.45).0, 3);
        assert_eq!(greedy_cover(&t, 0.45).k(), 3);
    }

    #[test]
    fn strictness_at_the_threshold() {
        // Distances exactly eps cannot share a part; mass exactly eps cannot be removed.
        let t = FiniteMetricTriple::uniform(DistanceMatrix::from_fn(4, |_, _| 0.25).unwrap());
        let c = exact_cover(&t, 0.25, &CoverConfig::default()).unwrap();
        assert_eq!(c.k, 4);
    }

    #[test]
    fn local_search_reaches_a_perfect_matching() {
        // Path on 12 vertices: 6 edges cover everything.
        let d = DistanceMatrix::from_fn(12, |i, j| (j - i) as f64).unwrap();
        let g = Graph::threshold(&d, 1.5);
        let comp = Comp::new(&g, (0..12).collect(), &[1.0 / 12.0; 12], 1000).unwrap();
        let (m, sol) = comp.local_search(6, 1.0, 10_000, 1, &[]);
        assert!((m - 1.0).abs() < 1e-12);
        assert_eq!(sol.len(), 6);
    }
}
