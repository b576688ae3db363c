//! Threshold graphs and clique enumeration.

use std::collections::HashMap;

use crate::bitset::BitSet;
use crate::metric::DistanceMatrix;
use crate::{Error, Result, STRICT_MARGIN};

/// Simple undirected graph stored as adjacency bitsets (no self loops).
#[derive(Clone, Debug)]
pub struct Graph {
    pub adj: Vec<BitSet>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![BitSet::new(n); n] }
    }

    /// `i ~ j` iff `d_ij < eps`, realized as `d_ij <= eps - STRICT_MARGIN`.
    pub fn threshold(d: &DistanceMatrix, eps: f64) -> Self {
        let n = d.n();
        let cut = eps - STRICT_MARGIN;
        let mut g = Self::empty(n);
        for i in 0..n {
            let r = d.row(i);
            for j in i + 1..n {
                if r[j] <= cut {
                    g.adj[i].insert(j);
                    g.adj[j].insert(i);
                }
            }
        }
        g
    }

    /// Complement graph.
    pub fn complement(&self) -> Self {
        let n = self.n();
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j && !self.adj[i].contains(j) {
                    g.adj[i].insert(j);
                }
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    pub fn induced(&self, vs: &[usize]) -> Graph {
        let mut g = Self::empty(vs.len());
        for (a, &i) in vs.iter().enumerate() {
            for (b, &j) in vs.iter().enumerate().skip(a + 1) {
                if self.adj[i].contains(j) {
                    g.adj[a].insert(b);
                    g.adj[b].insert(a);
                }
            }
        }
        g
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                k += 1;
                for u in self.adj[v].iter() {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Groups of true twins (equal closed neighbourhoods), ordered by first
    /// member. Twins can always share a part, so covers may merge them.
    pub fn twin_classes(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut index: HashMap<BitSet, usize> = HashMap::new();
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for v in 0..n {
            let mut closed = self.adj[v].clone();
            closed.insert(v);
            match index.get(&closed) {
                Some(&c) => classes[c].push(v),
                None => {
                    index.insert(closed, classes.len());
                    classes.push(vec![v]);
                }
            }
        }
        classes
    }

    /// Quotient by a partition into cliques of identical neighbourhoods.
    pub fn quotient(&self, classes: &[Vec<usize>]) -> Graph {
        let reps: Vec<usize> = classes.iter().map(|c| c[0]).collect();
        self.induced(&reps)
    }
}

/// All maximal cliques (Bron-Kerbosch with Tomita pivoting), in a
/// deterministic order. Fails once more than `limit` cliques are found.
pub fn maximal_cliques(g: &Graph, limit: usize) -> Result<Vec<BitSet>> {
    let n = g.n();
    let mut out = Vec::new();
    let r = BitSet::new(n);
    let p = BitSet::full(n);
    let x = BitSet::new(n);
    bk(g, r, p, x, &mut out, limit)?;
    Ok(out)
}

fn bk(g: &Graph, r: BitSet, mut p: BitSet, mut x: BitSet, out: &mut Vec<BitSet>, limit: usize) -> Result<()> {
    if p.is_empty() {
        if x.is_empty() {
            if out.len() >= limit {
                return Err(Error::CapExceeded(format!("more than {limit} maximal cliques")));
            }
            out.push(r);
        }
        return Ok(());
    }
    let mut pivot = usize::MAX;
    let mut best = 0usize;
    for u in p.iter().chain(x.iter()) {
        let c = p.and(&g.adj[u]).count();
        if pivot == usize::MAX || c > best {
            best = c;
            pivot = u;
        }
    }
    let cand: Vec<usize> = p.and_not(&g.adj[pivot]).iter().collect();
    for v in cand {
        let mut r2 = r.clone();
        r2.insert(v);
        bk(g, r2, p.and(&g.adj[v]), x.and(&g.adj[v]), out, limit)?;
        p.remove(v);
        x.insert(v);
    }
    Ok(())
}

/// A maximum clique by branch and bound with greedy-colouring bounds.
/// `budget` limits the number of search nodes.
pub fn maximum_clique(g: &Graph, budget: u64) -> Result<Vec<usize>> {
    let n = g.n();
    let mut best: Vec<usize> = Vec::new();
    let mut nodes = 0u64;
    let mut cur = Vec::new();
    mc_expand(g, &mut cur, BitSet::full(n), &mut best, &mut nodes, budget)?;
    best.sort_unstable();
    Ok(best)
}

fn colour_order(g: &Graph, p: &BitSet) -> (Vec<usize>, Vec<usize>) {
    let mut order = Vec::new();
    let mut bounds = Vec::new();
    let mut uncoloured = p.clone();
    let mut colour = 0;
    while !uncoloured.is_empty() {
        colour += 1;
        let mut q = uncoloured.clone();
        while let Some(v) = q.first() {
            q.remove(v);
            q.difference_with(&g.adj[v]);
            uncoloured.remove(v);
            order.push(v);
            bounds.push(colour);
        }
    }
    (order, bounds)
}

fn mc_expand(
    g: &Graph,
    cur: &mut Vec<usize>,
    mut p: BitSet,
    best: &mut Vec<usize>,
    nodes: &mut u64,
    budget: u64,
) -> Result<()> {
    *nodes += 1;
    if *nodes > budget {
        return Err(Error::Budget(format!("maximum-clique search exceeded {budget} nodes")));
    }
    let (order, bounds) = colour_order(g, &p);
    for idx in (0..order.len()).rev() {
        if cur.len() + bounds[idx] <= best.len() {
            return Ok(());
        }
        let v = order[idx];
        cur.push(v);
        let np = p.and(&g.adj[v]);
        if np.is_empty() {
            if cur.len() > best.len() {
                *best = cur.clone();
            }
        } else {
            mc_expand(g, cur, np, best, nodes, budget)?;
        }
        cur.pop();
        p.remove(v);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Graph {
        let mut g = Graph::empty(n);
        for i in 0..n {
            let j = (i + 1) % n;
            g.adj[i].insert(j);
            g.adj[j].insert(i);
        }
        g
    }

    #[test]
    fn cliques_of_a_cycle_are_its_edges() {
        let c = maximal_cliques(&cycle(5), 100).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.iter().all(|k| k.count() == 2));
        assert_eq!(maximum_clique(&cycle(5), 1000).unwrap().len(), 2);
        assert_eq!(maximum_clique(&cycle(5).complement(), 1000).unwrap().len(), 2);
    }

    #[test]
    fn twins_and_components() {
        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.0, 5.0, 5.0],
            vec![0.0, 0.0, 5.0, 5.0],
            vec![5.0, 5.0, 0.0, 1.0],
            vec![5.0, 5.0, 1.0, 0.0],
        ])
        .unwrap();
        let g = Graph::threshold(&d, 0.5);
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(g.twin_classes(), vec![vec![0, 1], vec![2], vec![3]]);
    }

    #[test]
    fn clique_limit_is_reported() {
        let g = Graph::empty(10);
        assert!(matches!(maximal_cliques(&g, 5), Err(Error::CapExceeded(_))));
    }
}
