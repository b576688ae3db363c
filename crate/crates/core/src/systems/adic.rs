//! The adic transformation on the graph of ordered pairs.
//!
//! Level `k` vertices are binary words of length `2^k`. A schedule `sigma`
//! selects the subsets `V_k`: concatenations `ab` of level `k-1` words when
//! `sigma_k = 1`, doublings `aa` when `sigma_k = 0`. The measure at level
//! `k` is uniform on `V_k`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest level set that is ever materialized.
pub const ADIC_LEVEL_CAP: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaSchedule {
    sigma: Vec<u8>,
}

impl SigmaSchedule {
    pub fn new(sigma: Vec<u8>) -> Result<Self> {
        if let Some(b) = sigma.iter().find(|&&b| b > 1) {
            return Err(Error::Value(format!("schedule entries must be 0 or 1, got {b}")));
        }
        Ok(SigmaSchedule { sigma })
    }

    /// Entries `sigma_1, sigma_2, ...`.
    pub fn entries(&self) -> &[u8] {
        &self.sigma
    }

    pub fn levels(&self) -> usize {
        self.sigma.len()
    }

    /// `sigma_k` for `k >= 1`.
    pub fn at(&self, k: usize) -> Result<u8> {
        self.sigma
            .get(k.wrapping_sub(1))
            .copied()
            .ok_or_else(|| Error::Value(format!("schedule has {} entries, level {k} requested", self.sigma.len())))
    }

    /// `log2 |V_k|`, which doubles exactly at the levels with `sigma_k = 1`.
    pub fn log2_size(&self, k: usize) -> Result<u128> {
        let mut s: u128 = 1;
        for j in 1..=k {
            if self.at(j)? == 1 {
                s = s.checked_mul(2).ok_or_else(|| Error::CapExceeded("level size overflows".into()))?;
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug)]
pub struct Adic {
    pub sigma: SigmaSchedule,
}

impl Adic {
    pub fn new(sigma: SigmaSchedule) -> Self {
        Adic { sigma }
    }

    /// Level used for windows of length `n`: the least `k` with `2^k >= n`.
    pub fn level_for(n: usize) -> usize {
        n.max(1).next_power_of_two().trailing_zeros() as usize
    }

    /// All words of `V_k` in lexicographic order.
    pub fn level_words(&self, k: usize) -> Result<Vec<Vec<u8>>> {
        let log = self.sigma.log2_size(k)?;
        if log > 20 || (1usize << log) > ADIC_LEVEL_CAP {
            return Err(Error::CapExceeded(format!("level {k} has 2^{log} words, cap is {ADIC_LEVEL_CAP}")));
        }
        let mut words: Vec<Vec<u8>> = vec![vec![0], vec![1]];
        for j in 1..=k {
            words = if self.sigma.at(j)? == 1 {
                let mut out = Vec::with_capacity(words.len() * words.len());
                for a in &words {
                    for b in &words {
                        out.push([a.as_slice(), b.as_slice()].concat());
                    }
                }
                out
            } else {
                words.iter().map(|a| [a.as_slice(), a.as_slice()].concat()).collect()
            };
        }
        Ok(words)
    }

    /// A uniform word of `V_k`, built without materializing the level.
    pub fn sample_word(&self, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u8>> {
        if k == 0 {
            return Ok(vec![rng.gen_range(0..2u8)]);
        }
        let a = self.sample_word(k - 1, rng)?;
        if self.sigma.at(k)? == 1 {
            let b = self.sample_word(k - 1, rng)?;
            Ok([a, b].concat())
        } else {
            Ok([a.as_slice(), a.as_slice()].concat())
        }
    }
}

/// A finite path from level 0 to level `K`: the vertices along it and the
/// edge colours (0 = prefix edge, 1 = suffix edge).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdicPath {
    pub vertices: Vec<Vec<u8>>,
    pub colors: Vec<u8>,
}

impl AdicPath {
    /// The minimal path ending at `top`: all edges coloured 0.
    pub fn minimal(top: Vec<u8>) -> Result<Self> {
        let len = top.len();
        if !len.is_power_of_two() {
            return Err(Error::Value(format!("vertex length {len} is not a power of two")));
        }
        let levels = len.trailing_zeros() as usize;
        let mut vertices = vec![top];
        for _ in 0..levels {
            let v = vertices.last().unwrap();
            vertices.push(v[..v.len() / 2].to_vec());
        }
        vertices.reverse();
        Ok(AdicPath { vertices, colors: vec![0; levels] })
    }

    /// Position of the level-0 vertex inside the top word.
    pub fn position(&self) -> usize {
        self.colors.iter().enumerate().map(|(i, &c)| (c as usize) << i).sum()
    }

    /// Symbol read at the bottom of the path.
    pub fn symbol(&self) -> u8 {
        self.vertices[0][0]
    }

    /// The adic successor: the first edge coloured 0 becomes 1, the edges
    /// below it become 0 and the tail is kept. `None` on the maximal path.
    pub fn successor(&self) -> Option<AdicPath> {
        let n = self.colors.iter().position(|&c| c == 0)?;
        let mut next = self.clone();
        // colors[i] is the edge from level i to level i + 1.
        next.colors[n] = 1;
        let upper = &next.vertices[n + 1];
        next.vertices[n] = upper[upper.len() / 2..].to_vec();
        for i in (0..n).rev() {
            next.colors[i] = 0;
            let up = &next.vertices[i + 1];
            next.vertices[i] = up[..up.len() / 2].to_vec();
        }
        Some(next)
    }
}

/// Whether the uniform measure on `V_{k+1}` projects to the uniform measure
/// on `V_k` through both the prefix and the suffix edges.
pub fn centrality_holds(adic: &Adic, k: usize) -> Result<bool> {
    let lower = adic.level_words(k)?;
    let upper = adic.level_words(k + 1)?;
    let half = lower[0].len();
    for side in 0..2 {
        let mut counts = std::collections::BTreeMap::new();
        for w in &upper {
            *counts.entry(&w[side * half..(side + 1) * half]).or_insert(0usize) += 1;
        }
        if counts.len() != lower.len() || counts.values().any(|&c| c * lower.len() != upper.len()) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adic(s: &[u8]) -> Adic {
        Adic::new(SigmaSchedule::new(s.to_vec()).unwrap())
    }

    #[test]
    fn level_sizes() {
        assert_eq!(adic(&[0, 0, 0]).level_words(3).unwrap().len(), 2);
        assert_eq!(adic(&[1, 1, 1]).level_words(2).unwrap().len(), 16);
        let a = adic(&[1, 0, 1]);
        assert_eq!(a.level_words(3).unwrap().len(), 16);
        assert_eq!(a.sigma.log2_size(3).unwrap(), 4);
        assert!(matches!(adic(&[1; 6]).level_words(5), Err(Error::CapExceeded(_))));
        assert!(SigmaSchedule::new(vec![2]).is_err());
    }

    #[test]
    fn successor_reads_the_top_word() {
        let top = vec![0, 1, 1, 0, 1, 0, 0, 1];
        let mut p = AdicPath::minimal(top.clone()).unwrap();
        let mut read = vec![p.symbol()];
        while let Some(q) = p.successor() {
            assert_eq!(q.position(), p.position() + 1);
            p = q;
            read.push(p.symbol());
        }
        assert_eq!(read, top);
    }

    #[test]
    fn level_measures_are_central() {
        let a = adic(&[1, 0, 1, 1]);
        for k in 0..4 {
            assert!(centrality_holds(&a, k).unwrap());
        }
    }
}
