//! Substitutions, their fixed points and factor frequencies.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, Result};

/// Default length of the fixed-point prefix used for empirical statistics.
pub const DEFAULT_PREFIX_LEN: usize = 1 << 20;

#[derive(Clone, Debug)]
pub struct Substitution {
    letters: Vec<char>,
    rules: Vec<Vec<u8>>,
    start: u8,
    prefix: Vec<u8>,
    primitive: bool,
}

/// Length-`n` factors of the fixed point with their frequencies.
#[derive(Clone, Debug)]
pub struct FactorTable {
    pub words: Vec<Vec<u8>>,
    pub freqs: Vec<f64>,
    /// True for Perron-vector frequencies, false for prefix counts.
    pub exact: bool,
    pub prefix_len: usize,
}

impl Substitution {
    /// Builds a substitution from `(letter, image)` pairs. Every letter
    /// occurring in an image must have a rule.
    pub fn new(rules: &[(char, String)], prefix_len: usize) -> Result<Self> {
        if rules.is_empty() {
            return Err(Error::Construction("substitution has no rules".into()));
        }
        let mut letters: Vec<char> = rules.iter().map(|r| r.0).collect();
        letters.sort_unstable();
        letters.dedup();
        if letters.len() != rules.len() {
            return Err(Error::Construction("a letter has two rules".into()));
        }
        if letters.len() > 255 {
            return Err(Error::Construction("alphabet larger than 255 letters".into()));
        }
        let index = |c: char| letters.binary_search(&c).map(|i| i as u8);
        let mut table = vec![Vec::new(); letters.len()];
        for (c, img) in rules {
            if img.is_empty() {
                return Err(Error::Construction(format!("empty image for '{c}'")));
            }
            let word: std::result::Result<Vec<u8>, _> = img.chars().map(index).collect();
            let word = word.map_err(|_| Error::Construction(format!("image of '{c}' uses a letter without a rule")))?;
            table[index(*c).unwrap() as usize] = word;
        }
        let start = (0..table.len())
            .find(|&a| table[a][0] == a as u8 && table[a].len() >= 2)
            .or_else(|| (0..table.len()).find(|&a| table[a] == [a as u8]))
            .ok_or_else(|| Error::Construction("no letter starts its own image, so there is no fixed point".into()))?
            as u8;
        let primitive = is_primitive(&table);
        let mut s = Substitution { letters, rules: table, start, prefix: Vec::new(), primitive };
        s.prefix = s.fixed_point(prefix_len.max(1));
        Ok(s)
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn rules(&self) -> &[Vec<u8>] {
        &self.rules
    }

    pub fn alphabet_size(&self) -> usize {
        self.letters.len()
    }

    pub fn is_primitive(&self) -> bool {
        self.primitive
    }

    pub fn is_injective(&self) -> bool {
        let set: BTreeSet<&Vec<u8>> = self.rules.iter().collect();
        set.len() == self.rules.len()
    }

    pub fn constant_length(&self) -> Option<usize> {
        let q = self.rules[0].len();
        self.rules.iter().all(|r| r.len() == q).then_some(q)
    }

    /// Letter the fixed point starts from.
    pub fn start_letter(&self) -> char {
        self.letters[self.start as usize]
    }

    pub fn prefix(&self) -> &[u8] {
        &self.prefix
    }

    pub fn apply(&self, w: &[u8]) -> Vec<u8> {
        w.iter().flat_map(|&a| self.rules[a as usize].iter().copied()).collect()
    }

    /// `xi^k(w)`.
    pub fn power(&self, w: &[u8], k: usize) -> Vec<u8> {
        let mut cur = w.to_vec();
        for _ in 0..k {
            cur = self.apply(&cur);
        }
        cur
    }

    pub fn word(&self, text: &str) -> Result<Vec<u8>> {
        text.chars()
            .map(|c| {
                self.letters.binary_search(&c).map(|i| i as u8).map_err(|_| Error::Value(format!("letter '{c}' not in alphabet")))
            })
            .collect()
    }

    pub fn render(&self, w: &[u8]) -> String {
        w.iter().map(|&a| self.letters[a as usize]).collect()
    }

    /// The first `len` letters of the fixed point. A letter mapped to itself
    /// yields the constant sequence.
    pub fn fixed_point(&self, len: usize) -> Vec<u8> {
        let mut cur = vec![self.start];
        while cur.len() < len {
            let next = self.apply(&cur);
            if next.len() == cur.len() {
                cur = vec![self.start; len];
                break;
            }
            cur = next;
        }
        cur.truncate(len);
        cur
    }

    /// Smallest `c` over all columns `i < q^k` of the letters
    /// `{xi^k(a)_i : a}`, scanning `k = 1..=k_max`.
    pub fn column_number(&self, k_max: usize) -> Result<usize> {
        let q = self.constant_length().ok_or_else(|| Error::Value("column number needs a constant-length substitution".into()))?;
        let mut images: Vec<Vec<u8>> = (0..self.alphabet_size() as u8).map(|a| vec![a]).collect();
        let mut best = usize::MAX;
        for _ in 0..k_max {
            images = images.iter().map(|w| self.apply(w)).collect();
            let len = images[0].len();
            for i in 0..len {
                let col: BTreeSet<u8> = images.iter().map(|w| w[i]).collect();
                best = best.min(col.len());
            }
            if best == 1 || len.saturating_mul(q) > 1 << 22 {
                break;
            }
        }
        Ok(best)
    }

    /// Largest `k` coprime with `q` dividing every return time of the first
    /// letter of the fixed point, read from the prefix.
    pub fn height(&self) -> Result<usize> {
        let q = self.constant_length().ok_or_else(|| Error::Value("height needs a constant-length substitution".into()))?;
        let u0 = self.prefix[0];
        let g = self.prefix.iter().enumerate().skip(1).filter(|&(_, &a)| a == u0).fold(0usize, |g, (n, _)| gcd(g, n));
        if g == 0 {
            return Err(Error::InsufficientData("first letter never returns in the prefix".into()));
        }
        let mut h = g;
        loop {
            let d = gcd(h, q);
            if d == 1 {
                break;
            }
            h /= d;
        }
        Ok(h)
    }

    /// Factor frequencies: the Perron vector of the induced substitution
    /// on `n`-words for primitive constant-length rules, prefix counts
    /// otherwise. Fails when more than `cap` factors exist.
    pub fn factors(&self, n: usize, cap: usize) -> Result<FactorTable> {
        let u = &self.prefix;
        if n == 0 {
            return Ok(FactorTable { words: vec![Vec::new()], freqs: vec![1.0], exact: true, prefix_len: u.len() });
        }
        if u.len() < n {
            return Err(Error::InsufficientData(format!("prefix of length {} is shorter than {n}", u.len())));
        }
        let mut counts: BTreeMap<&[u8], u64> = BTreeMap::new();
        for w in u.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
            if counts.len() > cap {
                return Err(Error::CapExceeded(format!("more than {cap} factors of length {n}")));
            }
        }
        let total = (u.len() - n + 1) as f64;
        let mut words: Vec<Vec<u8>> = counts.keys().map(|w| w.to_vec()).collect();
        let mut freqs: Vec<f64> = counts.values().map(|&c| c as f64 / total).collect();
        let exact = match self.constant_length() {
            Some(q) if self.primitive && q >= 2 => {
                let (w, f) = self.perron_frequencies(n, q, &words, &freqs, cap)?;
                words = w;
                freqs = f;
                true
            }
            _ => false,
        };
        Ok(FactorTable { words, freqs, exact, prefix_len: u.len() })
    }

    fn perron_frequencies(
        &self,
        n: usize,
        q: usize,
        seed: &[Vec<u8>],
        start: &[f64],
        cap: usize,
    ) -> Result<(Vec<Vec<u8>>, Vec<f64>)> {
        // Close the seed set under the induced map; images of factors are factors.
        let mut set: BTreeSet<Vec<u8>> = seed.iter().cloned().collect();
        let mut frontier: Vec<Vec<u8>> = seed.to_vec();
        while let Some(w) = frontier.pop() {
            let img = self.apply(&w);
            for i in 0..q {
                let f = img[i..i + n].to_vec();
                if set.insert(f.clone()) {
                    if set.len() > cap {
                        return Err(Error::CapExceeded(format!("more than {cap} factors of length {n}")));
                    }
                    frontier.push(f);
                }
            }
        }
        let words: Vec<Vec<u8>> = set.into_iter().collect();
        let pos: BTreeMap<&[u8], usize> = words.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
        let succ: Vec<Vec<usize>> = words
            .iter()
            .map(|w| {
                let img = self.apply(w);
                (0..q).map(|i| pos[&img[i..i + n]]).collect()
            })
            .collect();
        let mut v = vec![0.0; words.len()];
        for (w, &f) in seed.iter().zip(start) {
            v[pos[w.as_slice()]] = f;
        }
        // Lazy power iteration; the averaging removes periodic oscillation.
        let inv_q = 1.0 / q as f64;
        for _ in 0..200_000 {
            let mut next: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
            for (i, s) in succ.iter().enumerate() {
                let share = 0.5 * v[i] * inv_q;
                for &j in s {
                    next[j] += share;
                }
            }
            let total: f64 = next.iter().sum();
            next.iter_mut().for_each(|x| *x /= total);
            let diff = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            if diff < 1e-16 {
                break;
            }
        }
        Ok((words, v))
    }
}

fn is_primitive(table: &[Vec<u8>]) -> bool {
    let a = table.len();
    let reach: Vec<u128> = if a <= 128 {
        table.iter().map(|img| img.iter().fold(0u128, |m, &b| m | 1 << b)).collect()
    } else {
        return false;
    };
    let full = if a == 128 { u128::MAX } else { (1u128 << a) - 1 };
    // Letters reachable in exactly k steps; positivity by Wielandt's bound.
    let mut cur = reach.clone();
    for _ in 0..(a - 1) * (a - 1) + 1 {
        if cur.iter().all(|&m| m == full) {
            return true;
        }
        cur = cur
            .iter()
            .map(|&m| (0..a).filter(|&b| m >> b & 1 == 1).fold(0u128, |acc, b| acc | reach[b]))
            .collect();
    }
    cur.iter().all(|&m| m == full)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn morse() -> Substitution {
        Substitution::new(&[('0', "01".into()), ('1', "10".into())], 1 << 14).unwrap()
    }

    #[test]
    fn morse_words_and_invariants() {
        let m = morse();
        assert_eq!(m.render(&m.power(&m.word("0").unwrap(), 2)), "0110");
        assert!(m.is_primitive() && m.is_injective());
        assert_eq!(m.column_number(8).unwrap(), 2);
        assert_eq!(m.height().unwrap(), 1);
        let f = m.factors(4, 4096).unwrap();
        assert_eq!(f.words.len(), 10);
        assert!(f.exact);
        assert!((f.freqs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_rules() {
        let id = Substitution::new(&[('a', "a".into())], 64).unwrap();
        assert_eq!(id.prefix().len(), 64);
        assert_eq!(id.factors(5, 10).unwrap().words.len(), 1);
        let split = Substitution::new(&[('0', "00".into()), ('1', "11".into())], 64).unwrap();
        assert!(!split.is_primitive());
        assert!(Substitution::new(&[('0', "10".into()), ('1', "01".into())], 64).is_err());
    }
}
