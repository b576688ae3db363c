//! Symbolic systems, their window laws and the finite triples realizing the
//! averaged and partition-function metrics.
//!
//! The base semimetric of every symbolic system is the cut on coordinate 0,
//! so averaging over `n` shifts gives the normalized Hamming distance on
//! length-`n` windows. Products average their children's cut semimetrics.

pub mod adic;
mod descriptor;
mod omega;
pub mod rotation;
pub mod substitution;

pub use adic::{centrality_holds, Adic, AdicPath, SigmaSchedule};
pub use descriptor::{parse_descriptor, Descriptor};
pub use omega::{omega_pattern_margin, omega_terms, omega_triple, omega_truncated, OmegaTriple};
pub use rotation::RotationTriple;
pub use substitution::{FactorTable, Substitution, DEFAULT_PREFIX_LEN};

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{DistanceMatrix, FiniteMetricTriple, ProbabilityVector};
use crate::sample::{subsample, SampleableTriple};
use crate::{Error, Result};

/// Default cap on the number of windows of an exact realization.
pub const DEFAULT_EXACT_CAP: usize = 4096;

#[derive(Clone, Debug)]
pub enum SystemKind {
    Bernoulli(ProbabilityVector),
    Substitution(Substitution),
    Adic(Adic),
    Product(Vec<SymbolicSystem>),
}

#[derive(Clone, Debug)]
pub struct SymbolicSystem {
    pub kind: SystemKind,
    name: String,
}

/// How a window law becomes a finite triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realization {
    /// Every window with its probability, up to `cap` windows.
    Exact { cap: usize },
    /// `m` i.i.d. windows with uniform weights.
    MonteCarlo { m: usize, seed: u64 },
}

impl Realization {
    pub fn exact() -> Self {
        Realization::Exact { cap: DEFAULT_EXACT_CAP }
    }

    /// `exact` or `montecarlo:M`; the seed comes from elsewhere.
    pub fn parse(s: &str, cap: usize, seed: u64) -> Result<Self> {
        match s.split_once(':') {
            None if s == "exact" => Ok(Realization::Exact { cap }),
            Some(("montecarlo", m)) => {
                let m = m.trim().parse().map_err(|_| Error::Value(format!("bad sample count in '{s}'")))?;
                Ok(Realization::MonteCarlo { m, seed })
            }
            _ => Err(Error::Value(format!("unknown realization '{s}', expected exact or montecarlo:M"))),
        }
    }
}

/// Windows of one length with their probabilities. Each window stores its
/// channels one after another, `n` symbols each.
#[derive(Clone, Debug)]
pub struct WindowLaw {
    pub n: usize,
    pub channel_weights: Vec<f64>,
    pub words: Vec<Vec<u8>>,
    pub probs: Vec<f64>,
    /// False when frequencies come from a finite prefix.
    pub exact: bool,
}

/// Weighted Hamming distance between windows.
#[derive(Clone, Debug)]
pub struct WindowMetric {
    pub n: usize,
    pub channel_weights: Vec<f64>,
    /// Per-coordinate weights; `None` means `1/n` each.
    pub time_weights: Option<Vec<f64>>,
}

impl WindowMetric {
    pub fn averaged(n: usize, channel_weights: Vec<f64>) -> Self {
        WindowMetric { n, channel_weights, time_weights: None }
    }

    pub fn distance(&self, a: &[u8], b: &[u8]) -> f64 {
        let n = self.n;
        let mut total = 0.0;
        for (c, &wc) in self.channel_weights.iter().enumerate() {
            let (xa, xb) = (&a[c * n..(c + 1) * n], &b[c * n..(c + 1) * n]);
            let part = match &self.time_weights {
                None => xa.iter().zip(xb).filter(|(p, q)| p != q).count() as f64 / n as f64,
                Some(tw) => xa.iter().zip(xb).zip(tw).filter(|((p, q), _)| p != q).map(|(_, w)| w).sum(),
            };
            if self.channel_weights.len() == 1 {
                return part;
            }
            total += wc * part;
        }
        total
    }

    pub fn matrix(&self, words: &[Vec<u8>]) -> DistanceMatrix {
        DistanceMatrix::from_upper(words.len(), |i, j| self.distance(&words[i], &words[j]))
    }
}

fn digit(x: u8) -> char {
    char::from_digit(u32::from(x), 36).unwrap_or('?')
}

impl SymbolicSystem {
    pub fn bernoulli(p: ProbabilityVector) -> Result<Self> {
        if p.len() < 2 || p.len() > 36 {
            return Err(Error::Value(format!("Bernoulli alphabet must have 2 to 36 letters, got {}", p.len())));
        }
        let name = format!("bernoulli:{}", p.as_slice().iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(","));
        Ok(SymbolicSystem { kind: SystemKind::Bernoulli(p), name })
    }

    pub fn substitution(rules: &[(char, String)], prefix_len: usize) -> Result<Self> {
        let s = Substitution::new(rules, prefix_len)?;
        let name = format!("subst:{}", rules.iter().map(|(c, w)| format!("{c}={w}")).collect::<Vec<_>>().join(","));
        Ok(SymbolicSystem { kind: SystemKind::Substitution(s), name })
    }

    pub fn morse(prefix_len: usize) -> Result<Self> {
        let mut s = Self::substitution(&[('0', "01".into()), ('1', "10".into())], prefix_len)?;
        s.name = "morse".into();
        Ok(s)
    }

    /// Chacon's rule `0 -> 0010, 1 -> 1`, read from the fixed point of `0`.
    pub fn chacon(prefix_len: usize) -> Result<Self> {
        let mut s = Self::substitution(&[('0', "0010".into()), ('1', "1".into())], prefix_len)?;
        s.name = "chacon".into();
        Ok(s)
    }

    pub fn adic(sigma: SigmaSchedule) -> Self {
        let name = format!("adic:{}", sigma.entries().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(","));
        SymbolicSystem { kind: SystemKind::Adic(Adic::new(sigma)), name }
    }

    pub fn product(children: Vec<SymbolicSystem>) -> Result<Self> {
        if children.len() < 2 {
            return Err(Error::Value("a product needs at least two factors".into()));
        }
        let name = format!("product:({})", children.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(";"));
        Ok(SymbolicSystem { kind: SystemKind::Product(children), name })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Weight of each coordinate channel in the base semimetric.
    pub fn channel_weights(&self) -> Vec<f64> {
        match &self.kind {
            SystemKind::Product(ch) => {
                let k = ch.len() as f64;
                ch.iter().flat_map(|c| c.channel_weights().into_iter().map(move |w| w / k)).collect()
            }
            _ => vec![1.0],
        }
    }

    /// All windows of length `n` with their probabilities.
    pub fn window_law(&self, n: usize, cap: usize) -> Result<WindowLaw> {
        let (words, probs, exact) = self.raw_law(n, cap)?;
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!("window probabilities sum to {total}")));
        }
        Ok(WindowLaw { n, channel_weights: self.channel_weights(), words, probs, exact })
    }

    fn raw_law(&self, n: usize, cap: usize) -> Result<(Vec<Vec<u8>>, Vec<f64>, bool)> {
        match &self.kind {
            SystemKind::Bernoulli(p) => {
                let support: Vec<u8> = (0..p.len() as u8).filter(|&a| p[a as usize] > 0.0).collect();
                let count = (support.len() as f64).powi(n as i32);
                if count > cap as f64 {
                    return Err(Error::CapExceeded(format!(
                        "{count} windows of length {n} exceed the exact cap {cap}; use a Monte Carlo realization"
                    )));
                }
                let mut words = vec![Vec::new()];
                let mut probs = vec![1.0];
                for _ in 0..n {
                    let mut w2 = Vec::with_capacity(words.len() * support.len());
                    let mut p2 = Vec::with_capacity(words.len() * support.len());
                    for (w, &pw) in words.iter().zip(&probs) {
                        for &a in &support {
                            let mut x = w.clone();
                            x.push(a);
                            w2.push(x);
                            p2.push(pw * p[a as usize]);
                        }
                    }
                    words = w2;
                    probs = p2;
                }
                Ok((words, probs, true))
            }
            SystemKind::Substitution(s) => {
                let f = s.factors(n, cap).map_err(|e| match e {
                    Error::CapExceeded(m) => Error::CapExceeded(format!("{m}; use a Monte Carlo realization")),
                    other => other,
                })?;
                Ok((f.words, f.freqs, f.exact))
            }
            SystemKind::Adic(a) => {
                let k = Adic::level_for(n);
                let words = a.level_words(k)?;
                let share = 1.0 / words.len() as f64;
                let mut merged: BTreeMap<Vec<u8>, usize> = BTreeMap::new();
                for w in &words {
                    *merged.entry(w[..n].to_vec()).or_insert(0) += 1;
                    if merged.len() > cap {
                        return Err(Error::CapExceeded(format!(
                            "more than {cap} windows of length {n}; use a Monte Carlo realization"
                        )));
                    }
                }
                let probs = merged.values().map(|&c| c as f64 * share).collect();
                Ok((merged.into_keys().collect(), probs, true))
            }
            SystemKind::Product(children) => {
                let mut words = vec![Vec::new()];
                let mut probs = vec![1.0];
                let mut exact = true;
                for c in children {
                    let (cw, cp, ce) = c.raw_law(n, cap)?;
                    exact &= ce;
                    if (words.len() as f64) * (cw.len() as f64) > cap as f64 {
                        return Err(Error::CapExceeded(format!(
                            "product has more than {cap} windows of length {n}; use a Monte Carlo realization"
                        )));
                    }
                    let mut w2 = Vec::with_capacity(words.len() * cw.len());
                    let mut p2 = Vec::with_capacity(words.len() * cw.len());
                    for (w, &pw) in words.iter().zip(&probs) {
                        for (x, &px) in cw.iter().zip(&cp) {
                            w2.push([w.as_slice(), x.as_slice()].concat());
                            p2.push(pw * px);
                        }
                    }
                    words = w2;
                    probs = p2;
                }
                Ok((words, probs, exact))
            }
        }
    }

    /// Checks that windows of length `n` can be sampled.
    pub fn check_horizon(&self, n: usize) -> Result<()> {
        match &self.kind {
            SystemKind::Adic(a) if Adic::level_for(n) > a.sigma.levels() => Err(Error::Value(format!(
                "schedule has {} entries, windows of length {n} need {}",
                a.sigma.levels(),
                Adic::level_for(n)
            ))),
            SystemKind::Substitution(s) if s.prefix().len() < n => {
                Err(Error::InsufficientData(format!("prefix of length {} is shorter than {n}", s.prefix().len())))
            }
            SystemKind::Product(ch) => ch.iter().try_for_each(|c| c.check_horizon(n)),
            _ => Ok(()),
        }
    }

    /// One window of length `n` drawn from the stationary law. Substitution
    /// windows start at a uniform position of the fixed-point prefix.
    pub fn sample_window(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<u8>> {
        match &self.kind {
            SystemKind::Bernoulli(p) => Ok((0..n)
                .map(|_| {
                    let u: f64 = rng.gen();
                    let mut acc = 0.0;
                    for (a, &pa) in p.as_slice().iter().enumerate() {
                        acc += pa;
                        if u < acc {
                            return a as u8;
                        }
                    }
                    p.as_slice().iter().rposition(|&x| x > 0.0).unwrap_or(0) as u8
                })
                .collect()),
            SystemKind::Substitution(s) => {
                let u = s.prefix();
                if u.len() < n {
                    return Err(Error::InsufficientData(format!("prefix of length {} is shorter than {n}", u.len())));
                }
                let start = rng.gen_range(0..=u.len() - n);
                Ok(u[start..start + n].to_vec())
            }
            SystemKind::Adic(a) => {
                let mut w = a.sample_word(Adic::level_for(n), rng)?;
                w.truncate(n);
                Ok(w)
            }
            SystemKind::Product(children) => {
                let mut out = Vec::new();
                for c in children {
                    out.extend(c.sample_window(n, rng)?);
                }
                Ok(out)
            }
        }
    }

    fn leaf_render(&self, w: &[u8], n: usize, out: &mut Vec<String>) {
        match &self.kind {
            SystemKind::Product(children) => {
                let mut off = 0;
                for c in children {
                    let len = c.channel_weights().len() * n;
                    c.leaf_render(&w[off..off + len], n, out);
                    off += len;
                }
            }
            SystemKind::Substitution(s) => out.push(s.render(w)),
            _ => out.push(w.iter().map(|&x| digit(x)).collect()),
        }
    }

    /// Text form of a window; product channels are separated by `|`.
    pub fn render_window(&self, w: &[u8], n: usize) -> String {
        let mut parts = Vec::new();
        self.leaf_render(w, n, &mut parts);
        parts.join("|")
    }
}

/// Windows of one length of a symbolic system, as a sampleable triple with
/// the averaged metric.
pub struct WindowSource<'a> {
    pub system: &'a SymbolicSystem,
    pub metric: WindowMetric,
}

impl<'a> WindowSource<'a> {
    pub fn new(system: &'a SymbolicSystem, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Value("window length must be at least 1".into()));
        }
        system.check_horizon(n)?;
        Ok(WindowSource { system, metric: WindowMetric::averaged(n, system.channel_weights()) })
    }
}

impl SampleableTriple for WindowSource<'_> {
    type Point = Vec<u8>;
    fn draw(&self, rng: &mut ChaCha8Rng) -> Vec<u8> {
        self.system.sample_window(self.metric.n, rng).expect("horizon checked at construction")
    }
    fn distance(&self, a: &Vec<u8>, b: &Vec<u8>) -> f64 {
        self.metric.distance(a, b)
    }
    fn describe(&self) -> String {
        format!("{}@{}", self.system.name(), self.metric.n)
    }
}

/// The triple of the metric averaged over the first `n` shifts.
pub fn averaged_triple(s: &SymbolicSystem, n: usize, realization: Realization) -> Result<FiniteMetricTriple> {
    if n == 0 {
        return Err(Error::Value("horizon must be at least 1".into()));
    }
    match realization {
        Realization::Exact { cap } => {
            let law = s.window_law(n, cap)?;
            let metric = WindowMetric::averaged(n, law.channel_weights.clone());
            let labels = law.words.iter().map(|w| s.render_window(w, n)).collect();
            let weights = ProbabilityVector::normalized(law.probs)?;
            FiniteMetricTriple::new(metric.matrix(&law.words), weights)?.with_labels(labels)
        }
        Realization::MonteCarlo { m, seed } => {
            if m == 0 {
                return Err(Error::Value("Monte Carlo realization needs at least one sample".into()));
            }
            let src = WindowSource::new(s, n)?;
            Ok(subsample(&src, m, seed, n as u64))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fair() -> SymbolicSystem {
        SymbolicSystem::bernoulli(ProbabilityVector::uniform(2)).unwrap()
    }

    #[test]
    fn bernoulli_windows() {
        let law = fair().window_law(2, 4096).unwrap();
        assert_eq!(law.words.len(), 4);
        assert!(law.probs.iter().all(|&p| p == 0.25));
        assert_eq!(fair().window_law(0, 4096).unwrap().probs, vec![1.0]);
        let t = averaged_triple(&fair(), 2, Realization::exact()).unwrap();
        let mut ds: Vec<f64> = t.dist().as_slice().to_vec();
        ds.sort_by(f64::total_cmp);
        ds.dedup();
        assert_eq!(ds, vec![0.0, 0.5, 1.0]);
        assert!(matches!(averaged_triple(&fair(), 13, Realization::exact()), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn morse_four_windows() {
        let m = SymbolicSystem::morse(1 << 12).unwrap();
        let t = averaged_triple(&m, 4, Realization::exact()).unwrap();
        assert_eq!(t.n(), 10);
        let labels = t.labels().unwrap();
        let i = labels.iter().position(|l| l == "0110").unwrap();
        let j = labels.iter().position(|l| l == "1001").unwrap();
        assert_eq!(t.dist().get(i, j), 1.0);
    }

    #[test]
    fn product_windows_multiply() {
        let p = SymbolicSystem::product(vec![fair(), fair()]).unwrap();
        let law = p.window_law(3, 4096).unwrap();
        assert_eq!(law.words.len(), 64);
        assert!(law.probs.iter().all(|&x| x == 1.0 / 64.0));
        assert_eq!(p.render_window(&law.words[1], 3), "000|001");
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let m = SymbolicSystem::morse(1 << 12).unwrap();
        let a = averaged_triple(&m, 8, Realization::MonteCarlo { m: 30, seed: 4 }).unwrap();
        let b = averaged_triple(&m, 8, Realization::MonteCarlo { m: 30, seed: 4 }).unwrap();
        assert_eq!(a.dist(), b.dist());
    }
}
