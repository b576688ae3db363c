//! The partition-function metric `(1 - z) sum_k z^k rho(T^k x, T^k y)`.

use super::{Realization, SymbolicSystem, WindowMetric};
use crate::metric::{FiniteMetricTriple, ProbabilityVector};
use crate::sample::{subsample, SampleableTriple};
use crate::{Error, Result};

/// A truncated partition-function triple and its truncation certificate.
#[derive(Clone, Debug)]
pub struct OmegaTriple {
    pub triple: FiniteMetricTriple,
    pub z: f64,
    /// Number of shift terms kept.
    pub terms: usize,
    /// Uniform bound `z^terms` on the neglected tail (the base metric is at
    /// most 1).
    pub tail_bound: f64,
}

/// Fewest terms whose neglected tail `z^terms` is below `tol`.
pub fn omega_terms(z: f64, tol: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Value(format!("z must lie in [0, 1), got {z}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Value(format!("tolerance must be positive, got {tol}")));
    }
    let mut terms = 1usize;
    let mut tail = z;
    while tail >= tol {
        terms += 1;
        tail *= z;
    }
    Ok(terms)
}

fn time_weights(z: f64, terms: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(terms);
    let mut p = 1.0 - z;
    for _ in 0..terms {
        w.push(p);
        p *= z;
    }
    w
}

struct OmegaSource<'a> {
    system: &'a SymbolicSystem,
    metric: WindowMetric,
}

impl SampleableTriple for OmegaSource<'_> {
    type Point = Vec<u8>;
    fn draw(&self, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<u8> {
        self.system.sample_window(self.metric.n, rng).expect("horizon checked at construction")
    }
    fn distance(&self, a: &Vec<u8>, b: &Vec<u8>) -> f64 {
        self.metric.distance(a, b)
    }
    fn describe(&self) -> String {
        format!("omega:{}", self.system.name())
    }
}

/// The partition-function triple keeping the first `terms` shifts.
pub fn omega_truncated(s: &SymbolicSystem, z: f64, terms: usize, realization: Realization) -> Result<OmegaTriple> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::Value(format!("z must lie in [0, 1), got {z}")));
    }
    if terms == 0 {
        return Err(Error::Value("at least one term is needed".into()));
    }
    let metric = WindowMetric { n: terms, channel_weights: s.channel_weights(), time_weights: Some(time_weights(z, terms)) };
    let triple = match realization {
        Realization::Exact { cap } => {
            let law = s.window_law(terms, cap)?;
            let labels = law.words.iter().map(|w| s.render_window(w, terms)).collect();
            FiniteMetricTriple::new(metric.matrix(&law.words), ProbabilityVector::normalized(law.probs)?)?
                .with_labels(labels)?
        }
        Realization::MonteCarlo { m, seed } => {
            s.check_horizon(terms)?;
            let src = OmegaSource { system: s, metric };
            subsample(&src, m, seed, terms as u64)
        }
    };
    Ok(OmegaTriple { triple, z, terms, tail_bound: z.powi(terms as i32) })
}

/// The partition-function triple truncated so the neglected tail is below
/// `tol`.
pub fn omega_triple(s: &SymbolicSystem, z: f64, tol: f64, realization: Realization) -> Result<OmegaTriple> {
    omega_truncated(s, z, omega_terms(z, tol)?, realization)
}

/// Smallest value of `Omega(x, y) - T_av^n(x, y) / e` at `z = 1 - 1/n` over
/// every nonempty set of coordinates below `n` where two sequences may
/// differ (equal sequences give 0 on both sides).
/// `Omega` keeps only its first `n` terms, a lower bound for the full sum.
pub fn omega_pattern_margin(n: usize) -> Result<f64> {
    if n == 0 || n > 24 {
        return Err(Error::Value(format!("pattern enumeration supports 1 <= n <= 24, got {n}")));
    }
    let z = 1.0 - 1.0 / n as f64;
    let w = time_weights(z, n);
    let inv_e = (-1.0f64).exp();
    let mut worst = f64::INFINITY;
    for mask in 1u32..(1u32 << n) {
        let omega: f64 = (0..n).filter(|&t| mask >> t & 1 == 1).map(|t| w[t]).sum();
        let avg = mask.count_ones() as f64 / n as f64;
        worst = worst.min(omega - inv_e * avg);
    }
    Ok(worst)
}
