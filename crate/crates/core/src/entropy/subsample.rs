//! Entropy of empirical subsamples compared with the entropy of the source.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{eps_entropy, EpsMethod};
use crate::metric::FiniteMetricTriple;
use crate::sample::{subsample, SampleableTriple};
use crate::{Error, Result};

/// Relative offset standing in for the right limit `eps+`.
pub const EPS_PLUS: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubsampleScheme {
    /// i.i.d. draws from the measure.
    Iid,
    /// The source triple itself (finite sources only).
    Identity,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsampleRow {
    pub n: usize,
    pub replicas: usize,
    pub values: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SubsampleTable {
    pub eps: f64,
    pub method: EpsMethod,
    pub seed: u64,
    pub rows: Vec<SubsampleRow>,
    /// Entropy of the source at `eps`, when it is a finite triple.
    pub full: Option<f64>,
    /// Entropy of the source at `eps * (1 + EPS_PLUS)`.
    pub full_plus: Option<f64>,
}

/// Entropy of `replicas` subsamples for each size in `sizes`. Zero-distance
/// duplicates are merged before solving.
pub fn subsample_entropy_bounds<S: SampleableTriple + ?Sized>(
    source: &S,
    full: Option<&FiniteMetricTriple>,
    eps: f64,
    sizes: &[usize],
    replicas: usize,
    seed: u64,
    method: EpsMethod,
    scheme: SubsampleScheme,
) -> Result<SubsampleTable> {
    if replicas == 0 {
        return Err(Error::Value("replicas must be positive".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let values: Vec<f64> = match scheme {
            SubsampleScheme::Iid => (0..replicas as u64)
                .into_par_iter()
                .map(|r| {
                    let t = subsample(source, n, seed ^ n as u64, r).quotient_zero_blocks();
                    eps_entropy(&t, eps, method).map(|e| e.value)
                })
                .collect::<Result<Vec<f64>>>()?,
            SubsampleScheme::Identity => {
                let t = full.ok_or_else(|| Error::Value("identity scheme needs a finite source".into()))?;
                vec![eps_entropy(t, eps, method)?.value]
            }
        };
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        rows.push(SubsampleRow { n, replicas: values.len(), values, mean, min, max });
    }
    let (full_v, full_plus) = match full {
        Some(t) => (
            Some(eps_entropy(t, eps, EpsMethod::Exact)?.value),
            Some(eps_entropy(t, eps * (1.0 + EPS_PLUS), EpsMethod::Exact)?.value),
        ),
        None => (None, None),
    };
    Ok(SubsampleTable { eps, method, seed, rows, full: full_v, full_plus })
}
