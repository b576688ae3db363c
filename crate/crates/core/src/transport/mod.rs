//! Optimal transport, the m-norm, and distances between triples.

pub mod dist;
pub mod mnorm;
pub mod simplex;

pub use dist::{dist_k, dist_m, dist_pair, CrossMetric, DistMode, DistOptions, DistPair};
pub use mnorm::{m_norm, mdist, MNormResult, SymmetricArray};
pub use simplex::{transport, TransportPlan, TransportSolution};

use crate::metric::{DistanceMatrix, ProbabilityVector};
use crate::Result;

/// Optimal transport cost between two probability vectors for the cost
/// matrix `cost` (`mu.len() x nu.len()`, row-major).
pub fn kantorovich(cost: &[f64], mu: &ProbabilityVector, nu: &ProbabilityVector) -> Result<TransportSolution> {
    transport(cost, mu.as_slice(), nu.as_slice())
}

/// Kantorovich distance between two measures on the same finite space.
pub fn kantorovich_metric(d: &DistanceMatrix, mu: &[f64], nu: &[f64]) -> Result<f64> {
    Ok(transport(d.as_slice(), mu, nu)?.value)
}
