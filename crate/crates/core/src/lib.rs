//! Epsilon-entropy of finite metric measure triples, transport distances
//! between triples, symbolic systems with averaged metrics, and the
//! scaling-entropy profiles built on top of them.
//!
//! Every quantity is reported in natural-log units (nats); callers convert to
//! bits where needed via [`LogBase`].

pub mod bitset;
pub mod entropy;
pub mod error;
pub mod io;
pub mod lp;
pub mod matrixdist;
pub mod metric;
pub mod report;
pub mod rng;
pub mod sample;
pub mod scaling;
pub mod systems;
pub mod transport;

pub use error::{Error, Result};
pub use metric::{DistanceMatrix, FiniteMetricTriple, ProbabilityVector};

/// Absolute tolerance for symmetry and the triangle inequality.
pub const SYM_TOL: f64 = 1e-9;
/// Absolute tolerance for the total mass of a probability vector.
pub const WEIGHT_TOL: f64 = 1e-12;
/// Margin used to turn the strict inequalities `diam < eps` and
/// `mass < eps` into closed comparisons `<= eps - STRICT_MARGIN`.
pub const STRICT_MARGIN: f64 = 1e-12;

/// Logarithm base used when presenting entropies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogBase {
    #[default]
    Nats,
    Bits,
}

impl LogBase {
    /// Converts a value in nats to this base.
    pub fn convert(self, nats: f64) -> f64 {
        match self {
            LogBase::Nats => nats,
            LogBase::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            LogBase::Nats => "nats",
            LogBase::Bits => "bits",
        }
    }
}
