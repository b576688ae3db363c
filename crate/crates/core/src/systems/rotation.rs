//! Circle rotation with the arc-length metric.
//!
//! Points are fixed-point fractions of a turn (`u64`, scale `2^64`), so
//! rotating a pair keeps its difference bit for bit and the metric is
//! invariant exactly rather than up to rounding.

use crate::metric::{DistanceMatrix, FiniteMetricTriple};
use crate::{Error, Result};

const TURN: f64 = 18_446_744_073_709_551_616.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationTriple {
    /// Rotation angle in turns.
    pub alpha: f64,
    /// Number of equispaced points.
    pub m: usize,
}

fn to_fixed(x: f64) -> u64 {
    let f = x.rem_euclid(1.0);
    // 2^64 * f can round up to 2^64 for f just below one.
    let v = f * TURN;
    if v >= TURN {
        0
    } else {
        v as u64
    }
}

fn arc(a: u64, b: u64) -> u64 {
    let d = a.wrapping_sub(b);
    d.min(d.wrapping_neg())
}

impl RotationTriple {
    pub fn new(alpha: f64, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Value(format!("discretization needs at least 2 points, got {m}")));
        }
        if !alpha.is_finite() {
            return Err(Error::Value("rotation angle must be finite".into()));
        }
        Ok(RotationTriple { alpha, m })
    }

    fn points(&self) -> Vec<u64> {
        (0..self.m).map(|i| ((i as u128) << 64).checked_div(self.m as u128).unwrap() as u64).collect()
    }

    /// The average of the arc metric over the first `n` rotations, on the
    /// `m` equispaced points with uniform weights.
    pub fn triple(&self, n: usize) -> Result<FiniteMetricTriple> {
        if n == 0 {
            return Err(Error::Value("horizon must be at least 1".into()));
        }
        let pts = self.points();
        let step = to_fixed(self.alpha);
        let d = DistanceMatrix::from_upper(self.m, |i, j| {
            let mut sum: u128 = 0;
            let (mut x, mut y) = (pts[i], pts[j]);
            for _ in 0..n {
                sum += arc(x, y) as u128;
                x = x.wrapping_add(step);
                y = y.wrapping_add(step);
            }
            (sum / n as u128) as f64 / TURN
        });
        Ok(FiniteMetricTriple::uniform(d))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_are_half_a_turn_apart() {
        let r = RotationTriple::new(0.381966, 2).unwrap();
        assert_eq!(r.triple(7).unwrap().dist().get(0, 1), 0.5);
    }

    #[test]
    fn averaging_is_the_identity() {
        let r = RotationTriple::new((5f64.sqrt() - 1.0) / 2.0, 64).unwrap();
        let base = r.triple(1).unwrap();
        for n in [2, 3, 17, 64] {
            assert_eq!(r.triple(n).unwrap().dist(), base.dist());
        }
    }
}
