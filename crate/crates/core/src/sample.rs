//! Triples known only through a sampler and a distance oracle.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::metric::{DistanceMatrix, FiniteMetricTriple};
use crate::{rng, SYM_TOL};

/// A metric measure space that can be sampled i.i.d. from its measure.
pub trait SampleableTriple: Sync {
    type Point: Clone + Send + Sync;

    fn draw(&self, rng: &mut ChaCha8Rng) -> Self::Point;
    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;
    fn describe(&self) -> String;
}

/// Points `0..n` of replica `replica`. Point `i` depends only on
/// `(seed, replica, i)`, so shorter samples are prefixes of longer ones.
pub fn sample_points<S: SampleableTriple + ?Sized>(t: &S, seed: u64, replica: u64, n: usize) -> Vec<S::Point> {
    (0..n).map(|i| t.draw(&mut rng::stream2(seed, "sample", replica, i as u64))).collect()
}

pub fn distance_matrix<S: SampleableTriple + ?Sized>(t: &S, pts: &[S::Point]) -> DistanceMatrix {
    DistanceMatrix::from_upper(pts.len(), |i, j| t.distance(&pts[i], &pts[j]))
}

/// The empirical triple of `n` i.i.d. points with uniform weights.
pub fn subsample<S: SampleableTriple + ?Sized>(t: &S, n: usize, seed: u64, replica: u64) -> FiniteMetricTriple {
    let pts = sample_points(t, seed, replica, n);
    FiniteMetricTriple::uniform(distance_matrix(t, &pts))
}

/// Largest symmetry or triangle defect over `checks` random point triples.
pub fn spot_check<S: SampleableTriple + ?Sized>(t: &S, checks: usize, seed: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for c in 0..checks as u64 {
        let p = sample_points(t, seed ^ 0x5107, c, 3);
        let (a, b, x) = (&p[0], &p[1], &p[2]);
        worst = worst.max((t.distance(a, b) - t.distance(b, a)).abs());
        worst = worst.max(t.distance(a, x) - t.distance(a, b) - t.distance(b, x));
        worst = worst.max(t.distance(a, a).abs());
    }
    worst
}

pub fn spot_check_ok<S: SampleableTriple + ?Sized>(t: &S, checks: usize, seed: u64) -> bool {
    spot_check(t, checks, seed) <= SYM_TOL
}

/// Unit-length circle with arc distance; diameter 1/2.
#[derive(Clone, Copy, Debug, Default)]
pub struct Circle;

impl SampleableTriple for Circle {
    type Point = f64;
    fn draw(&self, rng: &mut ChaCha8Rng) -> f64 {
        rng.gen::<f64>()
    }
    fn distance(&self, a: &f64, b: &f64) -> f64 {
        let d = (a - b).abs();
        d.min(1.0 - d)
    }
    fn describe(&self) -> String {
        "circle".into()
    }
}

/// Round two-sphere with geodesic distance divided by pi; diameter 1.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sphere;

impl SampleableTriple for Sphere {
    type Point = [f64; 3];
    fn draw(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.gen::<f64>();
        let r = (1.0 - z * z).max(0.0).sqrt();
        [r * phi.cos(), r * phi.sin(), z]
    }
    fn distance(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        // atan2 keeps small angles accurate where acos loses half the digits.
        let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let c = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt().atan2(dot) / PI
    }
    fn describe(&self) -> String {
        "sphere".into()
    }
}

/// `{0,1}^dim` with uniform measure and normalized Hamming distance.
#[derive(Clone, Copy, Debug)]
pub struct Cube {
    pub dim: usize,
}

impl SampleableTriple for Cube {
    type Point = u64;
    fn draw(&self, rng: &mut ChaCha8Rng) -> u64 {
        let mask = if self.dim >= 64 { u64::MAX } else { (1u64 << self.dim) - 1 };
        rng.gen::<u64>() & mask
    }
    fn distance(&self, a: &u64, b: &u64) -> f64 {
        f64::from((a ^ b).count_ones()) / self.dim as f64
    }
    fn describe(&self) -> String {
        format!("cube:{}", self.dim)
    }
}

impl Cube {
    /// The whole cube as a finite triple.
    pub fn triple(&self) -> FiniteMetricTriple {
        let n = 1usize << self.dim;
        FiniteMetricTriple::uniform(DistanceMatrix::from_upper(n, |i, j| self.distance(&(i as u64), &(j as u64))))
    }
}

/// A finite triple sampled through its weights; points are indices.
impl SampleableTriple for FiniteMetricTriple {
    type Point = usize;
    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &w) in self.w().iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.w().iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }
    fn distance(&self, a: &usize, b: &usize) -> f64 {
        self.dist().get(*a, *b)
    }
    fn describe(&self) -> String {
        format!("finite:{}", self.n())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_projective() {
        let a = sample_points(&Circle, 3, 0, 10);
        let b = sample_points(&Circle, 3, 0, 11);
        assert_eq!(&b[..10], &a[..]);
        assert_ne!(sample_points(&Circle, 3, 1, 10), a);
    }

    #[test]
    fn oracles_are_semimetrics() {
        assert!(spot_check_ok(&Circle, 500, 1));
        assert!(spot_check_ok(&Sphere, 500, 1));
        assert!(spot_check_ok(&Cube { dim: 4 }, 500, 1));
        assert_eq!(Cube { dim: 4 }.triple().n(), 16);
    }
}
