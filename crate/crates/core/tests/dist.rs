//! Distance witnesses re-verified from scratch: the gluing is rebuilt and
//! re-solved, and the coupling's m-norm is recomputed from its support.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scalent_core::transport::dist::in_tiny_scope;
use scalent_core::transport::{dist_pair, kantorovich_metric, m_norm, DistOptions, SymmetricArray};
use scalent_core::{DistanceMatrix, FiniteMetricTriple, ProbabilityVector};

fn planar(rng: &mut ChaCha8Rng, n: usize, uniform: bool) -> FiniteMetricTriple {
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    let d = DistanceMatrix::from_upper(n, |i, j| {
        ((pts[i].0 - pts[j].0).powi(2) + (pts[i].1 - pts[j].1).powi(2)).sqrt() / 2f64.sqrt()
    });
    let w = if uniform {
        ProbabilityVector::uniform(n)
    } else {
        ProbabilityVector::normalized((0..n).map(|_| rng.gen_range(0.1..1.0)).collect()).unwrap()
    };
    FiniteMetricTriple::new(d, w).unwrap()
}

#[test]
fn witnesses_reproduce_their_values() {
    for seed in 0..30u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (t1, t2) = if seed % 3 == 0 {
            let n = rng.gen_range(5..=6);
            (planar(&mut rng, n, true), planar(&mut rng, n, true))
        } else {
            let (a, b) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
            (planar(&mut rng, a, false), planar(&mut rng, b, false))
        };
        assert!(in_tiny_scope(&t1, &t2));
        let r = dist_pair(&t1, &t2, &DistOptions { seed, ..DistOptions::default() }).unwrap();
        assert!(r.sandwich_holds(1e-6), "seed {seed}: K {} M {}", r.dist_k.value, r.dist_m.value);

        let cross = &r.dist_k.cross;
        assert!(cross.is_gluing(&t1, &t2), "seed {seed}: witness is not a gluing");
        let (n1, n2) = (t1.n(), t2.n());
        let mu: Vec<f64> = t1.w().iter().copied().chain(std::iter::repeat(0.0).take(n2)).collect();
        let nu: Vec<f64> = std::iter::repeat(0.0).take(n1).chain(t2.w().iter().copied()).collect();
        let resolved = kantorovich_metric(&cross.assembled(&t1, &t2), &mu, &nu).unwrap();
        assert!((resolved - r.dist_k.value).abs() < 1e-7, "seed {seed}: {resolved} vs {}", r.dist_k.value);

        let cells = &r.dist_m.witness.coupling.entries;
        let rows: Vec<f64> = (0..n1).map(|i| cells.iter().filter(|c| c.0 == i).map(|c| c.2).sum()).collect();
        let cols: Vec<f64> = (0..n2).map(|j| cells.iter().filter(|c| c.1 == j).map(|c| c.2).sum()).collect();
        assert!(rows.iter().zip(t1.w()).all(|(a, b)| (a - b).abs() < 1e-9));
        assert!(cols.iter().zip(t2.w()).all(|(a, b)| (a - b).abs() < 1e-9));
        let f = SymmetricArray::from_fn(cells.len(), |a, b| {
            t1.dist().get(cells[a].0, cells[b].0) - t2.dist().get(cells[a].1, cells[b].1)
        });
        let w: Vec<f64> = cells.iter().map(|c| c.2).collect();
        let again = m_norm(&f, &w).unwrap().value;
        assert!((again - r.dist_m.value).abs() < 1e-9, "seed {seed}: {again} vs {}", r.dist_m.value);
    }
}

#[test]
fn relabeled_copies_are_at_distance_zero() {
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let t = planar(&mut rng, 4, seed % 2 == 0);
        let s = t.permuted(&[3, 1, 0, 2]);
        let r = dist_pair(&t, &s, &DistOptions::default()).unwrap();
        assert!(r.dist_m.value < 1e-9 && r.dist_k.value < 1e-9, "seed {seed}");
    }
}
