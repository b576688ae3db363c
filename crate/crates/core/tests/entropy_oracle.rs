//! Entropy solvers checked against brute-force enumeration and the
//! inequalities relating the entropy variants.

use proptest::prelude::*;
use scalent_core::entropy::{
    admissibility_event, eps_entropy, hk_entropy, shannon, subsample_entropy_bounds, tail_support, AdmissibilityMethod,
    EpsMethod, HkMode, SubsampleScheme,
};
use scalent_core::sample::Cube;
use scalent_core::transport::{kantorovich_metric, m_norm, SymmetricArray};
use scalent_core::{DistanceMatrix, FiniteMetricTriple, ProbabilityVector};

const MARGIN: f64 = 1e-12;

/// Planar points scaled to diameter at most one, with the given weights.
fn planar(xy: &[f64], raw_w: &[f64]) -> FiniteMetricTriple {
    let n = raw_w.len();
    let d = DistanceMatrix::from_fn(n, |i, j| {
        let (dx, dy) = (xy[2 * i] - xy[2 * j], xy[2 * i + 1] - xy[2 * j + 1]);
        (dx * dx + dy * dy).sqrt() / std::f64::consts::SQRT_2
    })
    .unwrap();
    FiniteMetricTriple::new(d, ProbabilityVector::normalized(raw_w.to_vec()).unwrap()).unwrap()
}

/// Least part count by enumerating every kept set and every partition of it
/// into small-diameter parts.
fn cover_oracle(t: &FiniteMetricTriple, eps: f64) -> usize {
    if eps >= 1.0 {
        return 1;
    }
    let n = t.n();
    let full = (1usize << n) - 1;
    let small = |m: usize| {
        (0..n).all(|i| m >> i & 1 == 0 || (i + 1..n).all(|j| m >> j & 1 == 0 || t.dist().get(i, j) <= eps - MARGIN))
    };
    let ok: Vec<bool> = (0..=full).map(small).collect();
    let mut parts = vec![usize::MAX; full + 1];
    parts[0] = 0;
    for s in 1..=full {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let c = sub | low;
            if ok[c] && parts[s ^ c] != usize::MAX {
                parts[s] = parts[s].min(parts[s ^ c] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mass = |m: usize| -> f64 { (0..n).filter(|&i| m >> i & 1 == 1).map(|i| t.w()[i]).sum() };
    (0..=full).filter(|&kept| mass(full ^ kept) <= eps - MARGIN).map(|kept| parts[kept]).min().unwrap()
}

/// Least entropy over all supports, with the measure moved to the nearest
/// support point and the cost measured by an independent transport solve.
fn hk_oracle(t: &FiniteMetricTriple, eps: f64) -> f64 {
    let n = t.n();
    let mut best = f64::INFINITY;
    for mask in 1usize..1 << n {
        let mut nu = vec![0.0; n];
        for i in 0..n {
            let c = (0..n)
                .filter(|&c| mask >> c & 1 == 1)
                .min_by(|&a, &b| t.dist().get(i, a).total_cmp(&t.dist().get(i, b)).then(a.cmp(&b)))
                .unwrap();
            nu[c] += t.w()[i];
        }
        let cost = kantorovich_metric(t.dist(), t.w(), &nu).unwrap();
        if cost <= eps - MARGIN + 1e-10 {
            best = best.min(shannon(&nu));
        }
    }
    best
}

fn h(t: &FiniteMetricTriple, eps: f64) -> f64 {
    eps_entropy(t, eps, EpsMethod::Exact).unwrap().value
}

fn coords(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (proptest::collection::vec(0.0f64..1.0, 2 * n), proptest::collection::vec(0.05f64..1.0, n))
}

fn instance(max_n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2..=max_n).prop_flat_map(coords)
}

#[test]
fn binary_square_at_point_three() {
    let t = Cube { dim: 2 }.triple();
    let r = eps_entropy(&t, 0.3, EpsMethod::Exact).unwrap();
    assert_eq!(r.k, 3);
    assert!((r.value - 3f64.ln()).abs() < 1e-15);
    assert_eq!(cover_oracle(&t, 0.3), 3);
}

#[test]
fn large_eps_and_identical_points() {
    let t = planar(&[0.1, 0.2, 0.9, 0.4, 0.3, 0.3], &[1.0, 2.0, 3.0]);
    for m in [EpsMethod::Exact, EpsMethod::Greedy, EpsMethod::PackLb] {
        assert_eq!(eps_entropy(&t, 1.5, m).unwrap().value, 0.0);
    }
    let z = FiniteMetricTriple::uniform(DistanceMatrix::zeros(7));
    for eps in [0.01, 0.3, 0.99] {
        assert_eq!(h(&z, eps), 0.0);
        assert_eq!(hk_entropy(&z, eps, HkMode::ExactTiny).unwrap().entropy, 0.0);
    }
}

#[test]
fn shannon_of_dyadic_vector() {
    let v = shannon(&[0.5, 0.25, 0.125, 0.125]);
    assert!((v - 1.75 * std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn tail_support_bound_on_random_vectors() {
    use rand::Rng;
    let mut rng = scalent_core::rng::stream(11, "tail", 0);
    for _ in 0..1000 {
        let n = rng.gen_range(1..40);
        let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>().powi(3)).collect();
        let p = ProbabilityVector::normalized(raw).unwrap().into_vec();
        let delta = rng.gen_range(0.01..0.99);
        let j = tail_support(&p, delta).unwrap();
        let mass: f64 = j.iter().map(|&i| p[i]).sum();
        assert!(mass >= 1.0 - delta - 1e-12);
        assert!((j.len() as f64) <= ((shannon(&p) + 1.0) / delta).exp());
        // The smallest index set reaching the mass has the same size.
        let mut sorted = p.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut acc = 0.0;
        let mut need = 0;
        while acc < 1.0 - delta {
            acc += sorted[need];
            need += 1;
        }
        assert_eq!(j.len(), need);
    }
}

#[test]
fn separated_sets_become_rare_on_the_cube() {
    // Points pairwise more than 0.4 apart form a code of distance 4 in
    // {0,1}^8, which has at most 16 words, so the event dies out.
    let cube = Cube { dim: 8 };
    let freq = |n: usize| {
        (0..20u64)
            .filter(|&r| {
                let t = scalent_core::sample::subsample(&cube, n, 5, r);
                admissibility_event(t.dist(), 0.4, AdmissibilityMethod::Exact).unwrap().event
            })
            .count()
    };
    let (small, large) = (freq(5), freq(40));
    assert!(large < small, "{small} then {large}");
}

#[test]
fn subsamples_of_the_four_cube_stay_below_the_full_entropy() {
    let cube = Cube { dim: 4 };
    let full = cube.triple();
    let table =
        subsample_entropy_bounds(&cube, Some(&full), 0.3, &[1, 64], 50, 3, EpsMethod::Exact, SubsampleScheme::Iid)
            .unwrap();
    assert!(table.rows[0].values.iter().all(|&v| v == 0.0));
    let full_h = table.full.unwrap();
    assert!(table.rows[1].max <= full_h + 1e-12);
    let id = subsample_entropy_bounds(&cube, Some(&full), 0.3, &[16], 1, 0, EpsMethod::Exact, SubsampleScheme::Identity)
        .unwrap();
    assert_eq!(id.rows[0].values[0], full_h);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_cover_matches_enumeration((xy, w) in instance(8), eps in 0.05f64..0.8) {
        let t = planar(&xy, &w);
        let r = eps_entropy(&t, eps, EpsMethod::Exact).unwrap();
        prop_assert_eq!(r.k, cover_oracle(&t, eps));
        prop_assert!(r.cover.unwrap().verify(&t, eps));
    }

    #[test]
    fn greedy_exact_and_packing_are_ordered((xy, w) in instance(12), eps in 0.05f64..0.8) {
        let t = planar(&xy, &w);
        let g = eps_entropy(&t, eps, EpsMethod::Greedy).unwrap();
        let e = eps_entropy(&t, eps, EpsMethod::Exact).unwrap();
        let p = eps_entropy(&t, eps, EpsMethod::PackLb).unwrap();
        prop_assert!(g.k >= e.k && e.k >= p.k, "{} {} {}", g.k, e.k, p.k);
        prop_assert!(g.cover.unwrap().verify(&t, eps));
        prop_assert!(e.value <= (t.n() as f64).ln() + 1e-15);
    }

    #[test]
    fn entropy_is_non_increasing_in_eps((xy, w) in instance(10), a in 0.02f64..1.2, b in 0.02f64..1.2) {
        let t = planar(&xy, &w);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(h(&t, hi) <= h(&t, lo));
    }

    #[test]
    fn entropy_of_a_sum_is_subadditive(
        (xy, w) in coords(8), xy2 in proptest::collection::vec(0.0f64..1.0, 16), eps in 0.05f64..0.6,
    ) {
        let t1 = planar(&xy, &w);
        let t2 = planar(&xy2, &w);
        let sum = DistanceMatrix::from_fn(8, |i, j| t1.dist().get(i, j) + t2.dist().get(i, j)).unwrap();
        let ts = FiniteMetricTriple::new(sum, t1.weights().clone()).unwrap();
        prop_assert!(h(&ts, 2.0 * eps) <= h(&t1, eps) + h(&t2, eps) + 1e-12);
    }

    #[test]
    fn kantorovich_entropy_matches_support_enumeration((xy, w) in instance(6), eps in 0.02f64..0.4) {
        let t = planar(&xy, &w);
        let a = hk_entropy(&t, eps, HkMode::ExactTiny).unwrap();
        prop_assert!((a.entropy - hk_oracle(&t, eps)).abs() < 1e-12);
        prop_assert!(a.cost <= eps - MARGIN);
        let g = hk_entropy(&t, eps, HkMode::Greedy).unwrap();
        prop_assert!(g.cost <= eps - MARGIN && g.entropy >= a.entropy - 1e-12);
    }

    #[test]
    fn kantorovich_lower_sandwich((xy, w) in instance(9), eps in 0.1f64..0.7) {
        let t = planar(&xy, &w);
        let hk = hk_entropy(&t, eps * eps, HkMode::ExactTiny).unwrap().entropy;
        prop_assert!(h(&t, 2.0 * eps) <= (hk + 1.0) / eps + 1e-12);
    }

    #[test]
    fn kantorovich_upper_sandwich((xy, w) in instance(9), eps in 0.05f64..0.8, frac in 0.05f64..0.95) {
        let t = planar(&xy, &w);
        let delta = eps * frac;
        let n = t.n();
        let row: Vec<f64> = (0..n).map(|a| (0..n).map(|x| t.w()[x] * t.dist().get(a, x)).sum()).collect();
        let holds = (1usize..1 << n).all(|m| {
            let ids: Vec<usize> = (0..n).filter(|&i| m >> i & 1 == 1).collect();
            let mass: f64 = ids.iter().map(|&i| t.w()[i]).sum();
            mass >= delta || ids.iter().map(|&i| t.w()[i] * row[i]).sum::<f64>() < eps - delta
        });
        prop_assume!(holds);
        let hk = hk_entropy(&t, eps, HkMode::ExactTiny).unwrap().entropy;
        prop_assert!(hk.exp() <= h(&t, delta).exp() + 1.0 + 1e-9);
    }

    #[test]
    fn entropy_is_semicontinuous_in_the_m_norm(
        (xy, w) in coords(7), jitter in proptest::collection::vec(-0.02f64..0.02, 14),
        eps in 0.05f64..0.6, delta in 0.05f64..0.3,
    ) {
        let t2 = planar(&xy, &w);
        let moved: Vec<f64> = xy.iter().zip(&jitter).map(|(a, b)| a + b).collect();
        let t1 = planar(&moved, &w);
        let diff = SymmetricArray::from_fn(7, |i, j| t1.dist().get(i, j) - t2.dist().get(i, j));
        let gap = m_norm(&diff, t1.w()).unwrap().value;
        prop_assume!(gap < delta * delta / 4.0);
        prop_assert!(h(&t1, eps + delta) <= h(&t2, eps));
    }
}
