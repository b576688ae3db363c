//! Symbolic systems checked against direct constructions.

use std::collections::BTreeMap;

use scalent_core::entropy::{eps_entropy, EpsMethod};
use scalent_core::systems::*;
use scalent_core::ProbabilityVector;

fn thue_morse(len: usize) -> Vec<u8> {
    (0..len).map(|k| (k.count_ones() % 2) as u8).collect()
}

#[test]
fn morse_factor_frequencies_match_parity_counts() {
    let s = Substitution::new(&[('0', "01".into()), ('1', "10".into())], 1 << 16).unwrap();
    let u = thue_morse(1 << 20);
    for n in [2usize, 4, 6] {
        let mut counts: BTreeMap<&[u8], usize> = BTreeMap::new();
        for w in u.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
        let total = (u.len() - n + 1) as f64;
        let f = s.factors(n, 4096).unwrap();
        assert!(f.exact);
        assert_eq!(f.words.len(), counts.len(), "n = {n}");
        for (w, p) in f.words.iter().zip(&f.freqs) {
            let c = counts[w.as_slice()] as f64 / total;
            assert!((p - c).abs() < 1e-5, "{w:?}: {p} vs {c}");
        }
    }
    assert_eq!(s.factors(4, 4096).unwrap().words.len(), 10);
}

#[test]
fn bernoulli_window_law_is_a_product() {
    let b = SymbolicSystem::bernoulli(ProbabilityVector::new(vec![0.3, 0.7]).unwrap()).unwrap();
    let law = b.window_law(3, 4096).unwrap();
    assert_eq!(law.words.len(), 8);
    for (w, p) in law.words.iter().zip(&law.probs) {
        let expect: f64 = w.iter().map(|&a| if a == 0 { 0.3 } else { 0.7 }).product();
        assert!((p - expect).abs() < 1e-15);
    }
}

#[test]
fn adic_level_sizes() {
    let count = |sigma: &[u8], k: usize| {
        // |V_j| squares at sigma_j = 1 and stays put at 0.
        (1..=k).fold(2u128, |c, j| if sigma[j - 1] == 1 { c * c } else { c })
    };
    for sigma in [vec![1u8; 4], vec![0u8; 4], vec![1, 0, 1, 1]] {
        let a = Adic::new(SigmaSchedule::new(sigma.clone()).unwrap());
        for k in 0..=4 {
            let words = a.level_words(k).unwrap();
            assert_eq!(words.len() as u128, count(&sigma, k), "sigma {sigma:?} level {k}");
            assert!(words.iter().all(|w| w.len() == 1 << k));
            assert_eq!(1u128 << a.sigma.log2_size(k).unwrap(), count(&sigma, k));
            if k < 4 {
                assert!(centrality_holds(&a, k).unwrap());
            }
        }
    }
}

#[test]
fn adic_successor_walks_every_position() {
    let a = Adic::new(SigmaSchedule::new(vec![1, 0, 1]).unwrap());
    let top = a.level_words(3).unwrap()[5].clone();
    let mut p = AdicPath::minimal(top.clone()).unwrap();
    let mut seen = vec![p.symbol()];
    while let Some(q) = p.successor() {
        assert_eq!(q.position(), p.position() + 1);
        seen.push(q.symbol());
        p = q;
    }
    assert_eq!(seen, top);
}

/// Least part count for `m` equispaced circle points: drop the longest
/// allowed run, then tile the rest with arcs of the longest allowed span.
fn circle_cover_oracle(m: usize, eps: f64) -> usize {
    let cut = eps - 1e-12;
    let dropped = (0..m).rev().find(|&r| r as f64 / m as f64 <= cut).unwrap();
    let span = (1..=m).rev().find(|&l| (l - 1) as f64 / m as f64 <= cut).unwrap();
    (m - dropped).div_ceil(span)
}

#[test]
fn rotation_cover_counts_match_the_arc_oracle() {
    for m in [12usize, 16, 20] {
        for n in [1usize, 3, 7] {
            let t = RotationTriple::new(0.381966, m).unwrap().triple(n).unwrap();
            for eps in [0.1, 0.2, 0.3] {
                let r = eps_entropy(&t, eps, EpsMethod::Exact).unwrap();
                assert_eq!(r.k, circle_cover_oracle(m, eps), "m {m} n {n} eps {eps}");
            }
        }
    }
}

#[test]
fn omega_distances_match_the_series() {
    let b = SymbolicSystem::bernoulli(ProbabilityVector::uniform(2)).unwrap();
    let (z, terms) = (0.6, 5);
    let o = omega_truncated(&b, z, terms, Realization::exact()).unwrap();
    let law = b.window_law(terms, 4096).unwrap();
    for i in 0..law.words.len() {
        for j in 0..law.words.len() {
            let direct: f64 = (0..terms)
                .filter(|&t| law.words[i][t] != law.words[j][t])
                .map(|t| (1.0 - z) * z.powi(t as i32))
                .sum();
            assert!((o.triple.dist().get(i, j) - direct).abs() < 1e-15);
        }
    }
    assert!((o.tail_bound - z.powi(terms as i32)).abs() < 1e-15);
}

#[test]
fn descriptors_round_trip_to_systems() {
    let d = parse_descriptor("product:(bernoulli:0.5;subst:0=01,1=10)", Some(1 << 12)).unwrap();
    let Descriptor::Symbolic(s) = d else { panic!("expected a symbolic system") };
    assert_eq!(s.channel_weights(), vec![0.5, 0.5]);
    assert!(parse_descriptor("subst:0=10,1=01", Some(64)).is_err());
    assert!(parse_descriptor("adic:1,2", None).is_err());
    assert!(matches!(parse_descriptor("rotation:0.25", None).unwrap(), Descriptor::Rotation(a) if a == 0.25));
}
