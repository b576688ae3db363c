//! Class fitting calibration and grid functionals on known profiles.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use scalent_core::scaling::*;
use scalent_core::systems::*;
use scalent_core::ProbabilityVector;

fn record(eps: f64, n: usize, h: f64) -> ProfileRecord {
    ProfileRecord {
        eps,
        n,
        h,
        method: "exact".into(),
        replicas: 0,
        seed: 0,
        ci_low: h,
        ci_high: h,
        exact: true,
        error: None,
    }
}

fn profile(rows: &[(f64, Vec<(usize, f64)>)]) -> EntropyProfile {
    EntropyProfile {
        system: "synthetic".into(),
        unit: "nats".into(),
        records: rows.iter().flat_map(|(e, pts)| pts.iter().map(move |&(n, h)| record(*e, n, h))).collect(),
    }
}

#[derive(Clone, Copy, Debug)]
enum Planted {
    Bounded,
    Log,
    Power,
    Linear,
    Exp,
}

impl Planted {
    fn value(self, n: f64) -> f64 {
        match self {
            Planted::Bounded => 3.0,
            Planted::Log => 1.5 * n.ln(),
            Planted::Power => 0.8 * n.sqrt(),
            Planted::Linear => 0.05 * n,
            Planted::Exp => (0.002 * n).exp(),
        }
    }

    fn kind(self) -> &'static str {
        match self {
            Planted::Bounded => "bounded",
            Planted::Log => "log-power",
            Planted::Power => "power",
            Planted::Linear => "linear",
            Planted::Exp => "exp",
        }
    }
}

#[test]
fn planted_classes_are_recovered_at_two_percent_noise() {
    let th = Thresholds::default();
    let grid: Vec<usize> = (4..=12).map(|k| 1usize << k).collect();
    let classes = [Planted::Bounded, Planted::Log, Planted::Power, Planted::Linear, Planted::Exp];
    let noise = Normal::new(0.0, 0.02).unwrap();
    let mut hits = 0;
    let mut misses = Vec::new();
    for trial in 0..100u64 {
        let c = classes[trial as usize % classes.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let pts: Vec<(usize, f64)> =
            grid.iter().map(|&n| (n, c.value(n as f64) * (1.0 + noise.sample(&mut rng)))).collect();
        let rep = fit_class(&profile(&[(0.2, pts)]), &Candidate::auto(), 16, &th).unwrap();
        if rep.per_eps[0].label.kind() == c.kind() {
            hits += 1;
        } else {
            misses.push((trial, c, rep.per_eps[0].label.to_string()));
        }
    }
    let rate = hits as f64 / 100.0;
    assert!(rate >= th.calibration_rate, "recovered {rate}, misses {misses:?}");
}

#[test]
fn too_few_points_and_custom_labels() {
    let th = Thresholds::default();
    let short = profile(&[(0.1, vec![(16, 1.0), (32, 2.0), (64, 3.0)])]);
    assert!(matches!(
        fit_class(&short, &Candidate::auto(), 1, &th),
        Err(scalent_core::Error::InsufficientData(_))
    ));
    // Quadratic growth lies outside the family.
    let quad: Vec<(usize, f64)> = (4..=10).map(|k| (1usize << k, ((1usize << k) as f64).powi(2))).collect();
    let rep = fit_class(&profile(&[(0.1, quad)]), &[Candidate::Power, Candidate::LogPower], 1, &th).unwrap();
    assert_eq!(rep.per_eps[0].label.kind(), "custom");
}

#[test]
fn stability_needs_agreeing_labels_and_bounded_spread() {
    let th = Thresholds::default();
    let grid: Vec<usize> = (4..=9).map(|k| 1usize << k).collect();
    let row = |c: f64| grid.iter().map(|&n| (n, c * n as f64)).collect::<Vec<_>>();
    let ok = stability_check(&profile(&[(0.1, row(0.2)), (0.2, row(0.1))]), &Candidate::auto(), 1, &th).unwrap();
    assert_eq!(ok.verdict, Verdict::Stable);
    let spread = stability_check(&profile(&[(0.1, row(5.0)), (0.2, row(0.1))]), &Candidate::auto(), 1, &th).unwrap();
    assert_eq!(spread.verdict, Verdict::Unstable);
    assert!((spread.ratio - 50.0).abs() < 1e-9);
    let flat: Vec<(usize, f64)> = grid.iter().map(|&n| (n, 2.0)).collect();
    let mixed = stability_check(&profile(&[(0.1, row(0.01)), (0.2, flat)]), &Candidate::auto(), 1, &th).unwrap();
    assert_eq!(mixed.verdict, Verdict::Unstable);
}

#[test]
fn entropy_dimension_reads_tail_slopes() {
    let th = Thresholds::default();
    let grid: Vec<usize> = (2..=10).map(|k| 1usize << k).collect();
    let sqrt: Vec<(usize, f64)> = grid.iter().map(|&n| (n, (n as f64).sqrt())).collect();
    let flat: Vec<(usize, f64)> = grid.iter().map(|&n| (n, 1.0)).collect();
    let d = entropy_dimension(&profile(&[(0.1, sqrt), (0.3, flat)]), 1, &th).unwrap();
    assert!((d.upper - 0.5).abs() < 1e-12 && (d.lower - 0.5).abs() < 1e-12);
    assert_eq!(d.rows[1].upper, 0.0);
}

#[test]
fn slow_entropy_edge_cases() {
    let th = Thresholds::default();
    let ts: Vec<f64> = (0..=20).map(|k| k as f64 * 0.1).collect();
    let grid: Vec<usize> = (1..=8).map(|k| 1usize << k).collect();
    let bounded = profile(&[(0.2, grid.iter().map(|&n| (n, 1.7)).collect())]);
    let rows = slow_entropy(&bounded, ScaleFamily::Power, &ts, 1, &th).unwrap();
    assert_eq!((rows[0].upper, rows[0].lower), (0.0, 0.0));
    let growing = profile(&[(0.2, grid.iter().map(|&n| (n, (n as f64).ln())).collect())]);
    let consts: Vec<f64> = (1..=50).map(|k| k as f64).collect();
    let rows = slow_entropy(&growing, ScaleFamily::Constant, &consts, 1, &th).unwrap();
    assert!(rows[0].upper_unbounded && rows[0].lower_unbounded && rows[0].upper.is_infinite());
    assert!(slow_entropy(&growing, ScaleFamily::Constant, &[0.0, 1.0], 1, &th).is_err());
    // Negative t is allowed; exp(t n) stays increasing in t.
    assert!(slow_entropy(&growing, ScaleFamily::Exp, &[-1.0, 0.5], 1, &th).is_ok());
}

fn bernoulli_grid(eps: f64, ns: &[usize]) -> EntropyProfile {
    let b = SymbolicSystem::bernoulli(ProbabilityVector::uniform(2)).unwrap();
    phi_grid(&GridSource::Averaged(&b), &[eps], ns, &GridOptions::default()).unwrap()
}

#[test]
fn bernoulli_exact_grid_slow_entropy_and_subadditivity() {
    let th = Thresholds::default();
    let ns: Vec<usize> = (2..=10).collect();
    let p = bernoulli_grid(0.2, &ns);
    assert_eq!(p.series(0.2).len(), ns.len());
    let ts: Vec<f64> = (1..=100).map(|k| k as f64 * 0.01).collect();
    let rows = slow_entropy(&p, ScaleFamily::Exp, &ts, 1, &th).unwrap();
    for v in [rows[0].upper, rows[0].lower] {
        assert!(v > 0.0 && v <= std::f64::consts::LN_2, "{rows:?}");
    }
    assert!(subadditivity_violations(&p, 0.2, th.subadditivity_slack).is_empty());
    // The bits profile is the same numbers rescaled.
    let bits = p.in_base(scalent_core::LogBase::Bits).unwrap();
    let back = EntropyProfile::from_csv(&bits.to_csv()).unwrap();
    assert_eq!(back, bits);
}

#[test]
fn adic_exact_grids_are_subadditive() {
    let th = Thresholds::default();
    for sigma in [vec![1u8; 4], vec![1, 0, 1, 1]] {
        let a = SymbolicSystem::adic(SigmaSchedule::new(sigma).unwrap());
        let p = phi_grid(&GridSource::Averaged(&a), &[0.2], &[1, 2, 3, 4, 5, 6, 7, 8], &GridOptions::default()).unwrap();
        assert!(p.series(0.2).len() >= 6, "{}", p.to_csv());
        assert!(subadditivity_violations(&p, 0.2, th.subadditivity_slack).is_empty());
    }
}

#[test]
fn product_profile_dominates_children() {
    let b = SymbolicSystem::bernoulli(ProbabilityVector::uniform(2)).unwrap();
    let m = SymbolicSystem::morse(1 << 14).unwrap();
    let prod = SymbolicSystem::product(vec![b.clone(), m.clone()]).unwrap();
    let eps = [0.2, 0.3];
    let ns = [1, 2, 3, 4];
    let pp = phi_grid(&GridSource::Averaged(&prod), &eps, &ns, &GridOptions::default()).unwrap();
    for child in [&b, &m] {
        let pc = phi_grid(&GridSource::Averaged(child), &eps, &ns, &GridOptions::default()).unwrap();
        let mut matched = 0;
        for r in pc.records.iter().filter(|r| r.ok()) {
            if let Some(q) = pp.get(r.eps, r.n).filter(|q| q.ok() && q.exact && r.exact) {
                matched += 1;
                assert!(q.h >= r.h - 1e-12, "{} eps {} n {}: {} < {}", child.name(), r.eps, r.n, q.h, r.h);
            }
        }
        assert!(matched >= 6);
    }
}

#[test]
fn rotation_profile_is_bounded_and_exactly_flat() {
    let th = Thresholds::default();
    let src = GridSource::Rotation(RotationTriple::new(0.381966, 64).unwrap());
    let ns: Vec<usize> = (1..=32).collect();
    let p = phi_grid(&src, &[0.1, 0.2], &ns, &GridOptions::default()).unwrap();
    for e in [0.1, 0.2] {
        let s = p.series(e);
        assert!(s.iter().all(|x| x.1 == s[0].1));
    }
    let rep = fit_class(&p, &Candidate::auto(), 1, &th).unwrap();
    assert!(rep.per_eps.iter().all(|r| r.label == ClassLabel::Bounded));
    assert_eq!(rep.consistency, Verdict::Stable);
}
