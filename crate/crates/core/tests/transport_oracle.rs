//! Transport and m-norm results checked against brute-force vertex
//! enumeration.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use scalent_core::transport::{m_norm, transport, SymmetricArray};

/// Minimum of a linear objective over `{x : A x >= b}` by enumerating every
/// square subsystem of active constraints.
fn vertex_min(obj: &[f64], a: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = obj.len();
    let m = a.len();
    let mut best = f64::INFINITY;
    let mut pick: Vec<usize> = (0..n).collect();
    loop {
        let sys = DMatrix::from_fn(n, n, |r, c| a[pick[r]][c]);
        let rhs = DVector::from_fn(n, |r, _| b[pick[r]]);
        if let Some(x) = sys.clone().lu().solve(&rhs) {
            if (&sys * &x - &rhs).amax() < 1e-9 {
                let feasible = (0..m).all(|r| a[r].iter().zip(x.iter()).map(|(p, q)| p * q).sum::<f64>() >= b[r] - 1e-9);
                if feasible {
                    let v: f64 = obj.iter().zip(x.iter()).map(|(p, q)| p * q).sum();
                    best = best.min(v);
                }
            }
        }
        let mut i = n;
        loop {
            if i == 0 {
                return best;
            }
            i -= 1;
            if pick[i] < m - n + i {
                break;
            }
        }
        pick[i] += 1;
        for k in i + 1..n {
            pick[k] = pick[k - 1] + 1;
        }
    }
}

fn transport_oracle(cost: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len(), b.len());
    let nv = n1 * n2;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for v in 0..nv {
        let mut r = vec![0.0; nv];
        r[v] = 1.0;
        rows.push(r);
        rhs.push(0.0);
    }
    for i in 0..n1 {
        let r: Vec<f64> = (0..nv).map(|v| if v / n2 == i { 1.0 } else { 0.0 }).collect();
        rows.push(r.iter().map(|x| -x).collect());
        rhs.push(-a[i]);
        rows.push(r);
        rhs.push(a[i]);
    }
    for j in 0..n2 {
        let r: Vec<f64> = (0..nv).map(|v| if v % n2 == j { 1.0 } else { 0.0 }).collect();
        rows.push(r.iter().map(|x| -x).collect());
        rhs.push(-b[j]);
        rows.push(r);
        rhs.push(b[j]);
    }
    vertex_min(cost, &rows, &rhs)
}

fn mnorm_oracle(n: usize, f: &[f64], w: &[f64]) -> f64 {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    let idx = |i: usize, j: usize| pairs.iter().position(|&p| p == (i.min(j), i.max(j))).unwrap();
    let nv = pairs.len();
    let obj: Vec<f64> = pairs.iter().map(|&(i, j)| 2.0 * w[i] * w[j]).collect();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (v, &(i, j)) in pairs.iter().enumerate() {
        let mut r = vec![0.0; nv];
        r[v] = 1.0;
        rows.push(r);
        rhs.push(f[i * n + j].abs());
    }
    for i in 0..n {
        for k in i + 1..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let mut r = vec![0.0; nv];
                r[idx(i, k)] -= 1.0;
                r[idx(i, j)] += 1.0;
                r[idx(j, k)] += 1.0;
                rows.push(r);
                rhs.push(0.0);
            }
        }
    }
    vertex_min(&obj, &rows, &rhs)
}

fn simplex_point(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|v| v / s).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transport_matches_vertex_enumeration(
        n1 in 1usize..4, n2 in 1usize..4,
        ra in proptest::collection::vec(0.05f64..1.0, 3),
        rb in proptest::collection::vec(0.05f64..1.0, 3),
        cost in proptest::collection::vec(0.0f64..1.0, 9),
    ) {
        let a = simplex_point(&ra[..n1]);
        let b = simplex_point(&rb[..n2]);
        let c: Vec<f64> = cost[..n1 * n2].to_vec();
        let s = transport(&c, &a, &b).unwrap();
        let o = transport_oracle(&c, &a, &b);
        prop_assert!((s.value - o).abs() < 1e-9, "{} vs {}", s.value, o);
        prop_assert!(s.gap < 1e-9);
        for (x, y) in s.plan.row_sums().iter().zip(&a) { prop_assert!((x - y).abs() < 1e-9); }
        for (x, y) in s.plan.col_sums().iter().zip(&b) { prop_assert!((x - y).abs() < 1e-9); }
    }

    #[test]
    fn mnorm_matches_basis_enumeration(
        n in 2usize..5,
        raw in proptest::collection::vec(-1.0f64..1.0, 16),
        rw in proptest::collection::vec(0.05f64..1.0, 4),
    ) {
        let w = simplex_point(&rw[..n]);
        let sym = SymmetricArray::from_fn(n, |i, j| raw[i * 4 + j]);
        let f: Vec<f64> = (0..n * n).map(|k| sym.get(k / n, k % n)).collect();
        let r = m_norm(&sym, &w).unwrap();
        let o = mnorm_oracle(n, &f, &w);
        prop_assert!((r.value - o).abs() < 1e-8, "{} vs {}", r.value, o);
        prop_assert!(r.dominating.triangle_excess() <= 1e-9);
        for i in 0..n { for j in 0..n {
            prop_assert!(r.dominating.get(i, j) >= f[i * n + j].abs() - 1e-9);
        }}
    }
}

#[test]
fn transport_scales_to_a_few_hundred_points() {
    let n = 150;
    let a = vec![1.0 / n as f64; n];
    let cost: Vec<f64> = (0..n * n).map(|k| (((k / n) as f64) - ((k % n) as f64 * 0.7)).abs()).collect();
    let s = transport(&cost, &a, &a).unwrap();
    assert!(s.gap < 1e-9);
}
