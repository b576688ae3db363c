//! Finite semimetrics, probability vectors and metric measure triples.

use serde::{Deserialize, Serialize};

use crate::{Error, Result, SYM_TOL, WEIGHT_TOL};

/// Symmetric, nonnegative `n x n` matrix with zero diagonal satisfying the
/// triangle inequality within [`SYM_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows, rejecting anything that is not a semimetric.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let report = validate(&rows, false)?;
        if !report.ok() {
            return Err(Error::Validation(report.summary()));
        }
        let n = rows.len();
        let mut d = Vec::with_capacity(n * n);
        for r in rows {
            d.extend(r);
        }
        Ok(Self::symmetrized(n, d))
    }

    /// Builds a matrix from `f(i, j)` evaluated for `i < j`, then validates.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        let m = Self::from_upper(n, f);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let report = validate(&rows, false)?;
        if !report.ok() {
            return Err(Error::Validation(report.summary()));
        }
        Ok(m)
    }

    /// Builds a matrix from `f(i, j)` for `i < j` without checking the
    /// triangle inequality. Used for constructions that are semimetrics by
    /// design (Hamming-type and arc-length distances).
    pub fn from_upper(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { n, d }
    }

    /// Builds from a row-major buffer, averaging the two triangles and
    /// zeroing the diagonal. No triangle check.
    pub fn symmetrized(n: usize, mut d: Vec<f64>) -> Self {
        assert_eq!(d.len(), n * n);
        for i in 0..n {
            d[i * n + i] = 0.0;
            for j in i + 1..n {
                let v = 0.5 * (d[i * n + j] + d[j * n + i]);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        DistanceMatrix { n, d }
    }

    pub fn zeros(n: usize) -> Self {
        DistanceMatrix { n, d: vec![0.0; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.d[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.d
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn max_entry(&self) -> f64 {
        self.d.iter().copied().fold(0.0, f64::max)
    }

    /// Restriction to the given indices (repetitions allowed).
    pub fn submatrix(&self, idx: &[usize]) -> DistanceMatrix {
        let m = idx.len();
        let mut d = vec![0.0; m * m];
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                d[a * m + b] = self.get(i, j);
            }
        }
        DistanceMatrix { n: m, d }
    }

    /// Leading principal `k x k` block.
    pub fn minor(&self, k: usize) -> DistanceMatrix {
        let idx: Vec<usize> = (0..k.min(self.n)).collect();
        self.submatrix(&idx)
    }

    pub fn scaled(&self, c: f64) -> DistanceMatrix {
        DistanceMatrix { n: self.n, d: self.d.iter().map(|v| v * c).collect() }
    }

    /// Worst triangle excess `max(d_ik - d_ij - d_jk)`, 0 when none.
    pub fn triangle_excess(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let dij = self.get(i, j);
                let rj = self.row(j);
                let ri = self.row(i);
                for k in 0..n {
                    worst = worst.max(ri[k] - dij - rj[k]);
                }
            }
        }
        worst
    }
}

/// Kind of invariant violated by a candidate distance matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NonzeroDiagonal,
    Asymmetry,
    Triangle,
    /// Only reported in strict mode: distinct points at distance zero.
    ZeroDistance,
}

/// Worst offending instance of one invariant, with its violation count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub count: usize,
    /// Offending indices; for triangles `(i, j, k)` with `d_ik > d_ij + d_jk`.
    pub indices: Vec<usize>,
    pub magnitude: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn worst_triangle(&self) -> Option<&Violation> {
        self.violations.iter().find(|v| v.kind == ViolationKind::Triangle)
    }

    pub fn summary(&self) -> String {
        if self.ok() {
            return format!("{} points, no violations", self.n);
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| format!("{:?} x{} worst {:?} by {:.3e}", v.kind, v.count, v.indices, v.magnitude))
            .collect();
        parts.join("; ")
    }
}

fn note(slot: &mut Option<Violation>, kind: ViolationKind, idx: Vec<usize>, mag: f64) {
    match slot {
        Some(v) => {
            v.count += 1;
            if mag > v.magnitude {
                v.magnitude = mag;
                v.indices = idx;
            }
        }
        None => *slot = Some(Violation { kind, count: 1, indices: idx, magnitude: mag }),
    }
}

/// Checks a raw matrix. Shape problems and non-finite or negative entries
/// are errors; invariant violations are collected in the report.
pub fn validate(rows: &[Vec<f64>], strict: bool) -> Result<ValidationReport> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Structure(format!("row {i} has {} entries, expected {n}", r.len())));
        }
        for (j, &v) in r.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::Value(format!("entry ({i},{j}) is not finite")));
            }
            if v < 0.0 {
                return Err(Error::Value(format!("entry ({i},{j}) = {v} is negative")));
            }
        }
    }
    let mut diag = None;
    let mut asym = None;
    let mut tri = None;
    let mut zero = None;
    for i in 0..n {
        if rows[i][i].abs() > SYM_TOL {
            note(&mut diag, ViolationKind::NonzeroDiagonal, vec![i], rows[i][i]);
        }
        for j in i + 1..n {
            let gap = (rows[i][j] - rows[j][i]).abs();
            if gap > SYM_TOL {
                note(&mut asym, ViolationKind::Asymmetry, vec![i, j], gap);
            }
            if strict && rows[i][j] == 0.0 && rows[j][i] == 0.0 {
                note(&mut zero, ViolationKind::ZeroDistance, vec![i, j], 0.0);
            }
        }
    }
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            let dik = rows[i][k];
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let excess = dik - rows[i][j] - rows[j][k];
                if excess > SYM_TOL {
                    note(&mut tri, ViolationKind::Triangle, vec![i, j, k], excess);
                }
            }
        }
    }
    let violations = [diag, asym, tri, zero].into_iter().flatten().collect();
    Ok(ValidationReport { n, violations })
}

/// Nonnegative weights summing to one within [`WEIGHT_TOL`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::Structure("empty probability vector".into()));
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Value(format!("weight {i} = {v} is not a nonnegative number")));
            }
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Value(format!("weights sum to {s}, not 1")));
        }
        Ok(ProbabilityVector { p })
    }

    /// Rescales nonnegative masses to total one.
    pub fn normalized(p: Vec<f64>) -> Result<Self> {
        let s: f64 = p.iter().sum();
        if !(s > 0.0) || p.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Value("masses must be nonnegative with positive total".into()));
        }
        Ok(ProbabilityVector { p: p.into_iter().map(|v| v / s).collect() })
    }

    pub fn uniform(n: usize) -> Self {
        ProbabilityVector { p: vec![1.0 / n as f64; n] }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.p
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.p.len() as f64;
        self.p.iter().all(|&v| (v - u).abs() <= WEIGHT_TOL)
    }
}

impl std::ops::Index<usize> for ProbabilityVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.p[i]
    }
}

/// A finite metric measure triple `(X, mu, rho)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricTriple {
    dist: DistanceMatrix,
    weights: ProbabilityVector,
    labels: Option<Vec<String>>,
}

impl FiniteMetricTriple {
    /// Requires strictly positive weights.
    pub fn new(dist: DistanceMatrix, weights: ProbabilityVector) -> Result<Self> {
        if let Some(i) = weights.as_slice().iter().position(|&w| w <= 0.0) {
            return Err(Error::Value(format!("weight {i} is zero; use new_degenerate to allow it")));
        }
        Self::new_degenerate(dist, weights)
    }

    /// Allows zero weights.
    pub fn new_degenerate(dist: DistanceMatrix, weights: ProbabilityVector) -> Result<Self> {
        if dist.n() != weights.len() {
            return Err(Error::Structure(format!(
                "matrix has {} points but {} weights",
                dist.n(),
                weights.len()
            )));
        }
        Ok(FiniteMetricTriple { dist, weights, labels: None })
    }

    pub fn uniform(dist: DistanceMatrix) -> Self {
        let n = dist.n();
        FiniteMetricTriple { dist, weights: ProbabilityVector::uniform(n), labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::Structure("label count differs from point count".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.dist.n()
    }

    pub fn dist(&self) -> &DistanceMatrix {
        &self.dist
    }

    pub fn weights(&self) -> &ProbabilityVector {
        &self.weights
    }

    pub fn w(&self) -> &[f64] {
        self.weights.as_slice()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `sum_ij w_i w_j d_ij`.
    pub fn mean_distance(&self) -> f64 {
        let w = self.w();
        let mut s = 0.0;
        for i in 0..self.n() {
            let r = self.dist.row(i);
            let mut t = 0.0;
            for j in 0..self.n() {
                t += w[j] * r[j];
            }
            s += w[i] * t;
        }
        s
    }

    /// Merges points at distance zero, summing their weights. The lowest
    /// index of each block is kept as representative.
    pub fn quotient_zero_blocks(&self) -> FiniteMetricTriple {
        let n = self.n();
        let mut rep: Vec<usize> = (0..n).collect();
        for i in 0..n {
            if rep[i] != i {
                continue;
            }
            for j in i + 1..n {
                if rep[j] == j && self.dist.get(i, j) == 0.0 {
                    rep[j] = i;
                }
            }
        }
        let keep: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
        let mut w = vec![0.0; keep.len()];
        for i in 0..n {
            let slot = keep.binary_search(&rep[i]).expect("representative kept");
            w[slot] += self.w()[i];
        }
        let labels = self.labels.as_ref().map(|l| keep.iter().map(|&i| l[i].clone()).collect());
        FiniteMetricTriple {
            dist: self.dist.submatrix(&keep),
            weights: ProbabilityVector { p: w },
            labels,
        }
    }

    /// Rescales distances so that the mean distance is one.
    pub fn normalize_mean(&self) -> Result<FiniteMetricTriple> {
        let m = self.mean_distance();
        if !(m > 0.0) {
            return Err(Error::Value("mean distance is zero; cannot normalize".into()));
        }
        Ok(FiniteMetricTriple {
            dist: self.dist.scaled(1.0 / m),
            weights: self.weights.clone(),
            labels: self.labels.clone(),
        })
    }

    /// Restriction to `idx`, renormalizing weights.
    pub fn restrict(&self, idx: &[usize]) -> Result<FiniteMetricTriple> {
        let w: Vec<f64> = idx.iter().map(|&i| self.w()[i]).collect();
        Ok(FiniteMetricTriple {
            dist: self.dist.submatrix(idx),
            weights: ProbabilityVector::normalized(w)?,
            labels: self.labels.as_ref().map(|l| idx.iter().map(|&i| l[i].clone()).collect()),
        })
    }

    /// Relabels points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> FiniteMetricTriple {
        FiniteMetricTriple {
            dist: self.dist.submatrix(perm),
            weights: ProbabilityVector { p: perm.iter().map(|&i| self.w()[i]).collect() },
            labels: self.labels.as_ref().map(|l| perm.iter().map(|&i| l[i].clone()).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_violation_reported_with_worst_triple() {
        let rows = vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        let rep = validate(&rows, false).unwrap();
        let t = rep.worst_triangle().unwrap();
        assert_eq!(t.indices, vec![0, 1, 2]);
        assert!((t.magnitude - 1.0).abs() < 1e-12);
        assert_eq!(t.count, 2);
        assert!(DistanceMatrix::from_rows(rows).is_err());
    }

    #[test]
    fn structural_and_value_errors() {
        assert!(matches!(validate(&[vec![0.0, 1.0]], false), Err(Error::Structure(_))));
        assert!(matches!(validate(&[vec![0.0, -1.0], vec![-1.0, 0.0]], false), Err(Error::Value(_))));
        assert!(matches!(validate(&[vec![0.0, f64::NAN], vec![1.0, 0.0]], false), Err(Error::Value(_))));
    }

    #[test]
    fn strict_mode_flags_zero_distances() {
        let rows = vec![vec![0.0, 0.0], vec![0.0, 0.0]];
        assert!(validate(&rows, false).unwrap().ok());
        let rep = validate(&rows, true).unwrap();
        assert_eq!(rep.violations[0].kind, ViolationKind::ZeroDistance);
    }

    #[test]
    fn single_point_is_valid_and_quotient_merges_zero_block() {
        let t = FiniteMetricTriple::uniform(DistanceMatrix::zeros(1));
        assert_eq!(t.mean_distance(), 0.0);
        let d = DistanceMatrix::from_rows(vec![
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let t = FiniteMetricTriple::uniform(d);
        let q = t.quotient_zero_blocks();
        assert_eq!(q.n(), 2);
        assert!((q.w()[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((q.mean_distance() - t.mean_distance()).abs() < 1e-15);
    }

    #[test]
    fn all_zero_matrix_cannot_be_normalized() {
        let t = FiniteMetricTriple::uniform(DistanceMatrix::zeros(3));
        assert!(t.normalize_mean().is_err());
    }

    #[test]
    fn probability_vector_checks() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.5, -0.5]).is_err());
        let d = DistanceMatrix::zeros(2);
        let w = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
        assert!(FiniteMetricTriple::new(d.clone(), w.clone()).is_err());
        assert!(FiniteMetricTriple::new_degenerate(d, w).is_ok());
    }
}
